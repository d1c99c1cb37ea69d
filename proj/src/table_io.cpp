#include "ssg/table_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ssg/errors.hpp"

namespace ssg {

namespace fs = std::filesystem;

std::vector<std::vector<std::uint16_t>> flags_from_depths(const std::vector<std::vector<std::uint8_t>>& depth,
                                                         int flag_depth) {
  std::vector<std::vector<std::uint16_t>> out;
  for (const auto& sphere : depth) {
    std::vector<std::uint16_t> f(sphere.size(), 0);
    for (std::size_t i = 0; i < sphere.size(); ++i) {
      const int d = std::min<int>(sphere[i], flag_depth);
      f[i] = static_cast<std::uint16_t>((1u << d) - 1);
    }
    out.push_back(std::move(f));
  }
  return out;
}

void save_table(const std::string& path, const PersistedTable& t) {
  if (t.flag_depth < 0 || t.flag_depth > kMaxFlagDepth) throw DomainError("flag depth must be at most 16");
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  // Write then rename, so readers never see a half-written table.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw FormatError("cannot write " + path);
    out << "ssg-table\n"
        << "format_version " << t.format_version << "\n"
        << "group_hash " << t.group_hash << "\n"
        << "level " << t.level << "\n"
        << "max_radius " << t.table.max_radius() << "\n"
        << "truncated " << (t.truncated ? 1 : 0) << "\n"
        << "flag_depth " << t.flag_depth << "\n";
    std::size_t rows = 0;
    for (const auto& s : t.table.spheres) rows += s.size();
    out << "rows " << rows << "\n";
    for (const auto& s : t.table.spheres) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        out << s.radius << '\t';
        for (std::size_t k = 0; k < s.stride(); ++k) {
          if (k) out << ',';
          out << s.letters[i * s.stride() + k];
        }
        const std::uint16_t f = t.flag_depth > 0 ? t.flags.at(s.radius).at(i) : 0;
        out << '\t' << s.parent[i] << '\t' << std::hex << f << std::dec << '\n';
      }
    }
    if (!out) throw FormatError("write failed for " + path);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw FormatError("cannot move table into place at " + path + ": " + ec.message());
}

PersistedTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path);
  auto bad = [&](const std::string& why) { return FormatError(path + ": " + why); };
  std::string line;
  if (!std::getline(in, line) || line != "ssg-table") throw bad("not a table file");
  PersistedTable t;
  auto header = [&](const std::string& key) {
    if (!std::getline(in, line)) throw bad("truncated header");
    std::istringstream ss(line);
    std::string k, v;
    ss >> k >> v;
    if (k != key || v.empty()) throw bad("expected header field " + key);
    return v;
  };
  int max_radius = 0;
  std::size_t rows = 0;
  try {
    t.format_version = std::stoi(header("format_version"));
    if (t.format_version != kTableFormatVersion) throw bad("unsupported format_version");
    t.group_hash = header("group_hash");
    t.level = std::stoul(header("level"));
    max_radius = std::stoi(header("max_radius"));
    t.truncated = header("truncated") == "1";
    t.flag_depth = std::stoi(header("flag_depth"));
    rows = std::stoul(header("rows"));
  } catch (const std::logic_error&) {
    throw bad("bad header value");
  }
  if (max_radius < 0 || t.flag_depth < 0 || t.flag_depth > kMaxFlagDepth) throw bad("header out of range");
  t.table.level_idx = t.level;
  t.table.truncated = t.truncated;
  t.table.spheres.resize(max_radius + 1);
  t.flags.resize(max_radius + 1);
  for (int n = 0; n <= max_radius; ++n) t.table.spheres[n].radius = n;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw bad("fewer rows than declared");
    std::istringstream ss(line);
    int n;
    std::string letters;
    std::uint32_t parent;
    std::string flags;
    if (!(ss >> n >> letters >> parent >> flags) || n < 0 || n > max_radius) throw bad("bad row " + std::to_string(r));
    Sphere& s = t.table.spheres[n];
    std::istringstream ls(letters);
    std::string tok;
    std::size_t count = 0;
    while (std::getline(ls, tok, ',')) {
      s.letters.push_back(static_cast<Letter>(std::stoul(tok)));
      ++count;
    }
    if (count != s.stride()) throw bad("row " + std::to_string(r) + " has the wrong word length");
    s.parent.push_back(parent);
    t.flags[n].push_back(static_cast<std::uint16_t>(std::stoul(flags, nullptr, 16)));
  }
  return t;
}

void trim(PersistedTable& t, int radius) {
  if (t.table.max_radius() <= radius) return;
  t.table.spheres.resize(radius + 1);
  t.flags.resize(radius + 1);
  t.truncated = false;
  t.table.truncated = false;
}

std::string cache_path(const std::string& dir, const std::string& hash, std::size_t level, int radius) {
  return (fs::path(dir) / (hash + "_L" + std::to_string(level) + "_R" + std::to_string(radius) + ".tbl")).string();
}

std::optional<std::string> find_cached(const std::string& dir, const std::string& hash, std::size_t level,
                                       int radius) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return std::nullopt;
  const std::string prefix = hash + "_L" + std::to_string(level) + "_R";
  std::optional<std::pair<int, std::string>> best;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    const std::string name = e.path().filename().string();
    if (name.rfind(prefix, 0) != 0 || e.path().extension() != ".tbl") continue;
    const std::string r = name.substr(prefix.size(), name.size() - prefix.size() - 4);
    if (r.empty() || r.find_first_not_of("0123456789") != std::string::npos) continue;
    const int rr = std::stoi(r);
    if (rr >= radius && (!best || rr < best->first)) best = {rr, e.path().string()};
  }
  if (!best) return std::nullopt;
  return best->second;
}

}  // namespace ssg
