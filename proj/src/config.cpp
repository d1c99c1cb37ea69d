#include "ssg/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "ssg/catalog.hpp"
#include "ssg/errors.hpp"

namespace ssg {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("config: missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

Perm perm_of(const json& j, int degree) {
  std::vector<int> images;
  try {
    images = j.get<std::vector<int>>();
  } catch (const json::exception&) {
    throw FormatError("config: a permutation must be an array of integers");
  }
  if (static_cast<int>(images.size()) != degree) {
    throw DomainError("permutation " + j.dump() + " does not have degree " + std::to_string(degree));
  }
  try {
    return Perm::from_one_line(images);
  } catch (const std::invalid_argument&) {
    throw DomainError(j.dump() + " is not a permutation in one-line notation");
  }
}

std::vector<OmegaLevel> omega_levels(const json& j, int degree) {
  std::vector<OmegaLevel> out;
  if (!j.is_array()) throw FormatError("config: omega levels must be arrays");
  for (const json& level : j) {
    OmegaLevel ol;
    for (const json& hom : level) {
      Homomorphism h;
      for (const json& img : hom) h.push_back(perm_of(img, degree));
      ol.push_back(std::move(h));
    }
    out.push_back(std::move(ol));
  }
  return out;
}

FamilySpec build_spinal(const json& j) {
  SpinalData d;
  d.name = get_or<std::string>(j, "name", "spinal");
  d.degree = get<int>(j, "degree");
  d.b_orders = get<std::vector<int>>(j, "b_orders");
  if (j.contains("a_generators")) {
    for (const json& p : j.at("a_generators")) d.a_generators.push_back(perm_of(p, d.degree));
  }
  if (j.contains("preperiod")) d.preperiod = omega_levels(j.at("preperiod"), d.degree);
  d.period = omega_levels(field(j, "period"), d.degree);
  d.unit_names = get_or<std::vector<std::string>>(j, "unit_names", {});
  return spinal(d);
}

// Custom families: named generators of length 0 (rooted, one permutation per
// level) or 1 (a root and d child words per level).
FamilySpec build_custom(const json& j) {
  const int degree = get<int>(j, "degree");
  FamilyBuilder b(get_or<std::string>(j, "name", "custom"), degree);
  std::map<std::string, Letter> units;
  std::vector<std::string> zeros;
  std::map<std::string, std::string> inverse;
  for (const json& g : field(j, "generators")) {
    const auto name = get<std::string>(g, "name");
    const int len = get<int>(g, "length");
    if (name == "1" || units.count(name) || std::find(zeros.begin(), zeros.end(), name) != zeros.end()) {
      throw FormatError("config: generator name '" + name + "' repeated or reserved");
    }
    if (len == 0) {
      zeros.push_back(name);
    } else if (len == 1) {
      units[name] = b.add_unit(name);
      inverse[name] = get_or<std::string>(g, "inverse", name);
    } else {
      throw FormatError("config: generator length must be 0 or 1");
    }
  }
  auto unit_of = [&](const std::string& n) {
    auto it = units.find(n);
    if (it == units.end()) throw FormatError("config: unknown unit '" + n + "'");
    return it->second;
  };
  for (const auto& [name, inv] : inverse) b.set_inverse(unit_of(name), unit_of(inv));
  if (j.contains("relations")) {
    for (const json& r : j.at("relations")) {
      const auto t = r.get<std::vector<std::string>>();
      if (t.size() != 3) throw FormatError("config: a relation is [x, y, product]");
      b.add_fusion(unit_of(t[0]), unit_of(t[1]), t[2] == "1" ? std::nullopt : std::optional<Letter>(unit_of(t[2])));
    }
  }

  const json pre = j.contains("preperiod") ? j.at("preperiod") : json::array();
  const json& per = field(j, "period");
  if (!pre.is_array() || !per.is_array() || per.empty()) throw FormatError("config: period must be a nonempty array");
  auto level_json = [&](bool periodic, std::size_t i) -> const json& { return periodic ? per.at(i) : pre.at(i); };
  auto next_of = [&](bool periodic, std::size_t i) -> const json& {
    if (!periodic) return i + 1 < pre.size() ? pre.at(i + 1) : per.at(0);
    return per.at((i + 1) % per.size());
  };
  auto rooted_perm = [&](const json& level, const std::string& name) {
    const json& g = field(level, name.c_str());
    if (g.contains("children") && !g.at("children").empty()) {
      throw DomainError("generator '" + name + "' has length 0 but nontrivial children");
    }
    return perm_of(field(g, "root"), degree);
  };

  for (int pass = 0; pass < 2; ++pass) {
    const bool periodic = pass == 1;
    const std::size_t count = periodic ? per.size() : pre.size();
    for (std::size_t i = 0; i < count; ++i) {
      b.add_level(periodic);
      const json& level = level_json(periodic, i);
      const json& next = next_of(periodic, i);
      for (const std::string& z : zeros) {
        if (level.contains(z)) b.add_zero_generator(periodic, i, z, rooted_perm(level, z));
      }
      for (const auto& [name, u] : units) {
        const json& g = field(level, name.c_str());
        std::vector<RawWord> children;
        for (const json& child : field(g, "children")) {
          RawWord w;
          for (const json& tok : child) {
            if (tok.is_array()) {
              w.push_back(RawLetter::of_perm(perm_of(tok, degree)));
            } else if (tok.get<std::string>() == "1") {
            } else if (units.count(tok.get<std::string>())) {
              w.push_back(RawLetter::of_unit(units.at(tok.get<std::string>())));
            } else {
              w.push_back(RawLetter::of_perm(rooted_perm(next, tok.get<std::string>())));
            }
          }
          children.push_back(std::move(w));
        }
        b.set_unit_rule(periodic, i, u, perm_of(field(g, "root"), degree), std::move(children));
      }
    }
  }
  return b.build();
}

}  // namespace

GroupConfig parse_config(const std::string& text) {
  GroupConfig c;
  try {
    c.document = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  if (!c.document.is_object()) throw FormatError("config: top level must be an object");
  c.kind = get<std::string>(c.document, "kind");
  if (c.document.contains("caps")) {
    const json& caps = c.document.at("caps");
    c.caps.max_radius = get_or<int>(caps, "max_radius", c.caps.max_radius);
    c.caps.max_elements = get_or<std::uint64_t>(caps, "max_elements", c.caps.max_elements);
    c.caps.max_level_depth = get_or<int>(caps, "max_level_depth", c.caps.max_level_depth);
    c.caps.identity_budget = get_or<std::uint64_t>(caps, "identity_budget", c.caps.identity_budget);
    if (c.caps.max_radius < 0 || c.caps.max_radius > 127) throw FormatError("caps.max_radius must lie in 0..127");
    if (c.caps.max_level_depth < 1) throw FormatError("caps.max_level_depth must be positive");
  }
  static const char* kinds[] = {"spinal", "grigorchuk_p", "sunic", "ggs", "nekrashevych_D", "neumann6", "custom"};
  if (std::find(std::begin(kinds), std::end(kinds), c.kind) == std::end(kinds)) {
    throw FormatError("config: unknown kind '" + c.kind + "'");
  }
  return c;
}

GroupConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

FamilySpec build_family(const GroupConfig& c) {
  const json& j = c.document;
  FamilySpec spec;
  if (c.kind == "spinal") {
    spec = build_spinal(j);
  } else if (c.kind == "grigorchuk_p") {
    spec = grigorchuk_p(get<int>(j, "p"), get_or<std::vector<int>>(j, "k_preperiod", {}),
                        get<std::vector<int>>(j, "k_period"));
  } else if (c.kind == "sunic") {
    spec = sunic(get<int>(j, "p"), get<int>(j, "m"), get<std::vector<int>>(j, "a"));
  } else if (c.kind == "ggs") {
    spec = ggs(get<int>(j, "d"), get<std::vector<int>>(j, "eps"));
  } else if (c.kind == "nekrashevych_D") {
    spec = nekrashevych_D(get_or<std::vector<int>>(j, "bits_preperiod", {}), get<std::vector<int>>(j, "bits_period"));
  } else if (c.kind == "neumann6") {
    spec = neumann6();
  } else {
    spec = build_custom(j);
  }
  if (j.contains("name") && c.kind != "custom") spec.name = get<std::string>(j, "name");
  if (spec.level_count() > static_cast<std::size_t>(c.caps.max_level_depth)) {
    throw DomainError(std::to_string(spec.level_count()) + " compiled levels exceed max_level_depth " +
                      std::to_string(c.caps.max_level_depth));
  }
  return spec;
}

std::string group_hash(const GroupConfig& c) {
  const std::string canonical = c.document.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ssg
