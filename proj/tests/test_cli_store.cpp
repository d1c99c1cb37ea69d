#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "ssg/config.hpp"
#include "ssg/errors.hpp"
#include "ssg/incompressible.hpp"
#include "ssg/table_io.hpp"

using namespace ssg;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = std::string(SSG_SOURCE_DIR) + "/configs/";

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ssg_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(SSG_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string failed_check(const GroupConfig& g) {
  try {
    const FamilySpec s = build_family(g);
    const ValidationReport r = validate(s);
    return r.ok() ? "" : r.issues.front().check;
  } catch (const CheckFailed& e) {
    return e.check();
  }
}

std::vector<std::uint64_t> sizes(const FamilySpec& s, int n) {
  Atlas atlas(s);
  return atlas.ensure(0, n).sphere_sizes();
}

}  // namespace

TEST_CASE("config parsing errors") {
  CHECK_THROWS_AS(parse_config("{"), FormatError);
  CHECK_THROWS_AS(parse_config("[]"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"d": 3})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"kind": "nope"})"), FormatError);
  CHECK_THROWS_AS(build_family(parse_config(R"({"kind": "ggs", "d": "three", "eps": [1, 0]})")), FormatError);
  CHECK_THROWS_AS(load_config(kConfigs + "malformed.json"), FormatError);
  CHECK_THROWS_AS(load_config(kConfigs + "does_not_exist.json"), FormatError);
}

TEST_CASE("caps") {
  const GroupConfig g = parse_config(R"({"kind": "neumann6", "caps": {"max_radius": 3, "max_elements": 1000}})");
  CHECK(g.caps.max_radius == 3);
  CHECK(g.caps.max_elements == 1000);
  CHECK(g.caps.max_level_depth == 16);
  CHECK_THROWS_AS(parse_config(R"({"kind": "neumann6", "caps": {"max_radius": -1}})"), FormatError);
  // More compiled levels than the cap allows.
  CHECK_THROWS_AS(build_family(parse_config(
                      R"({"kind": "grigorchuk_p", "p": 2, "k_period": [0, 1, 2], "caps": {"max_level_depth": 2}})")),
                  DomainError);
}

TEST_CASE("shipped configs build the catalog groups") {
  CHECK(sizes(build_family(load_config(kConfigs + "fabrykowski_gupta.json")), 5) == sizes(fabrykowski_gupta(), 5));
  CHECK(sizes(build_family(load_config(kConfigs + "first_grigorchuk.json")), 5) == sizes(first_grigorchuk(), 5));
  CHECK(sizes(build_family(load_config(kConfigs + "grigorchuk_custom.json")), 5) == sizes(first_grigorchuk(), 5));
  CHECK(sizes(build_family(load_config(kConfigs + "gupta_sidki.json")), 5) == sizes(ggs(3, {1, 1}), 5));
  CHECK(sizes(build_family(load_config(kConfigs + "nekrashevych_D01.json")), 5) ==
        sizes(nekrashevych_D({}, {0, 1}), 5));
  CHECK(sizes(build_family(load_config(kConfigs + "sunic_3_2_a1.json")), 4) == sizes(sunic(3, 2, {1}), 4));
  CHECK(build_family(load_config(kConfigs + "neumann6.json")).unit_count() == 360);
  CHECK(validate(build_family(load_config(kConfigs + "grigorchuk_custom.json"))).ok());
}

TEST_CASE("negative configs name their check") {
  CHECK(failed_check(load_config(kConfigs + "ggs_gcd_violation.json")) == "gcd");
  CHECK(failed_check(load_config(kConfigs + "spinal_kernel_violation.json")) == "kernel");
  CHECK(failed_check(load_config(kConfigs + "non_transitive_root.json")) == "transitivity");
}

TEST_CASE("group hash covers every field") {
  const GroupConfig a = parse_config(R"({"kind": "ggs", "d": 3, "eps": [1, 0]})");
  const GroupConfig b = parse_config(R"({"eps": [1, 0], "d": 3, "kind": "ggs"})");
  CHECK(group_hash(a) == group_hash(b));
  CHECK(group_hash(a).size() == 16);
  for (const char* other : {R"({"kind": "ggs", "d": 3, "eps": [1, 1]})", R"({"kind": "ggs", "d": 3, "eps": [1, 0], "name": "x"})",
                            R"({"kind": "ggs", "d": 3, "eps": [1, 0], "caps": {"max_radius": 10}})"}) {
    CHECK(group_hash(parse_config(other)) != group_hash(a));
  }
}

TEST_CASE("table round trip") {
  const FamilySpec fg = fabrykowski_gupta();
  Atlas atlas(fg);
  Compression comp(atlas);
  const IncompressibilityReport r = approximate_I_infty(comp, 0, 5, 6);
  PersistedTable t;
  t.group_hash = "0123456789abcdef";
  t.level = 0;
  t.table = atlas.table(0);
  trim(t, 5);
  t.flag_depth = 6;
  t.flags = flags_from_depths(r.depth, 6);

  const fs::path dir = scratch_dir("roundtrip");
  const std::string path = cache_path(dir.string(), t.group_hash, 0, 5);
  save_table(path, t);
  const PersistedTable u = load_table(path);
  CHECK(u.format_version == kTableFormatVersion);
  CHECK(u.group_hash == t.group_hash);
  CHECK(u.flag_depth == 6);
  CHECK_FALSE(u.truncated);
  REQUIRE(u.max_radius() == 5);
  CHECK(u.flags == t.flags);
  for (int n = 0; n <= 5; ++n) {
    CHECK(u.table.spheres[n].letters == t.table.spheres[n].letters);
    CHECK(u.table.spheres[n].parent == t.table.spheres[n].parent);
    std::uint64_t in6 = 0;
    for (std::uint16_t f : u.flags[n]) in6 += (f >> 5) & 1;
    CHECK(in6 == r.counts[n][6]);
  }
  // Rows are bit-exact: saving the loaded table reproduces the file.
  const std::string again = (dir / "again.tbl").string();
  save_table(again, u);
  CHECK(slurp(path) == slurp(again));

  // A loaded table can stand in for enumeration.
  Atlas other(fg);
  other.adopt(u.table);
  CHECK(other.has_radius(0, 5));
  CHECK(other.ensure(0, 6).sphere_sizes() == atlas.ensure(0, 6).sphere_sizes());
  fs::remove_all(dir);
}

TEST_CASE("malformed tables") {
  const fs::path dir = scratch_dir("malformed");
  std::ofstream(dir / "a.tbl") << "ssg-table\nformat_version 2\n";
  CHECK_THROWS_AS(load_table((dir / "a.tbl").string()), FormatError);
  std::ofstream(dir / "b.tbl") << "not a table\n";
  CHECK_THROWS_AS(load_table((dir / "b.tbl").string()), FormatError);
  CHECK_THROWS_AS(load_table((dir / "missing.tbl").string()), FormatError);
  fs::remove_all(dir);
}

TEST_CASE("cache lookup") {
  const fs::path dir = scratch_dir("cache");
  const FamilySpec fg = fabrykowski_gupta();
  Atlas atlas(fg);
  PersistedTable t;
  t.group_hash = "00000000000000aa";
  t.table = atlas.ensure(0, 4);
  save_table(cache_path(dir.string(), t.group_hash, 0, 4), t);
  trim(t, 3);
  CHECK(t.max_radius() == 3);
  save_table(cache_path(dir.string(), t.group_hash, 0, 3), t);

  CHECK(find_cached(dir.string(), t.group_hash, 0, 2) == cache_path(dir.string(), t.group_hash, 0, 3));
  CHECK(find_cached(dir.string(), t.group_hash, 0, 4) == cache_path(dir.string(), t.group_hash, 0, 4));
  CHECK_FALSE(find_cached(dir.string(), t.group_hash, 0, 5));
  CHECK_FALSE(find_cached(dir.string(), t.group_hash, 1, 2));
  CHECK_FALSE(find_cached(dir.string(), "00000000000000bb", 0, 2));
  CHECK_FALSE(find_cached((dir / "nowhere").string(), t.group_hash, 0, 2));
  fs::remove_all(dir);
}

TEST_CASE("cli: define exit codes") {
  const fs::path dir = scratch_dir("define");
  CHECK(cli("define --config " + kConfigs + "fabrykowski_gupta.json", dir).code == 0);
  const Run gcd = cli("define --config " + kConfigs + "ggs_gcd_violation.json", dir);
  CHECK(gcd.code == 1);
  CHECK(gcd.out.find("gcd") != std::string::npos);
  const Run tr = cli("define --config " + kConfigs + "non_transitive_root.json", dir);
  CHECK(tr.code == 1);
  CHECK(tr.out.find("transitivity") != std::string::npos);
  CHECK(cli("define --config " + kConfigs + "spinal_kernel_violation.json", dir).code == 1);
  CHECK(cli("define --config " + kConfigs + "malformed.json", dir).code == 2);
  CHECK(cli("define --config " + (dir / "none.json").string(), dir).code == 2);
  CHECK(cli("define", dir).code == 2);
  CHECK(cli("spheres --config " + kConfigs + "fabrykowski_gupta.json --max-radius x", dir).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("cli: spheres") {
  const fs::path dir = scratch_dir("spheres");
  const std::string fg = "--config " + kConfigs + "fabrykowski_gupta.json";
  const Run zero = cli("spheres " + fg + " --max-radius 0", dir);
  CHECK(zero.code == 0);
  CHECK(zero.out == "level,n,sphere_size,gamma,kappa_pointwise\n0,0,3,3,\n");

  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  REQUIRE(cli("spheres " + fg + " --max-radius 6 --threads 1 --out " + a, dir).code == 0);
  REQUIRE(cli("spheres " + fg + " --max-radius 6 --threads 3 --out " + b, dir).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("0,6,14976,20805,") != std::string::npos);

  // Cache: the second run reads the table and writes the same file.
  const std::string cache = (dir / "cache").string();
  fs::create_directories(cache);
  const std::string c1 = (dir / "c1.csv").string(), c2 = (dir / "c2.csv").string();
  const Run first = cli("spheres " + fg + " --max-radius 6 --cache-dir " + cache + " --out " + c1, dir);
  REQUIRE(first.code == 0);
  CHECK(first.err.find("cache hit") == std::string::npos);
  const Run second = cli("spheres " + fg + " --max-radius 5 --cache-dir " + cache + " --out " + c2, dir);
  REQUIRE(second.code == 0);
  CHECK(second.err.find("cache hit") != std::string::npos);
  const std::string s1 = slurp(c1), s2 = slurp(c2);
  CHECK(s1.substr(0, s2.size()) == s2);

  const Run trunc = cli("spheres " + fg + " --max-radius 8 --budget 500", dir);
  CHECK(trunc.code == 3);
  CHECK(trunc.out.find("# truncated level=0 radius=4") != std::string::npos);
  CHECK(cli("spheres " + fg + " --max-radius 13", dir).code == 3);
  fs::remove_all(dir);
}

TEST_CASE("cli: incompressible and criterion") {
  const fs::path dir = scratch_dir("incompressible");
  const std::string fg = "--config " + kConfigs + "fabrykowski_gupta.json";
  const std::string out = (dir / "fg").string();
  REQUIRE(cli("incompressible " + fg + " --max-radius 5 --k-depth 6 --out " + out, dir).code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(out + ".json"));
  CHECK(j["ok"] == true);
  const auto& lv = j["levels"][0];
  CHECK(lv["bound"]["C_l"] == "13122");
  CHECK(lv["bound"]["exponent"] == 4);
  CHECK(lv["bound"]["holds"] == true);
  CHECK(lv["stabilization_depth"] == 1);  // I_1 and I_2 first differ at radius 6
  CHECK(lv["dc_audit"]["applicable"] == true);
  CHECK(lv["dc_audit"]["law_violations"] == 0);
  CHECK(lv["counts_IK"] == nlohmann::json({3, 18, 72, 216, 576, 1296}));

  // K = 0: the matrix is the sphere sizes.
  REQUIRE(cli("incompressible " + fg + " --max-radius 3 --k-depth 0 --out " + out, dir).code == 0);
  CHECK(slurp(out + ".csv") == "level,n,k,count\n0,0,0,3\n0,1,0,18\n0,2,0,72\n0,3,0,288\n");

  const std::string gr = "--config " + kConfigs + "first_grigorchuk.json";
  REQUIRE(cli("incompressible " + gr + " --max-radius 4 --out " + out, dir).code == 0);
  const nlohmann::json g = nlohmann::json::parse(slurp(out + ".json"));
  CHECK(g["levels"][0]["dc_audit"]["applicable"] == false);
  CHECK(g["levels"][0]["bound"]["applicable"] == false);

  REQUIRE(cli("incompressible " + fg + " --route prefix --max-radius 5 --out " + out, dir).code == 0);
  CHECK(nlohmann::json::parse(slurp(out + ".json"))["levels"][0]["counts_IK"] == lv["counts_IK"]);

  CHECK(cli("criterion " + fg + " --epsilon 0.6", dir).code == 1);
  CHECK(cli("criterion " + fg + " --epsilon abc", dir).code == 1);
  REQUIRE(cli("criterion " + gr + " --max-radius 5 --epsilon 0.45 --out " + out, dir).code == 0);
  const nlohmann::json c = nlohmann::json::parse(slurp(out + ".json"));
  CHECK(c["levels"][0]["level_reduction"] == "insufficient n");
  CHECK(c["levels"][0]["ok"] == true);

  const Run rep = cli("report " + fg + " --max-radius 4", dir);
  CHECK(rep.code == 0);
  CHECK_FALSE(rep.out.empty());
  fs::remove_all(dir);
}
