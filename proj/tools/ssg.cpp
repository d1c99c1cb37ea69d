// Command-line front end: define, spheres, incompressible, criterion, report.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssg/catalog.hpp"
#include "ssg/config.hpp"
#include "ssg/criterion.hpp"
#include "ssg/errors.hpp"
#include "ssg/table_io.hpp"

using nlohmann::json;
using namespace ssg;

namespace {

struct Options {
  std::string config;
  int max_radius = 8;
  int levels = 1;
  int k_depth = 6;
  std::string epsilon = "0.45";
  std::string out;
  std::string cache_dir;
  int threads = 1;
  std::uint64_t budget = 0;
  std::string route = "full";
  int exact_radius = 3;
};

struct Context {
  GroupConfig config;
  FamilySpec spec;
  std::string hash;
  std::unique_ptr<Atlas> atlas;
  std::vector<bool> from_cache;
};

Context open(const Options& o) {
  Context c;
  c.config = load_config(o.config);
  c.spec = build_family(c.config);
  c.hash = group_hash(c.config);
  if (o.max_radius < 0) throw DomainError("--max-radius must be nonnegative");
  if (o.max_radius > c.config.caps.max_radius) {
    throw BudgetExceeded("radius " + std::to_string(o.max_radius) + " exceeds the configured cap " +
                         std::to_string(c.config.caps.max_radius));
  }
  if (o.k_depth < 0 || o.k_depth > c.config.caps.max_level_depth) {
    throw DomainError("--k-depth must lie in 0.." + std::to_string(c.config.caps.max_level_depth));
  }
  if (o.levels < 1) throw DomainError("--levels must be positive");
  GrowthOptions g;
  g.threads = o.threads;
  g.max_elements = o.budget ? o.budget : c.config.caps.max_elements;
  g.identity_budget = c.config.caps.identity_budget;
  c.atlas = std::make_unique<Atlas>(c.spec, g);
  c.from_cache.assign(c.spec.level_count(), false);
  return c;
}

// Loads a level's table from the cache when one covers the radius, else
// enumerates it (and stores it when a cache directory is set).
const SphereTable& level_table(Context& c, const Options& o, std::size_t idx, int radius) {
  Atlas& atlas = *c.atlas;
  if (!o.cache_dir.empty() && !atlas.has_radius(idx, radius)) {
    if (auto path = find_cached(o.cache_dir, c.hash, idx, radius)) {
      PersistedTable t = load_table(*path);
      if (t.group_hash == c.hash && t.level == idx && (!t.truncated || t.max_radius() > radius)) {
        trim(t, radius);
        atlas.adopt(std::move(t.table));
        c.from_cache[idx] = true;
        std::cerr << "cache hit: " << *path << "\n";
      }
    }
  }
  const SphereTable& t = atlas.ensure(idx, radius);
  if (!o.cache_dir.empty() && !c.from_cache[idx]) {
    PersistedTable p;
    p.group_hash = c.hash;
    p.level = idx;
    p.truncated = t.truncated;
    p.table = t;
    save_table(cache_path(o.cache_dir, c.hash, idx, radius), p);
  }
  return t;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw FormatError("cannot write " + path);
  return file;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

int cmd_define(const Options& o) {
  GroupConfig config = load_config(o.config);
  FamilySpec spec;
  try {
    spec = build_family(config);
  } catch (const CheckFailed& e) {
    std::cout << "FAIL " << e.what() << "\n";
    return 1;
  }
  const ValidationReport report = validate(spec, config.caps.identity_budget);
  std::cout << "group " << spec.name << "\n"
            << "group_hash " << group_hash(config) << "\n"
            << "degree " << spec.degree << "\n"
            << "levels " << spec.preperiod.size() << " preperiodic, " << spec.period.size() << " periodic\n"
            << "units " << spec.unit_count() << "\n";
  for (std::size_t idx = 0; idx < spec.level_count(); ++idx) {
    std::cout << "level " << idx << ": |G0| = " << spec.level(idx).zero_subgroup.size() << "\n";
  }
  std::cout << report.to_string();
  return report.ok() ? 0 : 1;
}

int cmd_spheres(const Options& o) {
  Context c = open(o);
  std::ofstream file;
  std::ostream& out = open_out(o.out, file);
  out << "level,n,sphere_size,gamma,kappa_pointwise\n";
  bool truncated = false;
  for (int nu = 0; nu < o.levels; ++nu) {
    const std::size_t idx = c.spec.level_index(nu);
    const SphereTable& t = level_table(c, o, idx, o.max_radius);
    const auto sizes = t.sphere_sizes();
    const auto gamma = t.gamma();
    const auto kappa = kappa_estimates(sizes);
    const int complete = t.truncated ? t.max_radius() - 1 : t.max_radius();
    for (int n = 0; n <= complete; ++n) {
      out << nu << ',' << n << ',' << sizes[n] << ',' << gamma[n] << ',' << (n ? fmt(kappa.root[n]) : "") << '\n';
    }
    if (t.truncated) {
      out << "# truncated level=" << nu << " radius=" << t.max_radius() << '\n';
      truncated = true;
    }
  }
  out.flush();
  if (truncated) throw BudgetExceeded("element budget reached before the requested radius");
  return 0;
}

json bound_json(const BoundCheck& b) {
  json j;
  j["l"] = b.l;
  j["exponent"] = b.exponent;
  j["C_l"] = to_string_u128(b.c_l);
  j["holds"] = b.holds;
  j["rows"] = json::array();
  for (const auto& r : b.rows) {
    j["rows"].push_back({{"n", r.n}, {"count", r.count}, {"bound", to_string_u128(r.bound)}, {"holds", r.holds}});
  }
  return j;
}

void write_report(const Options& o, const json& j) {
  std::ofstream file;
  std::ostream& out = open_out(o.out.empty() ? "" : o.out + ".json", file);
  out << j.dump(2) << '\n';
}

int cmd_incompressible(const Options& o) {
  Context c = open(o);
  Compression comp(*c.atlas);
  const std::vector<int> kd = c.spec.spinal ? kernel_depths(c.spec) : std::vector<int>(c.spec.level_count(), -1);
  const bool ternary = is_ternary_spinal(c.spec);
  json report;
  report["group"] = c.spec.name;
  report["group_hash"] = c.hash;
  report["k_depth"] = o.k_depth;
  report["max_radius"] = o.max_radius;
  report["route"] = o.route;
  report["approximation"] = "I_K with K = k_depth; contains I_infinity";
  report["levels"] = json::array();
  std::ofstream csv_file;
  std::ostream& csv = open_out(o.out.empty() ? "" : o.out + ".csv", csv_file);
  csv << "level,n,k,count\n";
  bool ok = true;
  for (int nu = 0; nu < o.levels; ++nu) {
    const std::size_t idx = c.spec.level_index(nu);
    json lv;
    lv["level"] = nu;
    std::vector<std::uint64_t> counts_k;
    TernaryAudit audit;
    if (o.route == "full") {
      level_table(c, o, idx, o.max_radius);
      for (int i = 1; i <= o.k_depth; ++i) level_table(c, o, c.spec.level_index(nu + i), o.max_radius);
      const IncompressibilityReport r = approximate_I_infty(comp, idx, o.max_radius, o.k_depth);
      lv["counts"] = r.counts;
      lv["stabilization_depth"] = r.stabilization_depth ? json(*r.stabilization_depth) : json(nullptr);
      lv["nesting_ok"] = r.nesting_ok;
      lv["hereditary_ok"] = r.hereditary_ok;
      ok &= r.nesting_ok && r.hereditary_ok;
      for (int n = 0; n <= o.max_radius; ++n) {
        for (int k = 0; k <= o.k_depth; ++k) csv << nu << ',' << n << ',' << k << ',' << r.counts[n][k] << '\n';
        counts_k.push_back(r.counts[n][o.k_depth]);
      }
      audit = audit_ternary(c.spec, idx, c.atlas->table(idx).spheres, &r.depth, o.k_depth);
      if (!o.cache_dir.empty()) {
        PersistedTable p;
        p.group_hash = c.hash;
        p.level = idx;
        p.table = c.atlas->table(idx);
        trim(p, o.max_radius);
        p.flag_depth = std::min(o.k_depth, kMaxFlagDepth);
        p.flags = flags_from_depths(r.depth, p.flag_depth);
        save_table(cache_path(o.cache_dir, c.hash, idx, o.max_radius), p);
      }
    } else if (o.route == "prefix") {
      const IncompressibleSpheres inc = enumerate_incompressible(*c.atlas, idx, o.k_depth, o.max_radius, o.exact_radius);
      for (const Sphere& s : inc.spheres) counts_k.push_back(s.size());
      for (int n = 0; n <= o.max_radius; ++n) csv << nu << ',' << n << ',' << o.k_depth << ',' << counts_k[n] << '\n';
      lv["candidates_tested"] = inc.candidates_tested;
      audit = audit_ternary(c.spec, idx, inc.spheres, nullptr, o.k_depth);
    } else {
      throw DomainError("--route must be full or prefix");
    }
    lv["counts_IK"] = counts_k;
    const PowerFit fit = fit_power_law(counts_k);
    lv["fit"] = {{"delta", fit.delta}, {"log_c", fit.log_c}, {"points", fit.points}};
    json dc;
    dc["applicable"] = audit.applicable;
    if (audit.applicable) {
      dc["checked"] = audit.checked;
      dc["law_violations"] = audit.law_violations;
      dc["compressible_violators"] = audit.violators_outside;
      dc["converse_violations"] = audit.converse_violations;
      dc["note"] = "parses of compressible elements are representative-dependent";
      ok &= audit.law_violations == 0;
    }
    lv["dc_audit"] = dc;
    if (ternary && kd[idx] >= 0) {
      const BoundCheck b = check_polynomial_bound(counts_k, kd[idx], c.spec.spinal->b_size());
      lv["bound"] = bound_json(b);
      ok &= b.holds;
    } else {
      lv["bound"] = {{"applicable", false}};
    }
    report["levels"].push_back(lv);
  }
  report["ok"] = ok;
  write_report(o, report);
  return 0;
}

json hypotheses_json(const HypothesesReport& h) {
  json j;
  j["generators_in_IK"] = h.generators_ok;
  j["A"] = h.A;
  j["uniform_bound_ok"] = h.uniform_bound_ok;
  j["bound_applicable"] = h.bound_applicable;
  j["bound_ok"] = h.bound_ok;
  j["log_concave"] = h.log_concave;
  j["envelope"] = h.envelope;
  j["envelope_fit"] = {{"delta", h.envelope_fit.delta}, {"log_c", h.envelope_fit.log_c}};
  j["levels"] = json::array();
  for (const auto& l : h.levels) {
    json lv{{"level_idx", l.level_idx}, {"generators", l.generators}, {"outside_IK", l.outside_IK}, {"counts_IK", l.counts}};
    if (l.bound) lv["bound"] = bound_json(*l.bound);
    j["levels"].push_back(lv);
  }
  j["ok"] = h.ok();
  return j;
}

int cmd_criterion(const Options& o) {
  const Rational eps = parse_epsilon(o.epsilon);
  Context c = open(o);
  Compression comp(*c.atlas);
  json report;
  report["group"] = c.spec.name;
  report["group_hash"] = c.hash;
  report["epsilon"] = eps.to_string();
  report["k_depth"] = o.k_depth;
  report["max_radius"] = o.max_radius;
  report["levels"] = json::array();
  for (int nu = 0; nu < o.levels; ++nu) {
    const std::size_t idx = c.spec.level_index(nu);
    level_table(c, o, idx, o.max_radius);
    const CriterionReport r = run_criterion(comp, idx, o.max_radius, o.k_depth, eps);
    json lv;
    lv["level"] = nu;
    lv["small_radius"] = r.small_radius;
    lv["l"] = r.level.value;
    lv["l_empty_family"] = r.level.empty_family;
    lv["uniform_level"] = r.uniform_level;
    lv["partition_ok"] = r.partition_ok;
    lv["small_factor_bound_ok"] = r.factor_bound_ok;
    lv["pairing_ok"] = r.pairing_ok;
    lv["level_reduction"] = r.insufficient_n ? json("insufficient n") : json(r.level_reduction_ok);
    lv["spheres"] = json::array();
    for (const auto& s : r.spheres) {
      json row{{"n", s.n},
               {"size", s.total},
               {"large", s.large},
               {"small", s.small},
               {"max_N", s.max_N},
               {"checks_apply", s.checks_apply},
               {"factor_violations", s.factor_violations},
               {"level_violations", s.level_violations},
               {"max_reduction_ratio", s.max_reduction_ratio},
               {"pairs_in_IK", s.pairs_in_IK},
               {"small_pairs_in_I_l", s.small_pairs_in_Il}};
      row["min_small_factors"] = s.min_small_factors ? json(*s.min_small_factors) : json(nullptr);
      lv["spheres"].push_back(row);
    }
    lv["ok"] = r.ok();
    report["levels"].push_back(lv);
  }
  Atlas fresh(c.spec, c.atlas->options());
  report["hypotheses"] = hypotheses_json(theorem_hypotheses(fresh, o.max_radius, o.k_depth, o.exact_radius));
  write_report(o, report);
  return 0;
}

int cmd_report(const Options& o) {
  Context c = open(o);
  std::ofstream file;
  std::ostream& out = open_out(o.out, file);
  const ValidationReport v = validate(c.spec, c.config.caps.identity_budget);
  out << "group: " << c.spec.name << " (hash " << c.hash << ")\n"
      << "validation: " << v.to_string();
  Compression comp(*c.atlas);
  for (int nu = 0; nu < o.levels; ++nu) {
    const std::size_t idx = c.spec.level_index(nu);
    const SphereTable& t = level_table(c, o, idx, o.max_radius);
    out << "\nlevel " << nu << "\n  n  |Omega(n)|  |Ball(n)|  ball bound\n";
    const auto gamma = t.gamma();
    const std::size_t g0 = c.spec.level(idx).zero_subgroup.size();
    for (int n = 0; n <= t.max_radius(); ++n) {
      out << "  " << n << "  " << t.sphere_size(n) << "  " << gamma[n] << "  "
          << to_string_u128(ball_bound(g0, c.spec.unit_count(), n)) << "\n";
    }
  }
  const HypothesesReport h = theorem_hypotheses(*c.atlas, o.max_radius, o.k_depth, o.exact_radius);
  out << "\nI_" << o.k_depth << " counts per level:\n";
  for (const auto& l : h.levels) {
    out << "  level " << l.level_idx << ":";
    for (auto v : l.counts) out << ' ' << v;
    out << "\n";
    if (l.bound) {
      out << "    bound C_l n^e with l=" << l.bound->l << " C_l=" << to_string_u128(l.bound->c_l)
          << " e=" << l.bound->exponent << ": " << (l.bound->holds ? "holds" : "VIOLATED") << "\n";
    }
  }
  out << "generators in I_K: " << (h.generators_ok ? "yes" : "no") << ", A = " << h.A
      << ", fitted delta = " << fmt(h.envelope_fit.delta) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Growth, incompressible elements and the subexponential criterion for self-similar groups"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "group config (JSON)")->required();
    sub->add_option("--max-radius", o.max_radius, "largest radius n");
    sub->add_option("--levels", o.levels, "number of levels nu = 0, 1, ... to analyse");
    sub->add_option("--k-depth", o.k_depth, "depth K of the I_K approximation");
    sub->add_option("--epsilon", o.epsilon, "rational in (0, 1/2), e.g. 0.45 or 9/20");
    sub->add_option("--out", o.out, "output path (prefix for incompressible and criterion)");
    sub->add_option("--cache-dir", o.cache_dir, "directory for persisted sphere tables");
    sub->add_option("--threads", o.threads, "worker threads for sphere enumeration");
    sub->add_option("--budget", o.budget, "element budget per level (overrides caps.max_elements)");
    sub->add_option("--route", o.route, "incompressible: full (whole spheres) or prefix");
    sub->add_option("--exact-radius", o.exact_radius, "prefix route: radius of exact base tables");
  };
  auto* define = app.add_subcommand("define", "validate a config");
  define->add_option("--config", o.config, "group config (JSON)")->required();
  auto* spheres = app.add_subcommand("spheres", "sphere sizes as CSV");
  auto* incompressible = app.add_subcommand("incompressible", "I_k counts, audits and the polynomial bound");
  auto* criterion = app.add_subcommand("criterion", "finite checks of the growth criterion");
  auto* report = app.add_subcommand("report", "human-readable summary");
  for (auto* s : {spheres, incompressible, criterion, report}) common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (define->parsed()) return cmd_define(o);
    if (spheres->parsed()) return cmd_spheres(o);
    if (incompressible->parsed()) return cmd_incompressible(o);
    if (criterion->parsed()) return cmd_criterion(o);
    if (report->parsed()) return cmd_report(o);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
