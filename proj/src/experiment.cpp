#include "hardylab/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "hardylab/chains.hpp"
#include "hardylab/inequality.hpp"
#include "hardylab/parallel.hpp"

namespace hardylab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Vec2 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw Error(ErrorKind::InvalidArgument, "expected a [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

Domain domain_from(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "polygon") {
    std::vector<Vec2> verts;
    for (const auto& v : j.at("vertices")) verts.push_back(vec_from(v));
    return make_polygon_domain(std::move(verts));
  }
  if (kind == "koch") {
    int level = j.at("level").get<int>();
    double side = j.value("side", 0.75);
    Vec2 center = j.contains("center") ? vec_from(j["center"]) : Vec2{0.5, 0.5};
    return make_koch_snowflake(level, side, center);
  }
  if (kind == "cantor_complement") {
    double ratio = j.at("ratio").get<double>();
    int level = j.at("level").get<int>();
    double width = j.value("width", 1.0);
    Vec2 center = j.contains("center") ? vec_from(j["center"]) : Vec2{0.5, 0.5};
    return make_cantor_dust_complement(ratio, level, width, center);
  }
  if (kind == "point_complement")
    return make_point_complement(vec_from(j.at("point")));
  throw Error(ErrorKind::InvalidArgument, "unknown domain kind: " + kind);
}

ScalarField field_from(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "bump")
    return bump_field(vec_from(j.at("center")), j.at("radius").get<double>(),
                      j.value("amplitude", 1.0));
  if (kind == "poly") {
    std::vector<Monomial> terms;
    for (const auto& t : j.at("coeffs")) {
      if (!t.is_array() || t.size() != 3)
        throw Error(ErrorKind::InvalidArgument,
                    "poly coeffs entries are [ax, ay, c]");
      terms.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
    }
    return poly_field(std::move(terms));
  }
  if (kind == "coordinate") return coordinate_field(j.at("axis").get<int>());
  throw Error(ErrorKind::InvalidArgument, "unknown field kind: " + kind);
}

// ---- CSV helper -----------------------------------------------------------

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_)
      throw Error(ErrorKind::InvalidArgument,
                  "cannot open output file " + path.string());
    out_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

std::string fmt(double v) { return format_double(v); }

std::vector<double> doubles_from(const json& j, const char* key,
                                 std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  std::vector<double> out;
  if (j[key].is_number()) {
    out.push_back(j[key].get<double>());
    return out;
  }
  for (const auto& v : j[key]) out.push_back(v.get<double>());
  return out;
}

std::vector<int> ints_from(const json& j, const char* key,
                           std::vector<int> fallback) {
  if (!j.contains(key)) return fallback;
  std::vector<int> out;
  if (j[key].is_number()) {
    out.push_back(j[key].get<int>());
    return out;
  }
  for (const auto& v : j[key]) out.push_back(v.get<int>());
  return out;
}

const std::set<std::string> kKnownKeys = {
    "domain", "task",   "j_max",  "s",       "p",      "q",
    "seed",   "radii",  "s_grid", "probes",  "scales", "samples",
    "chain_kind", "growth_threshold", "bumps", "fields"};

void validate_keys(const json& cfg) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it)
    if (!kKnownKeys.count(it.key()))
      throw Error(ErrorKind::InvalidArgument,
                  "unknown config key: " + it.key());
}

void check_sp(const std::vector<double>& ss, const std::vector<double>& ps) {
  for (double s : ss)
    for (double p : ps)
      if (!(s > 0) || !(p > 1) || s * p >= 2.0)
        throw Error(ErrorKind::InvalidArgument,
                    "grid violates 0 < s < n/p");
}

// ---- task runners ---------------------------------------------------------

void run_whitney(const json& cfg, const Domain& dom, const fs::path& out,
                 uint64_t seed, json& summary) {
  std::vector<int> jlist = ints_from(cfg, "j_max", {6});
  int samples = cfg.value("samples", 5);
  json reports = json::array();
  for (int j : jlist) {
    WhitneyCover cover = whitney_cover(dom, j);
    WhitneyReport rep = verify_whitney(cover, samples, seed);
    if (rep.violations > 0)
      throw Error(ErrorKind::InvariantViolation,
                  "whitney verification failed: " +
                      std::to_string(rep.violations) + " violations");
    Csv csv(out / ("cubes_j" + std::to_string(j) + ".csv"),
            "level,index_x,index_y,dist_center");
    for (const WhitneyCube& wc : cover.cubes())
      csv.row({std::to_string(wc.key.level), std::to_string(wc.key.ix),
               std::to_string(wc.key.iy), fmt(wc.dist_center)});
    reports.push_back({{"j_max", j},
                       {"cubes", cover.size()},
                       {"resolved_measure", cover.resolved_measure()},
                       {"uncovered_bound", cover.uncovered_measure_bound()},
                       {"min_ratio", rep.min_ratio},
                       {"max_ratio", rep.max_ratio},
                       {"violations", rep.violations},
                       {"max_overlap", rep.max_overlap},
                       {"disjoint", rep.disjoint}});
  }
  summary["whitney"] = reports;
}

void run_dimension(const json& cfg, const Domain& dom, const fs::path& out,
                   uint64_t seed, json& summary) {
  int n_probes = cfg.value("probes", 6);
  auto boundary = dom.boundary_ptr();
  double diam = std::max(dom.boundary_diameter(), 0.5);
  std::vector<double> radii =
      doubles_from(cfg, "radii", {diam / 4, diam / 8, diam / 16, diam / 32});
  std::vector<double> s_grid = doubles_from(cfg, "s_grid", {});
  if (s_grid.empty())
    for (double s = 0.7; s <= 1.81; s += 0.04) s_grid.push_back(s);
  std::vector<Vec2> probes = boundary->sample_points(n_probes, seed);
  DimensionReport rep =
      estimate_aikawa_dimension(*boundary, probes, radii, s_grid, {});
  Csv csv(out / "dimension.csv", "probe_id,r,s,integral,ratio");
  for (const DimensionRow& row : rep.table)
    csv.row({std::to_string(row.probe_id), fmt(row.r), fmt(row.s),
             fmt(row.integral), fmt(row.ratio)});
  summary["dimension"] = {{"dim_estimate", rep.dim_estimate},
                          {"bracket_lo", rep.dim_bracket_lo},
                          {"box_counting_dim", rep.box_counting_dim},
                          {"ratio_threshold", rep.ratio_threshold}};
  if (auto known = dom.known_aikawa_dim())
    summary["dimension"]["known_dim"] = *known;
}

void run_porosity(const json& cfg, const Domain& dom, const fs::path& out,
                  uint64_t seed, json& summary) {
  std::vector<double> scales = doubles_from(cfg, "scales", {0.25, 0.1, 0.04});
  int samples = cfg.value("samples", 24);
  auto kappa = porosity_constant(dom.boundary(), scales, samples, seed);
  Csv csv(out / "porosity.csv", "kappa,found");
  csv.row({kappa ? fmt(*kappa) : "inf", kappa ? "1" : "0"});
  summary["porosity"] = {{"found", bool(kappa)}};
  if (kappa) summary["porosity"]["kappa"] = *kappa;
}

void run_chains(const json& cfg, const Domain& dom, const fs::path& out,
                uint64_t, json& summary) {
  std::vector<int> jlist = ints_from(cfg, "j_max", {7});
  std::string kind = cfg.value("chain_kind", "john");
  std::vector<double> ss = doubles_from(cfg, "s", {0.3});
  std::vector<double> ps = doubles_from(cfg, "p", {2.0});
  check_sp(ss, ps);
  json reports = json::array();
  for (int j : jlist) {
    WhitneyCover cover = whitney_cover(dom, j);
    ChainDecomposition decomp = kind == "dyadic"
                                    ? build_dyadic_chains(cover)
                                    : build_john_chains(cover);
    Csv csv(out / (kind + "_chains_j" + std::to_string(j) + ".csv"),
            "chain_id,ordinal,level,index_x,index_y");
    for (size_t t = 0; t < decomp.chains.size(); ++t)
      for (size_t o = 0; o < decomp.chains[t].size(); ++o) {
        const CubeKey& k = decomp.chains[t][o];
        csv.row({std::to_string(t), std::to_string(o), std::to_string(k.level),
                 std::to_string(k.ix), std::to_string(k.iy)});
      }
    json per_sp = json::array();
    for (double s : ss)
      for (double p : ps) {
        ChainConditionsReport rep = verify_chain_conditions(decomp, s, p);
        per_sp.push_back({{"s", s},
                          {"p", p},
                          {"sigma", rep.sigma},
                          {"eps_margin", rep.eps_margin}});
      }
    reports.push_back({{"j_max", j},
                       {"kind", kind},
                       {"chains", decomp.chains.size()},
                       {"tau", decomp.tau},
                       {"per_level_max", decomp.per_level_max},
                       {"overlap_c", decomp.overlap_c},
                       {"shadow_radius_C", decomp.shadow_radius_C},
                       {"beta_proxy", decomp.beta_proxy},
                       {"conditions", per_sp}});
  }
  summary["chains"] = reports;
}

void run_hardy_sweep(const json& cfg, const Domain& dom, const fs::path& out,
                     uint64_t seed, json& summary) {
  std::vector<double> ss = doubles_from(cfg, "s", {0.3, 0.45});
  std::vector<double> ps = doubles_from(cfg, "p", {2.0});
  std::vector<double> qs = doubles_from(cfg, "q", {});
  std::vector<int> jlist = ints_from(cfg, "j_max", {6, 7});
  check_sp(ss, ps);
  std::vector<HardyGridPoint> grid;
  for (double p : ps)
    for (double s : ss) {
      if (qs.empty())
        grid.push_back({s, p, p});
      else
        for (double q : qs) grid.push_back({s, p, q});
    }
  std::vector<ScalarField> corpus = make_test_corpus(dom, seed);
  HardySweepOptions opts;
  opts.growth_threshold = cfg.value("growth_threshold", 1.05);
  HardyReport rep = hardy_ratio_sweep(dom, corpus, grid, jlist, opts);

  Csv csv(out / "hardy.csv", "s,p,q,j_max,corpus_id,lhs,rhs,ratio");
  for (const HardyEntry& e : rep.entries)
    csv.row({fmt(e.s), fmt(e.p), fmt(e.q), std::to_string(e.j_max),
             e.corpus_id, fmt(e.lhs), fmt(e.rhs), fmt(e.ratio)});
  Csv sup(out / "hardy_sup.csv", "s,p,q,j_max,sup_ratio");
  for (const HardySupRow& r : rep.sup_rows)
    sup.row({fmt(r.s), fmt(r.p), fmt(r.q), std::to_string(r.j_max),
             fmt(r.sup_ratio)});
  json growth = json::array();
  for (size_t i = 0; i < rep.growth.size(); ++i)
    growth.push_back({{"s", rep.growth_s[i]}, {"growth", rep.growth[i]}});
  summary["hardy"] = {{"growth", growth},
                      {"bracket_lo", rep.bracket_lo},
                      {"bracket_hi", rep.bracket_hi},
                      {"growth_threshold", rep.growth_threshold}};
}

void run_extension(const json& cfg, const Domain& dom, const fs::path& out,
                   uint64_t seed, json& summary) {
  std::vector<double> ss = doubles_from(cfg, "s", {0.3});
  std::vector<double> ps = doubles_from(cfg, "p", {2.0});
  check_sp(ss, ps);
  int jmax = ints_from(cfg, "j_max", {7})[0];
  int n_bumps = cfg.value("bumps", 8);
  WhitneyCover cover = whitney_cover(dom, jmax);

  Rng rng(seed);
  double diam = std::max(dom.boundary_diameter(), 0.2);
  std::vector<Vec2> pts = dom.boundary().sample_points(n_bumps, seed);
  Csv csv(out / "extension.csv",
          "field_id,s,p,ext_seminorm_p,interior_seminorm_p,hardy_term_p,"
          "max_tail_ratio,tail_ok");
  bool all_ok = true;
  for (int i = 0; i < n_bumps; ++i) {
    double radius = diam * rng.uniform(0.05, 0.25);
    Vec2 c = pts[i] + Vec2{rng.uniform(-radius, radius) / 2,
                           rng.uniform(-radius, radius) / 2};
    ScalarField f = bump_field(c, radius);
    for (double s : ss)
      for (double p : ps) {
        ZeroExtensionResult r = zero_extension_check(f, cover, s, p);
        all_ok = all_ok && r.tail_bound_ok;
        csv.row({"bump-" + std::to_string(i), fmt(s), fmt(p),
                 fmt(r.ext_seminorm_p), fmt(r.interior_seminorm_p),
                 fmt(r.hardy_term_p), fmt(r.max_tail_ratio),
                 r.tail_bound_ok ? "1" : "0"});
      }
  }
  summary["extension"] = {{"tail_bound_ok", all_ok}};
  if (!all_ok)
    throw Error(ErrorKind::InvariantViolation,
                "zero-extension tail bound violated");
}

void run_multiplier(const json& cfg, const Domain& dom, const fs::path& out,
                    uint64_t seed, json& summary) {
  std::vector<double> ss = doubles_from(cfg, "s", {0.3});
  std::vector<double> ps = doubles_from(cfg, "p", {2.0});
  std::vector<double> qs = doubles_from(cfg, "q", {2.0});
  std::vector<int> jlist = ints_from(cfg, "j_max", {6, 7});
  check_sp(ss, ps);
  int n_bumps = cfg.value("bumps", 6);

  // Porosity precondition (warning only).
  std::vector<double> scales = {0.25, 0.1};
  bool porous = porosity_constant(dom.boundary(), scales, 12, seed).has_value();

  Rng rng(seed ^ 0xabcdULL);
  double diam = std::max(dom.boundary_diameter(), 0.2);
  std::vector<Vec2> pts = dom.boundary().sample_points(n_bumps, seed);
  Csv csv(out / "multiplier.csv",
          "field_id,s,p,q,j_max,ratio,norm_masked,norm_plain,hardy_part,"
          "porosity_warning");
  for (int j : jlist)
    for (int i = 0; i < n_bumps; ++i) {
      double radius = diam * rng.uniform(0.08, 0.3);
      ScalarField f = bump_field(pts[i], radius);
      for (double s : ss)
        for (double p : ps)
          for (double q : qs) {
            NormParams np = NormParams::make(s, p, q);
            MultiplierResult r = multiplier_ratio(f, dom, np, j, porous);
            csv.row({"bump-" + std::to_string(i), fmt(s), fmt(p), fmt(q),
                     std::to_string(j), r.defined ? fmt(r.ratio) : "nan",
                     fmt(r.norm_masked), fmt(r.norm_plain), fmt(r.hardy_part),
                     r.porosity_warning ? "1" : "0"});
          }
    }
  summary["multiplier"] = {{"porosity_established", porous}};
}

void run_homogeneity(const json& cfg, const Domain&, const fs::path& out,
                     uint64_t, json& summary) {
  std::vector<double> ss = doubles_from(cfg, "s", {0.5});
  std::vector<double> ps = doubles_from(cfg, "p", {2.0});
  std::vector<double> qs = doubles_from(cfg, "q", {2.0});
  std::vector<double> radii =
      doubles_from(cfg, "radii", {1.0, 0.5, 0.25, 0.125});
  int jmax = ints_from(cfg, "j_max", {8})[0];
  check_sp(ss, ps);
  ScalarField f = bump_field({0.5, 0.5}, 0.4);
  Csv csv(out / "homogeneity.csv", "s,p,q,radius,norm,slope,expected");
  json rows = json::array();
  for (double s : ss)
    for (double p : ps)
      for (double q : qs) {
        NormParams np = NormParams::make(s, p, q);
        HomogeneityResult r = homogeneity_slope(f, np, radii, jmax);
        double expected = s - 2.0 / p;
        for (size_t i = 0; i < radii.size(); ++i)
          csv.row({fmt(s), fmt(p), fmt(q), fmt(radii[i]), fmt(r.norms[i]),
                   fmt(r.slope), fmt(expected)});
        rows.push_back({{"s", s}, {"p", p}, {"q", q},
                        {"slope", r.slope}, {"expected", expected}});
      }
  summary["homogeneity"] = rows;
}

}  // namespace

Domain domain_from_json(const std::string& json_text) {
  return domain_from(json::parse(json_text));
}

ScalarField field_from_json(const std::string& json_text) {
  return field_from(json::parse(json_text));
}

int run_experiment(const std::string& config_json, const std::string& out_dir,
                   int jobs, std::optional<uint64_t> seed_override,
                   std::string* diagnostic, const std::string& task_override) {
  auto fail = [&](int code, const std::string& msg) {
    if (diagnostic) *diagnostic = msg;
    return code;
  };
  json cfg;
  try {
    cfg = json::parse(config_json);
  } catch (const std::exception& e) {
    return fail(1, std::string("config parse error: ") + e.what());
  }

  auto started = std::chrono::steady_clock::now();
  try {
    validate_keys(cfg);
    if (!cfg.contains("domain"))
      throw Error(ErrorKind::InvalidArgument, "config needs 'domain'");
    if (!cfg.contains("task") && task_override.empty())
      throw Error(ErrorKind::InvalidArgument, "config needs 'task'");
    std::string task =
        cfg.contains("task") ? cfg["task"].get<std::string>() : task_override;
    if (!task_override.empty() && cfg.contains("task") &&
        task != task_override)
      throw Error(ErrorKind::InvalidArgument,
                  "config task '" + task + "' conflicts with subcommand '" +
                      task_override + "'");
    Domain dom = domain_from(cfg["domain"]);
    uint64_t seed =
        seed_override ? *seed_override : cfg.value("seed", uint64_t(1));

    fs::path out(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    {
      std::ofstream probe(out / ".write_probe");
      if (!probe)
        throw Error(ErrorKind::InvalidArgument,
                    "output directory is not writable: " + out_dir);
    }
    fs::remove(out / ".write_probe");

    set_parallelism(jobs);

    json summary;
    summary["version"] = kVersion;
    summary["task"] = task;
    summary["domain"] = dom.name();
    summary["seed"] = seed;
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                  (unsigned long long)fnv1a(config_json));
    summary["config_hash"] = hash_buf;

    if (task == "whitney")
      run_whitney(cfg, dom, out, seed, summary);
    else if (task == "dimension")
      run_dimension(cfg, dom, out, seed, summary);
    else if (task == "porosity")
      run_porosity(cfg, dom, out, seed, summary);
    else if (task == "chains")
      run_chains(cfg, dom, out, seed, summary);
    else if (task == "hardy-sweep")
      run_hardy_sweep(cfg, dom, out, seed, summary);
    else if (task == "extension")
      run_extension(cfg, dom, out, seed, summary);
    else if (task == "multiplier")
      run_multiplier(cfg, dom, out, seed, summary);
    else if (task == "homogeneity")
      run_homogeneity(cfg, dom, out, seed, summary);
    else
      throw Error(ErrorKind::InvalidArgument, "unknown task: " + task);

    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    summary["wall_clock_sec"] = wall;
    std::ofstream sf(out / "summary.json");
    sf << summary.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    bool mid_run = e.kind() == ErrorKind::InvariantViolation ||
                   e.kind() == ErrorKind::Resolution;
    return fail(mid_run ? 2 : 1, e.what());
  } catch (const std::exception& e) {
    return fail(1, e.what());
  }
}

}  // namespace hardylab
