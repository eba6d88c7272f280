#include "qkg_cli/commands.hpp"

#include "qkg_cli/io.hpp"
#include "qkg_cli/report.hpp"

#include <qkg/version.hpp>

#include <boost/version.hpp>
#include <gmp.h>
#include <mpfr.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>

namespace qkg::cli {

namespace fs = std::filesystem;

namespace {

// Exit-3 refusal with a machine-readable explanation.
class Refusal : public std::runtime_error {
 public:
  Refusal(const std::string& what, json detail) : std::runtime_error(what), detail_(std::move(detail)) {}
  const json& detail() const { return detail_; }

 private:
  json detail_;
};

struct Context {
  const RunConfig& cfg;
  std::ostream& log;
  fs::path out;
  std::vector<std::string> artifacts;
  std::map<std::string, std::string> verdicts;
  std::optional<ConstantsReport> constants;

  void write_csv(const std::string& name, const CsvTable& t) {
    write_atomic(out / name, t.str());
    artifacts.push_back(name);
  }
};

struct Pipeline {
  ExponentConditionReport condition;
  SeriesBracket sum_psi;
  ConstantsReport constants;
};

bool empirical_overridden(const RunConfig& cfg) {
  return cfg.overrides.count("theta") && cfg.overrides.count("K3") && cfg.overrides.count("K4");
}

// Exponent condition, then the constant chain. With `require_pass` a
// condition that does not pass refuses the run unless theta, K3 and K4 are
// all supplied as overrides.
Pipeline constants_pipeline(Context& ctx, const AffineSubspace& h, bool require_pass) {
  const RunConfig& cfg = ctx.cfg;
  Pipeline p;
  p.condition = check_condition(h, cfg.bounds.exponent_q, MultivectorSearch{cfg.bounds.height, cfg.bounds.cap, 8});
  ctx.verdicts["exponent_condition"] = p.condition.verdict;
  if (require_pass && p.condition.verdict != "pass" && !empirical_overridden(cfg))
    throw Refusal("exponent condition verdict '" + p.condition.verdict + "': " + p.condition.explanation,
                  to_json(p.condition));
  try {
    p.sum_psi = sum_psi_lattice(cfg.psi_function(), cfg.n);
  } catch (const DivergentSeries& e) {
    throw Refusal(e.what(), {{"psi", cfg.psi_function().describe()}});
  }
  ConstantsRequest req;
  req.s = cfg.s;
  req.n = cfg.n;
  req.u = cfg.ball();
  req.xi = cfg.xi;
  req.sum_psi = p.sum_psi.upper;
  req.empirical = {p.condition.empirical_theta, p.condition.empirical_k3, p.condition.empirical_k4,
                   cfg.bounds.exponent_q, cfg.bounds.height};
  req.besicovitch = cfg.besicovitch_table();
  req.overrides = cfg.overrides;
  try {
    p.constants = evaluate_constants(req);
  } catch (const std::domain_error& e) {
    throw Refusal(std::string("constants cannot be evaluated: ") + e.what(), to_json(p.condition));
  }
  ctx.constants = p.constants;
  return p;
}

SamplePoints sample_ball(const RunConfig& cfg, const Ball& u) {
  if (cfg.bounds.sampling == "monte_carlo")
    return monte_carlo_points(u, static_cast<std::size_t>(cfg.bounds.grid), cfg.seed);
  return grid_points(u, per_axis_for(cfg.s, cfg.bounds.grid, 1 << 30));
}

std::string q_text(const std::vector<long long>& q) {
  std::string s;
  for (std::size_t i = 0; i < q.size(); ++i) s += (i ? " " : "") + std::to_string(q[i]);
  return s;
}

json cmd_exponents(Context& ctx) {
  const AffineSubspace h = ctx.cfg.subspace();
  const auto rep = check_condition(h, ctx.cfg.bounds.exponent_q,
                                   MultivectorSearch{ctx.cfg.bounds.height, ctx.cfg.bounds.cap, 8});
  ctx.verdicts["exponent_condition"] = rep.verdict;
  CsvTable t({"j", "infinite", "value", "margin", "search_bound", "examined", "capped"});
  for (std::size_t j = 0; j < rep.per_j.size(); ++j) {
    const auto& e = rep.per_j[j];
    t.add({std::to_string(j + 1), e.infinite ? "1" : "0", e.infinite ? "inf" : fmt(e.value),
           rep.margins[j] ? fmt(*rep.margins[j]) : "", std::to_string(e.search_bound), std::to_string(e.examined),
           e.capped ? "1" : "0"});
  }
  ctx.write_csv("exponents_per_j.csv", t);
  return to_json(rep);
}

json cmd_constants(Context& ctx) {
  const AffineSubspace h = ctx.cfg.subspace();
  const Pipeline p = constants_pipeline(ctx, h, false);
  json j = to_json(p.constants);
  j["condition_verdict"] = p.condition.verdict;
  j["sum_psi"] = to_json(p.sum_psi);
  j["psi"] = ctx.cfg.psi_function().describe();
  j["besicovitch"] = json::object();
  const BesicovitchTable table = ctx.cfg.besicovitch_table();
  for (const auto& [d, v] : table.values()) j["besicovitch"][std::to_string(d)] = v;
  return j;
}

json cmd_good_check(Context& ctx) {
  if (!ctx.cfg.good) throw ConfigError("/good", "good-check needs a good section");
  const GoodSpec& g = *ctx.cfg.good;
  const Polynomial poly(g.s, g.terms);
  const GoodPair def = good_constant(g.s, std::max(1, poly.degree()));
  const double c = g.c.value_or(def.c);
  const double alpha = g.alpha.value_or(def.alpha);
  GoodCheckOptions opt;
  opt.per_axis = g.per_axis;
  const auto rep = check_good(GoodFunction::from_polynomial(poly), c, alpha, Ball(g.center, g.radius), g.epsilons, opt);
  ctx.verdicts["good"] = rep.verdict;
  CsvTable t({"epsilon", "measured", "error_bound", "sup", "sup_exact", "rhs", "passed"});
  for (const auto& s : rep.samples)
    t.add({fmt(s.epsilon), fmt(s.measured), fmt(s.error_bound), fmt(s.sup), s.sup_exact ? "1" : "0", fmt(s.rhs),
           s.passed ? "1" : "0"});
  ctx.write_csv("good_check_per_eps.csv", t);
  json j = to_json(rep);
  j["C"] = c;
  j["alpha"] = alpha;
  j["degree"] = poly.degree();
  return j;
}

Real kappa_for(const RunConfig& cfg, const Pipeline& p) { return Real(cfg.kappa.value_or(p.constants["kappa"])); }

json cmd_flow_trace(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const AffineSubspace h = cfg.subspace();
  const Ball u = cfg.ball();
  if (!u.contains(cfg.flow_x)) throw ConfigError("/flow/x", "x must lie inside the ball");
  const Pipeline p = constants_pipeline(ctx, h, true);
  const Real kappa = kappa_for(cfg, p);
  json rows = json::array();
  CsvTable t({"t", "delta", "K", "T", "eps", "in_A_t", "in_A_tilde", "tilde_norm", "svp_euclidean", "svp_sup",
              "svp_certified"});
  for (int tt = 0; tt <= cfg.bounds.t_max; ++tt) {
    const FlowParameters fp = FlowParameters::make(cfg.s, cfg.n, tt, kappa, u.radius, p.constants["beta"]);
    const auto at = in_A_t(h, cfg.flow_x, tt, kappa, u.radius);
    const auto tilde = in_A_tilde(h, cfg.flow_x, fp);
    const auto sve = orbit_shortest_vector(h, cfg.flow_x, fp, NormKind::euclidean);
    const auto svs = orbit_shortest_vector(h, cfg.flow_x, fp, NormKind::sup);
    json row = to_json(fp);
    row["in_A_t"] = at ? json{{"p", at->p}, {"q", at->q}, {"residual", at->residual}, {"gradient", at->gradient}}
                       : json(nullptr);
    row["in_A_tilde"] = tilde ? json{{"p", tilde->p}, {"q", tilde->q}, {"norm", tilde->norm}} : json(nullptr);
    row["shortest"] = {{"euclidean", sve.norm_double()},
                       {"sup", svs.norm_double()},
                       {"coefficients", sve.coeffs},
                       {"certified", sve.certified && svs.certified}};
    rows.push_back(row);
    t.add({std::to_string(tt), fmt(to_double(fp.delta)), fmt(to_double(fp.k_grad)), fmt(to_double(fp.T)),
           fmt(to_double(fp.eps)), at ? "1" : "0", tilde ? "1" : "0", tilde ? fmt(tilde->norm) : "",
           fmt(sve.norm_double()), fmt(svs.norm_double()), sve.certified && svs.certified ? "1" : "0"});
  }
  ctx.write_csv("flow_trace_per_t.csv", t);
  return {{"x", cfg.flow_x}, {"kappa", to_double(kappa)}, {"norms", {{"threshold", "sup"}, {"nu", "euclidean"}}},
          {"per_t", rows}};
}

json cmd_km_check(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const AffineSubspace h = cfg.subspace();
  const Ball u = cfg.ball();
  const Pipeline p = constants_pipeline(ctx, h, true);
  const auto& k = p.constants;
  const Real kappa = kappa_for(cfg, p);
  const int s = cfg.s;
  const int n = cfg.n;

  std::vector<SubgroupBasis> small;
  for (int rank = 1; rank <= n + 1; ++rank)
    for (auto& g : enumerate_primitive_subgroups(s, n, rank, cfg.bounds.km1_height, cfg.bounds.cap))
      small.push_back(std::move(g));
  const std::vector<double> fractions{0.5, 0.1, 0.01};
  json km1 = json::array();
  bool km1_ok = true;
  for (int t : cfg.ts) {
    const FlowParameters fp = FlowParameters::make(s, n, t, kappa, u.radius, k["beta"]);
    const auto r = verify_km1(h, u, fp, small, k["C"], k["alpha"], fractions, cfg.bounds.km_grid);
    km1_ok = km1_ok && r.verdict == "pass";
    json row = to_json(r);
    row["t"] = t;
    km1.push_back(row);
  }
  ctx.verdicts["km1"] = km1_ok ? "pass" : "fail";

  Km2Bounds b;
  b.top = 0.5;
  b.middle = k["K2"] * k["K3"] * std::sqrt(static_cast<double>(n) * s) / (std::pow(2.0, n / 2.0 + 1) * u.radius);
  b.low = k["K5"] / std::pow(2.0, (n + 1) / 2.0);
  b.rho = k["rho"];
  const auto km2 = verify_km2(h, u, kappa, k["beta"], cfg.ts, cfg.bounds.km_grid, cfg.bounds.km_height, b,
                              cfg.bounds.cap);
  ctx.verdicts["km2"] = km2.passed ? "pass" : "fail";
  CsvTable t({"t", "rank", "subgroups", "min_sup", "bound", "ok"});
  for (const auto& row : km2.rows)
    t.add({std::to_string(row.t), std::to_string(row.rank), std::to_string(row.subgroups), fmt(row.min_sup),
           fmt(row.bound), row.ok ? "1" : "0"});
  ctx.write_csv("km2_per_t.csv", t);
  return {{"kappa", to_double(kappa)},
          {"km1_height", cfg.bounds.km1_height},
          {"km1_subgroups", small.size()},
          {"km1", km1},
          {"km2_bounds", {{"top", b.top}, {"middle", b.middle}, {"low", b.low}, {"rho", b.rho}}},
          {"km2", to_json(km2)}};
}

json cmd_nondiv(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const AffineSubspace h = cfg.subspace();
  const Ball u = cfg.ball();
  const Pipeline p = constants_pipeline(ctx, h, true);
  const auto& k = p.constants;
  NondivRequest req;
  req.kappa = kappa_for(cfg, p);
  req.beta = k["beta"];
  req.ts = cfg.ts;
  for (double f : cfg.eps2_fractions) req.eps2.push_back(f * k["rho"]);
  req.per_axis = cfg.bounds.km_grid;
  req.c = k["C"];
  req.alpha = k["alpha"];
  req.rho = k["rho"];
  req.ns = k["N_s"];
  const auto rep = nondivergence_sweep(h, u, req);
  ctx.verdicts["nondivergence"] = rep.passed ? "pass" : "fail";
  CsvTable t({"t", "eps2", "measured", "rhs", "ok"});
  for (const auto& row : rep.rows)
    t.add({std::to_string(row.t), fmt(row.eps2), fmt(row.measured), fmt(row.rhs), row.ok ? "1" : "0"});
  ctx.write_csv("nondiv_per_t.csv", t);
  json j = to_json(rep);
  j["kappa"] = to_double(req.kappa);
  j["rho"] = req.rho;
  return j;
}

void per_q_csv(Context& ctx, const std::string& name, const BadSetReport& bad, const LargeReport* large) {
  std::map<std::vector<long long>, double> bounds;
  if (large)
    for (const auto& r : large->rows) bounds[r.q] = r.bound;
  CsvTable t({"q", "norm", "class", "measure", "grid_hits", "large_bound"});
  for (const auto& row : bad.per_q) {
    long long norm = 0;
    for (long long v : row.q) norm = std::max(norm, std::abs(v));
    auto it = bounds.find(row.q);
    t.add({q_text(row.q), std::to_string(norm), to_string(row.cls), fmt(row.measure), std::to_string(row.grid_hits),
           it == bounds.end() ? "" : fmt(it->second)});
  }
  ctx.write_csv(name, t);
}

json cmd_bad_set(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const AffineSubspace h = cfg.subspace();
  const Ball u = cfg.ball();
  const PsiFunction psi = cfg.psi_function();
  double kappa = 0.0;
  std::optional<TailInputs> tails;
  if (cfg.kappa) {
    kappa = *cfg.kappa;
  } else {
    const Pipeline p = constants_pipeline(ctx, h, true);
    kappa = p.constants["kappa"];
    tails = TailInputs{p.constants["K_s"], p.sum_psi.upper, p.constants["K0"], p.constants["beta"]};
  }
  const auto rep = measure_bad_set(h, u, psi, kappa, cfg.bounds.q_max, sample_ball(cfg, u), tails);
  per_q_csv(ctx, "bad_set_per_q.csv", rep, nullptr);
  json j = to_json(rep);
  j["psi"] = psi.describe();
  if (rep.tails_computed) {
    const double total = rep.fraction_bad + rep.large_tail + rep.small_tail;
    j["total_with_tails"] = total;
    ctx.verdicts["bad_set_within_xi"] = total <= cfg.xi ? "pass" : "fail";
  }
  return j;
}

json cmd_main_theorem(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const AffineSubspace h = cfg.subspace();
  MainTheoremRequest req;
  req.h = &h;
  req.u = cfg.ball();
  req.psi = cfg.psi_function();
  req.xi = cfg.xi;
  req.bounds.q_max = cfg.bounds.q_max;
  req.bounds.exponent_q = cfg.bounds.exponent_q;
  req.bounds.search = MultivectorSearch{cfg.bounds.height, cfg.bounds.cap, 8};
  req.bounds.grid = cfg.bounds.grid;
  req.bounds.t_max = cfg.bounds.t_max;
  req.besicovitch = cfg.besicovitch_table();
  req.overrides = cfg.overrides;
  MainTheoremReport rep;
  try {
    rep = main_theorem_experiment(req);
  } catch (const PreconditionFailure& e) {
    ctx.verdicts["exponent_condition"] = e.report().verdict;
    throw Refusal(e.what(), to_json(e.report()));
  } catch (const DivergentSeries& e) {
    throw Refusal(e.what(), {{"psi", req.psi.describe()}});
  }
  ctx.constants = rep.constants;
  ctx.verdicts["exponent_condition"] = rep.condition.verdict;
  ctx.verdicts["large_budget"] = rep.large_ok ? "pass" : "fail";
  ctx.verdicts["small_budget"] = rep.small_ok ? "pass" : "fail";
  ctx.verdicts["a_tilde"] = rep.a_tilde_ok ? "pass" : "fail";
  per_q_csv(ctx, "main_theorem_per_q.csv", rep.bad, &rep.large);
  CsvTable t({"t", "points", "members", "measured", "bound", "ok"});
  for (const auto& m : rep.a_tilde)
    t.add({std::to_string(m.t), std::to_string(m.points), std::to_string(m.members), fmt(m.measured), fmt(m.bound),
           m.ok ? "1" : "0"});
  ctx.write_csv("main_theorem_per_t.csv", t);
  json j = to_json(rep);
  j["psi"] = req.psi.describe();
  return j;
}

const std::map<std::string, std::function<json(Context&)>>& table() {
  static const std::map<std::string, std::function<json(Context&)>> t{
      {"exponents", cmd_exponents}, {"constants", cmd_constants}, {"good-check", cmd_good_check},
      {"flow-trace", cmd_flow_trace}, {"km-check", cmd_km_check},   {"nondiv", cmd_nondiv},
      {"bad-set", cmd_bad_set},       {"main-theorem", cmd_main_theorem}};
  return t;
}

json versions() {
  return {{"qkg", QKG_VERSION},
          {"boost", BOOST_LIB_VERSION},
          {"gmp", gmp_version},
          {"mpfr", mpfr_get_version()},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__}};
}

std::string file_stem(const std::string& sub) {
  std::string s = sub;
  for (char& c : s)
    if (c == '-') c = '_';
  return s;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"exponents", "constants", "good-check", "flow-trace",
                                              "km-check",  "nondiv",    "bad-set",    "main-theorem"};
  return names;
}

int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& log) {
  const auto it = table().find(subcommand);
  if (it == table().end()) throw std::invalid_argument("unknown subcommand " + subcommand);
  Context ctx{cfg, log, fs::path(cfg.out), {}, {}, {}};
  const json cfg_json = cfg.to_json();
  const std::string started = utc_timestamp();
  const std::string report_name = file_stem(subcommand) + ".json";

  json report;
  int code = kExitOk;
  try {
    report = it->second(ctx);
  } catch (const Refusal& r) {
    code = kExitPrecondition;
    report = {{"refused", true}, {"reason", r.what()}, {"detail", r.detail()}};
    log << "precondition failure: " << r.what() << "\n";
  }
  report["subcommand"] = subcommand;
  write_json(ctx.out / report_name, report);
  ctx.artifacts.insert(ctx.artifacts.begin(), report_name);

  json manifest;
  manifest["subcommand"] = subcommand;
  // The output directory does not change results, so it stays out of the hash.
  json hashed = cfg_json;
  hashed.erase("out");
  manifest["config_hash"] = sha256_hex(hashed.dump());
  manifest["config"] = cfg_json;
  manifest["seed"] = cfg.seed;
  manifest["versions"] = versions();
  manifest["timestamps"] = {{"started", started}, {"finished", utc_timestamp()}};
  json constants = json::array();
  if (ctx.constants)
    for (const auto& [name, v] : ctx.constants->values)
      constants.push_back(
          {{"name", name}, {"value", v.value}, {"provenance", qkg::to_string(v.provenance)}, {"note", v.note}});
  manifest["constants"] = constants;
  manifest["verdicts"] = ctx.verdicts;
  manifest["artifacts"] = ctx.artifacts;
  manifest["exit_code"] = code;
  write_json(ctx.out / "manifest.json", manifest);

  for (const auto& [k, v] : ctx.verdicts) log << k << ": " << v << "\n";
  log << "wrote " << (ctx.out / report_name).string() << "\n";
  return code;
}

}  // namespace qkg::cli
