#include "qkg_cli/config.hpp"

#include <qkg/numeric.hpp>

#include <cmath>
#include <fstream>
#include <set>

namespace qkg::cli {

namespace {

// Cursor into the document that remembers its JSON pointer.
class Field {
 public:
  Field(const json& node, std::string pointer) : node_(node), pointer_(std::move(pointer)) {}

  const json& node() const { return node_; }
  const std::string& pointer() const { return pointer_; }
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(pointer_.empty() ? "/" : pointer_, what); }

  bool has(const std::string& key) const { return node_.is_object() && node_.contains(key); }
  Field operator[](const std::string& key) const { return {node_.at(key), pointer_ + "/" + escape(key)}; }
  Field operator[](std::size_t i) const { return {node_.at(i), pointer_ + "/" + std::to_string(i)}; }

  void expect_object(const std::set<std::string>& allowed) const {
    if (!node_.is_object()) fail("expected an object");
    for (const auto& [k, v] : node_.items())
      if (!allowed.count(k)) Field(v, pointer_ + "/" + escape(k)).fail("unknown field");
  }
  std::size_t array_size() const {
    if (!node_.is_array()) fail("expected an array");
    return node_.size();
  }
  double number() const {
    if (!node_.is_number()) fail("expected a number");
    const double v = node_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0)) fail("must be positive");
    return v;
  }
  long long integer(long long lo, long long hi) const {
    if (!node_.is_number_integer()) fail("expected an integer");
    const long long v = node_.get<long long>();
    if (v < lo || v > hi) fail("must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }
  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }
  // Matrix entries may be strings ("sqrt2-1", "3/7") or plain numbers.
  std::string entry() const {
    if (node_.is_string()) return node_.get<std::string>();
    if (node_.is_number()) return node_.dump();
    fail("expected an entry string or number");
  }
  std::vector<double> numbers() const {
    std::vector<double> out(array_size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)[i].number();
    return out;
  }

 private:
  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~')
        out += "~0";
      else if (c == '/')
        out += "~1";
      else
        out += c;
    }
    return out;
  }

  const json& node_;
  std::string pointer_;
};

const std::set<std::string> kConstantNames{"N_s", "K_s", "C",  "alpha", "K2", "K3",   "K4",        "theta",
                                           "beta", "K5",  "rho", "K1",   "K0", "V_s", "Sigma_psi", "kappa"};

void parse_overrides(const Field& f, RunConfig& cfg) {
  if (!f.node().is_object()) f.fail("expected an object");
  for (const auto& [k, v] : f.node().items()) {
    Field item = f[k];
    if (k == "besicovitch") {
      if (!v.is_object()) item.fail("expected an object keyed by dimension");
      for (const auto& [dim, val] : v.items()) {
        int d = 0;
        try {
          std::size_t used = 0;
          d = std::stoi(dim, &used);
          if (used != dim.size() || d < 1) throw std::invalid_argument(dim);
        } catch (const std::exception&) {
          item[dim].fail("dimension keys must be positive integers");
        }
        cfg.besicovitch[d] = item[dim].positive();
      }
      continue;
    }
    if (!kConstantNames.count(k)) item.fail("unknown constant name");
    cfg.overrides[k] = item.positive();
  }
}

void parse_subspace(const Field& f, RunConfig& cfg) {
  f.expect_object({"s", "n", "a0", "aprime", "precision"});
  if (f.has("s")) cfg.s = static_cast<int>(f["s"].integer(1, 8));
  if (f.has("n")) cfg.n = static_cast<int>(f["n"].integer(2, 9));
  if (cfg.s >= cfg.n) f["s"].fail("s must be smaller than n");
  if (f.has("precision")) cfg.precision = static_cast<unsigned>(f["precision"].integer(20, 1000));
  const int codim = cfg.n - cfg.s;
  if (!f.has("a0")) f.fail("missing field a0");
  if (!f.has("aprime")) f.fail("missing field aprime");
  const Field a0 = f["a0"];
  if (a0.array_size() != static_cast<std::size_t>(codim)) a0.fail("a0 needs n - s entries");
  cfg.a0.clear();
  cfg.aprime.clear();
  for (int j = 0; j < codim; ++j) cfg.a0.push_back(a0[j].entry());
  const Field ap = f["aprime"];
  if (ap.array_size() != static_cast<std::size_t>(cfg.s)) ap.fail("aprime needs s rows");
  for (int i = 0; i < cfg.s; ++i) {
    const Field row = ap[i];
    if (row.array_size() != static_cast<std::size_t>(codim)) row.fail("each aprime row needs n - s entries");
    std::vector<std::string> r;
    for (int j = 0; j < codim; ++j) r.push_back(row[j].entry());
    cfg.aprime.push_back(std::move(r));
  }
  // Parse now so a malformed entry points at its own field.
  set_working_digits(cfg.precision);
  for (int j = 0; j < codim; ++j) {
    try {
      parse_entry(cfg.a0[j]);
    } catch (const std::exception& e) {
      a0[j].fail(e.what());
    }
  }
  for (int i = 0; i < cfg.s; ++i)
    for (int j = 0; j < codim; ++j) {
      try {
        parse_entry(cfg.aprime[i][j]);
      } catch (const std::exception& e) {
        ap[i][j].fail(e.what());
      }
    }
}

void parse_psi(const Field& f, RunConfig& cfg) {
  f.expect_object({"form", "c", "exponent", "points"});
  PsiSpec p;
  if (f.has("form")) p.form = f["form"].string();
  if (p.form != "power" && p.form != "powerLog" && p.form != "table") f["form"].fail("form must be power, powerLog or table");
  if (f.has("c")) p.c = f["c"].number();
  if (f.has("exponent")) p.exponent = f["exponent"].number();
  if (p.form == "table") {
    if (!f.has("points")) f.fail("table psi needs points");
    const Field pts = f["points"];
    for (std::size_t i = 0; i < pts.array_size(); ++i) {
      const Field pt = pts[i];
      if (pt.array_size() != 2) pt.fail("expected [x, value]");
      p.points.emplace_back(pt[0].number(), pt[1].number());
    }
  }
  cfg.psi = p;
  try {
    (void)cfg.psi_function();
  } catch (const std::invalid_argument& e) {
    f.fail(e.what());
  }
}

void parse_bounds(const Field& f, SearchBounds& b) {
  f.expect_object({"q_max", "exponent_q", "height", "cap", "grid", "t_max", "km_height", "km1_height", "km_grid",
                   "sampling"});
  if (f.has("q_max")) b.q_max = f["q_max"].integer(1, 100000);
  if (f.has("exponent_q")) b.exponent_q = f["exponent_q"].integer(1, 1'000'000'000);
  if (f.has("height")) b.height = f["height"].integer(1, 1000);
  if (f.has("cap")) b.cap = static_cast<std::uint64_t>(f["cap"].integer(1, 4'000'000'000'000LL));
  if (f.has("grid")) b.grid = static_cast<int>(f["grid"].integer(1, 100'000'000));
  if (f.has("t_max")) b.t_max = static_cast<int>(f["t_max"].integer(0, 60));
  if (f.has("km_height")) b.km_height = f["km_height"].integer(1, 100);
  if (f.has("km1_height")) b.km1_height = f["km1_height"].integer(1, 100);
  if (f.has("km_grid")) b.km_grid = static_cast<int>(f["km_grid"].integer(2, 100000));
  if (f.has("sampling")) {
    b.sampling = f["sampling"].string();
    if (b.sampling != "grid" && b.sampling != "monte_carlo") f["sampling"].fail("sampling must be grid or monte_carlo");
  }
}

void parse_good(const Field& f, RunConfig& cfg) {
  f.expect_object({"s", "coefficients", "terms", "ball", "epsilons", "c", "alpha", "per_axis"});
  GoodSpec g;
  if (f.has("s")) g.s = static_cast<int>(f["s"].integer(1, 4));
  if (f.has("coefficients") == f.has("terms")) f.fail("give exactly one of coefficients or terms");
  if (f.has("coefficients")) {
    if (g.s != 1) f["coefficients"].fail("coefficients describe a univariate polynomial; use terms for s > 1");
    const auto cs = f["coefficients"].numbers();
    for (std::size_t d = 0; d < cs.size(); ++d) g.terms.push_back({{static_cast<int>(d)}, cs[d]});
  } else {
    const Field ts = f["terms"];
    for (std::size_t i = 0; i < ts.array_size(); ++i) {
      const Field t = ts[i];
      t.expect_object({"exponents", "coefficient"});
      if (!t.has("exponents") || !t.has("coefficient")) t.fail("term needs exponents and coefficient");
      const Field ex = t["exponents"];
      if (ex.array_size() != static_cast<std::size_t>(g.s)) ex.fail("needs s exponents");
      std::vector<int> e;
      for (int k = 0; k < g.s; ++k) e.push_back(static_cast<int>(ex[k].integer(0, 32)));
      g.terms.push_back({e, t["coefficient"].number()});
    }
  }
  if (!f.has("ball")) f.fail("missing field ball");
  const Field b = f["ball"];
  b.expect_object({"center", "radius"});
  if (!b.has("center") || !b.has("radius")) b.fail("ball needs center and radius");
  g.center = b["center"].numbers();
  if (g.center.size() != static_cast<std::size_t>(g.s)) b["center"].fail("center needs s coordinates");
  g.radius = b["radius"].positive();
  if (!f.has("epsilons")) f.fail("missing field epsilons");
  g.epsilons = f["epsilons"].numbers();
  if (g.epsilons.empty()) f["epsilons"].fail("needs at least one epsilon");
  for (std::size_t i = 0; i < g.epsilons.size(); ++i)
    if (!(g.epsilons[i] > 0)) f["epsilons"][i].fail("must be positive");
  if (f.has("c")) g.c = f["c"].positive();
  if (f.has("alpha")) g.alpha = f["alpha"].positive();
  if (f.has("per_axis")) g.per_axis = static_cast<int>(f["per_axis"].integer(2, 1'000'000));
  cfg.good = std::move(g);
}

}  // namespace

AffineSubspace RunConfig::subspace() const {
  set_working_digits(precision);
  std::vector<Entry> a0e;
  for (const auto& e : a0) a0e.push_back(parse_entry(e));
  std::vector<std::vector<Entry>> ape;
  for (const auto& row : aprime) {
    std::vector<Entry> r;
    for (const auto& e : row) r.push_back(parse_entry(e));
    ape.push_back(std::move(r));
  }
  return AffineSubspace(s, n, std::move(a0e), std::move(ape));
}

Ball RunConfig::ball() const { return Ball(center, radius); }

PsiFunction RunConfig::psi_function() const {
  if (psi.form == "power") return PsiFunction::power(psi.c, psi.exponent);
  if (psi.form == "powerLog") return PsiFunction::power_log(psi.c, psi.exponent);
  return PsiFunction::table(psi.points);
}

BesicovitchTable RunConfig::besicovitch_table() const {
  BesicovitchTable t;
  for (const auto& [d, v] : besicovitch) t.set(d, v);
  return t;
}

json RunConfig::to_json() const {
  json j;
  j["subspace"] = {{"s", s}, {"n", n}, {"a0", a0}, {"aprime", aprime}, {"precision", precision}};
  j["ball"] = {{"center", center}, {"radius", radius}};
  json p = {{"form", psi.form}};
  if (psi.form == "table") {
    p["points"] = json::array();
    for (const auto& [x, v] : psi.points) p["points"].push_back({x, v});
  } else {
    p["c"] = psi.c;
    p["exponent"] = psi.exponent;
  }
  j["psi"] = p;
  j["xi"] = xi;
  if (kappa) j["kappa"] = *kappa;
  j["bounds"] = {{"q_max", bounds.q_max},         {"exponent_q", bounds.exponent_q}, {"height", bounds.height},
                 {"cap", bounds.cap},             {"grid", bounds.grid},             {"t_max", bounds.t_max},
                 {"km_height", bounds.km_height}, {"km1_height", bounds.km1_height}, {"km_grid", bounds.km_grid},
                 {"sampling", bounds.sampling}};
  j["flow"] = {{"ts", ts}, {"eps2_fractions", eps2_fractions}, {"x", flow_x}};
  if (good) {
    json terms = json::array();
    for (const auto& [e, c] : good->terms) terms.push_back({{"exponents", e}, {"coefficient", c}});
    j["good"] = {{"s", good->s},
                 {"terms", terms},
                 {"ball", {{"center", good->center}, {"radius", good->radius}}},
                 {"epsilons", good->epsilons},
                 {"per_axis", good->per_axis}};
    if (good->c) j["good"]["c"] = *good->c;
    if (good->alpha) j["good"]["alpha"] = *good->alpha;
  }
  json ov = json::object();
  for (const auto& [k, v] : overrides) ov[k] = v;
  if (!besicovitch.empty()) {
    ov["besicovitch"] = json::object();
    for (const auto& [d, v] : besicovitch) ov["besicovitch"][std::to_string(d)] = v;
  }
  j["overrides"] = ov;
  j["seed"] = seed;
  j["out"] = out;
  return j;
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  cfg.a0 = {"sqrt2-1"};
  cfg.aprime = {{"sqrt3-1"}};
  const Field root(doc, "");
  root.expect_object({"$schema", "subspace", "ball", "psi", "xi", "kappa", "bounds", "flow", "good", "overrides",
                      "seed", "out"});
  if (root.has("subspace")) parse_subspace(root["subspace"], cfg);
  cfg.center.assign(cfg.s, 0.0);
  if (root.has("ball")) {
    const Field b = root["ball"];
    b.expect_object({"center", "radius"});
    if (b.has("center")) {
      cfg.center = b["center"].numbers();
      if (cfg.center.size() != static_cast<std::size_t>(cfg.s)) b["center"].fail("center needs s coordinates");
    }
    if (b.has("radius")) cfg.radius = b["radius"].positive();
  } else if (cfg.s != 1) {
    root.fail("missing field ball (no default for s > 1)");
  }
  if (root.has("psi")) parse_psi(root["psi"], cfg);
  if (root.has("xi")) {
    cfg.xi = root["xi"].number();
    if (!(cfg.xi > 0 && cfg.xi < 1)) root["xi"].fail("xi must lie in (0, 1)");
  }
  if (root.has("kappa")) {
    cfg.kappa = root["kappa"].number();
    if (!(*cfg.kappa > 0 && *cfg.kappa <= 1)) root["kappa"].fail("kappa must lie in (0, 1]");
  }
  if (root.has("bounds")) parse_bounds(root["bounds"], cfg.bounds);
  cfg.flow_x = cfg.center;
  if (root.has("flow")) {
    const Field f = root["flow"];
    f.expect_object({"ts", "eps2_fractions", "x"});
    if (f.has("ts")) {
      const Field ts = f["ts"];
      cfg.ts.clear();
      for (std::size_t i = 0; i < ts.array_size(); ++i) cfg.ts.push_back(static_cast<int>(ts[i].integer(0, 60)));
    }
    if (f.has("eps2_fractions")) {
      cfg.eps2_fractions = f["eps2_fractions"].numbers();
      for (std::size_t i = 0; i < cfg.eps2_fractions.size(); ++i)
        if (!(cfg.eps2_fractions[i] > 0 && cfg.eps2_fractions[i] < 1))
          f["eps2_fractions"][i].fail("fractions of rho must lie in (0, 1)");
    }
    if (f.has("x")) {
      cfg.flow_x = f["x"].numbers();
      if (cfg.flow_x.size() != static_cast<std::size_t>(cfg.s)) f["x"].fail("x needs s coordinates");
    }
  }
  if (root.has("good")) parse_good(root["good"], cfg);
  if (root.has("overrides")) parse_overrides(root["overrides"], cfg);
  if (root.has("seed")) cfg.seed = static_cast<std::uint64_t>(root["seed"].integer(0, std::numeric_limits<long long>::max()));
  if (root.has("out")) cfg.out = root["out"].string();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

void apply_overrides(RunConfig& cfg, const json& doc) { parse_overrides(Field(doc, ""), cfg); }

}  // namespace qkg::cli
