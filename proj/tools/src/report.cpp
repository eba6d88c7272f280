#include "qkg_cli/report.hpp"

namespace qkg::cli {

const char* to_string(GradientClass c) { return c == GradientClass::small ? "small" : "large"; }

json to_json(const ExponentEstimate& e) {
  json w = json::array();
  for (const auto& x : e.witnesses)
    w.push_back({{"vector", x.vector},
                 {"exponent", x.exponent},
                 {"raw_exponent", x.raw_exponent},
                 {"residual", x.residual},
                 {"size", x.size}});
  json j = {{"infinite", e.infinite},
            {"infinite_exact", e.infinite_exact},
            {"search_bound", e.search_bound},
            {"examined", e.examined},
            {"capped", e.capped},
            {"raw_sup", e.raw_sup},
            {"witnesses", w}};
  j["value"] = e.infinite ? json("inf") : json(e.value);
  return j;
}

json to_json(const ExponentConditionReport& r) {
  json per_j = json::array();
  for (std::size_t j = 0; j < r.per_j.size(); ++j) {
    json e = to_json(r.per_j[j]);
    e["j"] = j + 1;
    e["margin"] = r.margins[j] ? json(*r.margins[j]) : json(nullptr);
    per_j.push_back(std::move(e));
  }
  json exc = json::array();
  for (const auto& k : r.k3_exceptions)
    exc.push_back({{"grade", k.grade}, {"coefficients", k.coefficients}, {"residual", k.residual}});
  return {{"s", r.s},
          {"n", r.n},
          {"q_bound", r.q_bound},
          {"height", r.height},
          {"per_j", per_j},
          {"omega_direct", to_json(r.omega_direct)},
          {"verdict", r.verdict},
          {"explanation", r.explanation},
          {"empirical_theta", r.empirical_theta},
          {"empirical_k4", r.empirical_k4},
          {"empirical_k3", r.empirical_k3},
          {"theta_grid_empty", r.theta_grid_empty},
          {"k3_exceptions", exc},
          {"k3_examined", r.k3_examined},
          {"k3_capped", r.k3_capped}};
}

json to_json(const ConstantsReport& r) {
  json vals = json::array();
  for (const auto& [name, v] : r.values)
    vals.push_back({{"name", name}, {"value", v.value}, {"provenance", qkg::to_string(v.provenance)}, {"note", v.note}});
  return {{"s", r.s},         {"n", r.n},           {"r", r.r},           {"ball_center", r.ball_center},
          {"xi", r.xi},       {"q_bound", r.q_bound}, {"height", r.height}, {"beta_rule", r.beta_rule},
          {"values", vals}};
}

json to_json(const GoodCheckReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"center", s.ball.center},
                       {"radius", s.ball.radius},
                       {"epsilon", s.epsilon},
                       {"measured", s.measured},
                       {"error_bound", s.error_bound},
                       {"sup", s.sup},
                       {"sup_exact", s.sup_exact},
                       {"rhs", s.rhs},
                       {"ball_measure", s.ball_measure},
                       {"passed", s.passed},
                       {"resolution_ok", s.resolution_ok}});
  return {{"verdict", r.verdict}, {"worst_ratio", r.worst_ratio}, {"zero_function", r.zero_function}, {"samples", samples}};
}

json to_json(const Km1Report& r) {
  return {{"checked", r.checked},       {"passed", r.passed},         {"failed", r.failed},
          {"inconclusive", r.inconclusive}, {"min_ratio", r.min_ratio}, {"max_ratio", r.max_ratio},
          {"ratio_lower", r.ratio_lower}, {"ratio_ok", r.ratio_ok},   {"worst_good_ratio", r.worst_good_ratio},
          {"verdict", r.verdict}};
}

json to_json(const Km2Report& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"t", row.t},
                    {"rank", row.rank},
                    {"subgroups", row.subgroups},
                    {"min_sup", row.min_sup},
                    {"bound", row.bound},
                    {"ok", row.ok},
                    {"worst", row.worst}});
  return {{"empirical_rho", r.empirical_rho}, {"rho", r.rho},           {"worst_t", r.worst_t}, {"worst", r.worst},
          {"subgroups", r.subgroups},         {"passed", r.passed},     {"rows", rows}};
}

json to_json(const NondivReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"t", row.t}, {"eps2", row.eps2}, {"measured", row.measured}, {"rhs", row.rhs}, {"ok", row.ok}});
  return {{"points", r.points}, {"uncertified", r.uncertified}, {"passed", r.passed}, {"rows", rows}};
}

json to_json(const ATildeMeasurement& m) {
  json j = {{"t", m.t},
            {"points", m.points},
            {"members", m.members},
            {"measured", m.measured},
            {"bound", m.bound},
            {"inclusion_ok", m.inclusion_ok},
            {"ok", m.ok}};
  if (m.at_measured) {
    j["members_at"] = m.members_at;
    j["measured_at"] = m.measured_at;
  }
  return j;
}

json to_json(const LargeReport& r) {
  return {{"q_max", r.q_max},
          {"large_count", r.large_count},
          {"total", r.total},
          {"total_bound", r.total_bound},
          {"budget", r.budget},
          {"per_q_violations", r.per_q_violations},
          {"worst_per_q_ratio", r.worst_per_q_ratio},
          {"ok", r.ok}};
}

json to_json(const BadSetReport& r) {
  json j = {{"kappa", r.kappa},
            {"q_max", r.q_max},
            {"grid", r.grid},
            {"points", r.points},
            {"excluded_exact_hits", r.excluded_exact_hits},
            {"bad", r.bad},
            {"bad_small", r.bad_small},
            {"bad_large", r.bad_large},
            {"fraction_bad", r.fraction_bad},
            {"ci95", {r.ci_low, r.ci_high}},
            {"union_bound", r.union_bound},
            {"q_norm", "sup"}};
  if (r.tails_computed) j["tails"] = {{"large", r.large_tail}, {"small", r.small_tail}, {"t_Q", r.t_q}};
  return j;
}

json to_json(const SeriesBracket& b) {
  return {{"lower", b.lower}, {"upper", b.upper}, {"terms", b.terms}, {"exact", b.exact}};
}

json to_json(const FlowParameters& p) {
  return {{"t", p.t},
          {"kappa", to_double(p.kappa)},
          {"r", p.r},
          {"beta", p.beta},
          {"delta", to_double(p.delta)},
          {"K", to_double(p.k_grad)},
          {"T", to_double(p.T)},
          {"eps_prime", to_double(p.eps_prime)},
          {"eps", to_double(p.eps)}};
}

json to_json(const MainTheoremReport& r) {
  json at = json::array();
  for (const auto& m : r.a_tilde) at.push_back(to_json(m));
  return {{"condition", to_json(r.condition)},
          {"constants", to_json(r.constants)},
          {"sum_psi", to_json(r.sum_psi)},
          {"kappa", r.kappa},
          {"kappa_half_xi", r.kappa_half_xi},
          {"xi", r.xi},
          {"large", to_json(r.large)},
          {"bad", to_json(r.bad)},
          {"a_tilde", at},
          {"small_empirical", r.small_empirical},
          {"large_empirical", r.large_empirical},
          {"total", r.total},
          {"large_ok", r.large_ok},
          {"small_ok", r.small_ok},
          {"a_tilde_ok", r.a_tilde_ok},
          {"verdict", r.verdict}};
}

}  // namespace qkg::cli
