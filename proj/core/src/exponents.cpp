#include "qkg/exponents.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qkg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Visits integer tuples in [-h, h]^len, lexicographic, whose first nonzero
// entry is positive (w and -w give the same norms). Returns false when the
// visitor asked to stop or the cap was hit.
template <class Visit>
bool for_each_half_tuple(std::size_t len, long long h, std::uint64_t cap, std::uint64_t& visited, Visit&& visit) {
  std::vector<long long> t(len, -h);
  for (;;) {
    auto first = std::find_if(t.begin(), t.end(), [](long long v) { return v != 0; });
    if (first != t.end() && *first > 0) {
      if (visited >= cap) return false;
      ++visited;
      if (!visit(std::span<const long long>(t))) return false;
    }
    std::size_t k = len;
    while (k > 0) {
      --k;
      if (t[k] < h) {
        ++t[k];
        break;
      }
      t[k] = -h;
      if (k == 0) return true;
    }
    if (len == 0) return true;
  }
}

class WitnessTable {
 public:
  explicit WitnessTable(std::size_t keep) : keep_(keep) {}

  void offer(ExponentWitness w) {
    if (keep_ == 0) return;
    if (items_.size() == keep_ && !(w.exponent > items_.back().exponent)) return;
    auto pos = std::upper_bound(items_.begin(), items_.end(), w,
                                [](const ExponentWitness& a, const ExponentWitness& b) { return a.exponent > b.exponent; });
    items_.insert(pos, std::move(w));
    if (items_.size() > keep_) items_.pop_back();
  }

  std::vector<ExponentWitness> take() { return std::move(items_); }

 private:
  std::size_t keep_;
  std::vector<ExponentWitness> items_;
};

long long sup_norm(std::span<const long long> v) {
  long long m = 0;
  for (long long x : v) m = std::max(m, x < 0 ? -x : x);
  return m;
}

double scale_log(long long bound) { return std::log(static_cast<double>(std::max<long long>(bound, 2))); }

}  // namespace

ExponentEstimate omega(const EntryMatrix& a, long long q_bound, std::size_t keep) {
  if (q_bound < 1) throw std::invalid_argument("omega needs Q >= 1");
  if (a.empty() || a.front().empty()) throw std::invalid_argument("omega needs a non-empty matrix");
  const std::size_t n = a.front().size();
  std::vector<LinearForm> rows;
  for (const auto& row : a) {
    if (row.size() != n) throw std::invalid_argument("ragged matrix");
    rows.emplace_back(Entry(), row);
  }

  ExponentEstimate est;
  est.search_bound = q_bound;
  const double log_b = scale_log(q_bound);
  double d_min = kInf;
  WitnessTable table(keep);
  std::uint64_t visited = 0;

  for_each_half_tuple(n, q_bound, std::numeric_limits<std::uint64_t>::max(), visited, [&](std::span<const long long> q) {
    double d = 0.0;
    bool zero = true;
    bool exact = true;
    for (const auto& row : rows) {
      const Residual r = row.nearest(q);
      if (!r.zero) zero = false;
      exact = exact && (r.exact || !r.zero);
      d = std::max(d, std::abs(r.value));
    }
    const long long size = sup_norm(q);
    if (zero) {
      est.infinite = true;
      est.infinite_exact = exact;
      table.offer({std::vector<long long>(q.begin(), q.end()), kInf, kInf, 0.0, size});
      return false;
    }
    d_min = std::min(d_min, d);
    const double e = -std::log(d) / log_b;
    const double raw = size >= 2 ? -std::log(d) / std::log(static_cast<double>(size)) : 0.0;
    est.raw_sup = std::max(est.raw_sup, raw);
    table.offer({std::vector<long long>(q.begin(), q.end()), e, raw, d, size});
    return true;
  });

  est.examined = visited;
  est.value = est.infinite ? kInf : -std::log(d_min) / log_b;
  if (est.infinite) est.raw_sup = kInf;
  est.witnesses = table.take();
  return est;
}

RcEvaluator::RcEvaluator(const AffineSubspace& h, int grade) : s_(h.s()), n_(h.n()), grade_(grade) {
  if (grade < 1 || grade > n_ + 1) throw std::invalid_argument("grade out of range");
  if (n_ + 1 > 20) throw std::invalid_argument("dimension too large for dense blade indexing");
  const int bits = n_ + 1;
  std::vector<int> index(std::size_t{1} << bits, -1);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << bits); ++m)
    if (std::popcount(m) == grade) {
      index[m] = static_cast<int>(blades_.size());
      blades_.push_back(m);
    }
  std::uint64_t bullet_mask = 0;
  for (int k = s_ + 1; k <= n_; ++k) bullet_mask |= std::uint64_t{1} << k;
  for (std::size_t i = 0; i < blades_.size(); ++i)
    if ((blades_[i] & ~bullet_mask) == 0) bullet_index_.push_back(static_cast<int>(i));

  const int m = h.codim();
  for (int row = 0; row <= s_; ++row) {
    std::vector<Entry> coeffs{Entry::from_int(1)};
    for (int l = 0; l < m; ++l) coeffs.push_back(h.a(row, l));
    rows_.emplace_back(Entry(), std::move(coeffs));
  }

  std::vector<int> ks;
  const std::uint64_t coord_mask = ((std::uint64_t{1} << bits) - 1) & ~std::uint64_t{1};
  for (int row = 0; row <= s_; ++row) {
    ks.assign(1, row);
    for (int k = s_ + 1; k <= n_; ++k) ks.push_back(k);
    for (std::uint64_t J = 0; J < (std::uint64_t{1} << bits); ++J) {
      if ((J & ~coord_mask) || std::popcount(J) != grade - 1) continue;
      Slot slot{row, {}};
      bool any = false;
      for (int k : ks) {
        const std::uint64_t bit = std::uint64_t{1} << k;
        if (J & bit) {
          slot.args.emplace_back(-1, 0);
          continue;
        }
        // <e_k ^ e_J, w> = (-1)^{#{j in J : j < k}} w_{J+k}
        const int before = std::popcount(J & (bit - 1));
        slot.args.emplace_back(index[J | bit], before % 2 == 0 ? 1 : -1);
        any = true;
      }
      if (any) slots_.push_back(std::move(slot));
    }
  }
}

RcEvaluation RcEvaluator::evaluate(std::span<const long long> coeffs) const {
  if (coeffs.size() != blades_.size()) throw std::invalid_argument("coefficient count does not match the grade");
  RcEvaluation out;
  out.zero = true;
  out.exact = true;
  std::vector<long long> z;
  for (const auto& slot : slots_) {
    z.clear();
    bool nonzero = false;
    for (const auto& [idx, sign] : slot.args) {
      const long long v = idx < 0 ? 0 : sign * coeffs[idx];
      nonzero = nonzero || v != 0;
      z.push_back(v);
    }
    if (!nonzero) continue;
    const Residual r = rows_[slot.row].value(z);
    if (!r.zero) {
      out.zero = false;
      out.residual = std::max(out.residual, std::abs(r.value));
    } else if (!r.exact) {
      out.exact = false;
    }
  }
  for (int b : bullet_index_) out.bullet = std::max(out.bullet, coeffs[b] < 0 ? -coeffs[b] : coeffs[b]);
  return out;
}

OmegaJResult omega_j_profile(const AffineSubspace& h, int j, const MultivectorSearch& search) {
  const int s = h.s();
  const int n = h.n();
  if (j < 1 || j > n - s) throw std::invalid_argument("omega_j needs 1 <= j <= n-s");
  if (search.height < 1) throw std::invalid_argument("omega_j needs height >= 1");

  const long long H = search.height;
  OmegaJResult res;
  ExponentEstimate& est = res.estimate;
  GradeProfile& prof = res.profile;
  est.search_bound = H;
  prof.grade = j;
  prof.min_residual_by_size.assign(static_cast<std::size_t>(H) + 1, kInf);
  const double log_b = scale_log(H);
  double d_min = kInf;
  WitnessTable table(search.keep);
  std::uint64_t visited = 0;

  auto record = [&](std::vector<long long> w, double d, bool zero, bool exact, long long bullet) {
    if (bullet == 0) return true;  // no constraint from pi_bullet(w) = 0
    if (zero) {
      est.infinite = true;
      est.infinite_exact = exact;
      prof.min_residual_by_size[bullet] = 0.0;
      table.offer({std::move(w), kInf, kInf, 0.0, bullet});
      return false;
    }
    auto& slot = prof.min_residual_by_size[bullet];
    slot = std::min(slot, d);
    d_min = std::min(d_min, d);
    const double u = -std::log(d) / log_b;
    const double raw_u = bullet >= 2 ? -std::log(d) / std::log(static_cast<double>(bullet)) : 0.0;
    const double v = j * u + j - 1;
    const double raw_v = bullet >= 2 ? j * raw_u + j - 1 : 0.0;
    est.raw_sup = std::max(est.raw_sup, raw_v);
    table.offer({std::move(w), v, raw_v, d, bullet});
    return true;
  };

  bool complete = true;
  if (j == 1) {
    // Each block row of R_A c(w) is w_i + A_i . q with q = pi_bullet(w); the
    // free coordinates w_0..w_s are best chosen as nearest integers.
    const int m = h.codim();
    std::vector<LinearForm> tails;
    std::vector<LinearForm> full;
    for (int i = 0; i <= s; ++i) {
      std::vector<Entry> row;
      for (int l = 0; l < m; ++l) row.push_back(h.a(i, l));
      tails.emplace_back(Entry(), row);
      row.insert(row.begin(), Entry::from_int(1));
      full.emplace_back(Entry(), std::move(row));
    }
    std::vector<long long> z(m + 1);
    complete = for_each_half_tuple(m, H, search.cap, visited, [&](std::span<const long long> q) {
      std::vector<long long> w(n + 1);
      double d = 0.0;
      bool zero = true;
      bool exact = true;
      for (int i = 0; i <= s; ++i) {
        Residual r = tails[i].nearest(q);
        long long wi = -r.nearest;
        if (wi > H || wi < -H) {
          wi = std::clamp(wi, -H, H);
          z[0] = wi;
          std::copy(q.begin(), q.end(), z.begin() + 1);
          r = full[i].value(z);
        }
        w[i] = wi;
        if (!r.zero) zero = false;
        exact = exact && (r.exact || !r.zero);
        d = std::max(d, std::abs(r.value));
      }
      std::copy(q.begin(), q.end(), w.begin() + s + 1);
      return record(std::move(w), d, zero, exact, sup_norm(q));
    });
  } else {
    const RcEvaluator ev(h, j);
    complete = for_each_half_tuple(ev.coefficient_count(), H, search.cap, visited, [&](std::span<const long long> w) {
      const RcEvaluation r = ev.evaluate(w);
      return record(std::vector<long long>(w.begin(), w.end()), r.residual, r.zero, r.exact, r.bullet);
    });
  }
  est.examined = visited;
  prof.examined = visited;
  est.capped = !complete && !est.infinite;
  prof.capped = est.capped;
  if (est.infinite) {
    est.value = kInf;
    est.raw_sup = kInf;
  } else {
    est.value = d_min == kInf ? 0.0 : j * (-std::log(d_min) / log_b) + j - 1;
  }
  est.witnesses = table.take();
  return res;
}

ExponentEstimate omega_j(const AffineSubspace& h, int j, const MultivectorSearch& search) {
  return omega_j_profile(h, j, search).estimate;
}

ThetaFit fit_theta_k4(int n, double max_omega, const std::vector<GradeProfile>& profiles) {
  auto k4_at = [&](double theta) {
    double k4 = kInf;
    for (const auto& p : profiles) {
      const double expo = ((n - theta) + 1 - p.grade) / p.grade;
      for (std::size_t size = 1; size < p.min_residual_by_size.size(); ++size) {
        const double r = p.min_residual_by_size[size];
        if (r == kInf) continue;
        k4 = std::min(k4, r * std::pow(static_cast<double>(size), expo));
      }
    }
    return k4 == kInf ? 0.0 : k4;
  };

  ThetaFit fit;
  const double top = n - max_omega;
  for (int step = 1; step * 0.1 <= top + 1e-12; ++step) {
    const double theta = step * 0.1;
    const double k4 = k4_at(theta);
    if (k4 > 0) {
      fit.theta = theta;
      fit.k4 = k4;
    }
  }
  if (fit.theta == 0.0) {
    fit.grid_empty = true;
    fit.k4 = k4_at(0.0);
  }
  return fit;
}

ExponentConditionReport check_condition(const AffineSubspace& h, long long q_bound, const MultivectorSearch& search) {
  ExponentConditionReport rep;
  rep.s = h.s();
  rep.n = h.n();
  rep.q_bound = q_bound;
  rep.height = search.height;

  EntryMatrix a;
  for (int i = 0; i <= h.s(); ++i) {
    std::vector<Entry> row;
    for (int l = 0; l < h.codim(); ++l) row.push_back(h.a(i, l));
    a.push_back(std::move(row));
  }
  rep.omega_direct = omega(a, q_bound, search.keep);

  std::vector<GradeProfile> profiles;
  bool any_infinite = false;
  bool any_capped = false;
  double max_omega = 0.0;
  std::string worst;
  for (int j = 1; j <= h.codim(); ++j) {
    auto r = omega_j_profile(h, j, search);
    const auto& e = r.estimate;
    if (e.infinite) {
      any_infinite = true;
      rep.margins.emplace_back(std::nullopt);
      worst += "omega_" + std::to_string(j) + " = +inf (exact annihilation found); ";
    } else {
      rep.margins.emplace_back(h.n() - e.value);
      max_omega = std::max(max_omega, e.value);
      if (e.value >= h.n())
        worst += "omega_" + std::to_string(j) + " estimate " + std::to_string(e.value) + " >= n; ";
    }
    any_capped = any_capped || e.capped;
    rep.per_j.push_back(e);
    profiles.push_back(std::move(r.profile));
  }

  if (any_infinite || !worst.empty()) {
    rep.verdict = "fail";
    rep.explanation = worst.substr(0, worst.size() - 2);
  } else if (any_capped) {
    rep.verdict = "inconclusive";
    rep.explanation = "enumeration cap reached before the height box was covered";
  } else {
    rep.verdict = "pass";
    rep.explanation = "all omega_j estimates below n at the search bounds";
  }

  if (!any_infinite) {
    const ThetaFit fit = fit_theta_k4(h.n(), max_omega, profiles);
    rep.empirical_theta = fit.theta;
    rep.empirical_k4 = fit.k4;
    rep.theta_grid_empty = fit.grid_empty;
  }

  // K3 over grades n-s < k <= n; w with ||R_A c(w)|| < 1 are reported as
  // exception candidates and left out of the minimum.
  double k3 = kInf;
  for (int k = h.codim() + 1; k <= h.n(); ++k) {
    const RcEvaluator ev(h, k);
    std::uint64_t visited = 0;
    const bool complete = for_each_half_tuple(ev.coefficient_count(), search.height, search.cap, visited,
                                              [&](std::span<const long long> w) {
                                                const RcEvaluation r = ev.evaluate(w);
                                                const double v = r.zero ? 0.0 : r.residual;
                                                if (v < 1.0) {
                                                  if (rep.k3_exceptions.size() < 64)
                                                    rep.k3_exceptions.push_back(
                                                        {std::vector<long long>(w.begin(), w.end()), v, k});
                                                } else {
                                                  k3 = std::min(k3, v);
                                                }
                                                return true;
                                              });
    rep.k3_examined += visited;
    rep.k3_capped = rep.k3_capped || !complete;
  }
  rep.empirical_k3 = k3 == kInf ? 1.0 : k3;
  return rep;
}

HyperplaneReport hyperplane_check(const std::vector<Entry>& a, double delta, long long q_bound) {
  if (a.empty()) throw std::invalid_argument("hyperplane_check needs a non-empty vector");
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  const double n = static_cast<double>(a.size());
  HyperplaneReport rep;
  rep.q_bound = q_bound;
  rep.delta = delta;
  std::vector<LinearForm> forms;
  for (const auto& ai : a) forms.emplace_back(Entry(), std::vector<Entry>{ai});
  for (long long q = 1; q <= q_bound; ++q) {
    const long long z[1] = {q};
    double d = 0.0;
    for (const auto& f : forms) d = std::max(d, std::abs(f.nearest(z).value));
    const double threshold = std::pow(static_cast<double>(q), -n + delta);
    if (!(d > threshold)) rep.violations.push_back({q, d, threshold});
  }
  if (rep.violations.empty())
    rep.verdict = "pass";
  else if (rep.violations.back().q <= q_bound / 2)
    rep.verdict = "pass-with-exceptions";
  else
    rep.verdict = "fail";
  return rep;
}

}  // namespace qkg
