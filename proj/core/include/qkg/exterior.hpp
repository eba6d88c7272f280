#pragma once

// Sparse exterior algebra over W = R^{1+s+n} with ordered basis
//   e0 < e*1 < ... < e*s < e1 < ... < en.
// A basis k-vector e_I is a bitmask of basis positions; coefficients are
// stored sparsely, sorted by mask, with zero terms removed.

#include "qkg/matrix.hpp"
#include "qkg/numeric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace qkg {

enum class LabelKind : std::uint8_t { origin, star, coord };

struct BasisLabel {
  LabelKind kind = LabelKind::origin;
  int index = 0;

  static constexpr BasisLabel e0() { return {LabelKind::origin, 0}; }
  static constexpr BasisLabel star(int i) { return {LabelKind::star, i}; }
  static constexpr BasisLabel e(int i) { return {LabelKind::coord, i}; }

  auto operator<=>(const BasisLabel&) const = default;
  std::string name() const;
};

using Blade = std::uint64_t;

// Shape of the ambient space: `stars` starred directions and n coordinate
// directions. The lattice side W_{0->n} is Frame{0, n}.
struct Frame {
  int stars = 0;
  int n = 0;

  static Frame ambient(int s, int n) { return {s, n}; }
  static Frame lattice(int n) { return {0, n}; }

  int dim() const { return 1 + stars + n; }
  int position(BasisLabel label) const;
  BasisLabel label(int position) const;
  Blade star_mask() const;
  // Mask of the coordinate directions e(from), ..., e(to).
  Blade coord_mask(int from, int to) const;
  Blade full_mask() const { return dim() >= 64 ? ~Blade{0} : (Blade{1} << dim()) - 1; }

  bool operator==(const Frame&) const = default;
};

inline int blade_grade(Blade b) { return std::popcount(b); }

std::vector<int> blade_positions(Blade b);

// Sign of e_a ^ e_b relative to e_{a|b}; 0 when the blades share a direction.
int wedge_sign(Blade a, Blade b);

namespace detail {
template <class T>
bool is_zero(const T& v) {
  return v == T(0);
}
}  // namespace detail

template <class T>
class Multivector {
 public:
  using Term = std::pair<Blade, T>;
  static constexpr int kMixed = -1;

  explicit Multivector(Frame frame = {}, int grade = 0) : frame_(frame), grade_(grade) {}

  static Multivector scalar(Frame frame, const T& value) {
    return from_terms(frame, {{Blade{0}, value}}, 0);
  }

  static Multivector basis(Frame frame, BasisLabel label, const T& coeff = T(1)) {
    return from_terms(frame, {{Blade{1} << frame.position(label), coeff}}, 1);
  }

  // Wedge of basis vectors in the given order; zero when a label repeats.
  static Multivector blade(Frame frame, std::span<const BasisLabel> labels, const T& coeff = T(1)) {
    Blade mask = 0;
    int sign = 1;
    for (const auto& l : labels) {
      const Blade bit = Blade{1} << frame.position(l);
      const int sg = wedge_sign(mask, bit);
      if (sg == 0) return Multivector(frame, static_cast<int>(labels.size()));
      sign *= sg;
      mask |= bit;
    }
    return from_terms(frame, {{mask, sign > 0 ? coeff : T(-coeff)}}, static_cast<int>(labels.size()));
  }

  static Multivector blade(Frame frame, std::initializer_list<BasisLabel> labels, const T& coeff = T(1)) {
    return blade(frame, std::span<const BasisLabel>(labels.begin(), labels.size()), coeff);
  }

  // Grade-1 element with the given coordinates in basis order.
  static Multivector vector(Frame frame, std::span<const T> coords) {
    if (static_cast<int>(coords.size()) != frame.dim())
      throw std::invalid_argument("vector length does not match frame dimension");
    std::vector<Term> terms;
    for (int i = 0; i < frame.dim(); ++i)
      if (!detail::is_zero(coords[i])) terms.emplace_back(Blade{1} << i, coords[i]);
    return from_terms(frame, std::move(terms), 1);
  }

  // Merges duplicate blades and drops zeros. `fallback_grade` is the grade
  // reported when the result is zero.
  static Multivector from_terms(Frame frame, std::vector<Term> terms, int fallback_grade) {
    Multivector out(frame, fallback_grade);
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    for (auto& t : terms) {
      if (!out.terms_.empty() && out.terms_.back().first == t.first)
        out.terms_.back().second += t.second;
      else
        out.terms_.push_back(std::move(t));
    }
    std::erase_if(out.terms_, [](const Term& t) { return detail::is_zero(t.second); });
    out.refresh_grade();
    return out;
  }

  const Frame& frame() const { return frame_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int grade() const { return grade_; }
  bool homogeneous() const { return grade_ != kMixed; }

  T coefficient(Blade b) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), b,
                               [](const Term& t, Blade key) { return t.first < key; });
    return (it != terms_.end() && it->first == b) ? it->second : T(0);
  }

  T coefficient(std::initializer_list<BasisLabel> labels) const {
    const auto e = blade(frame_, labels);
    if (e.is_zero()) return T(0);
    const auto& [mask, sign] = e.terms_.front();
    return sign < T(0) ? T(-coefficient(mask)) : coefficient(mask);
  }

  Multivector operator-() const {
    Multivector out = *this;
    for (auto& t : out.terms_) t.second = -t.second;
    return out;
  }

  friend Multivector operator+(const Multivector& a, const Multivector& b) {
    check_frames(a, b);
    std::vector<Term> terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return from_terms(a.frame_, std::move(terms), merge_grade(a, b));
  }

  friend Multivector operator-(const Multivector& a, const Multivector& b) { return a + (-b); }

  friend Multivector operator*(const T& c, const Multivector& a) {
    std::vector<Term> terms;
    terms.reserve(a.terms_.size());
    for (const auto& [m, v] : a.terms_) terms.emplace_back(m, c * v);
    return from_terms(a.frame_, std::move(terms), a.grade_);
  }

  friend bool operator==(const Multivector& a, const Multivector& b) {
    return a.frame_ == b.frame_ && a.terms_ == b.terms_;
  }

  template <class U, class Conv>
  Multivector<U> convert(Conv conv) const {
    std::vector<typename Multivector<U>::Term> terms;
    terms.reserve(terms_.size());
    for (const auto& [m, v] : terms_) terms.emplace_back(m, conv(v));
    return Multivector<U>::from_terms(frame_, std::move(terms), grade_);
  }

  // Keeps only terms accepted by `pred(mask)`.
  template <class Pred>
  Multivector filter(Pred pred) const {
    std::vector<Term> terms;
    for (const auto& t : terms_)
      if (pred(t.first)) terms.push_back(t);
    return from_terms(frame_, std::move(terms), grade_);
  }

 private:
  static void check_frames(const Multivector& a, const Multivector& b) {
    if (!(a.frame_ == b.frame_)) throw std::invalid_argument("multivectors live in different frames");
  }

  static int merge_grade(const Multivector& a, const Multivector& b) {
    if (a.is_zero()) return b.grade_;
    if (b.is_zero()) return a.grade_;
    return a.grade_ == b.grade_ ? a.grade_ : kMixed;
  }

  void refresh_grade() {
    if (terms_.empty()) return;
    const int g = blade_grade(terms_.front().first);
    grade_ = std::all_of(terms_.begin(), terms_.end(),
                         [g](const Term& t) { return blade_grade(t.first) == g; })
                 ? g
                 : kMixed;
  }

  Frame frame_;
  int grade_ = 0;
  std::vector<Term> terms_;
};

// Bilinear, alternating exterior product.
template <class T>
Multivector<T> wedge(const Multivector<T>& u, const Multivector<T>& w) {
  if (!(u.frame() == w.frame())) throw std::invalid_argument("wedge of multivectors in different frames");
  const int dim = u.frame().dim();
  if (u.homogeneous() && w.homogeneous() && u.grade() + w.grade() > dim)
    throw std::domain_error("wedge product grade exceeds the dimension of W");
  std::vector<typename Multivector<T>::Term> terms;
  terms.reserve(u.terms().size() * w.terms().size());
  for (const auto& [a, ca] : u.terms())
    for (const auto& [b, cb] : w.terms()) {
      const int sign = wedge_sign(a, b);
      if (sign == 0) continue;
      T c = ca * cb;
      terms.emplace_back(a | b, sign > 0 ? c : T(-c));
    }
  const int grade = (u.homogeneous() && w.homogeneous()) ? u.grade() + w.grade() : Multivector<T>::kMixed;
  return Multivector<T>::from_terms(u.frame(), std::move(terms), grade);
}

// Generators of a discrete subgroup, as integer vectors in the frame's basis.
struct SubgroupBasis {
  Frame frame;
  std::vector<std::vector<long long>> vectors;

  std::size_t rank() const { return vectors.size(); }
};

// Wedge of the basis vectors (1 for the trivial subgroup). Unique up to sign.
template <class T = Rational>
Multivector<T> represent(const SubgroupBasis& basis) {
  Multivector<T> w = Multivector<T>::scalar(basis.frame, T(1));
  for (const auto& v : basis.vectors) {
    std::vector<T> coords(v.begin(), v.end());
    w = wedge(w, Multivector<T>::vector(basis.frame, coords));
  }
  if (w.is_zero()) throw std::invalid_argument("subgroup basis vectors are linearly dependent");
  return w;
}

// c(w)_i = sum_{J subset {1..n}, #J = j-1} <e_i ^ e_J, w> e_J for i = 0..n.
// The pairing makes the standard basis of each exterior power orthonormal.
template <class T>
std::vector<Multivector<T>> c_map(const Multivector<T>& w) {
  const Frame& f = w.frame();
  if (f.stars != 0) throw std::invalid_argument("c_map is defined on W_{0->n} (no starred directions)");
  if (!w.homogeneous() || w.grade() < 1) throw std::invalid_argument("c_map needs a homogeneous grade >= 1");
  const int j = w.grade();
  std::vector<std::vector<typename Multivector<T>::Term>> parts(f.n + 1);
  for (const auto& [mask, coeff] : w.terms()) {
    for (int i : blade_positions(mask)) {
      const Blade rest = mask & ~(Blade{1} << i);
      if (rest & Blade{1}) continue;  // J must avoid e0
      // e_i ^ e_J = (-1)^{#{k in J : k < i}} e_{J + i}
      const int before = std::popcount(rest & ((Blade{1} << i) - 1));
      parts[i].emplace_back(rest, (before % 2 == 0) ? coeff : T(-coeff));
    }
  }
  std::vector<Multivector<T>> out;
  out.reserve(parts.size());
  for (auto& p : parts) out.push_back(Multivector<T>::from_terms(f, std::move(p), j - 1));
  return out;
}

// pi_bullet: keep terms whose directions all lie in {e(s+1), ..., e(n)}.
template <class T>
Multivector<T> project_bullet(const Multivector<T>& w, int s) {
  const Blade keep = w.frame().coord_mask(s + 1, w.frame().n);
  return w.filter([keep](Blade b) { return (b & ~keep) == 0; });
}

// pi_*: drop terms containing two or more starred directions.
template <class T>
Multivector<T> project_star(const Multivector<T>& w) {
  const Blade stars = w.frame().star_mask();
  return w.filter([stars](Blade b) { return std::popcount(b & stars) < 2; });
}

template <class T>
using norm_t = std::conditional_t<std::is_same_v<T, Rational>, double, T>;

namespace detail {
template <class T>
norm_t<T> sqrt_of(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return std::sqrt(to_double(v));
  } else {
    using std::sqrt;
    return sqrt(v);
  }
}
template <class T>
T abs_of(const T& v) {
  return v < T(0) ? T(-v) : v;
}
}  // namespace detail

template <class T>
T euclidean_norm_squared(const Multivector<T>& w) {
  T acc(0);
  for (const auto& t : w.terms()) acc += t.second * t.second;
  return acc;
}

template <class T>
norm_t<T> euclidean_norm(const Multivector<T>& w) {
  return detail::sqrt_of(euclidean_norm_squared(w));
}

template <class T>
T sup_norm(const Multivector<T>& w) {
  T best(0);
  for (const auto& t : w.terms()) best = std::max(best, detail::abs_of(t.second));
  return best;
}

// Submultiplicative nu: Euclidean norm after pi_*.
template <class T>
T nu_squared(const Multivector<T>& w) {
  return euclidean_norm_squared(project_star(w));
}

template <class T>
norm_t<T> nu(const Multivector<T>& w) {
  return detail::sqrt_of(nu_squared(w));
}

// Applies the k-th exterior power of M to w; M acts on column vectors.
template <class T>
Multivector<T> push_forward(const Matrix<T>& m, const Multivector<T>& w) {
  const Frame& f = w.frame();
  if (m.rows() != m.cols() || static_cast<int>(m.rows()) != f.dim())
    throw std::invalid_argument("push_forward: matrix does not act on the frame");
  std::vector<Multivector<T>> images;
  images.reserve(f.dim());
  for (int c = 0; c < f.dim(); ++c) {
    const auto col = m.column(c);
    images.push_back(Multivector<T>::vector(f, col));
  }
  Multivector<T> out(f, w.grade());
  for (const auto& [mask, coeff] : w.terms()) {
    Multivector<T> img = Multivector<T>::scalar(f, coeff);
    for (int p : blade_positions(mask)) img = wedge(img, images[p]);
    out = out + img;
  }
  return out;
}

}  // namespace qkg
