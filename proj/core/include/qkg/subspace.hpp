#pragma once

#include "qkg/matrix.hpp"
#include "qkg/numeric.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qkg {

// Value of an Entry in a given scalar regime. Rational requires exact data.
template <class T>
T entry_as(const Entry& e);

template <>
inline Rational entry_as<Rational>(const Entry& e) {
  if (!e.is_exact()) throw std::domain_error("exact arithmetic requested for an irrational entry");
  return *e.exact();
}
template <>
inline Real entry_as<Real>(const Entry& e) {
  return e.value();
}
template <>
inline double entry_as<double>(const Entry& e) {
  return e.approx();
}

// Parses "0.25", "-3/7", "1e-3", "sqrt2", "sqrt3", "sqrt5", "phi" and
// arithmetic combinations such as "(sqrt3-1)/2". Decimal literals are read
// exactly; symbolic values use the current working precision.
Entry parse_entry(std::string_view text);

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Ball {
  std::vector<double> center;
  double radius = 1.0;

  Ball() = default;
  Ball(std::vector<double> c, double r);

  int dim() const { return static_cast<int>(center.size()); }
  double volume() const;
  bool contains(std::span<const double> x) const;
};

double unit_ball_volume(int s);

// H = {(x, x~A) : x in R^s}, x~ = (1, x), A = [a0; A'] of shape (s+1) x (n-s).
class AffineSubspace {
 public:
  AffineSubspace(int s, int n, std::vector<Entry> a0, std::vector<std::vector<Entry>> aprime);

  int s() const { return s_; }
  int n() const { return n_; }
  int codim() const { return n_ - s_; }
  const std::vector<Entry>& a0() const { return a_.front(); }
  // Row 0 is a0, rows 1..s are A'.
  const Entry& a(int row, int col) const { return a_.at(row).at(col); }
  bool is_exact() const;

  template <class T>
  Matrix<T> a_matrix() const {
    Matrix<T> m(s_ + 1, codim());
    for (int i = 0; i <= s_; ++i)
      for (int j = 0; j < codim(); ++j) m(i, j) = entry_as<T>(a_[i][j]);
    return m;
  }

  // [Id_s | A'], s x n.
  template <class T>
  Matrix<T> gradient_matrix() const {
    Matrix<T> m(s_, n_);
    for (int i = 0; i < s_; ++i) {
      m(i, i) = T(1);
      for (int j = 0; j < codim(); ++j) m(i, s_ + j) = entry_as<T>(a_[i + 1][j]);
    }
    return m;
  }

  // R_A = [Id_{s+1} | A], (s+1) x (n+1).
  template <class T>
  Matrix<T> r_matrix() const {
    Matrix<T> m(s_ + 1, n_ + 1);
    for (int i = 0; i <= s_; ++i) {
      m(i, i) = T(1);
      for (int j = 0; j < codim(); ++j) m(i, s_ + 1 + j) = entry_as<T>(a_[i][j]);
    }
    return m;
  }

  // (x, x~A).
  template <class T>
  std::vector<T> parametrize(std::span<const T> x) const {
    check_point(x.size());
    std::vector<T> out(x.begin(), x.end());
    out.reserve(n_);
    for (int j = 0; j < codim(); ++j) {
      T v = entry_as<T>(a_[0][j]);
      for (int i = 0; i < s_; ++i) v += x[i] * entry_as<T>(a_[i + 1][j]);
      out.push_back(v);
    }
    return out;
  }

  // (x, x~A) with exactness tracked per coordinate; x given as doubles
  // (every double is an exact dyadic rational).
  std::vector<Entry> point_entries(std::span<const double> x) const;

  // Linear form q -> (x, x~A).q used for |p + (x, x~A)q|.
  LinearForm form_at(std::span<const double> x) const;

 private:
  void check_point(std::size_t len) const;

  int s_;
  int n_;
  std::vector<std::vector<Entry>> a_;
};

}  // namespace qkg
