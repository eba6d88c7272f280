#include "qkg/subspace.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cctype>
#include <cmath>

namespace qkg {

namespace {

// Recursive-descent parser over + - * / ( ) with exact decimal literals.
class EntryParser {
 public:
  explicit EntryParser(std::string_view text) : text_(text) {}

  Entry parse() {
    Entry v = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return v;
  }

 private:
  Entry expr() {
    Entry v = term();
    for (;;) {
      skip_space();
      if (accept('+'))
        v = v + term();
      else if (accept('-'))
        v = v - term();
      else
        return v;
    }
  }

  Entry term() {
    Entry v = factor();
    for (;;) {
      skip_space();
      if (accept('*')) {
        v = v * factor();
      } else if (accept('/')) {
        Entry d = factor();
        if (d.is_exact() ? *d.exact() == 0 : d.value() == 0) fail("division by zero");
        v = v / d;
      } else {
        return v;
      }
    }
  }

  Entry factor() {
    skip_space();
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    if (accept('(')) {
      Entry v = expr();
      skip_space();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      return number();
    if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) return symbol();
    fail("expected a number or symbol");
  }

  Entry number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string digits(text_.substr(start, pos_ - start));
    int scale = 0;
    if (accept('.')) {
      const std::size_t fs = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      digits += text_.substr(fs, pos_ - fs);
      scale = -static_cast<int>(pos_ - fs);
    }
    if (digits.empty()) fail("malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      bool neg = false;
      if (accept('-'))
        neg = true;
      else
        accept('+');
      const std::size_t es = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (es == pos_ || pos_ - es > 4) fail("malformed exponent");
      const int e = std::stoi(std::string(text_.substr(es, pos_ - es)));
      scale += neg ? -e : e;
    }
    Integer mantissa(digits);
    Integer ten_pow = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::abs(scale)));
    return Entry(scale >= 0 ? Rational(mantissa * ten_pow) : Rational(mantissa, ten_pow));
  }

  Entry symbol() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    using boost::multiprecision::sqrt;
    if (name == "sqrt2") return Entry(Real(sqrt(Real(2))));
    if (name == "sqrt3") return Entry(Real(sqrt(Real(3))));
    if (name == "sqrt5") return Entry(Real(sqrt(Real(5))));
    if (name == "phi") return Entry(Real((1 + sqrt(Real(5))) / 2));
    pos_ = start;
    fail("unknown symbol '" + std::string(name) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("cannot parse entry \"" + std::string(text_) + "\" at position " + std::to_string(pos_) +
                     ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Entry parse_entry(std::string_view text) { return EntryParser(text).parse(); }

double unit_ball_volume(int s) {
  if (s < 0) throw std::invalid_argument("ball dimension must be non-negative");
  // V_s = (2 pi / s) V_{s-2}, exact for s = 0, 1.
  const double pi = boost::math::constants::pi<double>();
  double v = s % 2 ? 2.0 : 1.0;
  for (int k = s % 2 ? 3 : 2; k <= s; k += 2) v *= 2.0 * pi / k;
  return v;
}

Ball::Ball(std::vector<double> c, double r) : center(std::move(c)), radius(r) {
  if (center.empty()) throw std::invalid_argument("ball needs a center of dimension >= 1");
  if (!(radius > 0) || !std::isfinite(radius)) throw std::invalid_argument("ball radius must be positive");
}

double Ball::volume() const { return unit_ball_volume(dim()) * std::pow(radius, dim()); }

bool Ball::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) throw std::invalid_argument("point dimension mismatch");
  double d2 = 0;
  for (int i = 0; i < dim(); ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
  return d2 < radius * radius;
}

AffineSubspace::AffineSubspace(int s, int n, std::vector<Entry> a0, std::vector<std::vector<Entry>> aprime)
    : s_(s), n_(n) {
  if (s < 1 || s > n - 1) throw std::invalid_argument("need 1 <= s <= n-1");
  if (static_cast<int>(a0.size()) != n - s) throw std::invalid_argument("a0 must have n-s entries");
  if (static_cast<int>(aprime.size()) != s) throw std::invalid_argument("A' must have s rows");
  for (const auto& row : aprime)
    if (static_cast<int>(row.size()) != n - s) throw std::invalid_argument("A' rows must have n-s entries");
  a_.reserve(s + 1);
  a_.push_back(std::move(a0));
  for (auto& row : aprime) a_.push_back(std::move(row));
}

bool AffineSubspace::is_exact() const {
  for (const auto& row : a_)
    for (const auto& e : row)
      if (!e.is_exact()) return false;
  return true;
}

void AffineSubspace::check_point(std::size_t len) const {
  if (static_cast<int>(len) != s_) throw std::invalid_argument("point must have s coordinates");
}

std::vector<Entry> AffineSubspace::point_entries(std::span<const double> x) const {
  check_point(x.size());
  std::vector<Entry> out;
  out.reserve(n_);
  std::vector<Entry> xe;
  for (double v : x) xe.push_back(Entry::from_double(v));
  out = xe;
  for (int j = 0; j < codim(); ++j) {
    Entry v = a_[0][j];
    for (int i = 0; i < s_; ++i)
      if (x[i] != 0.0) v = v + xe[i] * a_[i + 1][j];
    out.push_back(std::move(v));
  }
  return out;
}

LinearForm AffineSubspace::form_at(std::span<const double> x) const {
  return LinearForm(Entry(), point_entries(x));
}

}  // namespace qkg
