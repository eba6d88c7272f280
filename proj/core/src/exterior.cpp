#include "qkg/exterior.hpp"

namespace qkg {

std::string BasisLabel::name() const {
  switch (kind) {
    case LabelKind::origin: return "e0";
    case LabelKind::star: return "e*" + std::to_string(index);
    case LabelKind::coord: return "e" + std::to_string(index);
  }
  return "?";
}

int Frame::position(BasisLabel label) const {
  switch (label.kind) {
    case LabelKind::origin:
      if (label.index != 0) break;
      return 0;
    case LabelKind::star:
      if (label.index < 1 || label.index > stars) break;
      return label.index;
    case LabelKind::coord:
      if (label.index < 1 || label.index > n) break;
      return stars + label.index;
  }
  throw std::out_of_range("basis label " + label.name() + " is not in this frame");
}

BasisLabel Frame::label(int pos) const {
  if (pos < 0 || pos >= dim()) throw std::out_of_range("basis position out of range");
  if (pos == 0) return BasisLabel::e0();
  if (pos <= stars) return BasisLabel::star(pos);
  return BasisLabel::e(pos - stars);
}

Blade Frame::star_mask() const {
  Blade m = 0;
  for (int i = 1; i <= stars; ++i) m |= Blade{1} << i;
  return m;
}

Blade Frame::coord_mask(int from, int to) const {
  Blade m = 0;
  for (int i = std::max(from, 1); i <= std::min(to, n); ++i) m |= Blade{1} << (stars + i);
  return m;
}

std::vector<int> blade_positions(Blade b) {
  std::vector<int> out;
  out.reserve(std::popcount(b));
  while (b) {
    out.push_back(std::countr_zero(b));
    b &= b - 1;
  }
  return out;
}

int wedge_sign(Blade a, Blade b) {
  if (a & b) return 0;
  // Count pairs (i in a, j in b) with i > j: each is one transposition.
  int swaps = 0;
  Blade rest = b;
  while (rest) {
    const int j = std::countr_zero(rest);
    rest &= rest - 1;
    swaps += std::popcount(a >> (j + 1));
  }
  return (swaps % 2 == 0) ? 1 : -1;
}

}  // namespace qkg
