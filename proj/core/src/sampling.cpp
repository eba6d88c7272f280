#include "qkg/sampling.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace qkg {

SamplePoints grid_points(const Ball& ball, int per_axis) {
  if (per_axis < 1) throw std::invalid_argument("grid needs at least one point per axis");
  const int s = ball.dim();
  SamplePoints out;
  out.dim = s;
  out.cell = 2.0 * ball.radius / per_axis;
  out.weight = std::pow(out.cell, s);
  out.description = "grid " + std::to_string(per_axis) + "^" + std::to_string(s) + " cell-centred";

  std::vector<int> idx(s, 0);
  std::vector<double> x(s);
  for (;;) {
    for (int i = 0; i < s; ++i) x[i] = ball.center[i] - ball.radius + (idx[i] + 0.5) * out.cell;
    if (s == 1 || ball.contains(x)) out.coords.insert(out.coords.end(), x.begin(), x.end());
    int k = 0;
    while (k < s && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == s) break;
  }
  return out;
}

SamplePoints monte_carlo_points(const Ball& ball, std::size_t count, std::uint64_t seed) {
  const int s = ball.dim();
  SamplePoints out;
  out.dim = s;
  out.weight = ball.volume() / static_cast<double>(count);
  out.description = "monte-carlo " + std::to_string(count) + " seed " + std::to_string(seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(s);
  out.coords.reserve(count * s);
  while (out.size() < count) {
    for (int i = 0; i < s; ++i) x[i] = ball.center[i] + ball.radius * u(rng);
    if (ball.contains(x)) out.coords.insert(out.coords.end(), x.begin(), x.end());
  }
  return out;
}

int per_axis_for(int s, double total, int cap) {
  const int v = static_cast<int>(std::lround(std::pow(total, 1.0 / s)));
  return std::max(1, std::min(v, cap));
}

}  // namespace qkg
