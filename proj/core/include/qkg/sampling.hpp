#pragma once

#include "qkg/subspace.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qkg {

// Deterministic point sets used for measuring subsets of a ball.
struct SamplePoints {
  int dim = 0;
  std::vector<double> coords;  // flattened, dim per point
  double weight = 0.0;         // measure attributed to each point
  double cell = 0.0;           // grid spacing (0 for Monte Carlo)
  std::string description;

  std::size_t size() const { return dim ? coords.size() / dim : 0; }
  std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, static_cast<std::size_t>(dim)}; }
};

// Cell centres of a per_axis^s grid on the bounding cube, kept when inside
// the ball. Each point carries the cell volume.
SamplePoints grid_points(const Ball& ball, int per_axis);

// Uniform points in the ball by rejection from the cube; weight |B|/count.
SamplePoints monte_carlo_points(const Ball& ball, std::size_t count, std::uint64_t seed);

// Per-axis resolution for roughly `total` points, capped.
int per_axis_for(int s, double total, int cap);

}  // namespace qkg
