#include "modrecip/shortest_path.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace modrecip {

std::span<const Offset> king_offsets() {
  static constexpr std::array<Offset, 8> offsets{
      {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};
  return offsets;
}

std::vector<Offset> ball_offsets(const MetricGrid& grid, double radius) {
  const double slack = 1e-12 * radius;
  const int reach_i = int(std::floor(radius / grid.hx() + 1e-9));
  const int reach_j = int(std::floor(radius / grid.hy() + 1e-9));
  std::vector<Offset> out;
  for (int dj = -reach_j; dj <= reach_j; ++dj)
    for (int di = -reach_i; di <= reach_i; ++di) {
      if (di == 0 && dj == 0) continue;
      const Displacement<double> d(di * grid.hx(), dj * grid.hy());
      if (norm_of(grid.norm(), d) <= radius + slack) out.push_back({di, dj});
    }
  return out;
}

std::vector<Index> PathTree::path_to(Index v) const {
  std::vector<Index> out;
  if (!reached(v)) return out;
  for (Index cur = v; cur >= 0; cur = parent[std::size_t(cur)]) out.push_back(cur);
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace modrecip
