#pragma once

#include <cstddef>
#include <vector>

namespace fkk {

enum class Side { Buy, Sell };

/// Trapezoid-rule mass of a nodal density on a uniform grid with spacing h.
inline double trapezoid_mass(const std::vector<double>& values, double h) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * h;
}

}  // namespace fkk
