#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fkk {

/// Binned mass over price: edges.size() == mass.size() + 1, edges strictly
/// increasing, mass nonnegative.
struct Histogram {
  std::vector<double> edges;
  std::vector<double> mass;

  void validate() const {
    if (edges.size() != mass.size() + 1 || mass.empty())
      throw std::invalid_argument("histogram needs n+1 edges for n bins");
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      if (!(edges[i + 1] > edges[i]))
        throw std::invalid_argument("histogram edges must strictly increase");
    for (double m : mass)
      if (m < 0.0) throw std::invalid_argument("histogram mass must be >= 0");
  }

  double total_mass() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s;
  }

  bool uniform_bins(double rel_tol = 1e-9) const {
    const double w = edges[1] - edges[0];
    for (std::size_t i = 1; i + 1 < edges.size(); ++i)
      if (std::abs((edges[i + 1] - edges[i]) - w) > rel_tol * w) return false;
    return true;
  }

  double bin_width() const { return edges[1] - edges[0]; }
  double bin_center(std::size_t i) const {
    return 0.5 * (edges[i] + edges[i + 1]);
  }
};

}  // namespace fkk
