#include "fkklab/vwap.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace fkk {

void AliasKernel::validate() const {
  if (!(sigma_p > 0.0) || !(sigma_w > 0.0))
    throw std::invalid_argument("kernel widths must be positive");
  if (days < 1) throw std::invalid_argument("days must be >= 1");
}

namespace {

/// Unit-mass sampled Gaussian, truncated at 8 sigma.
std::vector<double> discrete_gaussian(double sigma) {
  if (sigma < 1e-12) return {1.0};
  const int radius = static_cast<int>(std::ceil(8.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius) + 1);
  double sum = 0.0;
  for (int m = -radius; m <= radius; ++m) {
    const double z = m / sigma;
    k[static_cast<std::size_t>(m + radius)] = std::exp(-0.5 * z * z);
    sum += k[static_cast<std::size_t>(m + radius)];
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Gaussian low-pass in the frequency domain via a direct DFT; profile sizes
/// stay small enough that O(n^2) is not a concern.
std::vector<double> frequency_lowpass(const std::vector<double>& x,
                                      double sigma_w) {
  const std::size_t n = x.size();
  if (n < 2 || sigma_w >= 1e8) return x;
  const double two_pi = 2.0 * M_PI;
  std::vector<std::complex<double>> spec(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      const double phase = -two_pi * static_cast<double>(k * m % n) / n;
      acc += x[m] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    // signed frequency in cycles per bin
    double f = static_cast<double>(k) / n;
    if (f > 0.5) f -= 1.0;
    spec[k] = acc * std::exp(-0.5 * (f / sigma_w) * (f / sigma_w));
  }
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double phase = two_pi * static_cast<double>(k * m % n) / n;
      acc += spec[k] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    out[m] = acc.real() / n;
  }
  return out;
}

}  // namespace

FilteredHistogram alias_filter(const Histogram& hist,
                               const AliasKernel& kernel) {
  hist.validate();
  kernel.validate();
  if (!hist.uniform_bins())
    throw std::invalid_argument(
        "alias_filter requires uniform bins; resample first");

  const double root_j = std::sqrt(static_cast<double>(kernel.days));
  const std::vector<double> g = discrete_gaussian(kernel.sigma_p * root_j);
  const int radius = static_cast<int>(g.size() / 2);
  const double w = hist.bin_width();

  // Extend the support by the kernel radius so no mass leaks off the edges.
  const std::size_t n_in = hist.mass.size();
  const std::size_t n_out = n_in + 2 * static_cast<std::size_t>(radius);
  std::vector<double> smoothed(n_out, 0.0);
  for (std::size_t i = 0; i < n_in; ++i)
    for (int m = -radius; m <= radius; ++m)
      smoothed[i + static_cast<std::size_t>(m + radius)] +=
          hist.mass[i] * g[static_cast<std::size_t>(m + radius)];

  std::vector<double> filtered =
      frequency_lowpass(smoothed, kernel.sigma_w / root_j);

  FilteredHistogram out;
  for (double& v : filtered)
    if (v < 0.0) {
      out.clipped_mass += -v;
      v = 0.0;
    }
  out.hist.edges.resize(n_out + 1);
  for (std::size_t i = 0; i <= n_out; ++i)
    out.hist.edges[i] = hist.edges.front() + (static_cast<double>(i) - radius) * w;
  out.hist.mass = std::move(filtered);
  return out;
}

int mode_count(const Histogram& hist, double min_prominence) {
  hist.validate();
  if (!(min_prominence > 0.0 && min_prominence < 1.0))
    throw std::invalid_argument("prominence must lie in (0, 1)");
  const std::vector<double>& m = hist.mass;
  const std::size_t n = m.size();
  double peak_max = *std::max_element(m.begin(), m.end());
  if (!(peak_max > 0.0)) return 0;
  const double threshold = min_prominence * peak_max;

  int count = 0;
  std::size_t i = 0;
  while (i < n) {
    // maximal plateau [i, j)
    std::size_t j = i + 1;
    while (j < n && m[j] == m[i]) ++j;
    const bool rises_left = (i == 0) || (m[i - 1] < m[i]);
    const bool falls_right = (j == n) || (m[j] < m[i]);
    const bool interior_peak = (i > 0 || j < n) && rises_left && falls_right &&
                               !(i == 0 && j == n);
    if (interior_peak) {
      const double h = m[i];
      // prominence: lowest descent to the nearest strictly higher bin on each
      // side (or to the edge when none exists)
      // key saddle toward the nearest strictly higher bin; a side with no
      // higher terrain puts no ceiling on the prominence (so the global
      // maximum always qualifies)
      auto side_valley = [&](bool left) {
        double valley = h;
        if (left) {
          for (std::size_t k = i; k-- > 0;) {
            valley = std::min(valley, m[k]);
            if (m[k] > h) return valley;
          }
        } else {
          for (std::size_t k = j; k < n; ++k) {
            valley = std::min(valley, m[k]);
            if (m[k] > h) return valley;
          }
        }
        return -std::numeric_limits<double>::infinity();
      };
      const double prom = h - std::max(side_valley(true), side_valley(false));
      if (prom > threshold) ++count;
    }
    i = j;
  }
  return count;
}

LossEstimate loss_estimate(double std_dev, int periods, bool bimodal) {
  if (std_dev < 0.0) throw std::domain_error("std must be >= 0");
  if (periods < 1) throw std::domain_error("periods must be >= 1");
  LossEstimate est;
  est.per_period = bimodal ? 0.5 * std_dev : std_dev;
  est.accrued = est.per_period * std::sqrt(static_cast<double>(periods));
  return est;
}

}  // namespace fkk
