#include "fkklab/price_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fkk {

namespace {
constexpr double kTailEps = 1e-10;
}

PriorSpec PriorSpec::make(double lambda, double theta_p, double t) {
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
  if (theta_p < 0.0 || theta_p >= 0.5)
    throw std::domain_error("theta_p must lie in [0, 0.5)");
  if (!(t > 0.0)) throw std::domain_error("t must be positive");
  PriorSpec spec{lambda * (1.0 - 2.0 * theta_p), lambda, 0};
  // The impatient rate dominates; find where both tails drop below kTailEps.
  double cum_p = 0.0, cum_i = 0.0;
  int i = 0;
  for (;; ++i) {
    cum_p += poisson_pmf(i, spec.patient_rate, t);
    cum_i += poisson_pmf(i, spec.impatient_rate, t);
    if (1.0 - cum_p <= kTailEps && 1.0 - cum_i <= kTailEps) break;
    if (i > 100000) throw std::runtime_error("poisson truncation failed");
  }
  spec.i_max = i;
  return spec;
}

void PriorSpec::validate() const {
  if (!(patient_rate > 0.0) || !(impatient_rate > 0.0))
    throw std::invalid_argument("prior rates must be positive");
  if (i_max < 0) throw std::invalid_argument("i_max must be >= 0");
}

double poisson_pmf(int i, double rate, double t) {
  if (i < 0) throw std::domain_error("count must be >= 0");
  if (!(rate > 0.0)) throw std::domain_error("rate must be positive");
  if (!(t > 0.0)) throw std::domain_error("t must be positive");
  const double rt = rate * t;
  return std::exp(i * std::log(rt) - rt - std::lgamma(i + 1.0));
}

PriceDensity price_distribution(const DensitySurface& surface,
                                const PriorSpec& prior,
                                const FilterParams& params, double t,
                                double tick, int max_spread_k, Side side) {
  (void)side;  // the two sides share one adjustment density
  prior.validate();
  if (!(t > 0.0) || t > params.horizon_t)
    throw std::out_of_range("t must lie in (0, horizon_t]");
  if (max_spread_k < 1)
    throw std::invalid_argument("max_spread_k must be >= 1");

  PriceDensity out;
  out.t = t;
  out.tick_size = tick;
  out.ticks.resize(static_cast<std::size_t>(max_spread_k) + 1);
  out.price.resize(out.ticks.size());
  out.mass.assign(out.ticks.size(), 0.0);
  for (int i = 0; i <= max_spread_k; ++i) {
    out.ticks[static_cast<std::size_t>(i)] = i;
    out.price[static_cast<std::size_t>(i)] = i * tick;
  }

  auto mixture = [&](int i) {
    const double tau = std::min(i / params.lambda, params.horizon_t);
    const double wbar = surface.mean_omega(tau);
    return wbar * poisson_pmf(i, prior.patient_rate, t) +
           (1.0 - wbar) * poisson_pmf(i, prior.impatient_rate, t);
  };
  double total = 0.0;
  for (int i = 0; i <= prior.i_max; ++i) {
    const double m = mixture(i);
    const int bin = std::min(i, max_spread_k);
    if (i > max_spread_k) out.clamped_mass += m;
    out.mass[static_cast<std::size_t>(bin)] += m;
    total += m;
  }
  // dropped Poisson tail beyond i_max; a convex combination of two tails that
  // are both below the truncation threshold, so this converges immediately
  for (int i = prior.i_max + 1; i <= prior.i_max + 400; ++i) {
    const double m = mixture(i);
    out.truncated_mass += m;
    if (m < 1e-18) break;
  }
  if (!(total > 0.0)) throw std::runtime_error("empty price distribution");
  for (double& m : out.mass) m /= total;
  return out;
}

Moments moments(const PriceDensity& density) {
  const double total = density.total_mass();
  if (density.mass.empty() || !(total > 0.0))
    throw std::invalid_argument("moments of an empty density");
  double mean = 0.0;
  for (std::size_t i = 0; i < density.mass.size(); ++i)
    mean += density.price[i] * density.mass[i];
  mean /= total;
  double var = 0.0;
  for (std::size_t i = 0; i < density.mass.size(); ++i) {
    const double d = density.price[i] - mean;
    var += d * d * density.mass[i];
  }
  var /= total;
  return {mean, std::sqrt(std::max(var, 0.0))};
}

Moments moments(const Histogram& hist) {
  hist.validate();
  const double total = hist.total_mass();
  if (!(total > 0.0)) throw std::invalid_argument("moments of an empty histogram");
  double mean = 0.0;
  for (std::size_t i = 0; i < hist.mass.size(); ++i)
    mean += hist.bin_center(i) * hist.mass[i];
  mean /= total;
  double var = 0.0;
  for (std::size_t i = 0; i < hist.mass.size(); ++i) {
    const double d = hist.bin_center(i) - mean;
    const double w = hist.edges[i + 1] - hist.edges[i];
    var += (d * d + w * w / 12.0) * hist.mass[i];
  }
  var /= total;
  return {mean, std::sqrt(std::max(var, 0.0))};
}

PriceDensity rescale_to_dollars(const PriceDensity& density, double anchor,
                                double tick, Side side) {
  if (!(tick > 0.0)) throw std::invalid_argument("tick must be positive");
  const double sign = (side == Side::Buy) ? -1.0 : 1.0;
  PriceDensity out = density;
  out.tick_size = tick;
  for (std::size_t i = 0; i < out.ticks.size(); ++i)
    out.price[i] = anchor + sign * tick * out.ticks[i];
  return out;
}

}  // namespace fkk
