#pragma once

#include <vector>

#include "fkklab/common.hpp"
#include "fkklab/histogram.hpp"
#include "fkklab/pde.hpp"

namespace fkk {

/// Discrete price-adjustment density on the tick grid 0..K.
struct PriceDensity {
  std::vector<int> ticks;     ///< adjustment counts 0..K
  std::vector<double> price;  ///< price per tick entry (dollars)
  std::vector<double> mass;   ///< probability mass, sums to 1
  double t = 0.0;             ///< reference real time
  double tick_size = 0.01;
  double truncated_mass = 0.0;  ///< Poisson tail dropped beyond i_max
  double clamped_mass = 0.0;    ///< mass folded into the K bin

  double total_mass() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s;
  }
};

/// Poisson priors for the two trader types.
struct PriorSpec {
  double patient_rate;    ///< lambda (1 - 2 theta)
  double impatient_rate;  ///< lambda
  int i_max;              ///< truncation count, tail mass <= 1e-10 at time t

  /// Builds the priors for evaluation time t; i_max is the smallest count
  /// with combined tail mass below 1e-10.
  static PriorSpec make(double lambda, double theta_p, double t);

  void validate() const;
};

/// Poisson pmf e^{-rt} (rt)^i / i!, evaluated in log space.
double poisson_pmf(int i, double rate, double t);

/// Bayesian mixture of the surface weights with the Poisson priors, mapped to
/// the tick grid (count i <-> adjustment i * tick, quote-update epoch
/// tau_i = i / lambda clamped to the horizon).  Counts beyond max_spread_k
/// are folded into the K bin; the result is renormalized to unit mass.
/// The bid and ask adjustment densities coincide; `side` only tags intent.
PriceDensity price_distribution(const DensitySurface& surface,
                                const PriorSpec& prior,
                                const FilterParams& params, double t,
                                double tick, int max_spread_k,
                                Side side = Side::Sell);

struct Moments {
  double mean;
  double stddev;
};

/// Discrete moments of a price density.
Moments moments(const PriceDensity& density);

/// Bin-weighted moments of a histogram; each bin contributes its own
/// within-bin uniform variance, so a uniform density is exact.
Moments moments(const Histogram& hist);

/// Affine map from tick units to dollars: price = anchor - tick * i on the
/// buy side (adjustments walk down from the ask) and anchor + tick * i on the
/// sell side.  Mass is preserved.
PriceDensity rescale_to_dollars(const PriceDensity& density, double anchor,
                                double tick, Side side = Side::Buy);

}  // namespace fkk
