#pragma once

#include <vector>

#include "fkklab/histogram.hpp"

namespace fkk {

/// Gaussian aliasing kernel: width sigma_p in price (bins), sigma_w in
/// frequency (cycles per bin), with diffusion scaling over j integration
/// days: sigma_p sqrt(j) in price, sigma_w / sqrt(j) in frequency.
struct AliasKernel {
  double sigma_p = 1.0;
  double sigma_w = 1e9;
  int days = 1;

  void validate() const;
};

struct FilteredHistogram {
  Histogram hist;
  double clipped_mass = 0.0;  ///< negative ringing removed after the low-pass
};

/// Separable aliasing filter: price-domain Gaussian convolution (support is
/// extended so mass is preserved) followed by a frequency-domain Gaussian
/// low-pass.  Requires uniform bins.
FilteredHistogram alias_filter(const Histogram& hist, const AliasKernel& kernel);

/// Number of local maxima with prominence above `min_prominence` times the
/// histogram maximum.  Plateaus count once, at their leftmost bin.
int mode_count(const Histogram& hist, double min_prominence);

struct LossEstimate {
  double per_period;  ///< std (unimodal) or std/2 (bimodal peak width)
  double accrued;     ///< per_period * sqrt(n)
};

/// Square-root accrual of the per-period immediacy loss proxy.
LossEstimate loss_estimate(double std_dev, int periods, bool bimodal = false);

}  // namespace fkk
