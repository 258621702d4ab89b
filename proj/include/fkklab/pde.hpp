#pragma once

#include <stdexcept>
#include <vector>

#include "fkklab/common.hpp"

namespace fkk {

/// Coefficients of the patient-fraction filtering PDE.
struct FilterParams {
  double lambda = 0.25;   ///< switching / arrival rate (1/time)
  double sigma = 1.0;     ///< observation-noise scale (>= 0)
  double mu = 0.0;        ///< market price of delay risk (1/time)
  double horizon_t = 10;  ///< session length T

  void validate() const;
};

/// Uniform grid on [0, 1/2] for the patient fraction omega.
struct OmegaGrid {
  explicit OmegaGrid(int n);  // throws if n < 16

  int n_nodes;
  double spacing() const { return 0.5 / (n_nodes - 1); }
  double node(int i) const { return 0.5 * i / (n_nodes - 1); }
  std::vector<double> nodes() const;
};

/// Bimodal terminal density: two narrow Gaussians at theta_1 and theta_2 with
/// weights weight_a + weight_b = 1.
struct TerminalCondition {
  double weight_a = 0.5;
  double weight_b = 0.5;
  double theta_1 = 0.13;
  double theta_2 = 0.38;
  double eps = 0.0;  ///< Gaussian width; <= 0 requests the 4*h default

  void validate() const;
  /// Width actually used on a given grid (eps or the 4-cell default).
  double effective_eps(const OmegaGrid& grid) const;
};

/// Solver output: density slices pi(omega_i, tau_k) together with the per-step
/// renormalization and clipping log.
struct DensitySurface {
  OmegaGrid grid;
  std::vector<double> taus;                  // stored time stamps, increasing
  std::vector<std::vector<double>> slices;   // slices[k][i]
  std::vector<double> renorm_factors;        // one entry per solver step
  std::vector<double> clipped_mass;          // one entry per solver step

  double mass(int k) const;
  /// Linear interpolation between stored slices; throws outside coverage.
  std::vector<double> slice_at(double tau) const;
  /// Mean of omega under the slice at tau (trapezoid weights).
  double mean_omega(double tau) const;
};

/// Raised when a solve produces a non-finite value; carries the offending tau.
struct SolverBlowup : std::runtime_error {
  explicit SolverBlowup(double tau_);
  double tau;
};

/// Drift lambda (1 - 2 omega) - mu omega (1 - omega).
double drift(double omega, const FilterParams& params);

/// Diffusion (lambda^2 sigma^2 / 2) omega^2 (1 - omega)^2.
double diffusion(double omega, const FilterParams& params);

/// Gaussian-mixture terminal density on the grid, unit trapezoid mass.
/// Throws when fewer than 3 nodes fall within 3 eps of an active mode.
std::vector<double> terminal_density(const OmegaGrid& grid,
                                     const TerminalCondition& tc);

/// Backward evolution from the terminal density, tau = T - t running from 0
/// to horizon_t.  Crank-Nicolson; negative undershoots are clipped and each
/// slice is renormalized to unit mass (factors logged).
DensitySurface solve_backward(const FilterParams& params, const OmegaGrid& grid,
                              const TerminalCondition& tc, int n_tau_steps,
                              int store_stride = 1);

/// Forward conservation-form evolution of an initial density over
/// [0, horizon_t].  Flux-form Crank-Nicolson; with mu = 0 the discrete mass is
/// conserved without renormalization.  Boundary data: density pinned to 0 at
/// omega = 0, zero total flux at omega = 1/2.
DensitySurface solve_forward(const FilterParams& params, const OmegaGrid& grid,
                             const std::vector<double>& init, int n_tau_steps,
                             int store_stride = 1);

/// Probability current j = -a P + D d/domega [omega^2 (1-omega)^2 P] with
/// centered differences (one-sided at the endpoints).
std::vector<double> probability_current(const std::vector<double>& density,
                                        const OmegaGrid& grid,
                                        const FilterParams& params);

/// Zero-current stationary density, built by quadrature of the log-derivative
/// of Q = omega^2 (1-omega)^2 P and normalized on [omega_1, 1/2].
std::vector<double> stationary_numeric(const FilterParams& params,
                                       const OmegaGrid& grid);

/// The closed-form stationary profile as printed in the source model
/// (unnormalized); kept verbatim for the deviation report.
double stationary_paper(double omega, const FilterParams& params);

/// Closed-form mean path 1/2 + (theta_0 - 1/2) exp(-2 lambda t).
double markov_mean_path(double theta_0, double lambda, double t);

/// Side-by-side report of the numeric stationary density against the printed
/// closed form, with the discrete current of both.
struct StationaryComparison {
  std::vector<double> omega;
  std::vector<double> numeric;
  std::vector<double> printed;           // normalized like `numeric`
  std::vector<double> current_numeric;
  std::vector<double> current_printed;
  double max_interior_current_numeric = 0.0;
  double max_interior_current_printed = 0.0;
  double max_pointwise_gap = 0.0;        // max |numeric - printed|
};

StationaryComparison compare_stationary(const FilterParams& params,
                                        const OmegaGrid& grid);

}  // namespace fkk
