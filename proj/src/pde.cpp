#include "fkklab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace fkk {

namespace {

/// Thomas algorithm for a tridiagonal system; diag/rhs are overwritten.
std::vector<double> solve_tridiag(std::vector<double> lower,
                                  std::vector<double> diag,
                                  std::vector<double> upper,
                                  std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

struct Tridiag {
  std::vector<double> lower, diag, upper;  // lower[0] and upper[n-1] unused
  explicit Tridiag(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

  std::vector<double> apply(const std::vector<double>& x) const {
    const std::size_t n = diag.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double v = diag[i] * x[i];
      if (i > 0) v += lower[i] * x[i - 1];
      if (i + 1 < n) v += upper[i] * x[i + 1];
      y[i] = v;
    }
    return y;
  }
};

double gfun(double omega) {
  const double w = omega * (1.0 - omega);
  return w * w;
}

}  // namespace

void FilterParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (!(horizon_t > 0.0))
    throw std::invalid_argument("horizon_t must be positive");
}

OmegaGrid::OmegaGrid(int n) : n_nodes(n) {
  if (n < 16) throw std::invalid_argument("omega grid needs at least 16 nodes");
}

std::vector<double> OmegaGrid::nodes() const {
  std::vector<double> x(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) x[static_cast<std::size_t>(i)] = node(i);
  return x;
}

void TerminalCondition::validate() const {
  if (std::abs(weight_a + weight_b - 1.0) > 1e-12)
    throw std::invalid_argument("terminal weights must sum to 1");
  if (weight_a < 0.0 || weight_b < 0.0)
    throw std::invalid_argument("terminal weights must be nonnegative");
  if (!(theta_1 > 0.0 && theta_1 < theta_2 && theta_2 < 0.5))
    throw std::invalid_argument("modes require 0 < theta_1 < theta_2 < 0.5");
}

double TerminalCondition::effective_eps(const OmegaGrid& grid) const {
  return eps > 0.0 ? eps : 4.0 * grid.spacing();
}

double DensitySurface::mass(int k) const {
  return trapezoid_mass(slices.at(static_cast<std::size_t>(k)), grid.spacing());
}

std::vector<double> DensitySurface::slice_at(double tau) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(taus.back()));
  if (tau < taus.front() - tol || tau > taus.back() + tol)
    throw std::out_of_range("tau outside surface coverage");
  tau = std::clamp(tau, taus.front(), taus.back());
  auto it = std::lower_bound(taus.begin(), taus.end(), tau);
  std::size_t hi = static_cast<std::size_t>(it - taus.begin());
  if (hi == 0) return slices.front();
  if (hi >= taus.size()) return slices.back();
  const std::size_t lo = hi - 1;
  const double span = taus[hi] - taus[lo];
  const double w = span > 0.0 ? (tau - taus[lo]) / span : 0.0;
  std::vector<double> out(slices[lo].size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - w) * slices[lo][i] + w * slices[hi][i];
  return out;
}

double DensitySurface::mean_omega(double tau) const {
  const std::vector<double> s = slice_at(tau);
  const double h = grid.spacing();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < grid.n_nodes; ++i) {
    const double w = (i == 0 || i == grid.n_nodes - 1) ? 0.5 * h : h;
    num += grid.node(i) * s[static_cast<std::size_t>(i)] * w;
    den += s[static_cast<std::size_t>(i)] * w;
  }
  return den > 0.0 ? num / den : 0.0;
}

SolverBlowup::SolverBlowup(double tau_)
    : std::runtime_error("solver blow-up at tau = " + std::to_string(tau_)),
      tau(tau_) {}

double drift(double omega, const FilterParams& params) {
  return params.lambda * (1.0 - 2.0 * omega) -
         params.mu * omega * (1.0 - omega);
}

double diffusion(double omega, const FilterParams& params) {
  const double ls = params.lambda * params.sigma;
  return 0.5 * ls * ls * gfun(omega);
}

std::vector<double> terminal_density(const OmegaGrid& grid,
                                     const TerminalCondition& tc) {
  tc.validate();
  const double eps = tc.effective_eps(grid);
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(eps < 0.5 * (tc.theta_2 - tc.theta_1)))
    throw std::invalid_argument("eps must be below half the mode separation");

  const double h = grid.spacing();
  auto resolved = [&](double mode) {
    int count = 0;
    for (int i = 0; i < grid.n_nodes; ++i)
      if (std::abs(grid.node(i) - mode) <= 3.0 * eps) ++count;
    return count >= 3;
  };
  if ((tc.weight_a > 0.0 && !resolved(tc.theta_1)) ||
      (tc.weight_b > 0.0 && !resolved(tc.theta_2)))
    throw std::invalid_argument(
        "under-resolved terminal condition: fewer than 3 nodes within 3*eps "
        "of a mode");

  std::vector<double> out(static_cast<std::size_t>(grid.n_nodes), 0.0);
  const double norm = 1.0 / (eps * std::sqrt(2.0 * M_PI));
  for (int i = 0; i < grid.n_nodes; ++i) {
    const double w = grid.node(i);
    const double z1 = (w - tc.theta_1) / eps;
    const double z2 = (w - tc.theta_2) / eps;
    out[static_cast<std::size_t>(i)] =
        norm * (tc.weight_a * std::exp(-0.5 * z1 * z1) +
                tc.weight_b * std::exp(-0.5 * z2 * z2));
  }
  const double mass = trapezoid_mass(out, h);
  for (double& v : out) v /= mass;
  return out;
}

namespace {

/// Backward operator of the filtering PDE on the grid (Dirichlet 0 at
/// omega = 0, zero slope at omega = 1/2 via a ghost node).
Tridiag backward_operator(const FilterParams& params, const OmegaGrid& grid) {
  const int n = grid.n_nodes;
  const double h = grid.spacing();
  Tridiag op(static_cast<std::size_t>(n));
  for (int i = 1; i < n - 1; ++i) {
    const double a = drift(grid.node(i), params);
    const double d = diffusion(grid.node(i), params);
    op.lower[i] = a / (2.0 * h) + d / (h * h);
    op.diag[i] = -2.0 * d / (h * h);
    op.upper[i] = -a / (2.0 * h) + d / (h * h);
  }
  const double dn = diffusion(0.5, params);
  op.lower[n - 1] = 2.0 * dn / (h * h);
  op.diag[n - 1] = -2.0 * dn / (h * h);
  return op;
}

/// Forward flux-form operator: dP/dtau = L P with face fluxes
/// j_{i+1/2} = a_{i+1/2} (P_i + P_{i+1})/2 - D (g_{i+1} P_{i+1} - g_i P_i)/h.
/// The face beyond omega = 1/2 carries zero flux; node 0 is pinned to 0.
Tridiag forward_operator(const FilterParams& params, const OmegaGrid& grid) {
  const int n = grid.n_nodes;
  const double h = grid.spacing();
  const double ls = params.lambda * params.sigma;
  const double dcoef = 0.5 * ls * ls;
  Tridiag op(static_cast<std::size_t>(n));
  auto face = [&](int i, double& c_lo, double& c_hi) {
    // flux between nodes i and i+1 as c_lo * P_i + c_hi * P_{i+1}
    const double am = drift(0.5 * (grid.node(i) + grid.node(i + 1)), params);
    c_lo = 0.5 * am + dcoef * gfun(grid.node(i)) / h;
    c_hi = 0.5 * am - dcoef * gfun(grid.node(i + 1)) / h;
  };
  for (int i = 1; i < n - 1; ++i) {
    double c1, c2, d1, d2;
    face(i, c1, c2);      // j_{i+1/2}
    face(i - 1, d1, d2);  // j_{i-1/2}
    op.lower[i] = d1 / h;
    op.diag[i] = (d2 - c1) / h;
    op.upper[i] = -c2 / h;
  }
  double d1, d2;
  face(n - 2, d1, d2);
  op.lower[n - 1] = 2.0 * d1 / h;
  op.diag[n - 1] = 2.0 * d2 / h;
  return op;
}

enum class StepPolicy { ClipAndRenormalize, ClipOnly };

DensitySurface run_crank_nicolson(const FilterParams& params,
                                  const OmegaGrid& grid, const Tridiag& op,
                                  std::vector<double> state, int n_tau_steps,
                                  int store_stride, StepPolicy policy) {
  if (n_tau_steps < 1)
    throw std::invalid_argument("n_tau_steps must be >= 1");
  if (store_stride < 1) store_stride = 1;
  const int n = grid.n_nodes;
  const double h = grid.spacing();
  const double dtau = params.horizon_t / n_tau_steps;

  // Crank-Nicolson matrices; node 0 is held at zero.
  Tridiag lhs(static_cast<std::size_t>(n));
  Tridiag rhs(static_cast<std::size_t>(n));
  lhs.diag[0] = rhs.diag[0] = 1.0;
  for (int i = 1; i < n; ++i) {
    lhs.lower[i] = -0.5 * dtau * op.lower[i];
    lhs.diag[i] = 1.0 - 0.5 * dtau * op.diag[i];
    lhs.upper[i] = -0.5 * dtau * op.upper[i];
    rhs.lower[i] = 0.5 * dtau * op.lower[i];
    rhs.diag[i] = 1.0 + 0.5 * dtau * op.diag[i];
    rhs.upper[i] = 0.5 * dtau * op.upper[i];
  }

  state[0] = 0.0;
  DensitySurface surf{grid, {}, {}, {}, {}};
  surf.taus.push_back(0.0);
  surf.slices.push_back(state);

  for (int step = 1; step <= n_tau_steps; ++step) {
    const double tau = step * dtau;
    std::vector<double> b = rhs.apply(state);
    b[0] = 0.0;
    state = solve_tridiag(lhs.lower, lhs.diag, lhs.upper, std::move(b));

    double clipped = 0.0;
    for (int i = 0; i < n; ++i) {
      double& v = state[static_cast<std::size_t>(i)];
      if (!std::isfinite(v)) throw SolverBlowup(tau);
      if (v < 0.0) {
        const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
        clipped += -v * w;
        v = 0.0;
      }
    }
    surf.clipped_mass.push_back(clipped);

    double factor = 1.0;
    if (policy == StepPolicy::ClipAndRenormalize) {
      const double mass = trapezoid_mass(state, h);
      if (!(mass > 0.0)) throw SolverBlowup(tau);
      factor = 1.0 / mass;
      for (double& v : state) v *= factor;
    }
    surf.renorm_factors.push_back(factor);

    if (step % store_stride == 0 || step == n_tau_steps) {
      surf.taus.push_back(tau);
      surf.slices.push_back(state);
    }
  }
  return surf;
}

}  // namespace

DensitySurface solve_backward(const FilterParams& params, const OmegaGrid& grid,
                              const TerminalCondition& tc, int n_tau_steps,
                              int store_stride) {
  params.validate();
  std::vector<double> init = terminal_density(grid, tc);
  return run_crank_nicolson(params, grid, backward_operator(params, grid),
                            std::move(init), n_tau_steps, store_stride,
                            StepPolicy::ClipAndRenormalize);
}

DensitySurface solve_forward(const FilterParams& params, const OmegaGrid& grid,
                             const std::vector<double>& init, int n_tau_steps,
                             int store_stride) {
  params.validate();
  if (static_cast<int>(init.size()) != grid.n_nodes)
    throw std::invalid_argument("init density size mismatch");
  return run_crank_nicolson(params, grid, forward_operator(params, grid), init,
                            n_tau_steps, store_stride, StepPolicy::ClipOnly);
}

std::vector<double> probability_current(const std::vector<double>& density,
                                        const OmegaGrid& grid,
                                        const FilterParams& params) {
  if (static_cast<int>(density.size()) != grid.n_nodes)
    throw std::invalid_argument("density size mismatch");
  const int n = grid.n_nodes;
  const double h = grid.spacing();
  const double ls = params.lambda * params.sigma;
  const double dcoef = 0.5 * ls * ls;
  std::vector<double> q(density.size());
  for (int i = 0; i < n; ++i)
    q[static_cast<std::size_t>(i)] =
        gfun(grid.node(i)) * density[static_cast<std::size_t>(i)];
  std::vector<double> j(density.size());
  for (int i = 0; i < n; ++i) {
    double dq;
    if (i == 0)
      dq = (q[1] - q[0]) / h;
    else if (i == n - 1)
      dq = (q[static_cast<std::size_t>(n - 1)] -
            q[static_cast<std::size_t>(n - 2)]) / h;
    else
      dq = (q[static_cast<std::size_t>(i + 1)] -
            q[static_cast<std::size_t>(i - 1)]) / (2.0 * h);
    j[static_cast<std::size_t>(i)] =
        -drift(grid.node(i), params) * density[static_cast<std::size_t>(i)] +
        dcoef * dq;
  }
  return j;
}

std::vector<double> stationary_numeric(const FilterParams& params,
                                       const OmegaGrid& grid) {
  params.validate();
  if (!(params.sigma > 0.0))
    throw std::domain_error("stationary density requires sigma > 0");
  const int n = grid.n_nodes;
  const double h = grid.spacing();
  const double ls = params.lambda * params.sigma;
  const double dcoef = 0.5 * ls * ls;
  auto logq_slope = [&](double w) {
    return drift(w, params) / (dcoef * gfun(w));
  };

  // log Q by per-interval Simpson quadrature, anchored at the first interior
  // node.
  std::vector<double> logq(static_cast<std::size_t>(n),
                           -std::numeric_limits<double>::infinity());
  logq[1] = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    const double lo = grid.node(i), hi = grid.node(i + 1);
    const double mid = 0.5 * (lo + hi);
    logq[static_cast<std::size_t>(i + 1)] =
        logq[static_cast<std::size_t>(i)] +
        (h / 6.0) * (logq_slope(lo) + 4.0 * logq_slope(mid) + logq_slope(hi));
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < n; ++i) peak = std::max(peak, logq[static_cast<std::size_t>(i)]);

  std::vector<double> p(static_cast<std::size_t>(n), 0.0);
  for (int i = 1; i < n; ++i)
    p[static_cast<std::size_t>(i)] =
        std::exp(logq[static_cast<std::size_t>(i)] - peak) / gfun(grid.node(i));
  const double mass = trapezoid_mass(p, h);
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw std::runtime_error("stationary density not normalizable");
  for (double& v : p) v /= mass;

  // Boundary-dominance check: report the mass-vs-omega_lo table when the
  // density concentrates on the first interior node.
  if (p[1] * h > 0.5) {
    std::ostringstream msg;
    msg << "boundary-dominated stationary density; mass vs omega_lo:";
    double tail = 0.0;
    for (int i = n - 1; i >= 1; --i) {
      const double w = (i == n - 1) ? 0.5 * h : h;
      tail += p[static_cast<std::size_t>(i)] * w;
      if (i == 1 || i == 2 || i == 4 || i == 8)
        msg << " [" << grid.node(i) << ": " << tail << "]";
    }
    throw std::runtime_error(msg.str());
  }
  return p;
}

double stationary_paper(double omega, const FilterParams& params) {
  if (!(omega > 0.0 && omega < 1.0))
    throw std::domain_error("stationary form defined on (0, 1)");
  if (!(params.sigma > 0.0))
    throw std::domain_error("stationary form requires sigma > 0");
  const double ls2 = params.lambda * params.sigma * params.sigma;
  const double alpha = 2.0 * params.mu / ls2;
  return std::pow(omega / (1.0 - omega), alpha) *
         std::exp(-(1.0 / ls2) * (1.0 / omega + 1.0 / (1.0 - omega)));
}

double markov_mean_path(double theta_0, double lambda, double t) {
  if (theta_0 < 0.0 || theta_0 > 1.0)
    throw std::domain_error("theta_0 must lie in [0, 1]");
  if (t < 0.0) throw std::domain_error("t must be >= 0");
  return 0.5 + (theta_0 - 0.5) * std::exp(-2.0 * lambda * t);
}

StationaryComparison compare_stationary(const FilterParams& params,
                                        const OmegaGrid& grid) {
  StationaryComparison cmp;
  cmp.omega = grid.nodes();
  cmp.numeric = stationary_numeric(params, grid);
  cmp.printed.assign(static_cast<std::size_t>(grid.n_nodes), 0.0);
  for (int i = 1; i < grid.n_nodes; ++i)
    cmp.printed[static_cast<std::size_t>(i)] =
        stationary_paper(grid.node(i), params);
  const double mass = trapezoid_mass(cmp.printed, grid.spacing());
  for (double& v : cmp.printed) v /= mass;
  cmp.current_numeric = probability_current(cmp.numeric, grid, params);
  cmp.current_printed = probability_current(cmp.printed, grid, params);
  for (int i = 1; i + 1 < grid.n_nodes; ++i) {
    cmp.max_interior_current_numeric =
        std::max(cmp.max_interior_current_numeric,
                 std::abs(cmp.current_numeric[static_cast<std::size_t>(i)]));
    cmp.max_interior_current_printed =
        std::max(cmp.max_interior_current_printed,
                 std::abs(cmp.current_printed[static_cast<std::size_t>(i)]));
    cmp.max_pointwise_gap =
        std::max(cmp.max_pointwise_gap,
                 std::abs(cmp.numeric[static_cast<std::size_t>(i)] -
                          cmp.printed[static_cast<std::size_t>(i)]));
  }
  return cmp;
}

}  // namespace fkk
