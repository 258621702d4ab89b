#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace fkk {

/// Validation margin below the theta_p = 1/2 divergence of the asymptotic
/// waiting time.
inline constexpr double kThetaGuard = 1e-9;

/// Market primitives: arrival rate, patience mix, waiting costs, tick and the
/// session-start quotes.
struct ModelParams {
  double lambda = 1.0;     ///< order arrival rate (1/time)
  double theta_p = 0.0;    ///< fraction of patient traders, in [0, 1/2)
  double delta_p = 0.005;  ///< patient waiting cost per unit time
  double delta_i = 0.05;   ///< impatient waiting cost per unit time
  double tick = 0.01;      ///< price increment
  double ask_a = 100.0;    ///< session-start ask
  double bid_b = 99.0;     ///< session-start bid
  int max_spread_k = 100;  ///< (ask_a - bid_b) / tick

  /// Throws std::invalid_argument when any invariant is violated.
  void validate() const;
};

/// Per-step order-type probabilities alpha_k(j), k = 0..j-1.  Row sums are
/// enforced to 1 at construction.
class AlphaTable {
 public:
  /// rows[j-1] holds the probabilities for step j (size j).
  explicit AlphaTable(std::vector<std::vector<double>> rows);

  int max_step() const { return static_cast<int>(rows_.size()); }
  double alpha(int j, int k) const { return rows_.at(j - 1).at(k); }
  const std::vector<double>& row(int j) const { return rows_.at(j - 1); }

  /// Table with alpha_0(j) = 1 for every j: all market orders.
  static AlphaTable all_market(int max_step);

 private:
  std::vector<std::vector<double>> rows_;
};

/// Expected execution delays T(1..J) from the order-type probabilities:
/// T(j) = (1/alpha_0(j)) [1/lambda + sum_k alpha_k(j) T(k)].
/// Throws std::domain_error when some alpha_0(j) = 0 (non-executable book)
/// or lambda <= 0.
std::vector<double> waiting_time_recursion(const AlphaTable& alpha,
                                           double lambda);

/// Equilibrium delay at level h: (1/lambda)(1 + 2 sum_{k=1}^{h-1} r^k) with
/// r = theta_p/(1-theta_p), evaluated in closed form.
double equilibrium_waiting_time(int h, double theta_p, double lambda);

/// Asymptotic execution rate lambda (1 - 2 theta_p); the h -> infinity limit
/// of 1/equilibrium_waiting_time.
double asymptotic_rate(double theta_p, double lambda);

/// Spread revenue minus delay cost: j*tick - delta*t_wait.  Zero at the
/// reservation point.
double waiting_payoff(int j, double delta, double t_wait, double tick);

/// Smallest spread j in [1, max_spread_k] with nonnegative waiting payoff
/// under the delay schedule t_of, or nullopt when no spread qualifies.
std::optional<int> reservation_spread(double delta, const ModelParams& params,
                                      const std::function<double(int)>& t_of);

struct QuotePair {
  double p_buy;
  double p_sell;
};

/// Mixture-adjusted quotes: the ask drops and the bid rises by
/// tick * (theta_p j_p + (1-theta_p) j_i).
QuotePair expected_prices(const ModelParams& params, int j_p, int j_i);

}  // namespace fkk
