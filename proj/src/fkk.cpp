#include "fkklab/fkk.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fkk {

namespace {

void check_theta(double theta_p) {
  if (theta_p < 0.0 || theta_p >= 0.5 - kThetaGuard)
    throw std::domain_error("theta_p must lie in [0, 0.5): waiting time "
                            "diverges at one half (theta_p = " +
                            std::to_string(theta_p) + ")");
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
}

}  // namespace

void ModelParams::validate() const {
  check_lambda(lambda);
  check_theta(theta_p);
  if (!(delta_p > 0.0) || !(delta_i > delta_p))
    throw std::invalid_argument("waiting costs require delta_i > delta_p > 0");
  if (!(tick > 0.0)) throw std::invalid_argument("tick must be positive");
  if (!(ask_a > bid_b)) throw std::invalid_argument("ask_a must exceed bid_b");
  if (max_spread_k < 1) throw std::invalid_argument("max_spread_k must be >= 1");
  const double k = (ask_a - bid_b) / tick;
  if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, std::abs(k)))
    throw std::invalid_argument(
        "ask_a - bid_b must be an integer multiple of tick");
  if (std::llround(k) != max_spread_k)
    throw std::invalid_argument("max_spread_k inconsistent with (a-b)/tick");
}

AlphaTable::AlphaTable(std::vector<std::vector<double>> rows)
    : rows_(std::move(rows)) {
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    const auto& row = rows_[j];
    if (row.size() != j + 1)
      throw std::invalid_argument("alpha row for step " + std::to_string(j + 1) +
                                  " must have " + std::to_string(j + 1) +
                                  " entries");
    double sum = 0.0;
    for (double a : row) {
      if (a < 0.0 || a > 1.0)
        throw std::invalid_argument("alpha probabilities must lie in [0, 1]");
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("alpha row " + std::to_string(j + 1) +
                                  " must sum to 1, got " + std::to_string(sum));
  }
}

AlphaTable AlphaTable::all_market(int max_step) {
  std::vector<std::vector<double>> rows;
  for (int j = 1; j <= max_step; ++j) {
    std::vector<double> row(static_cast<std::size_t>(j), 0.0);
    row[0] = 1.0;
    rows.push_back(std::move(row));
  }
  return AlphaTable(std::move(rows));
}

std::vector<double> waiting_time_recursion(const AlphaTable& alpha,
                                           double lambda) {
  check_lambda(lambda);
  const int jmax = alpha.max_step();
  std::vector<double> t(static_cast<std::size_t>(jmax), 0.0);
  for (int j = 1; j <= jmax; ++j) {
    const double a0 = alpha.alpha(j, 0);
    if (a0 <= 0.0)
      throw std::domain_error("non-executable book: alpha_0(" +
                              std::to_string(j) + ") = 0");
    double acc = 1.0 / lambda;
    for (int k = 1; k < j; ++k) acc += alpha.alpha(j, k) * t[k - 1];
    t[j - 1] = acc / a0;
  }
  return t;
}

double equilibrium_waiting_time(int h, double theta_p, double lambda) {
  check_theta(theta_p);
  check_lambda(lambda);
  if (h < 1) throw std::domain_error("level index h must be >= 1");
  const double r = theta_p / (1.0 - theta_p);
  if (h == 1 || r == 0.0) return 1.0 / lambda;
  // finite geometric sum: sum_{k=1}^{h-1} r^k = r (1 - r^{h-1}) / (1 - r)
  const double geo = r * (1.0 - std::pow(r, h - 1)) / (1.0 - r);
  return (1.0 + 2.0 * geo) / lambda;
}

double asymptotic_rate(double theta_p, double lambda) {
  check_theta(theta_p);
  check_lambda(lambda);
  return lambda * (1.0 - 2.0 * theta_p);
}

double waiting_payoff(int j, double delta, double t_wait, double tick) {
  if (j < 0) throw std::domain_error("spread j must be >= 0");
  if (!(delta > 0.0)) throw std::domain_error("delta must be positive");
  if (t_wait < 0.0) throw std::domain_error("t_wait must be >= 0");
  return j * tick - delta * t_wait;
}

std::optional<int> reservation_spread(double delta, const ModelParams& params,
                                      const std::function<double(int)>& t_of) {
  if (!(delta > 0.0)) throw std::domain_error("delta must be positive");
  for (int j = 1; j <= params.max_spread_k; ++j) {
    if (waiting_payoff(j, delta, t_of(j), params.tick) >= 0.0) return j;
  }
  return std::nullopt;
}

QuotePair expected_prices(const ModelParams& params, int j_p, int j_i) {
  if (j_p < 0 || j_p > params.max_spread_k || j_i < 0 ||
      j_i > params.max_spread_k)
    throw std::domain_error("spreads must lie in [0, max_spread_k]");
  const double adj =
      params.tick * (params.theta_p * j_p + (1.0 - params.theta_p) * j_i);
  return {params.ask_a - adj, params.bid_b + adj};
}

}  // namespace fkk
