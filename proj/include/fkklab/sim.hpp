#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fkklab/common.hpp"
#include "fkklab/fkk.hpp"
#include "fkklab/histogram.hpp"

namespace fkk {

/// Counter-based substream RNG: every draw is a pure function of
/// (master seed, stream id, draw counter), so parallel scheduling cannot
/// reorder the sequence.
class CounterRng {
 public:
  CounterRng(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double next_uniform();
  double next_exponential(double rate);
  bool next_bernoulli(double p);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class TraderType { Patient, Impatient };
enum class OrderType { Market, Limit };
enum class MixMode { IidBernoulli, TwoStateMarkov };

struct SimConfig {
  ModelParams params;
  MixMode mix_mode = MixMode::IidBernoulli;
  double theta_0 = 0.0;  ///< Markov-mode initial patient probability
  int n_sessions = 1;
  int session_length = 1000;  ///< orders per session
  std::uint64_t seed = 1;

  void validate() const;
};

struct Event {
  int index;            ///< arrival order within the session
  double time;          ///< arrival time
  TraderType trader;
  OrderType order;
  Side side;            ///< sides alternate, seller first
  int spread_ticks;     ///< spread faced by the order once posted (0 = touch)
  double price;         ///< quote per the side's price-update rule
  std::optional<double> exec_time;  ///< empty when unexecuted at session end
};

struct SessionTrace {
  int session_id = 0;
  std::vector<Event> events;
};

/// One trading session, deterministic given (config.seed, session_id).
SessionTrace simulate_session(const SimConfig& config, int session_id);

/// All sessions; n_workers > 1 runs sessions concurrently with identical
/// output ordering.
std::vector<SessionTrace> simulate(const SimConfig& config, int n_workers = 1);

struct LevelStats {
  int level;        ///< spread in ticks of the resting order
  long count;
  double mean_delay;
  double std_error;  ///< sample standard error of the mean
};

/// Mean execution delay per spread level over resting orders (orders that
/// waited).  Empty levels are omitted; unexecuted orders are excluded.
std::vector<LevelStats> empirical_waiting_times(
    const std::vector<SessionTrace>& traces);

/// Equilibrium delay expected at a resting order's spread level: below the
/// patient reservation spread the next arrival always takes (delay 1/lambda);
/// at level j >= j_res the level maps to strategy depth h = j - j_res + 1.
double theoretical_delay(const ModelParams& params, int level);

/// Fraction of orders that executed before session end.
double execution_coverage(const std::vector<SessionTrace>& traces);

struct ThetaBin {
  double t_lo, t_hi;
  long n_arrivals = 0;
  long n_patient = 0;
  double fraction = 0.0;
  double std_error = 0.0;
  bool empty = true;
};

/// Binned patient fraction among arrivals across sessions.
std::vector<ThetaBin> empirical_theta_path(
    const std::vector<SessionTrace>& traces,
    const std::vector<double>& bin_edges);

/// Executed trades binned by execution price; counts as mass.
Histogram volume_at_price(const std::vector<SessionTrace>& traces,
                          double bin_width);

}  // namespace fkk
