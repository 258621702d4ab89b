#include "fkklab/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace fkk {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t master_seed, std::uint64_t stream_id)
    : key_(mix64(master_seed + kGolden * (stream_id + 1))) {}

std::uint64_t CounterRng::next_u64() {
  return mix64(mix64(key_ ^ (counter_++ * kGolden)) + kGolden);
}

double CounterRng::next_uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_exponential(double rate) {
  return -std::log(next_uniform()) / rate;
}

bool CounterRng::next_bernoulli(double p) { return next_uniform() < p; }

void SimConfig::validate() const {
  params.validate();
  if (n_sessions < 1) throw std::invalid_argument("n_sessions must be >= 1");
  if (session_length < 1)
    throw std::invalid_argument("session_length must be >= 1");
  if (theta_0 < 0.0 || theta_0 > 1.0)
    throw std::invalid_argument("theta_0 must lie in [0, 1]");
}

namespace {

/// Two-state patient/impatient chain with symmetric switch rate lambda.
class TypeChain {
 public:
  TypeChain(CounterRng& rng, double theta_0, double lambda)
      : rng_(rng), lambda_(lambda), patient_(rng.next_bernoulli(theta_0)) {
    next_switch_ = rng_.next_exponential(lambda_);
  }

  bool patient_at(double t) {
    while (next_switch_ <= t) {
      patient_ = !patient_;
      next_switch_ += rng_.next_exponential(lambda_);
    }
    return patient_;
  }

 private:
  CounterRng& rng_;
  double lambda_;
  bool patient_;
  double next_switch_;
};

struct Resting {
  int event_idx;
  Side side;
};

}  // namespace

SessionTrace simulate_session(const SimConfig& config, int session_id) {
  config.validate();
  const ModelParams& mp = config.params;
  CounterRng rng(config.seed, static_cast<std::uint64_t>(session_id));

  // Equilibrium reservation spread of the patient type; below it patient
  // traders submit market orders too.
  const auto j_res_opt = reservation_spread(
      mp.delta_p, mp, [&](int j) {
        return equilibrium_waiting_time(j, mp.theta_p, mp.lambda);
      });
  const int j_res = j_res_opt.value_or(mp.max_spread_k + 1);

  TypeChain chain(rng, config.theta_0, mp.lambda);

  SessionTrace trace;
  trace.session_id = session_id;
  trace.events.reserve(static_cast<std::size_t>(config.session_length));

  std::vector<Resting> stack;
  bool top_is_market_rest = false;
  int n_buy_limits = 0, n_sell_limits = 0;
  double t = 0.0;

  for (int idx = 0; idx < config.session_length; ++idx) {
    t += rng.next_exponential(mp.lambda);
    const Side side = (idx % 2 == 0) ? Side::Sell : Side::Buy;
    const bool patient = (config.mix_mode == MixMode::IidBernoulli)
                             ? rng.next_bernoulli(mp.theta_p)
                             : chain.patient_at(t);

    const int n_limits = n_buy_limits + n_sell_limits;
    const int j_cur = stack.empty() ? mp.max_spread_k
                                    : (top_is_market_rest ? 0
                                                          : mp.max_spread_k - n_limits);

    Event ev;
    ev.index = idx;
    ev.time = t;
    ev.trader = patient ? TraderType::Patient : TraderType::Impatient;
    ev.side = side;

    if (patient && j_cur - 1 >= j_res) {
      // limit order one tick inside the spread
      const int own = (side == Side::Sell ? ++n_sell_limits : ++n_buy_limits);
      ev.order = OrderType::Limit;
      ev.spread_ticks = j_cur - 1;
      ev.price = (side == Side::Sell) ? mp.bid_b + mp.tick * own
                                      : mp.ask_a - mp.tick * own;
      stack.push_back({idx, side});
      top_is_market_rest = false;
    } else {
      ev.order = OrderType::Market;
      ev.spread_ticks = 0;
      ev.price = (side == Side::Sell) ? mp.bid_b : mp.ask_a;
      if (!stack.empty()) {
        // take the best opposite quote; the maker executes now
        const Resting maker = stack.back();
        stack.pop_back();
        trace.events[static_cast<std::size_t>(maker.event_idx)].exec_time = t;
        if (!top_is_market_rest) {
          if (maker.side == Side::Sell)
            --n_sell_limits;
          else
            --n_buy_limits;
        }
        top_is_market_rest = false;
        ev.exec_time = t;  // taker leg, immediate
      } else {
        // nobody to trade with yet: rest at the touch
        stack.push_back({idx, side});
        top_is_market_rest = true;
      }
    }
    trace.events.push_back(ev);
  }
  return trace;
}

std::vector<SessionTrace> simulate(const SimConfig& config, int n_workers) {
  config.validate();
  if (n_workers < 1) n_workers = 1;
  std::vector<SessionTrace> traces(static_cast<std::size_t>(config.n_sessions));
  if (n_workers == 1) {
    for (int s = 0; s < config.n_sessions; ++s)
      traces[static_cast<std::size_t>(s)] = simulate_session(config, s);
    return traces;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int s = next.fetch_add(1);
        if (s >= config.n_sessions) return;
        traces[static_cast<std::size_t>(s)] = simulate_session(config, s);
      }
    });
  }
  for (auto& th : pool) th.join();
  return traces;
}

std::vector<LevelStats> empirical_waiting_times(
    const std::vector<SessionTrace>& traces) {
  // Welford accumulators keyed by level, combined in session order.
  struct Acc {
    long n = 0;
    double mean = 0.0, m2 = 0.0;
  };
  std::vector<std::pair<int, Acc>> accs;
  auto acc_for = [&](int level) -> Acc& {
    for (auto& [lv, a] : accs)
      if (lv == level) return a;
    accs.emplace_back(level, Acc{});
    return accs.back().second;
  };
  for (const auto& trace : traces) {
    for (const auto& ev : trace.events) {
      if (!ev.exec_time || *ev.exec_time <= ev.time) continue;  // takers out
      Acc& a = acc_for(ev.spread_ticks);
      const double x = *ev.exec_time - ev.time;
      ++a.n;
      const double d = x - a.mean;
      a.mean += d / a.n;
      a.m2 += d * (x - a.mean);
    }
  }
  std::sort(accs.begin(), accs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<LevelStats> out;
  for (const auto& [level, a] : accs) {
    const double se =
        a.n > 1 ? std::sqrt(a.m2 / (a.n - 1) / a.n) : 0.0;
    out.push_back({level, a.n, a.mean, se});
  }
  return out;
}

double theoretical_delay(const ModelParams& params, int level) {
  const auto j_res = reservation_spread(params.delta_p, params, [&](int j) {
    return equilibrium_waiting_time(j, params.theta_p, params.lambda);
  });
  if (!j_res || level < *j_res) return 1.0 / params.lambda;
  return equilibrium_waiting_time(level - *j_res + 1, params.theta_p,
                                  params.lambda);
}

double execution_coverage(const std::vector<SessionTrace>& traces) {
  long total = 0, executed = 0;
  for (const auto& trace : traces)
    for (const auto& ev : trace.events) {
      ++total;
      if (ev.exec_time) ++executed;
    }
  return total > 0 ? static_cast<double>(executed) / total : 0.0;
}

std::vector<ThetaBin> empirical_theta_path(
    const std::vector<SessionTrace>& traces,
    const std::vector<double>& bin_edges) {
  if (bin_edges.size() < 2)
    throw std::invalid_argument("need at least one time bin");
  std::vector<ThetaBin> bins;
  for (std::size_t b = 0; b + 1 < bin_edges.size(); ++b)
    bins.push_back({bin_edges[b], bin_edges[b + 1]});
  for (const auto& trace : traces) {
    for (const auto& ev : trace.events) {
      auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), ev.time);
      if (it == bin_edges.begin() || it == bin_edges.end()) continue;
      ThetaBin& bin = bins[static_cast<std::size_t>(it - bin_edges.begin()) - 1];
      ++bin.n_arrivals;
      if (ev.trader == TraderType::Patient) ++bin.n_patient;
    }
  }
  for (ThetaBin& bin : bins) {
    bin.empty = bin.n_arrivals == 0;
    if (!bin.empty) {
      bin.fraction = static_cast<double>(bin.n_patient) / bin.n_arrivals;
      bin.std_error =
          std::sqrt(std::max(bin.fraction * (1.0 - bin.fraction), 1e-12) /
                    bin.n_arrivals);
    }
  }
  return bins;
}

Histogram volume_at_price(const std::vector<SessionTrace>& traces,
                          double bin_width) {
  if (!(bin_width > 0.0))
    throw std::invalid_argument("bin width must be positive");
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& trace : traces)
    for (const auto& ev : trace.events) {
      if (!ev.exec_time) continue;
      if (!any) {
        lo = hi = ev.price;
        any = true;
      } else {
        lo = std::min(lo, ev.price);
        hi = std::max(hi, ev.price);
      }
    }
  if (!any) throw std::invalid_argument("no executed trades to bin");

  const double start = std::floor(lo / bin_width) * bin_width;
  const int n_bins =
      std::max(1, static_cast<int>(std::floor((hi - start) / bin_width)) + 1);
  Histogram hist;
  hist.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int i = 0; i <= n_bins; ++i)
    hist.edges[static_cast<std::size_t>(i)] = start + i * bin_width;
  hist.mass.assign(static_cast<std::size_t>(n_bins), 0.0);
  for (const auto& trace : traces)
    for (const auto& ev : trace.events) {
      if (!ev.exec_time) continue;
      int b = static_cast<int>(std::floor((ev.price - start) / bin_width));
      b = std::clamp(b, 0, n_bins - 1);
      hist.mass[static_cast<std::size_t>(b)] += 1.0;
    }
  return hist;
}

}  // namespace fkk
