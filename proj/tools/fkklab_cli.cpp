#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fkklab/config.hpp"
#include "fkklab/csv.hpp"
#include "fkklab/fkk.hpp"
#include "fkklab/pde.hpp"
#include "fkklab/price_map.hpp"
#include "fkklab/sim.hpp"
#include "fkklab/vwap.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

fkk::RunConfig load(const CommonOpts& opts) {
  fkk::RunConfig cfg = opts.config_path.empty()
                           ? fkk::RunConfig{}
                           : fkk::load_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.seed) cfg.sim.seed = *opts.seed;
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  return cfg;
}

std::ofstream open_out(const fkk::RunConfig& cfg, const std::string& name) {
  const fs::path p = fs::path(cfg.output_dir) / name;
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

/// Nodal density slice viewed as a histogram (cell mass around each node).
fkk::Histogram slice_histogram(const fkk::OmegaGrid& grid,
                               const std::vector<double>& slice) {
  const double h = grid.spacing();
  fkk::Histogram hist;
  hist.edges.resize(slice.size() + 1);
  for (std::size_t i = 0; i <= slice.size(); ++i)
    hist.edges[i] = grid.node(0) - 0.5 * h + static_cast<double>(i) * h;
  hist.mass = slice;
  for (double& m : hist.mass) m = std::max(m, 0.0);
  return hist;
}

/// Locations of local maxima above `rel` times the slice max.
std::vector<double> mode_locations(const fkk::OmegaGrid& grid,
                                   const std::vector<double>& slice,
                                   double rel = 0.1) {
  std::vector<double> out;
  double mx = 0.0;
  for (double v : slice) mx = std::max(mx, v);
  if (!(mx > 0.0)) return out;
  const std::size_t n = slice.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && slice[j] == slice[i]) ++j;
    const bool rises = (i == 0) || (slice[i - 1] < slice[i]);
    const bool falls = (j == n) || (slice[j] < slice[i]);
    if (rises && falls && !(i == 0 && j == n) && slice[i] >= rel * mx)
      out.push_back(grid.node(static_cast<int>(i)));
    i = j;
  }
  return out;
}

int cmd_fkk(const CommonOpts& opts, int levels) {
  const fkk::RunConfig cfg = load(opts);
  const double t_inf =
      1.0 / fkk::asymptotic_rate(cfg.model.theta_p, cfg.model.lambda);
  std::ofstream out = open_out(cfg, "waiting_times.csv");
  out << "h,t_h,t_inf,rel_gap\n";
  for (int h = 1; h <= levels; ++h) {
    const double t_h =
        fkk::equilibrium_waiting_time(h, cfg.model.theta_p, cfg.model.lambda);
    out << h << ',' << fkk::csv::format_double(t_h) << ','
        << fkk::csv::format_double(t_inf) << ','
        << fkk::csv::format_double(std::abs(t_inf - t_h) / t_inf) << '\n';
  }
  std::cout << "wrote waiting_times.csv (" << levels << " levels)\n";
  return kExitOk;
}

int cmd_pde(const CommonOpts& opts) {
  const fkk::RunConfig cfg = load(opts);
  const fkk::OmegaGrid grid(cfg.grid_nodes);
  const fkk::DensitySurface surface =
      fkk::solve_backward(cfg.filter, grid, cfg.terminal, cfg.grid_tau_steps,
                          cfg.grid_store_stride);
  {
    std::ofstream out = open_out(cfg, "surface.csv");
    fkk::csv::write_surface(out, surface);
  }

  std::ofstream rep = open_out(cfg, "pde_summary.txt");
  double max_drift = 0.0, max_renorm_dev = 0.0, total_clipped = 0.0;
  for (std::size_t k = 0; k < surface.taus.size(); ++k)
    max_drift = std::max(max_drift,
                         std::abs(surface.mass(static_cast<int>(k)) - 1.0));
  for (double r : surface.renorm_factors)
    max_renorm_dev = std::max(max_renorm_dev, std::abs(r - 1.0));
  for (double c : surface.clipped_mass) total_clipped += c;
  rep << "slices_stored " << surface.taus.size() << '\n'
      << "max_mass_drift " << fkk::csv::format_double(max_drift) << '\n'
      << "max_renorm_deviation " << fkk::csv::format_double(max_renorm_dev)
      << '\n'
      << "total_clipped_mass " << fkk::csv::format_double(total_clipped)
      << '\n';
  for (std::size_t k = 0; k < surface.taus.size(); ++k) {
    const auto locs = mode_locations(grid, surface.slices[k]);
    rep << "tau " << fkk::csv::format_double(surface.taus[k]) << " modes "
        << locs.size();
    for (double w : locs) rep << ' ' << fkk::csv::format_double(w);
    rep << '\n';
  }

  if (cfg.pde_forward_check) {
    fkk::FilterParams fp = cfg.filter;
    fp.mu = 0.0;
    const auto init = fkk::terminal_density(grid, cfg.terminal);
    const fkk::DensitySurface fwd =
        fkk::solve_forward(fp, grid, init, cfg.grid_tau_steps,
                           cfg.grid_store_stride);
    double drift = 0.0;
    for (std::size_t k = 0; k < fwd.taus.size(); ++k)
      drift = std::max(drift, std::abs(fwd.mass(static_cast<int>(k)) - 1.0));
    rep << "forward_check_mass_drift " << fkk::csv::format_double(drift)
        << (drift <= 1e-6 ? " PASS" : " FAIL") << '\n';
  }

  if (cfg.pde_characteristic_check) {
    fkk::FilterParams fp = cfg.filter;
    fp.sigma = 0.0;
    const fkk::DensitySurface adv =
        fkk::solve_backward(fp, grid, cfg.terminal, cfg.grid_tau_steps,
                            cfg.grid_store_stride);
    double worst_cells = 0.0;
    for (std::size_t k = 0; k < adv.taus.size(); ++k) {
      const auto locs = mode_locations(grid, adv.slices[k]);
      for (std::size_t m = 0; m < locs.size(); ++m) {
        const double theta0 = (m == 0) ? cfg.terminal.theta_1
                                       : cfg.terminal.theta_2;
        const double want = fkk::markov_mean_path(theta0, fp.lambda,
                                                  adv.taus[k]);
        worst_cells = std::max(worst_cells,
                               std::abs(locs[m] - want) / grid.spacing());
      }
    }
    rep << "characteristic_max_cell_error "
        << fkk::csv::format_double(worst_cells) << '\n';
  }

  if (cfg.pde_stationary_report) {
    const auto cmp = fkk::compare_stationary(cfg.filter, grid);
    std::ofstream sc = open_out(cfg, "stationary_comparison.csv");
    sc << "omega,numeric,printed,current_numeric,current_printed\n";
    for (std::size_t i = 0; i < cmp.omega.size(); ++i)
      sc << fkk::csv::format_double(cmp.omega[i]) << ','
         << fkk::csv::format_double(cmp.numeric[i]) << ','
         << fkk::csv::format_double(cmp.printed[i]) << ','
         << fkk::csv::format_double(cmp.current_numeric[i]) << ','
         << fkk::csv::format_double(cmp.current_printed[i]) << '\n';
    rep << "stationary_max_current_numeric "
        << fkk::csv::format_double(cmp.max_interior_current_numeric) << '\n'
        << "stationary_max_current_printed "
        << fkk::csv::format_double(cmp.max_interior_current_printed) << '\n'
        << "stationary_max_pointwise_gap "
        << fkk::csv::format_double(cmp.max_pointwise_gap) << '\n';
  }

  std::cout << "wrote surface.csv and pde_summary.txt\n";
  return kExitOk;
}

int cmd_simulate(const CommonOpts& opts, int workers) {
  const fkk::RunConfig cfg = load(opts);
  const auto traces = fkk::simulate(cfg.sim, workers);
  {
    std::ofstream out = open_out(cfg, "trace.csv");
    fkk::csv::write_traces(out, traces);
  }
  {
    std::ofstream out = open_out(cfg, "volume.csv");
    fkk::csv::write_histogram(out,
                              fkk::volume_at_price(traces, cfg.model.tick));
  }

  std::ofstream rep = open_out(cfg, "oracle_report.txt");
  bool ok = true;
  const auto levels = fkk::empirical_waiting_times(traces);
  for (const auto& ls : levels) {
    if (ls.count < 10) continue;
    const double want = fkk::theoretical_delay(cfg.model, ls.level);
    const double dev =
        ls.std_error > 0.0 ? std::abs(ls.mean_delay - want) / ls.std_error
                           : 0.0;
    const bool pass = dev <= 3.0;
    ok = ok && pass;
    rep << "level " << ls.level << " n " << ls.count << " mean "
        << fkk::csv::format_double(ls.mean_delay) << " theory "
        << fkk::csv::format_double(want) << " dev_se "
        << fkk::csv::format_double(dev) << (pass ? " PASS" : " FAIL") << '\n';
  }
  rep << "coverage " << fkk::csv::format_double(fkk::execution_coverage(traces))
      << '\n';

  if (cfg.sim.mix_mode == fkk::MixMode::TwoStateMarkov) {
    double t_max = 0.0;
    for (const auto& tr : traces)
      if (!tr.events.empty()) t_max = std::max(t_max, tr.events.back().time);
    std::vector<double> edges;
    for (int b = 0; b <= 10; ++b) edges.push_back(t_max * b / 10.0);
    for (const auto& bin : fkk::empirical_theta_path(traces, edges)) {
      if (bin.empty) continue;
      const double mid = 0.5 * (bin.t_lo + bin.t_hi);
      const double want =
          fkk::markov_mean_path(cfg.sim.theta_0, cfg.model.lambda, mid);
      rep << "theta_bin " << fkk::csv::format_double(mid) << " frac "
          << fkk::csv::format_double(bin.fraction) << " theory "
          << fkk::csv::format_double(want) << " se "
          << fkk::csv::format_double(bin.std_error) << '\n';
    }
  }
  rep << (ok ? "ORACLES PASS" : "ORACLES FAIL") << '\n';
  std::cout << "wrote trace.csv, volume.csv, oracle_report.txt\n";
  return kExitOk;
}

int cmd_price(const CommonOpts& opts) {
  const fkk::RunConfig cfg = load(opts);
  const fkk::OmegaGrid grid(cfg.grid_nodes);
  const fkk::DensitySurface surface =
      fkk::solve_backward(cfg.filter, grid, cfg.terminal, cfg.grid_tau_steps,
                          cfg.grid_store_stride);
  std::ofstream table = open_out(cfg, "price_moments.csv");
  table << "t,mean,stddev\n";
  for (std::size_t k = 0; k < cfg.price_times.size(); ++k) {
    const double t = cfg.price_times[k];
    const auto prior =
        fkk::PriorSpec::make(cfg.filter.lambda, cfg.model.theta_p, t);
    const fkk::PriceDensity density = fkk::price_distribution(
        surface, prior, cfg.filter, t, cfg.model.tick, cfg.model.max_spread_k);
    fkk::csv::PriceMeta meta{cfg.filter.lambda, cfg.filter.sigma,
                             cfg.filter.mu,     cfg.model.theta_p,
                             cfg.filter.horizon_t, t,
                             cfg.model.tick};
    std::ofstream out =
        open_out(cfg, "price_t" + std::to_string(k) + ".csv");
    fkk::csv::write_price_density(out, density, meta);
    const fkk::Moments mom = fkk::moments(density);
    table << fkk::csv::format_double(t) << ','
          << fkk::csv::format_double(mom.mean) << ','
          << fkk::csv::format_double(mom.stddev) << '\n';
  }
  std::cout << "wrote " << cfg.price_times.size()
            << " price CSVs and price_moments.csv\n";
  return kExitOk;
}

int cmd_filter(const CommonOpts& opts, const std::string& input) {
  const fkk::RunConfig cfg = load(opts);
  std::ifstream in(input);
  if (!in) throw std::invalid_argument("cannot open input histogram: " + input);
  const fkk::Histogram hist = fkk::csv::read_histogram(in);
  const fkk::FilteredHistogram filtered = fkk::alias_filter(hist, cfg.kernel);
  std::ofstream out = open_out(cfg, "filtered.csv");
  fkk::csv::write_histogram(out, filtered.hist);
  std::cout << "wrote filtered.csv (clipped mass "
            << fkk::csv::format_double(filtered.clipped_mass) << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FKK limit-order-book laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // accept --config/--out/--seed after the subcommand

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "key=value config file");
  app.add_option("--out", opts.out_dir, "output directory");
  std::uint64_t seed_val = 0;
  auto* seed_opt =
      app.add_option("--seed", seed_val, "override the config seed");

  int levels = 50;
  auto* sub_fkk = app.add_subcommand("fkk", "equilibrium waiting-time table");
  sub_fkk->add_option("--levels", levels, "number of levels h to tabulate");

  auto* sub_pde =
      app.add_subcommand("pde", "backward filtering solve and summary");

  int workers = 1;
  auto* sub_sim =
      app.add_subcommand("simulate", "session simulation with oracle report");
  sub_sim->add_option("--workers", workers, "parallel session workers");

  auto* sub_price =
      app.add_subcommand("price", "price-adjustment densities over t");

  std::string filter_input;
  auto* sub_filter =
      app.add_subcommand("filter", "apply the aliasing kernel to a histogram");
  sub_filter->add_option("--input", filter_input, "histogram CSV")->required();

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) opts.seed = seed_val;

  try {
    if (sub_fkk->parsed()) return cmd_fkk(opts, levels);
    if (sub_pde->parsed()) return cmd_pde(opts);
    if (sub_sim->parsed()) return cmd_simulate(opts, workers);
    if (sub_price->parsed()) return cmd_price(opts);
    if (sub_filter->parsed()) return cmd_filter(opts, filter_input);
  } catch (const fkk::SolverBlowup& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}
