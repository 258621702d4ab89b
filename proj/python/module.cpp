#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fkklab/fkk.hpp"
#include "fkklab/histogram.hpp"
#include "fkklab/pde.hpp"
#include "fkklab/price_map.hpp"
#include "fkklab/sim.hpp"
#include "fkklab/vwap.hpp"

namespace py = pybind11;
using namespace fkk;

PYBIND11_MODULE(_fkklab, m) {
  m.doc() = "FKK limit-order-book laboratory core";

  py::register_exception<SolverBlowup>(m, "SolverBlowup");

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("lambda_", &ModelParams::lambda)
      .def_readwrite("theta_p", &ModelParams::theta_p)
      .def_readwrite("delta_p", &ModelParams::delta_p)
      .def_readwrite("delta_i", &ModelParams::delta_i)
      .def_readwrite("tick", &ModelParams::tick)
      .def_readwrite("ask_a", &ModelParams::ask_a)
      .def_readwrite("bid_b", &ModelParams::bid_b)
      .def_readwrite("max_spread_k", &ModelParams::max_spread_k)
      .def("validate", &ModelParams::validate);

  m.def("equilibrium_waiting_time", &equilibrium_waiting_time, py::arg("h"),
        py::arg("theta_p"), py::arg("lambda_"));
  m.def("asymptotic_rate", &asymptotic_rate, py::arg("theta_p"),
        py::arg("lambda_"));
  m.def(
      "waiting_time_recursion",
      [](const std::vector<std::vector<double>>& rows, double lambda) {
        return waiting_time_recursion(AlphaTable(rows), lambda);
      },
      py::arg("alpha_rows"), py::arg("lambda_"));
  m.def(
      "reservation_spread",
      [](double delta, const ModelParams& params,
         const std::function<double(int)>& t_of) {
        return reservation_spread(delta, params, t_of);
      },
      py::arg("delta"), py::arg("params"), py::arg("t_of"));
  m.def(
      "expected_prices",
      [](const ModelParams& params, int j_p, int j_i) {
        const QuotePair q = expected_prices(params, j_p, j_i);
        return py::make_tuple(q.p_buy, q.p_sell);
      },
      py::arg("params"), py::arg("j_p"), py::arg("j_i"));

  py::class_<FilterParams>(m, "FilterParams")
      .def(py::init<>())
      .def_readwrite("lambda_", &FilterParams::lambda)
      .def_readwrite("sigma", &FilterParams::sigma)
      .def_readwrite("mu", &FilterParams::mu)
      .def_readwrite("horizon_t", &FilterParams::horizon_t);

  py::class_<OmegaGrid>(m, "OmegaGrid")
      .def(py::init<int>(), py::arg("n"))
      .def_readonly("n_nodes", &OmegaGrid::n_nodes)
      .def("nodes", &OmegaGrid::nodes)
      .def("spacing", &OmegaGrid::spacing);

  py::class_<TerminalCondition>(m, "TerminalCondition")
      .def(py::init<>())
      .def_readwrite("weight_a", &TerminalCondition::weight_a)
      .def_readwrite("weight_b", &TerminalCondition::weight_b)
      .def_readwrite("theta_1", &TerminalCondition::theta_1)
      .def_readwrite("theta_2", &TerminalCondition::theta_2)
      .def_readwrite("eps", &TerminalCondition::eps);

  py::class_<DensitySurface>(m, "DensitySurface")
      .def_readonly("taus", &DensitySurface::taus)
      .def_readonly("slices", &DensitySurface::slices)
      .def_readonly("renorm_factors", &DensitySurface::renorm_factors)
      .def("mass", &DensitySurface::mass, py::arg("k"))
      .def("slice_at", &DensitySurface::slice_at, py::arg("tau"))
      .def("mean_omega", &DensitySurface::mean_omega, py::arg("tau"))
      .def_property_readonly(
          "omega", [](const DensitySurface& s) { return s.grid.nodes(); });

  m.def("terminal_density", &terminal_density, py::arg("grid"), py::arg("tc"));
  m.def("solve_backward", &solve_backward, py::arg("params"), py::arg("grid"),
        py::arg("tc"), py::arg("n_tau_steps"), py::arg("store_stride") = 1);
  m.def("solve_forward", &solve_forward, py::arg("params"), py::arg("grid"),
        py::arg("init"), py::arg("n_tau_steps"), py::arg("store_stride") = 1);
  m.def("probability_current", &probability_current, py::arg("density"),
        py::arg("grid"), py::arg("params"));
  m.def("stationary_numeric", &stationary_numeric, py::arg("params"),
        py::arg("grid"));
  m.def("markov_mean_path", &markov_mean_path, py::arg("theta_0"),
        py::arg("lambda_"), py::arg("t"));

  m.def(
      "price_distribution",
      [](const DensitySurface& surface, double lambda, double theta_p,
         const FilterParams& params, double t, double tick, int max_spread_k) {
        const PriorSpec prior = PriorSpec::make(lambda, theta_p, t);
        const PriceDensity d = price_distribution(surface, prior, params, t,
                                                  tick, max_spread_k);
        return py::make_tuple(d.ticks, d.price, d.mass);
      },
      py::arg("surface"), py::arg("lambda_"), py::arg("theta_p"),
      py::arg("params"), py::arg("t"), py::arg("tick"),
      py::arg("max_spread_k"));

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("params", &SimConfig::params)
      .def_readwrite("theta_0", &SimConfig::theta_0)
      .def_readwrite("n_sessions", &SimConfig::n_sessions)
      .def_readwrite("session_length", &SimConfig::session_length)
      .def_readwrite("seed", &SimConfig::seed)
      .def_property(
          "markov_mix",
          [](const SimConfig& c) {
            return c.mix_mode == MixMode::TwoStateMarkov;
          },
          [](SimConfig& c, bool markov) {
            c.mix_mode = markov ? MixMode::TwoStateMarkov
                                : MixMode::IidBernoulli;
          });

  m.def(
      "simulate_waiting_stats",
      [](const SimConfig& config, int n_workers) {
        const auto traces = simulate(config, n_workers);
        py::list out;
        for (const auto& ls : empirical_waiting_times(traces))
          out.append(py::make_tuple(ls.level, ls.count, ls.mean_delay,
                                    ls.std_error));
        return out;
      },
      py::arg("config"), py::arg("n_workers") = 1);
  m.def("theoretical_delay", &theoretical_delay, py::arg("params"),
        py::arg("level"));
  m.def(
      "execution_coverage",
      [](const SimConfig& config, int n_workers) {
        return execution_coverage(simulate(config, n_workers));
      },
      py::arg("config"), py::arg("n_workers") = 1);

  m.def(
      "alias_filter",
      [](const std::vector<double>& edges, const std::vector<double>& mass,
         double sigma_p, double sigma_w, int days) {
        Histogram hist{edges, mass};
        const FilteredHistogram f =
            alias_filter(hist, AliasKernel{sigma_p, sigma_w, days});
        return py::make_tuple(f.hist.edges, f.hist.mass, f.clipped_mass);
      },
      py::arg("edges"), py::arg("mass"), py::arg("sigma_p") = 1.0,
      py::arg("sigma_w") = 1e9, py::arg("days") = 1);
  m.def(
      "mode_count",
      [](const std::vector<double>& edges, const std::vector<double>& mass,
         double min_prominence) {
        return mode_count(Histogram{edges, mass}, min_prominence);
      },
      py::arg("edges"), py::arg("mass"), py::arg("min_prominence") = 0.1);
  m.def(
      "loss_estimate",
      [](double std_dev, int periods, bool bimodal) {
        const LossEstimate e = loss_estimate(std_dev, periods, bimodal);
        return py::make_tuple(e.per_period, e.accrued);
      },
      py::arg("std_dev"), py::arg("periods"), py::arg("bimodal") = false);
}
