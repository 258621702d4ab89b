#include "fkklab/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fkk {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": bad number '" + v +
                                "'");
  }
  if (pos != v.size())
    throw std::invalid_argument("config key " + key + ": bad number '" + v +
                                "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x)
    throw std::invalid_argument("config key " + key + ": expected integer");
  return i;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config key " + key + ": expected bool");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  if (out.empty())
    throw std::invalid_argument("config key " + key + ": empty list");
  return out;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  filter.validate();
  terminal.validate();
  sim.validate();
  kernel.validate();
  if (grid_nodes < 16)
    throw std::invalid_argument("grid.nodes must be >= 16");
  if (grid_tau_steps < 1)
    throw std::invalid_argument("grid.tau_steps must be >= 1");
  if (grid_store_stride < 1)
    throw std::invalid_argument("grid.store_stride must be >= 1");
  for (double t : price_times)
    if (t < 0.0)
      throw std::invalid_argument("price.times entries must be >= 0");
  if (output_dir.empty())
    throw std::invalid_argument("output.dir must be nonempty");
}

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");

    if (key == "model.lambda") cfg.model.lambda = to_double(key, val);
    else if (key == "model.theta_p") cfg.model.theta_p = to_double(key, val);
    else if (key == "model.delta_p") cfg.model.delta_p = to_double(key, val);
    else if (key == "model.delta_i") cfg.model.delta_i = to_double(key, val);
    else if (key == "model.tick") cfg.model.tick = to_double(key, val);
    else if (key == "model.ask_a") cfg.model.ask_a = to_double(key, val);
    else if (key == "model.bid_b") cfg.model.bid_b = to_double(key, val);
    else if (key == "model.max_spread_k") cfg.model.max_spread_k = to_int(key, val);
    else if (key == "filter.lambda") cfg.filter.lambda = to_double(key, val);
    else if (key == "filter.sigma") cfg.filter.sigma = to_double(key, val);
    else if (key == "filter.mu") cfg.filter.mu = to_double(key, val);
    else if (key == "filter.horizon_t") cfg.filter.horizon_t = to_double(key, val);
    else if (key == "terminal.weight_a") cfg.terminal.weight_a = to_double(key, val);
    else if (key == "terminal.weight_b") cfg.terminal.weight_b = to_double(key, val);
    else if (key == "terminal.theta_1") cfg.terminal.theta_1 = to_double(key, val);
    else if (key == "terminal.theta_2") cfg.terminal.theta_2 = to_double(key, val);
    else if (key == "terminal.eps") cfg.terminal.eps = to_double(key, val);
    else if (key == "grid.nodes") cfg.grid_nodes = to_int(key, val);
    else if (key == "grid.tau_steps") cfg.grid_tau_steps = to_int(key, val);
    else if (key == "grid.store_stride") cfg.grid_store_stride = to_int(key, val);
    else if (key == "sim.mix_mode") {
      if (val == "iid") cfg.sim.mix_mode = MixMode::IidBernoulli;
      else if (val == "markov") cfg.sim.mix_mode = MixMode::TwoStateMarkov;
      else throw std::invalid_argument("sim.mix_mode must be iid or markov");
    }
    else if (key == "sim.theta_0") cfg.sim.theta_0 = to_double(key, val);
    else if (key == "sim.n_sessions") cfg.sim.n_sessions = to_int(key, val);
    else if (key == "sim.session_length") cfg.sim.session_length = to_int(key, val);
    else if (key == "sim.seed") cfg.sim.seed = static_cast<std::uint64_t>(to_double(key, val));
    else if (key == "price.times") cfg.price_times = to_list(key, val);
    else if (key == "kernel.sigma_p") cfg.kernel.sigma_p = to_double(key, val);
    else if (key == "kernel.sigma_w") cfg.kernel.sigma_w = to_double(key, val);
    else if (key == "kernel.days") cfg.kernel.days = to_int(key, val);
    else if (key == "pde.forward_check") cfg.pde_forward_check = to_bool(key, val);
    else if (key == "pde.characteristic_check") cfg.pde_characteristic_check = to_bool(key, val);
    else if (key == "pde.stationary_report") cfg.pde_stationary_report = to_bool(key, val);
    else if (key == "output.dir") cfg.output_dir = val;
    else throw std::invalid_argument("unknown config key: " + key);
  }
  cfg.sim.params = cfg.model;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file: " + path);
  return parse_config(f);
}

}  // namespace fkk
