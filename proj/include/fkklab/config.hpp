#pragma once

#include <istream>
#include <string>

#include "fkklab/fkk.hpp"
#include "fkklab/pde.hpp"
#include "fkklab/price_map.hpp"
#include "fkklab/sim.hpp"
#include "fkklab/vwap.hpp"

namespace fkk {

/// Flat key=value run configuration with dotted section prefixes
/// (model.*, filter.*, terminal.*, grid.*, sim.*, price.*, kernel.*,
/// output.*).  '#' starts a comment; unknown keys are rejected.
struct RunConfig {
  ModelParams model;
  FilterParams filter;
  TerminalCondition terminal;
  SimConfig sim;
  AliasKernel kernel;

  int grid_nodes = 401;
  int grid_tau_steps = 2000;
  int grid_store_stride = 10;

  std::vector<double> price_times = {2, 3, 6, 7};

  bool pde_forward_check = false;
  bool pde_characteristic_check = false;
  bool pde_stationary_report = false;

  std::string output_dir = ".";

  /// Cross-field consistency on top of the per-module validators.
  void validate() const;
};

RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

}  // namespace fkk
