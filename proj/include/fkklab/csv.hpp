#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fkklab/histogram.hpp"
#include "fkklab/pde.hpp"
#include "fkklab/price_map.hpp"
#include "fkklab/sim.hpp"

namespace fkk::csv {

/// Density surface: header "omega,tau,density", omega-major row order.
void write_surface(std::ostream& os, const DensitySurface& surface);
DensitySurface read_surface(std::istream& is);

/// Price density: '#'-prefixed metadata lines, then
/// "price_ticks,price_dollars,density".
struct PriceMeta {
  double lambda = 0, sigma = 0, mu = 0, theta = 0, horizon_t = 0, t = 0,
         tick = 0;
};
void write_price_density(std::ostream& os, const PriceDensity& density,
                         const PriceMeta& meta);
PriceDensity read_price_density(std::istream& is, PriceMeta* meta = nullptr);

/// Histogram: "bin_lo,bin_hi,mass".
void write_histogram(std::ostream& os, const Histogram& hist);
Histogram read_histogram(std::istream& is);

/// Session traces: one row per event, exec_time empty when unexecuted.
void write_traces(std::ostream& os, const std::vector<SessionTrace>& traces);
std::vector<SessionTrace> read_traces(std::istream& is);

std::string format_double(double v);

}  // namespace fkk::csv
