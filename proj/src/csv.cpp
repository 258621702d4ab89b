#include "fkklab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fkk::csv {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

void expect_header(std::istream& is, const std::string& want) {
  std::string line;
  if (!next_line(is, line) || line != want)
    throw std::runtime_error("expected header '" + want + "', got '" + line +
                             "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_surface(std::ostream& os, const DensitySurface& surface) {
  os << "omega,tau,density\n";
  const int n = surface.grid.n_nodes;
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < surface.taus.size(); ++k)
      os << format_double(surface.grid.node(i)) << ','
         << format_double(surface.taus[k]) << ','
         << format_double(surface.slices[k][static_cast<std::size_t>(i)])
         << '\n';
}

DensitySurface read_surface(std::istream& is) {
  expect_header(is, "omega,tau,density");
  std::vector<double> taus;
  std::vector<std::vector<double>> columns;  // per omega node, over tau
  std::string line;
  while (next_line(is, line)) {
    const auto f = split_fields(line);
    if (f.size() != 3) throw std::runtime_error("surface row needs 3 fields");
    const double tau = parse_double(f[1]);
    const double dens = parse_double(f[2]);
    const bool first_block = columns.size() <= 1 &&
                             (columns.empty() || columns[0].size() == taus.size());
    if (columns.empty() ||
        (first_block && !taus.empty() && tau <= taus.back()) ||
        (!first_block && columns.back().size() == taus.size()))
      columns.emplace_back();
    if (columns.size() == 1) taus.push_back(tau);
    columns.back().push_back(dens);
  }
  if (columns.size() < 16 || taus.empty())
    throw std::runtime_error("surface file too small");
  for (const auto& col : columns)
    if (col.size() != taus.size())
      throw std::runtime_error("ragged surface file");

  DensitySurface s{OmegaGrid(static_cast<int>(columns.size())), taus, {}, {},
                   {}};
  s.slices.assign(taus.size(), std::vector<double>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i)
    for (std::size_t k = 0; k < taus.size(); ++k) s.slices[k][i] = columns[i][k];
  return s;
}

void write_price_density(std::ostream& os, const PriceDensity& density,
                         const PriceMeta& meta) {
  os << "# lambda=" << format_double(meta.lambda)
     << " sigma=" << format_double(meta.sigma)
     << " mu=" << format_double(meta.mu)
     << " theta=" << format_double(meta.theta)
     << " horizon_t=" << format_double(meta.horizon_t) << '\n';
  os << "# t=" << format_double(meta.t)
     << " tick=" << format_double(meta.tick)
     << " truncated_mass=" << format_double(density.truncated_mass)
     << " clamped_mass=" << format_double(density.clamped_mass) << '\n';
  os << "price_ticks,price_dollars,density\n";
  for (std::size_t i = 0; i < density.ticks.size(); ++i)
    os << density.ticks[i] << ',' << format_double(density.price[i]) << ','
       << format_double(density.mass[i]) << '\n';
}

PriceDensity read_price_density(std::istream& is, PriceMeta* meta) {
  PriceDensity d;
  std::map<std::string, double> kv;
  std::string line;
  while (next_line(is, line)) {
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos)
          kv[tok.substr(0, eq)] = parse_double(tok.substr(eq + 1));
      }
      continue;
    }
    if (line != "price_ticks,price_dollars,density")
      throw std::runtime_error("bad price density header: " + line);
    break;
  }
  while (next_line(is, line)) {
    const auto f = split_fields(line);
    if (f.size() != 3) throw std::runtime_error("price row needs 3 fields");
    d.ticks.push_back(static_cast<int>(parse_double(f[0])));
    d.price.push_back(parse_double(f[1]));
    d.mass.push_back(parse_double(f[2]));
  }
  if (d.ticks.empty()) throw std::runtime_error("empty price density file");
  auto get = [&](const char* k, double fallback) {
    auto it = kv.find(k);
    return it == kv.end() ? fallback : it->second;
  };
  d.t = get("t", 0.0);
  d.tick_size = get("tick", 0.01);
  d.truncated_mass = get("truncated_mass", 0.0);
  d.clamped_mass = get("clamped_mass", 0.0);
  if (meta) {
    meta->lambda = get("lambda", 0.0);
    meta->sigma = get("sigma", 0.0);
    meta->mu = get("mu", 0.0);
    meta->theta = get("theta", 0.0);
    meta->horizon_t = get("horizon_t", 0.0);
    meta->t = d.t;
    meta->tick = d.tick_size;
  }
  return d;
}

void write_histogram(std::ostream& os, const Histogram& hist) {
  os << "bin_lo,bin_hi,mass\n";
  for (std::size_t i = 0; i < hist.mass.size(); ++i)
    os << format_double(hist.edges[i]) << ','
       << format_double(hist.edges[i + 1]) << ','
       << format_double(hist.mass[i]) << '\n';
}

Histogram read_histogram(std::istream& is) {
  expect_header(is, "bin_lo,bin_hi,mass");
  Histogram hist;
  std::string line;
  while (next_line(is, line)) {
    const auto f = split_fields(line);
    if (f.size() != 3) throw std::runtime_error("histogram row needs 3 fields");
    const double lo = parse_double(f[0]);
    if (hist.edges.empty())
      hist.edges.push_back(lo);
    else if (hist.edges.back() != lo)
      throw std::runtime_error("histogram bins must be contiguous");
    hist.edges.push_back(parse_double(f[1]));
    hist.mass.push_back(parse_double(f[2]));
  }
  hist.validate();
  return hist;
}

namespace {

const char* trader_name(TraderType t) {
  return t == TraderType::Patient ? "patient" : "impatient";
}
const char* order_name(OrderType o) {
  return o == OrderType::Limit ? "limit" : "market";
}
const char* side_name(Side s) { return s == Side::Sell ? "sell" : "buy"; }

}  // namespace

void write_traces(std::ostream& os, const std::vector<SessionTrace>& traces) {
  os << "session,event_index,time,trader_type,order_type,side,spread_ticks,"
        "price,exec_time\n";
  for (const auto& trace : traces)
    for (const auto& ev : trace.events) {
      os << trace.session_id << ',' << ev.index << ','
         << format_double(ev.time) << ',' << trader_name(ev.trader) << ','
         << order_name(ev.order) << ',' << side_name(ev.side) << ','
         << ev.spread_ticks << ',' << format_double(ev.price) << ',';
      if (ev.exec_time) os << format_double(*ev.exec_time);
      os << '\n';
    }
}

std::vector<SessionTrace> read_traces(std::istream& is) {
  expect_header(is,
                "session,event_index,time,trader_type,order_type,side,"
                "spread_ticks,price,exec_time");
  std::vector<SessionTrace> traces;
  std::string line;
  while (next_line(is, line)) {
    const auto f = split_fields(line);
    if (f.size() != 9) throw std::runtime_error("trace row needs 9 fields");
    const int session = static_cast<int>(parse_double(f[0]));
    if (traces.empty() || traces.back().session_id != session) {
      traces.emplace_back();
      traces.back().session_id = session;
    }
    Event ev;
    ev.index = static_cast<int>(parse_double(f[1]));
    ev.time = parse_double(f[2]);
    if (f[3] == "patient")
      ev.trader = TraderType::Patient;
    else if (f[3] == "impatient")
      ev.trader = TraderType::Impatient;
    else
      throw std::runtime_error("bad trader type: " + f[3]);
    if (f[4] == "limit")
      ev.order = OrderType::Limit;
    else if (f[4] == "market")
      ev.order = OrderType::Market;
    else
      throw std::runtime_error("bad order type: " + f[4]);
    if (f[5] == "sell")
      ev.side = Side::Sell;
    else if (f[5] == "buy")
      ev.side = Side::Buy;
    else
      throw std::runtime_error("bad side: " + f[5]);
    ev.spread_ticks = static_cast<int>(parse_double(f[6]));
    ev.price = parse_double(f[7]);
    if (!f[8].empty()) ev.exec_time = parse_double(f[8]);
    traces.back().events.push_back(ev);
  }
  return traces;
}

}  // namespace fkk::csv
