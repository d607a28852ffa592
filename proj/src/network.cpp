#include "p2p/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <utility>

namespace p2p {

namespace {

std::string bus_name(BusId id) { return "bus " + std::to_string(id); }

std::string line_name(const Line& l) {
  return "line " + std::to_string(l.from_bus) + "-" + std::to_string(l.to_bus);
}

bool finite_interval(const Interval& iv) {
  return std::isfinite(iv.lower) && std::isfinite(iv.upper) && iv.lower <= iv.upper;
}

}  // namespace

std::string Violation::to_string() const {
  std::string out = entity + ": " + rule;
  if (amount != 0.0) out += " (by " + std::to_string(amount) + ")";
  return out;
}

Network::Network(std::vector<Bus> buses, std::vector<Line> lines, BusId reference_bus,
                 double slack_limit, double power_base)
    : buses_(std::move(buses)),
      reference_bus_(reference_bus),
      slack_limit_(slack_limit),
      power_base_(power_base) {
  std::stable_sort(buses_.begin(), buses_.end(),
                   [](const Bus& a, const Bus& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < buses_.size(); ++i)
    index_.try_emplace(buses_[i].id, static_cast<Eigen::Index>(i));

  // Merge parallel lines, keeping the orientation of the first occurrence.
  std::map<std::pair<BusId, BusId>, std::size_t> seen;
  for (const Line& l : lines) {
    const auto key = std::minmax(l.from_bus, l.to_bus);
    auto [it, inserted] = seen.try_emplace(key, lines_.size());
    if (inserted) {
      lines_.push_back(l);
      continue;
    }
    Line& kept = lines_[it->second];
    kept.susceptance += l.susceptance;
    kept.capacity += l.capacity;
    warnings_.push_back("merged parallel " + line_name(l) + " into " + line_name(kept));
  }
}

Eigen::Index Network::index_of(BusId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown " + bus_name(id));
  return it->second;
}

Network Network::with_base(const Eigen::VectorXd& generation, const Eigen::VectorXd& load) const {
  Network out = *this;
  for (std::size_t i = 0; i < out.buses_.size(); ++i) {
    out.buses_[i].base_generation = generation(static_cast<Eigen::Index>(i));
    out.buses_[i].base_load = load(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::vector<int> Network::hops_from_reference() const {
  std::vector<int> hops(buses_.size(), -1);
  if (!has_bus(reference_bus_)) return hops;
  std::vector<std::vector<std::size_t>> adj(buses_.size());
  for (const Line& l : lines_) {
    if (!has_bus(l.from_bus) || !has_bus(l.to_bus)) continue;
    const auto i = static_cast<std::size_t>(index_of(l.from_bus));
    const auto j = static_cast<std::size_t>(index_of(l.to_bus));
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::queue<std::size_t> frontier;
  const auto r = static_cast<std::size_t>(reference_index());
  hops[r] = 0;
  frontier.push(r);
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (auto v : adj[u]) {
      if (hops[v] >= 0) continue;
      hops[v] = hops[u] + 1;
      frontier.push(v);
    }
  }
  return hops;
}

ValidationReport validate_network(const Network& net) {
  ValidationReport report;
  const auto& buses = net.buses();

  if (buses.empty()) report.push_back({"network", "no buses"});
  if (!(net.slack_limit() > 0.0) || !std::isfinite(net.slack_limit()))
    report.push_back({"network", "slack limit must be positive and finite"});
  if (!(net.power_base() > 0.0) || !std::isfinite(net.power_base()))
    report.push_back({"network", "power base must be positive and finite"});

  for (std::size_t i = 1; i < buses.size(); ++i)
    if (buses[i].id == buses[i - 1].id) report.push_back({bus_name(buses[i].id), "duplicate bus id"});

  const auto n_ref = std::count_if(buses.begin(), buses.end(),
                                   [](const Bus& b) { return b.is_reference; });
  if (n_ref == 0) report.push_back({"network", "no reference bus"});
  if (n_ref > 1) report.push_back({"network", "multiple reference buses"});
  if (!net.has_bus(net.reference_bus()))
    report.push_back({bus_name(net.reference_bus()), "reference bus id not found"});
  else if (!net.bus(net.reference_bus()).is_reference)
    report.push_back({bus_name(net.reference_bus()), "reference bus id not flagged as reference"});

  for (const Bus& b : buses) {
    if (!finite_interval(b.gen_bounds))
      report.push_back({bus_name(b.id), "generation bounds must be finite with lower <= upper"});
    else if (!b.gen_bounds.contains(b.base_generation))
      report.push_back({bus_name(b.id), "base generation outside generation bounds"});
    if (!finite_interval(b.load_bounds))
      report.push_back({bus_name(b.id), "load bounds must be finite with lower <= upper"});
    else if (!b.load_bounds.contains(b.base_load))
      report.push_back({bus_name(b.id), "base load outside load bounds"});
  }

  bool endpoints_ok = true;
  for (const Line& l : net.lines()) {
    if (l.from_bus == l.to_bus) report.push_back({line_name(l), "line connects a bus to itself"});
    if (!net.has_bus(l.from_bus) || !net.has_bus(l.to_bus)) {
      report.push_back({line_name(l), "line references unknown bus"});
      endpoints_ok = false;
    }
    if (!(l.susceptance > 0.0) || !std::isfinite(l.susceptance))
      report.push_back({line_name(l), "susceptance must be positive"});
    if (!(l.capacity > 0.0) || !std::isfinite(l.capacity))
      report.push_back({line_name(l), "capacity must be positive"});
  }

  if (!buses.empty() && endpoints_ok && net.has_bus(net.reference_bus())) {
    const auto hops = net.hops_from_reference();
    if (std::any_of(hops.begin(), hops.end(), [](int h) { return h < 0; }))
      report.push_back({"network", "graph not connected"});
  }
  return report;
}

AngleAssignment dc_power_flow(const Network& net, const Eigen::VectorXd& injections) {
  const Eigen::Index n = net.num_buses();
  if (injections.size() != n) throw std::invalid_argument("dc_power_flow: injection size mismatch");
  const Eigen::Index r = net.reference_index();

  Eigen::VectorXd rhs(n - 1);
  for (Eigen::Index i = 0, k = 0; i < n; ++i)
    if (i != r) rhs(k++) = injections(i) / net.power_base();

  AngleAssignment out{Eigen::VectorXd::Zero(n)};
  if (n == 1) return out;

  const Eigen::LLT<Eigen::MatrixXd> llt(reduced_susceptance(net));
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-13)
    throw TopologyError("dc_power_flow: reduced susceptance matrix is singular");
  const Eigen::VectorXd reduced = llt.solve(rhs);
  for (Eigen::Index i = 0, k = 0; i < n; ++i)
    if (i != r) out.theta(i) = reduced(k++);
  return out;
}

Eigen::VectorXd line_flows(const Network& net, const AngleAssignment& angles) {
  Eigen::VectorXd flows(net.num_lines());
  for (Eigen::Index k = 0; k < net.num_lines(); ++k) {
    const Line& l = net.lines()[static_cast<std::size_t>(k)];
    const double dtheta = angles.theta(net.index_of(l.from_bus)) - angles.theta(net.index_of(l.to_bus));
    flows(k) = net.power_base() * l.susceptance * dtheta;
  }
  return flows;
}

double slack_power(const Network& net, const Eigen::VectorXd& generation,
                   const Eigen::VectorXd& load) {
  const Eigen::Index r = net.reference_index();
  return (generation - load).sum() - (generation(r) - load(r));
}

}  // namespace p2p
