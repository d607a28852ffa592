// Low-voltage network topology and DC power-flow primitives.
#pragma once

#include <Eigen/Dense>

#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2p {

using BusId = int;

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double v) const { return lower <= v && v <= upper; }
};

struct Bus {
  BusId id = 0;
  bool is_reference = false;
  double base_generation = 0.0;  // kW over the block
  double base_load = 0.0;        // kW over the block
  Interval gen_bounds;
  Interval load_bounds;
};

/// Undirected line. Positive flow runs from `from_bus` to `to_bus`.
struct Line {
  BusId from_bus = 0;
  BusId to_bus = 0;
  double susceptance = 0.0;  // per-unit on the network power base
  double capacity = 0.0;     // kW
};

/// Maximum voltage-angle difference across any line (30 degrees).
inline constexpr double max_angle_difference = std::numbers::pi / 6.0;

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable network. Buses are kept sorted by id and every vector indexed
/// "per bus" follows that order; `index_of` maps ids to positions.
/// Parallel lines between the same pair are merged on construction
/// (susceptances and capacities summed) and reported in `warnings()`.
/// Invariant violations are not rejected here; see validate_network.
class Network {
 public:
  Network() = default;
  Network(std::vector<Bus> buses, std::vector<Line> lines, BusId reference_bus,
          double slack_limit, double power_base = 1.0);

  const std::vector<Bus>& buses() const { return buses_; }
  const std::vector<Line>& lines() const { return lines_; }
  BusId reference_bus() const { return reference_bus_; }
  double slack_limit() const { return slack_limit_; }
  double power_base() const { return power_base_; }
  /// Notes produced while building, e.g. merged parallel lines.
  const std::vector<std::string>& warnings() const { return warnings_; }

  Eigen::Index num_buses() const { return static_cast<Eigen::Index>(buses_.size()); }
  Eigen::Index num_lines() const { return static_cast<Eigen::Index>(lines_.size()); }

  bool has_bus(BusId id) const { return index_.contains(id); }
  /// Throws std::out_of_range for unknown ids.
  Eigen::Index index_of(BusId id) const;
  Eigen::Index reference_index() const { return index_of(reference_bus_); }
  const Bus& bus(BusId id) const { return buses_[static_cast<std::size_t>(index_of(id))]; }

  /// Copy with per-bus base generation and load replaced (kW, per-bus order).
  Network with_base(const Eigen::VectorXd& generation, const Eigen::VectorXd& load) const;

  /// Hop distance from the reference bus; -1 for unreachable buses.
  std::vector<int> hops_from_reference() const;

 private:
  std::vector<Bus> buses_;
  std::vector<Line> lines_;
  BusId reference_bus_ = 0;
  double slack_limit_ = 0.0;
  double power_base_ = 1.0;
  std::map<BusId, Eigen::Index> index_;
  std::vector<std::string> warnings_;
};

struct Violation {
  std::string entity;
  std::string rule;
  double amount = 0.0;  // size of the breach, when measurable

  std::string to_string() const;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_network(const Network& net);

/// theta per bus (radians), indexed like Network::buses().
struct AngleAssignment {
  Eigen::VectorXd theta;
};

/// Nodal susceptance matrix (per-unit) over all buses.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> susceptance_matrix(const Network& net) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix lap = Matrix::Zero(net.num_buses(), net.num_buses());
  for (const Line& l : net.lines()) {
    const auto i = net.index_of(l.from_bus);
    const auto j = net.index_of(l.to_bus);
    const auto b = static_cast<Scalar>(l.susceptance);
    lap(i, i) += b;
    lap(j, j) += b;
    lap(i, j) -= b;
    lap(j, i) -= b;
  }
  return lap;
}

/// Susceptance matrix with the reference row and column removed.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> reduced_susceptance(const Network& net) {
  const auto full = susceptance_matrix<Scalar>(net);
  const Eigen::Index n = full.rows();
  const Eigen::Index r = net.reference_index();
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    if (i != r) keep.push_back(i);
  return full(keep, keep);
}

/// Solves the DC power flow for net injections (kW, per bus; the reference
/// entry is ignored). Throws TopologyError if the reduced system is singular.
AngleAssignment dc_power_flow(const Network& net, const Eigen::VectorXd& injections);

/// Signed flow on each line in kW, positive from from_bus to to_bus.
Eigen::VectorXd line_flows(const Network& net, const AngleAssignment& angles);

/// Sum of (g - rho) over non-reference buses. Negative means the upstream
/// grid supplies the deficit.
double slack_power(const Network& net, const Eigen::VectorXd& generation,
                   const Eigen::VectorXd& load);

}  // namespace p2p
