#include "p2p/clearance.hpp"

#include "p2p/csv.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace p2p {

namespace {

using lp::Relation;
using Terms = std::vector<lp::Term<double>>;

std::string bus_label(BusId id) { return std::to_string(id); }

std::string line_label(const Line& l) {
  return std::to_string(l.from_bus) + "_" + std::to_string(l.to_bus);
}

// Adds coeff * theta(bus) unless the bus is the reference (theta fixed at 0).
void add_angle(Terms& terms, const AssembledProblem& ap, Eigen::Index bus_index, double coeff) {
  const Eigen::Index v = ap.angle_variable[static_cast<std::size_t>(bus_index)];
  if (v >= 0) terms.push_back({v, coeff});
}

}  // namespace

ValidationReport validate_problem(const ClearanceProblem& problem) {
  ValidationReport report;
  const Network& net = problem.network;
  for (const Trade& t : problem.trades) {
    const std::string who = "trade " + t.id;
    if (!(t.quantity > 0.0) || !std::isfinite(t.quantity))
      report.push_back({who, "quantity must be positive"});
    for (BusId b : {t.seller_bus, t.buyer_bus}) {
      if (!net.has_bus(b)) report.push_back({who, "unknown bus " + std::to_string(b)});
      else if (b == net.reference_bus())
        report.push_back({who, "reference bus cannot trade"});
    }
  }
  return report;
}

AssembledProblem assemble(const ClearanceProblem& problem) {
  if (const auto report = validate_problem(problem); !report.empty())
    throw ClearanceError(report.front().to_string());

  const Network& net = problem.network;
  const double base = net.power_base();
  const Eigen::Index n = net.num_buses();
  const Eigen::Index ref = net.reference_index();

  AssembledProblem ap;
  auto& prog = ap.program;

  double total_q = 0.0;
  ap.first_execution = prog.num_variables();
  for (const Trade& t : problem.trades) {
    prog.add_variable(0.0, 1.0, t.quantity, "x_" + t.id);
    total_q += t.quantity;
  }

  // Angles are implied to lie within hops * pi/6 of the reference.
  const auto hops = net.hops_from_reference();
  ap.angle_variable.assign(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == ref) continue;
    const double span = max_angle_difference * std::max(1, hops[static_cast<std::size_t>(i)]);
    ap.angle_variable[static_cast<std::size_t>(i)] =
        prog.add_variable(-span, span, 0.0, "theta_" + bus_label(net.buses()[static_cast<std::size_t>(i)].id));
  }

  double base_net = 0.0;  // sum of (g0 - rho0) over non-reference buses
  for (Eigen::Index i = 0; i < n; ++i)
    if (i != ref) {
      const Bus& b = net.buses()[static_cast<std::size_t>(i)];
      base_net += b.base_generation - b.base_load;
    }
  const double slack_span = std::abs(base_net) + total_q + net.slack_limit();
  ap.slack_variable = prog.add_variable(-slack_span, slack_span, 0.0, "p_ref");

  // Trade terms per bus.
  std::vector<Terms> sold(static_cast<std::size_t>(n)), bought(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < problem.trades.size(); ++k) {
    const Trade& t = problem.trades[k];
    const Eigen::Index x = ap.first_execution + static_cast<Eigen::Index>(k);
    sold[static_cast<std::size_t>(net.index_of(t.seller_bus))].push_back({x, t.quantity});
    bought[static_cast<std::size_t>(net.index_of(t.buyer_bus))].push_back({x, t.quantity});
  }

  // Generation and load bounds. Trades only add to the base values, so a
  // lower bound cannot be crossed and an upper bound only matters when the
  // full trade volume could exceed it.
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == ref) continue;
    const auto u = static_cast<std::size_t>(i);
    const Bus& b = net.buses()[u];
    double reach = 0.0;
    for (const auto& term : sold[u]) reach += term.coeff;
    if (b.base_generation + reach > b.gen_bounds.upper)
      prog.add_row(sold[u], Relation::less_equal, b.gen_bounds.upper - b.base_generation,
                   "gen_max_" + bus_label(b.id));
    reach = 0.0;
    for (const auto& term : bought[u]) reach += term.coeff;
    if (b.base_load + reach > b.load_bounds.upper)
      prog.add_row(bought[u], Relation::less_equal, b.load_bounds.upper - b.base_load,
                   "load_max_" + bus_label(b.id));
  }

  // Nodal balance: g_i - rho_i = sum_j base * B_ij (theta_i - theta_j).
  std::vector<Terms> flow_terms(static_cast<std::size_t>(n));
  for (const Line& l : net.lines()) {
    const Eigen::Index i = net.index_of(l.from_bus);
    const Eigen::Index j = net.index_of(l.to_bus);
    const double w = base * l.susceptance;
    add_angle(flow_terms[static_cast<std::size_t>(i)], ap, i, -w);
    add_angle(flow_terms[static_cast<std::size_t>(i)], ap, j, w);
    add_angle(flow_terms[static_cast<std::size_t>(j)], ap, j, -w);
    add_angle(flow_terms[static_cast<std::size_t>(j)], ap, i, w);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == ref) continue;
    const auto u = static_cast<std::size_t>(i);
    const Bus& b = net.buses()[u];
    Terms terms = sold[u];
    for (const auto& term : bought[u]) terms.push_back({term.var, -term.coeff});
    terms.insert(terms.end(), flow_terms[u].begin(), flow_terms[u].end());
    prog.add_row(std::move(terms), Relation::equal, b.base_load - b.base_generation,
                 "balance_" + bus_label(b.id));
  }

  // Line capacity and angle difference, both as symmetric pairs.
  for (const Line& l : net.lines()) {
    const Eigen::Index i = net.index_of(l.from_bus);
    const Eigen::Index j = net.index_of(l.to_bus);
    const double w = base * l.susceptance;
    for (double sign : {1.0, -1.0}) {
      const char* dir = sign > 0 ? "_fwd" : "_rev";
      Terms flow;
      add_angle(flow, ap, i, sign * w);
      add_angle(flow, ap, j, -sign * w);
      prog.add_row(std::move(flow), Relation::less_equal, l.capacity, "cap_" + line_label(l) + dir);
    }
    for (double sign : {1.0, -1.0}) {
      const char* dir = sign > 0 ? "_fwd" : "_rev";
      Terms diff;
      add_angle(diff, ap, i, sign);
      add_angle(diff, ap, j, -sign);
      prog.add_row(std::move(diff), Relation::less_equal, max_angle_difference,
                   "angle_" + line_label(l) + dir);
    }
  }

  // Slack identity: p_ref = sum over non-reference buses of (g_i - rho_i).
  std::map<Eigen::Index, double> trade_net;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == ref) continue;
    for (const auto& term : sold[static_cast<std::size_t>(i)]) trade_net[term.var] -= term.coeff;
    for (const auto& term : bought[static_cast<std::size_t>(i)]) trade_net[term.var] += term.coeff;
  }
  Terms slack_terms{{ap.slack_variable, 1.0}};
  for (const auto& [var, coeff] : trade_net)
    if (coeff != 0.0) slack_terms.push_back({var, coeff});
  prog.add_row(std::move(slack_terms), Relation::equal, base_net, "slack_identity");
  prog.add_row({{ap.slack_variable, 1.0}}, Relation::less_equal, net.slack_limit(), "slack_max");
  prog.add_row({{ap.slack_variable, 1.0}}, Relation::greater_equal, -net.slack_limit(), "slack_min");
  return ap;
}

void adjusted_power(const ClearanceProblem& problem, const Eigen::VectorXd& execution,
                    Eigen::VectorXd& generation, Eigen::VectorXd& load) {
  const Network& net = problem.network;
  generation.resize(net.num_buses());
  load.resize(net.num_buses());
  for (Eigen::Index i = 0; i < net.num_buses(); ++i) {
    generation(i) = net.buses()[static_cast<std::size_t>(i)].base_generation;
    load(i) = net.buses()[static_cast<std::size_t>(i)].base_load;
  }
  for (std::size_t k = 0; k < problem.trades.size(); ++k) {
    const Trade& t = problem.trades[k];
    const double e = execution(static_cast<Eigen::Index>(k)) * t.quantity;
    generation(net.index_of(t.seller_bus)) += e;
    load(net.index_of(t.buyer_bus)) += e;
  }
}

namespace {

// Solution for fixed execution fractions, angles from the DC power flow.
ClearanceSolution evaluate_fixed(const ClearanceProblem& problem, const Eigen::VectorXd& execution) {
  const Network& net = problem.network;
  ClearanceSolution sol;
  sol.execution = execution;
  adjusted_power(problem, execution, sol.adjusted_generation, sol.adjusted_load);
  sol.angles = dc_power_flow(net, sol.adjusted_generation - sol.adjusted_load);
  sol.flows = line_flows(net, sol.angles);
  sol.slack = slack_power(net, sol.adjusted_generation, sol.adjusted_load);
  for (std::size_t k = 0; k < problem.trades.size(); ++k)
    sol.executed_volume += execution(static_cast<Eigen::Index>(k)) * problem.trades[k].quantity;
  return sol;
}

}  // namespace

ClearanceSolution clear(const ClearanceProblem& problem, const lp::SolverOptions& options) {
  const AssembledProblem ap = assemble(problem);
  const auto lp_sol = lp::solve(ap.program, options);
  const Network& net = problem.network;
  const auto n_trades = static_cast<Eigen::Index>(problem.trades.size());

  if (lp_sol.status == lp::Status::infeasible) {
    // Report what the untraded base case violates.
    ClearanceSolution base = evaluate_fixed(problem, Eigen::VectorXd::Zero(n_trades));
    base.status = ClearanceStatus::optimal;
    ValidationReport report = verify(problem, base);
    if (report.empty()) report.push_back({"clearance", "no feasible execution found"});
    base.status = ClearanceStatus::infeasible;
    base.report = std::move(report);
    return base;
  }
  if (lp_sol.status == lp::Status::unbounded)
    throw std::logic_error("clearance LP reported unbounded; all variables are boxed");

  ClearanceSolution sol;
  sol.status = ClearanceStatus::optimal;
  sol.lp_objective = lp_sol.objective_value;
  sol.execution = lp_sol.values.segment(ap.first_execution, n_trades);
  sol.angles.theta = Eigen::VectorXd::Zero(net.num_buses());
  for (Eigen::Index i = 0; i < net.num_buses(); ++i) {
    const Eigen::Index v = ap.angle_variable[static_cast<std::size_t>(i)];
    if (v >= 0) sol.angles.theta(i) = lp_sol.values(v);
  }
  sol.slack = lp_sol.values(ap.slack_variable);
  adjusted_power(problem, sol.execution, sol.adjusted_generation, sol.adjusted_load);
  sol.flows = line_flows(net, sol.angles);
  for (Eigen::Index k = 0; k < n_trades; ++k)
    sol.executed_volume += sol.execution(k) * problem.trades[static_cast<std::size_t>(k)].quantity;
  sol.report = verify(problem, sol);
  return sol;
}

ValidationReport verify(const ClearanceProblem& problem, const ClearanceSolution& sol,
                        double tol) {
  ValidationReport report;
  const Network& net = problem.network;
  const Eigen::Index n = net.num_buses();
  const Eigen::Index ref = net.reference_index();
  const auto n_trades = static_cast<Eigen::Index>(problem.trades.size());

  if (sol.execution.size() != n_trades || sol.angles.theta.size() != n) {
    report.push_back({"solution", "dimension mismatch with problem"});
    return report;
  }

  for (Eigen::Index k = 0; k < n_trades; ++k) {
    const double x = sol.execution(k);
    if (x < -tol || x > 1.0 + tol)
      report.push_back({"trade " + problem.trades[static_cast<std::size_t>(k)].id,
                        "execution fraction outside [0, 1]", x < 0 ? -x : x - 1.0});
  }

  Eigen::VectorXd g, rho;
  adjusted_power(problem, sol.execution, g, rho);
  if (sol.adjusted_generation.size() == n && sol.adjusted_load.size() == n) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::string who = "bus " + bus_label(net.buses()[static_cast<std::size_t>(i)].id);
      if (std::abs(sol.adjusted_generation(i) - g(i)) > tol)
        report.push_back({who, "adjusted generation inconsistent with executed trades",
                          std::abs(sol.adjusted_generation(i) - g(i))});
      if (std::abs(sol.adjusted_load(i) - rho(i)) > tol)
        report.push_back({who, "adjusted load inconsistent with executed trades",
                          std::abs(sol.adjusted_load(i) - rho(i))});
    }
  }

  std::vector<double> flow_sum(static_cast<std::size_t>(n), 0.0);
  for (const Line& l : net.lines()) {
    const Eigen::Index i = net.index_of(l.from_bus);
    const Eigen::Index j = net.index_of(l.to_bus);
    const double dtheta = sol.angles.theta(i) - sol.angles.theta(j);
    const double flow = net.power_base() * l.susceptance * dtheta;
    flow_sum[static_cast<std::size_t>(i)] += flow;
    flow_sum[static_cast<std::size_t>(j)] -= flow;
    const std::string who = "line " + std::to_string(l.from_bus) + "-" + std::to_string(l.to_bus);
    if (std::abs(flow) > l.capacity + tol)
      report.push_back({who, "line flow exceeds capacity", std::abs(flow) - l.capacity});
    if (std::abs(dtheta) > max_angle_difference + tol)
      report.push_back({who, "angle difference exceeds pi/6", std::abs(dtheta) - max_angle_difference});
  }

  double net_injection = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == ref) continue;
    const Bus& b = net.buses()[static_cast<std::size_t>(i)];
    const std::string who = "bus " + bus_label(b.id);
    if (g(i) < b.gen_bounds.lower - tol || g(i) > b.gen_bounds.upper + tol)
      report.push_back({who, "generation outside bounds",
                        std::max(b.gen_bounds.lower - g(i), g(i) - b.gen_bounds.upper)});
    if (rho(i) < b.load_bounds.lower - tol || rho(i) > b.load_bounds.upper + tol)
      report.push_back({who, "load outside bounds",
                        std::max(b.load_bounds.lower - rho(i), rho(i) - b.load_bounds.upper)});
    const double residual = g(i) - rho(i) - flow_sum[static_cast<std::size_t>(i)];
    if (std::abs(residual) > tol) report.push_back({who, "nodal power balance violated", std::abs(residual)});
    net_injection += g(i) - rho(i);
  }

  if (std::abs(sol.angles.theta(ref)) > tol)
    report.push_back({"reference bus", "reference angle not zero", std::abs(sol.angles.theta(ref))});
  if (std::abs(sol.slack - net_injection) > tol)
    report.push_back({"slack", "slack does not equal net non-reference injection",
                      std::abs(sol.slack - net_injection)});
  if (std::abs(sol.slack) > net.slack_limit() + tol)
    report.push_back({"slack", "slack limit exceeded", std::abs(sol.slack) - net.slack_limit()});
  return report;
}

void write_solution(const std::filesystem::path& dir, const std::string& prefix,
                    const ClearanceProblem& problem, const ClearanceSolution& sol) {
  std::filesystem::create_directories(dir);
  const Network& net = problem.network;
  {
    std::ofstream os(dir / (prefix + "trades.csv"));
    os << "trade_id,x,executed_kwh\n";
    for (std::size_t k = 0; k < problem.trades.size(); ++k) {
      const double x = sol.execution(static_cast<Eigen::Index>(k));
      os << problem.trades[k].id << ',' << format_number(x) << ','
         << format_number(x * problem.trades[k].quantity) << '\n';
    }
  }
  {
    std::ofstream os(dir / (prefix + "buses.csv"));
    os << "bus_id,theta_rad,g_kw,rho_kw\n";
    for (Eigen::Index i = 0; i < net.num_buses(); ++i)
      os << net.buses()[static_cast<std::size_t>(i)].id << ',' << format_number(sol.angles.theta(i)) << ','
         << format_number(sol.adjusted_generation(i)) << ',' << format_number(sol.adjusted_load(i)) << '\n';
  }
  {
    std::ofstream os(dir / (prefix + "summary.csv"));
    os << "status,slack_kw,executed_kwh\n"
       << (sol.status == ClearanceStatus::optimal ? "optimal" : "infeasible") << ','
       << format_number(sol.slack) << ',' << format_number(sol.executed_volume) << '\n';
  }
}

}  // namespace p2p
