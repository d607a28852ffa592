// Network-constrained clearance of proposed P2P trades.
//
// Each trade t carries an execution fraction x_t in [0, 1]. Executing it adds
// x_t q_t to the seller's generation and to the buyer's load; the LP chooses
// fractions that maximize executed volume sum(x_t q_t) while the resulting
// DC power flow respects line capacities, the 30 degree angle-difference
// limit, per-bus generation/load bounds and the slack-bus limit.
#pragma once

#include "p2p/lp.hpp"
#include "p2p/network.hpp"
#include "p2p/orderbook.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2p {

struct ClearanceProblem {
  Network network;
  std::vector<Trade> trades;
};

/// Malformed problem (unknown bus, reference bus trading, bad quantity).
class ClearanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ValidationReport validate_problem(const ClearanceProblem& problem);

/// The LP plus where each decision variable lives in it.
struct AssembledProblem {
  lp::LinearProgram<double> program;
  Eigen::Index first_execution = 0;         // x_t, one per trade, in trade order
  std::vector<Eigen::Index> angle_variable;  // per bus; -1 for the reference bus
  Eigen::Index slack_variable = -1;
};

/// Rows are expressed in kW (flows as power_base * B * dtheta). Throws
/// ClearanceError naming the trade when validation fails.
AssembledProblem assemble(const ClearanceProblem& problem);

enum class ClearanceStatus { optimal, infeasible };

struct ClearanceSolution {
  ClearanceStatus status = ClearanceStatus::infeasible;
  Eigen::VectorXd execution;            // x_t per trade
  AngleAssignment angles;               // per bus
  double slack = 0.0;                   // kW, sum of (g - rho) over non-reference buses
  Eigen::VectorXd adjusted_generation;  // g_i per bus, kW
  Eigen::VectorXd adjusted_load;        // rho_i per bus, kW
  Eigen::VectorXd flows;                // per line, kW
  double executed_volume = 0.0;         // kWh
  double lp_objective = 0.0;
  ValidationReport report;  // optimal: independent audit (empty); infeasible: base-case violations
};

ClearanceSolution clear(const ClearanceProblem& problem, const lp::SolverOptions& options = {});

/// Re-checks every clearance constraint on `sol` from the problem data alone.
ValidationReport verify(const ClearanceProblem& problem, const ClearanceSolution& sol,
                        double tolerance = 1e-6);

/// Executed generation and load per bus for the given execution fractions.
void adjusted_power(const ClearanceProblem& problem, const Eigen::VectorXd& execution,
                    Eigen::VectorXd& generation, Eigen::VectorXd& load);

/// Writes <prefix>trades.csv, <prefix>buses.csv and <prefix>summary.csv into `dir`.
void write_solution(const std::filesystem::path& dir, const std::string& prefix,
                    const ClearanceProblem& problem, const ClearanceSolution& sol);

}  // namespace p2p
