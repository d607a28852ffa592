// Brute-force reference computations used only by tests. None of these call
// into the simplex solver or the matching code they check.
#pragma once

#include "p2p/clearance.hpp"
#include "p2p/lp.hpp"
#include "p2p/network.hpp"
#include "p2p/orderbook.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace p2p::testing {

/// Best objective over all basic solutions of a box-bounded LP, or nullopt
/// when no basic solution is feasible. Each candidate vertex fixes every
/// variable either at a bound or leaves it free, and makes as many rows
/// active as there are free variables.
inline std::optional<double> vertex_enumeration(const lp::LinearProgram<double>& prog, double tol = 1e-9) {
  const Eigen::Index n = prog.num_variables();
  const Eigen::MatrixXd a = prog.dense_matrix();
  const Eigen::VectorXd c = prog.objective();
  const Eigen::VectorXd lo = prog.lower();
  const Eigen::VectorXd up = prog.upper();

  // Equalities are always active; a dependent one adds nothing to a vertex
  // system (the final feasibility check still covers it).
  std::vector<Eigen::Index> eq, ineq;
  Eigen::MatrixXd eq_rows(0, n);
  for (Eigen::Index k = 0; k < prog.num_rows(); ++k) {
    if (prog.row(k).relation != lp::Relation::equal) {
      ineq.push_back(k);
      continue;
    }
    Eigen::MatrixXd grown(eq_rows.rows() + 1, n);
    grown << eq_rows, a.row(k);
    if (Eigen::FullPivLU<Eigen::MatrixXd>(grown).rank() == grown.rows()) {
      eq_rows = grown;
      eq.push_back(k);
    }
  }

  auto feasible = [&](const Eigen::VectorXd& x) {
    for (Eigen::Index j = 0; j < n; ++j)
      if (x(j) < lo(j) - tol || x(j) > up(j) + tol) return false;
    for (Eigen::Index k = 0; k < prog.num_rows(); ++k) {
      const double act = a.row(k).dot(x);
      const double rhs = prog.row(k).rhs;
      const double scale = tol * (1.0 + std::abs(rhs));
      switch (prog.row(k).relation) {
        case lp::Relation::less_equal: if (act > rhs + scale) return false; break;
        case lp::Relation::greater_equal: if (act < rhs - scale) return false; break;
        case lp::Relation::equal: if (std::abs(act - rhs) > scale) return false; break;
      }
    }
    return true;
  };

  std::optional<double> best;
  // state per variable: 0 free, 1 lower, 2 upper
  std::vector<int> state(static_cast<std::size_t>(n), 0);
  const long combos = static_cast<long>(std::pow(3.0, static_cast<double>(n)));
  for (long code = 0; code < combos; ++code) {
    long rest = code;
    Eigen::Index n_free = 0;
    bool ok = true;
    for (Eigen::Index j = 0; j < n; ++j) {
      state[static_cast<std::size_t>(j)] = static_cast<int>(rest % 3);
      rest /= 3;
      const int s = state[static_cast<std::size_t>(j)];
      if (s == 0) ++n_free;
      if ((s == 1 && !std::isfinite(lo(j))) || (s == 2 && !std::isfinite(up(j)))) ok = false;
    }
    if (!ok) continue;
    const Eigen::Index need = n_free - static_cast<Eigen::Index>(eq.size());
    if (need < 0 || need > static_cast<Eigen::Index>(ineq.size())) continue;

    // Choose `need` of the inequality rows to be tight.
    std::vector<bool> pick(ineq.size(), false);
    std::fill(pick.begin(), pick.begin() + need, true);
    do {
      std::vector<Eigen::Index> active = eq;
      for (std::size_t q = 0; q < ineq.size(); ++q)
        if (pick[q]) active.push_back(ineq[q]);

      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      std::vector<Eigen::Index> free_vars;
      for (Eigen::Index j = 0; j < n; ++j) {
        const int s = state[static_cast<std::size_t>(j)];
        if (s == 0) free_vars.push_back(j);
        else x(j) = s == 1 ? lo(j) : up(j);
      }
      if (!free_vars.empty()) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(active.size()), static_cast<Eigen::Index>(free_vars.size()));
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(active.size()));
        for (std::size_t r = 0; r < active.size(); ++r) {
          rhs(static_cast<Eigen::Index>(r)) = prog.row(active[r]).rhs - a.row(active[r]).dot(x);
          for (std::size_t q = 0; q < free_vars.size(); ++q)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) = a(active[r], free_vars[q]);
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        if (lu.rank() < static_cast<Eigen::Index>(free_vars.size())) continue;
        const Eigen::VectorXd sol = lu.solve(rhs);
        for (std::size_t q = 0; q < free_vars.size(); ++q) x(free_vars[q]) = sol(static_cast<Eigen::Index>(q));
      }
      if (feasible(x)) {
        const double v = c.dot(x);
        if (!best || v > *best) best = v;
      }
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return best;
}

/// Maximum volume matchable between bids and asks where a bid may only take
/// from asks priced at or below it. Max-flow equals min-cut; with unbounded
/// bid->ask edges every finite cut is "drop bids outside B, drop asks
/// reachable from B", so enumerating bid subsets B gives the exact answer.
inline double max_crossing_volume(const std::vector<Order>& buys, const std::vector<Order>& sells) {
  const std::size_t nb = buys.size();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 0; mask < (1UL << nb); ++mask) {
    double cut = 0.0;
    std::vector<bool> reach(sells.size(), false);
    for (std::size_t b = 0; b < nb; ++b) {
      if (!(mask & (1UL << b))) {
        cut += buys[b].quantity;
        continue;
      }
      for (std::size_t s = 0; s < sells.size(); ++s)
        if (buys[b].price >= sells[s].price) reach[s] = true;
    }
    for (std::size_t s = 0; s < sells.size(); ++s)
      if (reach[s]) cut += sells[s].quantity;
    best = std::min(best, cut);
  }
  return best;
}

/// Grid search over x in {0, step, ..., 1}^|T| for clearance problems with
/// at most three trades. Angles for each grid point come from the DC power
/// flow (superposed from per-trade responses, which is exact by linearity).
inline double clearance_grid_search(const ClearanceProblem& problem, double step = 0.01, double tol = 1e-9) {
  const Network& net = problem.network;
  const Eigen::Index n = net.num_buses();
  const Eigen::Index ref = net.reference_index();
  const std::size_t nt = problem.trades.size();

  Eigen::VectorXd g0(n), rho0(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g0(i) = net.buses()[static_cast<std::size_t>(i)].base_generation;
    rho0(i) = net.buses()[static_cast<std::size_t>(i)].base_load;
  }
  const Eigen::VectorXd theta0 = dc_power_flow(net, g0 - rho0).theta;
  std::vector<Eigen::VectorXd> dtheta, dg, drho;
  for (const Trade& t : problem.trades) {
    Eigen::VectorXd gen = Eigen::VectorXd::Zero(n), load = Eigen::VectorXd::Zero(n);
    gen(net.index_of(t.seller_bus)) += t.quantity;
    load(net.index_of(t.buyer_bus)) += t.quantity;
    dtheta.push_back(dc_power_flow(net, gen - load).theta);
    dg.push_back(gen);
    drho.push_back(load);
  }

  const int steps = static_cast<int>(std::lround(1.0 / step));
  std::vector<int> idx(nt, 0);
  double best = -1.0;
  for (;;) {
    Eigen::VectorXd theta = theta0, g = g0, rho = rho0;
    double volume = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
      const double x = idx[k] * step;
      theta += x * dtheta[k];
      g += x * dg[k];
      rho += x * drho[k];
      volume += x * problem.trades[k].quantity;
    }
    bool ok = volume > best;
    for (Eigen::Index i = 0; ok && i < n; ++i) {
      if (i == ref) continue;
      const Bus& b = net.buses()[static_cast<std::size_t>(i)];
      ok = g(i) >= b.gen_bounds.lower - tol && g(i) <= b.gen_bounds.upper + tol &&
           rho(i) >= b.load_bounds.lower - tol && rho(i) <= b.load_bounds.upper + tol;
    }
    for (const Line& l : net.lines()) {
      if (!ok) break;
      const double d = theta(net.index_of(l.from_bus)) - theta(net.index_of(l.to_bus));
      ok = std::abs(d) <= max_angle_difference + tol &&
           std::abs(net.power_base() * l.susceptance * d) <= l.capacity + tol;
    }
    if (ok) {
      const double slack = (g - rho).sum() - (g(ref) - rho(ref));
      ok = std::abs(slack) <= net.slack_limit() + tol;
    }
    if (ok) best = volume;

    std::size_t k = 0;
    while (k < nt && idx[k] == steps) idx[k++] = 0;
    if (k == nt) break;
    ++idx[k];
  }
  return best;
}

}  // namespace p2p::testing
