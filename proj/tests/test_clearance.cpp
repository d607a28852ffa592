#include "p2p/clearance.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace p2p;

namespace {

Bus bus(BusId id, bool ref = false, double hi = 10.0) {
  return Bus{id, ref, 0.0, 0.0, {0.0, ref ? 0.0 : hi}, {0.0, ref ? 0.0 : hi}};
}

// ref(0) - A(1) - B(2), unit susceptances, A-B limited to 0.5.
Network chain(double ab_capacity = 0.5) {
  return Network({bus(0, true), bus(1), bus(2)}, {{0, 1, 1.0, 5.0}, {1, 2, 1.0, ab_capacity}}, 0, 10.0);
}

bool has_rule(const ValidationReport& r, const std::string& rule) {
  return std::any_of(r.begin(), r.end(), [&](const Violation& v) { return v.rule == rule; });
}

int count_rows(const lp::LinearProgram<double>& p, const std::string& prefix) {
  int n = 0;
  for (const auto& r : p.rows())
    if (r.name.rfind(prefix, 0) == 0) ++n;
  return n;
}

// Copy of `p` without row `skip`.
lp::LinearProgram<double> without_row(const lp::LinearProgram<double>& p, Eigen::Index skip) {
  lp::LinearProgram<double> q;
  for (Eigen::Index j = 0; j < p.num_variables(); ++j)
    q.add_variable(p.lower()(j), p.upper()(j), p.objective()(j), p.variable_name(j));
  for (Eigen::Index k = 0; k < p.num_rows(); ++k)
    if (k != skip) q.add_row(p.row(k).terms, p.row(k).relation, p.row(k).rhs, p.row(k).name);
  return q;
}

}  // namespace

TEST_CASE("assembly without trades") {
  const Network net({bus(0, true), bus(1)}, {{0, 1, 1.0, 5.0}}, 0, 10.0);
  const auto ap = assemble({net, {}});
  CHECK(ap.program.num_variables() == 2);  // theta_1, p_ref
  CHECK(ap.program.objective().cwiseAbs().sum() == 0.0);
  CHECK(ap.angle_variable[0] == -1);
  CHECK(ap.angle_variable[1] >= 0);
}

TEST_CASE("assembly counts for one trade on the chain") {
  const auto ap = assemble({chain(), {{"t0", 1, 2, 1.0, 0.2}}});
  const auto& p = ap.program;
  CHECK(p.num_variables() == 1 + 2 + 1);
  CHECK(count_rows(p, "balance_") == 2);
  CHECK(count_rows(p, "cap_") == 4);
  CHECK(count_rows(p, "angle_") == 4);
  CHECK(count_rows(p, "slack_identity") == 1);
  CHECK(count_rows(p, "slack_max") + count_rows(p, "slack_min") == 2);
  CHECK(count_rows(p, "gen_max_") + count_rows(p, "load_max_") == 0);  // bounds cannot bind
  CHECK(p.num_rows() == 13);
}

TEST_CASE("a same-bus trade nets to zero in its balance row") {
  const auto ap = assemble({chain(), {{"t0", 2, 2, 3.0, 0.2}}});
  const auto& p = ap.program;
  for (const auto& r : p.rows()) {
    if (r.name != "balance_2") continue;
    double coeff = 0.0;
    for (const auto& t : r.terms)
      if (t.var == ap.first_execution) coeff += t.coeff;
    CHECK(coeff == 0.0);
  }
}

TEST_CASE("bound rows appear only where trades can reach them") {
  const Network net({bus(0, true), bus(1, false, 2.0), bus(2)}, {{0, 1, 1.0, 5.0}, {1, 2, 1.0, 5.0}}, 0, 10.0);
  const auto ap = assemble({net, {{"t0", 1, 2, 3.0, 0.2}}});
  CHECK(count_rows(ap.program, "gen_max_1") == 1);
  CHECK(count_rows(ap.program, "load_max_2") == 0);
}

TEST_CASE("malformed problems are rejected with the trade id") {
  CHECK_THROWS_WITH_AS(assemble({chain(), {{"bad", 1, 9, 1.0, 0.2}}}), doctest::Contains("bad"), ClearanceError);
  CHECK_THROWS_WITH_AS(assemble({chain(), {{"r", 0, 2, 1.0, 0.2}}}), doctest::Contains("reference bus cannot trade"),
                       ClearanceError);
  CHECK_THROWS_AS(assemble({chain(), {{"z", 1, 2, 0.0, 0.2}}}), ClearanceError);
}

TEST_CASE("null system") {
  const auto sol = clear({chain(), {}});
  REQUIRE(sol.status == ClearanceStatus::optimal);
  CHECK(sol.executed_volume == 0.0);
  CHECK(sol.slack == 0.0);
  CHECK(sol.angles.theta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sol.report.empty());
}

TEST_CASE("the chain trade is curtailed by the A-B line") {
  const ClearanceProblem problem{chain(), {{"t0", 1, 2, 1.0, 0.2}}};
  const auto sol = clear(problem);
  REQUIRE(sol.status == ClearanceStatus::optimal);
  CHECK(sol.execution(0) == doctest::Approx(0.5));
  CHECK(sol.executed_volume == doctest::Approx(0.5));
  CHECK(sol.slack == doctest::Approx(0.0));
  CHECK(sol.angles.theta(2) == doctest::Approx(-0.5));
  CHECK(sol.flows(1) == doctest::Approx(0.5));
  CHECK(verify(problem, sol).empty());
}

TEST_CASE("verify flags hand-built violations") {
  const ClearanceProblem problem{chain(), {{"t0", 1, 2, 1.0, 0.2}}};
  ClearanceSolution sol = clear(problem);

  SUBCASE("execution above one") {
    sol.execution(0) = 1.2;
    const auto r = verify(problem, sol);
    CHECK(has_rule(r, "execution fraction outside [0, 1]"));
  }
  SUBCASE("slack beyond the limit") {
    sol.slack = 11.0;
    CHECK(has_rule(verify(problem, sol), "slack limit exceeded"));
  }
  SUBCASE("flow beyond capacity") {
    sol.execution(0) = 1.0;
    adjusted_power(problem, sol.execution, sol.adjusted_generation, sol.adjusted_load);
    sol.angles = dc_power_flow(problem.network, sol.adjusted_generation - sol.adjusted_load);
    const auto r = verify(problem, sol);
    CHECK(has_rule(r, "line flow exceeds capacity"));
    CHECK_FALSE(has_rule(r, "nodal power balance violated"));
  }
  SUBCASE("non-zero reference angle") {
    sol.angles.theta(0) = 0.1;
    CHECK(has_rule(verify(problem, sol), "reference angle not zero"));
  }
}

TEST_CASE("an infeasible base case is reported, not repaired") {
  Network net({bus(0, true), Bus{1, false, 0.0, 3.0, {0, 10}, {0, 10}}}, {{0, 1, 1.0, 1.0}}, 0, 10.0);
  const auto sol = clear({net, {}});
  CHECK(sol.status == ClearanceStatus::infeasible);
  CHECK(has_rule(sol.report, "line flow exceeds capacity"));
}

TEST_CASE("saturation under generous limits") {
  testing::Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = testing::uniform_int(rng, 3, 30);
    Network tight = testing::random_radial_network(rng, n);
    const auto trades = testing::random_trades(rng, tight, testing::uniform_int(rng, 1, 15));
    double total = 0.0;
    for (const Trade& t : trades) total += t.quantity;

    std::vector<Bus> buses = tight.buses();
    for (Bus& b : buses) {
      if (b.is_reference) continue;
      b.gen_bounds.upper = b.base_generation + 10.0 * total;
      b.load_bounds.upper = b.base_load + 10.0 * total;
    }
    std::vector<Line> lines = tight.lines();
    for (Line& l : lines) {
      l.capacity = 100.0 * (total + 100.0);
      l.susceptance *= 1e3;  // keeps angle differences far below pi/6
    }
    const Network net(buses, lines, 0, 100.0 * (total + 100.0), tight.power_base());
    const ClearanceProblem problem{net, trades};
    const auto sol = clear(problem);
    REQUIRE(sol.status == ClearanceStatus::optimal);
    CHECK(sol.executed_volume == doctest::Approx(total).epsilon(1e-12));
    CHECK(sol.execution.minCoeff() == doctest::Approx(1.0));
    CHECK(sol.report.empty());
  }
}

TEST_CASE("a self trade executes regardless of line capacity") {
  // Every line is nearly saturated by the base case.
  Network net({bus(0, true), Bus{1, false, 0.0, 0.9, {0, 10}, {0, 10}}, Bus{2, false, 0.0, 0.0, {0, 10}, {0, 10}}},
              {{0, 1, 10.0, 1.0}, {1, 2, 10.0, 0.01}}, 0, 10.0);
  const auto sol = clear({net, {{"self", 2, 2, 5.0, 0.2}, {"cross", 1, 2, 5.0, 0.2}}});
  REQUIRE(sol.status == ClearanceStatus::optimal);
  CHECK(sol.execution(0) == doctest::Approx(1.0));
  CHECK(sol.execution(1) * 5.0 <= 0.01 + 1e-9);
}

TEST_CASE("relaxing a row never lowers the executed volume") {
  testing::Rng rng(8);
  for (int trial = 0; trial < 12; ++trial) {
    const Network net = testing::random_radial_network(rng, testing::uniform_int(rng, 3, 12), 0.1);
    const ClearanceProblem problem{net, testing::random_trades(rng, net, testing::uniform_int(rng, 2, 8))};
    const auto ap = assemble(problem);
    const auto full = lp::solve(ap.program);
    REQUIRE(full.status == lp::Status::optimal);
    for (Eigen::Index k = 0; k < ap.program.num_rows(); ++k) {
      const auto relaxed = lp::solve(without_row(ap.program, k));
      REQUIRE(relaxed.status == lp::Status::optimal);
      CHECK(relaxed.objective_value >= full.objective_value - 1e-7);
    }
  }
}

TEST_CASE("scaling trade quantities keeps the solution feasible") {
  testing::Rng rng(10);
  int fractional_seen = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Network net = testing::random_radial_network(rng, testing::uniform_int(rng, 4, 25), 0.3);
    ClearanceProblem base{net, testing::random_trades(rng, net, testing::uniform_int(rng, 1, 10))};
    ClearanceProblem scaled = base;
    for (Trade& t : scaled.trades) t.quantity *= 100.0;
    const auto a = clear(base);
    const auto b = clear(scaled);
    REQUIRE(a.status == ClearanceStatus::optimal);
    REQUIRE(b.status == ClearanceStatus::optimal);
    CHECK(b.report.empty());
    CHECK(b.executed_volume >= a.executed_volume - 1e-7);
    const bool binds = b.executed_volume < 100.0 * a.executed_volume + 1e-9 || a.execution.minCoeff() < 1.0 - 1e-9;
    bool fractional = false;
    for (Eigen::Index k = 0; k < b.execution.size(); ++k)
      fractional |= b.execution(k) > 1e-9 && b.execution(k) < 1.0 - 1e-9;
    if (binds && fractional) ++fractional_seen;
  }
  CHECK(fractional_seen > 20);
}

TEST_CASE("slack equals the net injection and the flow into the reference bus") {
  testing::Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Network net = testing::random_radial_network(rng, testing::uniform_int(rng, 3, 40));
    const ClearanceProblem problem{net, testing::random_trades(rng, net, testing::uniform_int(rng, 1, 20))};
    const auto sol = clear(problem);
    REQUIRE(sol.status == ClearanceStatus::optimal);
    CHECK(sol.slack == doctest::Approx(slack_power(net, sol.adjusted_generation, sol.adjusted_load)).epsilon(1e-9));
    double into_ref = 0.0;
    for (Eigen::Index k = 0; k < net.num_lines(); ++k) {
      const Line& l = net.lines()[static_cast<std::size_t>(k)];
      if (l.to_bus == net.reference_bus()) into_ref += sol.flows(k);
      if (l.from_bus == net.reference_bus()) into_ref -= sol.flows(k);
    }
    CHECK(std::abs(sol.slack - into_ref) <= 1e-6);
  }
}

TEST_CASE("small instances agree with the grid oracle") {
  testing::Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const Network net = testing::random_radial_network(rng, testing::uniform_int(rng, 3, 8), 0.1);
    const ClearanceProblem problem{net, testing::random_trades(rng, net, testing::uniform_int(rng, 1, 2))};
    double total = 0.0;
    for (const Trade& t : problem.trades) total += t.quantity;
    const auto sol = clear(problem);
    REQUIRE(sol.status == ClearanceStatus::optimal);
    const double grid = testing::clearance_grid_search(problem);
    CHECK(sol.executed_volume >= grid - 1e-7);
    CHECK(sol.executed_volume - grid <= 0.02 * total);
  }
}

TEST_CASE("solution files") {
  const ClearanceProblem problem{chain(), {{"t0", 1, 2, 1.0, 0.2}}};
  const auto sol = clear(problem);
  const auto dir = std::filesystem::temp_directory_path() / "p2p_clearance_files";
  std::filesystem::create_directories(dir);
  write_solution(dir, "x_", problem, sol);
  std::ifstream trades(dir / "x_trades.csv"), buses(dir / "x_buses.csv"), summary(dir / "x_summary.csv");
  std::string line;
  std::getline(trades, line);
  CHECK(line == "trade_id,x,executed_kwh");
  std::getline(trades, line);
  CHECK(line.rfind("t0,", 0) == 0);
  std::getline(buses, line);
  CHECK(line == "bus_id,theta_rad,g_kw,rho_kw");
  std::getline(summary, line);
  CHECK(line == "status,slack_kw,executed_kwh");
  std::getline(summary, line);
  CHECK(line.rfind("optimal,", 0) == 0);
  CHECK(line.substr(line.rfind(',') + 1) == "0.5");
  std::filesystem::remove_all(dir);
}
