// p2pclear: command-line front end for matching, clearance and day runs.
//
// Exit codes: 0 success, 1 domain error (invalid input, infeasible), 2 usage.
#include "p2p/clearance.hpp"
#include "p2p/csv.hpp"
#include "p2p/network_io.hpp"
#include "p2p/orderbook.hpp"
#include "p2p/profiles.hpp"
#include "p2p/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace p2p;
namespace fs = std::filesystem;

constexpr int exit_domain = 1;
constexpr int exit_usage = 2;

Network checked_network(const fs::path& path) {
  Network net = load_network(path);
  for (const auto& w : net.warnings()) std::cerr << "warning: " << w << '\n';
  const auto report = validate_network(net);
  if (!report.empty()) {
    std::string msg = "invalid network " + path.string();
    for (const auto& v : report) msg += "\n  " + v.to_string();
    throw std::runtime_error(msg);
  }
  return net;
}

int cmd_validate(const fs::path& network) {
  Network net = load_network(network);
  for (const auto& w : net.warnings()) std::cerr << "warning: " << w << '\n';
  const auto report = validate_network(net);
  if (report.empty()) {
    std::cout << "OK\n";
    return 0;
  }
  for (const auto& v : report) std::cerr << v.to_string() << '\n';
  return exit_domain;
}

int cmd_match(const fs::path& orders_path, const fs::path& out) {
  const OrderBook book = read_orders(orders_path);
  if (book.has_block_column) fs::create_directories(out);
  for (const auto& [block, orders] : book.blocks) {
    std::vector<Order> buys, sells;
    for (const Order& o : orders) (o.side == Side::buy ? buys : sells).push_back(o);
    const MatchResult result = match(buys, sells);
    const fs::path target = book.has_block_column ? out / ("trades_block_" + std::to_string(block) + ".csv") : out;
    std::ofstream os(target);
    if (!os) throw std::runtime_error("cannot write " + target.string());
    write_trades(os, result.trades);
    std::cout << "block " << block << ": " << result.trades.size() << " trades, "
              << format_number(result.total_matched) << " kWh matched\n";
  }
  return 0;
}

int cmd_clear(const fs::path& network, const fs::path& trades_path, const fs::path& out,
              const std::optional<fs::path>& dump_lp) {
  const ClearanceProblem problem{checked_network(network), read_trades(trades_path)};
  if (dump_lp) {
    std::ofstream os(*dump_lp);
    lp::write_mps(assemble(problem).program, os);
  }
  const ClearanceSolution sol = clear(problem);
  write_solution(out, "", problem, sol);
  if (sol.status != ClearanceStatus::optimal) {
    std::cerr << "clearance infeasible:\n";
    for (const auto& v : sol.report) std::cerr << "  " << v.to_string() << '\n';
    return exit_domain;
  }
  if (!sol.report.empty()) {
    std::cerr << "solution failed audit:\n";
    for (const auto& v : sol.report) std::cerr << "  " << v.to_string() << '\n';
    return exit_domain;
  }
  std::cout << "executed " << format_number(sol.executed_volume) << " kWh of "
            << problem.trades.size() << " trades, slack " << format_number(sol.slack) << " kW\n";
  return 0;
}

int cmd_run_day(const fs::path& config_path, std::optional<double> scale, const std::string& hours,
                unsigned jobs, const fs::path& out) {
  ScenarioConfig config = load_config(config_path);
  if (scale) config.scale_factor = *scale;
  if (!hours.empty()) config.hours = parse_hours(hours);
  validate_config(config);
  const Scenario scenario = prepare(config);
  const auto blocks = run_day(scenario, jobs);
  write_day(out, blocks);

  std::ofstream log(out / "run.log");
  log << "config " << fs::absolute(config_path).string() << '\n'
      << "network " << config.network_path.string() << '\n'
      << "seed " << config.seed << '\n'
      << "scale_factor " << format_number(config.scale_factor) << '\n'
      << "solar_fraction " << format_number(config.solar_fraction) << '\n'
      << "jobs " << jobs << '\n';

  std::vector<HourBlockResult> rows;
  for (const auto& b : blocks) rows.push_back(b.result);
  write_results_markdown(std::cout, rows);
  return 0;
}

int cmd_synth_profiles(const fs::path& network, double fraction, std::uint64_t seed, const fs::path& out) {
  const Network net = checked_network(network);
  const auto series = synth_profiles(net, fraction, seed);
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out.string());
  write_profiles(os, series);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peer-to-peer energy trade matching and network-constrained clearance"};
  app.require_subcommand(1);

  fs::path network, orders, trades, out, config;
  std::optional<fs::path> dump_lp;
  std::optional<double> scale;
  std::string hours;
  unsigned jobs = 1;
  double solar_fraction = 0.5;
  std::uint64_t seed = 1;

  auto* validate = app.add_subcommand("validate", "Check a network file");
  validate->add_option("--network", network, "Network JSON")->required()->check(CLI::ExistingFile);

  auto* match_cmd = app.add_subcommand("match", "Run the double auction on an orders CSV");
  match_cmd->add_option("--orders", orders, "Orders CSV")->required()->check(CLI::ExistingFile);
  match_cmd->add_option("--out", out, "Trades CSV (directory when orders carry a block column)")->required();

  auto* clear_cmd = app.add_subcommand("clear", "Clear proposed trades against a network");
  clear_cmd->add_option("--network", network, "Network JSON")->required()->check(CLI::ExistingFile);
  clear_cmd->add_option("--trades", trades, "Trades CSV")->required()->check(CLI::ExistingFile);
  clear_cmd->add_option("--out", out, "Output directory")->required();
  clear_cmd->add_option("--dump-lp", dump_lp, "Write the assembled LP in MPS format");

  auto* day = app.add_subcommand("run-day", "Run matching and clearance for each hour block");
  day->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  day->add_option("--scale", scale, "Override the trade scale factor")->check(CLI::PositiveNumber);
  day->add_option("--hours", hours, "Hours to run, e.g. 0-23 or 6,11-13");
  day->add_option("--jobs", jobs, "Parallel hour blocks")->check(CLI::Range(1u, 256u));
  day->add_option("--out", out, "Output directory")->required();

  auto* synth = app.add_subcommand("synth-profiles", "Write synthetic load/solar profiles for a network");
  synth->add_option("--network", network, "Network JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--solar-fraction", solar_fraction, "Share of buses with solar")->required()->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", seed, "Random seed")->required();
  synth->add_option("--out", out, "Profiles CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*validate) return cmd_validate(network);
    if (*match_cmd) return cmd_match(orders, out);
    if (*clear_cmd) return cmd_clear(network, trades, out, dump_lp);
    if (*day) return cmd_run_day(config, scale, hours, jobs, out);
    if (*synth) return cmd_synth_profiles(network, solar_fraction, seed, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_domain;
  }
  return exit_usage;
}
