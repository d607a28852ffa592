// Day-long pipeline: profiles -> orders -> double auction -> clearance, one
// independent block per hour.
#pragma once

#include "p2p/clearance.hpp"
#include "p2p/network.hpp"
#include "p2p/orderbook.hpp"
#include "p2p/profiles.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2p {

struct ScenarioConfig {
  std::filesystem::path network_path;
  std::optional<std::filesystem::path> profiles_path;  // exclusive with synth
  std::optional<SynthParameters> synth;
  double solar_fraction = 0.5;
  std::uint64_t seed = 1;
  double buy_reserve = 0.25;   // currency per kWh
  double sell_reserve = 0.10;  // currency per kWh
  double scale_factor = 1.0;   // applied to matched trade quantities
  std::vector<int> hours;      // empty means 0..23
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON config. Keys: network_path, profiles_path | synth_profiles {...},
/// solar_fraction, seed, buy_reserve, sell_reserve, scale_factor, hours.
/// Relative paths resolve against the config file's directory.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Throws ScenarioError on invariant violations.
void validate_config(const ScenarioConfig& config);

/// Parses "0-23", "6,7,11-13" style hour lists.
std::vector<int> parse_hours(const std::string& text);

/// Loaded network and per-bus hourly series.
struct Scenario {
  ScenarioConfig config;
  Network network;
  std::vector<HourlySeries> load;   // per bus, kWh
  std::vector<HourlySeries> solar;  // per bus, kWh
};

Scenario prepare(const ScenarioConfig& config);
Scenario prepare(const ScenarioConfig& config, Network network, const std::vector<ProfileSeries>& profiles);

struct HourBlockResult {
  int hour = 0;
  double executed_volume = 0.0;  // kWh
  int trade_count = 0;           // matched trades proposed to clearance
  int executed_count = 0;        // trades with x_t > 0
  double matched_volume = 0.0;   // kWh, after scaling
  double slack = 0.0;            // kWh
  double total_load = 0.0;       // kWh, sum of adjusted loads
  std::optional<double> pct_load_fulfilled;

  bool empty() const { return trade_count == 0; }
};

struct BlockOutcome {
  HourBlockResult result;
  std::vector<Order> orders;
  ClearanceProblem problem;
  ClearanceSolution solution;
};

/// Throws ScenarioError tagged with the hour when clearance is infeasible.
BlockOutcome run_block(const Scenario& scenario, int hour);

/// Runs every configured hour on up to `jobs` threads; results keep hour
/// order. Failures from all hours are collected into one ScenarioError.
std::vector<BlockOutcome> run_day(const Scenario& scenario, unsigned jobs = 1);

void write_results_csv(std::ostream& os, const std::vector<HourBlockResult>& rows);
void write_results_markdown(std::ostream& os, const std::vector<HourBlockResult>& rows);

/// results.csv, results.md and hour_HH_{orders,proposed,trades,buses,summary}.csv.
void write_day(const std::filesystem::path& dir, const std::vector<BlockOutcome>& blocks);

}  // namespace p2p
