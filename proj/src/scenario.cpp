#include "p2p/scenario.hpp"

#include "p2p/csv.hpp"
#include "p2p/network_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace p2p {

namespace {

using nlohmann::json;

std::vector<int> all_hours() {
  std::vector<int> h(hours_per_day);
  for (int i = 0; i < hours_per_day; ++i) h[static_cast<std::size_t>(i)] = i;
  return h;
}

std::string two_digits(int h) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", h);
  return buf;
}

std::string fixed3(double v) {
  if (std::abs(v) < 5e-4) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::vector<int> parse_hours(const std::string& text) {
  std::vector<int> out;
  for (const std::string& part : split_fields(text)) {
    if (part.empty()) throw ScenarioError("hours: empty entry in \"" + text + "\"");
    const auto dash = part.find('-');
    const long lo = parse_integer(part.substr(0, dash), "hours");
    const long hi = dash == std::string::npos ? lo : parse_integer(part.substr(dash + 1), "hours");
    if (lo < 0 || hi >= hours_per_day || lo > hi) throw ScenarioError("hours: bad range \"" + part + "\"");
    for (long h = lo; h <= hi; ++h) out.push_back(static_cast<int>(h));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void validate_config(const ScenarioConfig& c) {
  if (!(c.scale_factor > 0.0) || !std::isfinite(c.scale_factor))
    throw ScenarioError("scale_factor must be positive");
  if (!(c.solar_fraction >= 0.0 && c.solar_fraction <= 1.0))
    throw ScenarioError("solar_fraction must lie in [0, 1]");
  if (c.profiles_path && c.synth)
    throw ScenarioError("profiles_path and synth_profiles are mutually exclusive");
  if (!c.profiles_path && !c.synth) throw ScenarioError("one of profiles_path or synth_profiles is required");
  if (!(c.buy_reserve >= 0.0) || !(c.sell_reserve >= 0.0))
    throw ScenarioError("reserve prices must be non-negative");
  for (int h : c.hours)
    if (h < 0 || h >= hours_per_day) throw ScenarioError("hours must lie in 0..23");
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  const auto dir = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path q(p);
    return q.is_absolute() ? q : dir / q;
  };

  static const std::vector<std::string> known = {"network_path", "profiles_path", "synth_profiles",
                                                 "solar_fraction", "seed", "buy_reserve",
                                                 "sell_reserve", "scale_factor", "hours"};
  ScenarioConfig c;
  try {
    for (const auto& [key, _] : doc.items())
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ScenarioError(path.string() + ": unknown key \"" + key + "\"");
    if (!doc.contains("network_path")) throw ScenarioError(path.string() + ": missing network_path");
    c.network_path = resolve(doc.at("network_path").get<std::string>());
    if (doc.contains("profiles_path")) c.profiles_path = resolve(doc.at("profiles_path").get<std::string>());
    if (doc.contains("synth_profiles")) {
      const json& s = doc.at("synth_profiles");
      SynthParameters p;
      p.solar_peak_kw = s.value("solar_peak_kw", p.solar_peak_kw);
      p.sunrise = s.value("sunrise", p.sunrise);
      p.sunset = s.value("sunset", p.sunset);
      p.load_base_kw = s.value("load_base_kw", p.load_base_kw);
      p.load_evening_peak_kw = s.value("load_evening_peak_kw", p.load_evening_peak_kw);
      p.load_jitter = s.value("load_jitter", p.load_jitter);
      c.synth = p;
    }
    c.solar_fraction = doc.value("solar_fraction", c.solar_fraction);
    c.seed = doc.value("seed", c.seed);
    c.buy_reserve = doc.value("buy_reserve", c.buy_reserve);
    c.sell_reserve = doc.value("sell_reserve", c.sell_reserve);
    c.scale_factor = doc.value("scale_factor", c.scale_factor);
    if (doc.contains("hours")) {
      const json& h = doc.at("hours");
      c.hours = h.is_string() ? parse_hours(h.get<std::string>()) : h.get<std::vector<int>>();
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  validate_config(c);
  return c;
}

Scenario prepare(const ScenarioConfig& config, Network network, const std::vector<ProfileSeries>& profiles) {
  validate_config(config);
  Scenario s{config, std::move(network), {}, {}};
  if (const auto report = validate_network(s.network); !report.empty())
    throw ScenarioError("invalid network: " + report.front().to_string());
  const auto n = static_cast<std::size_t>(s.network.num_buses());
  s.load.assign(n, HourlySeries{});
  s.solar.assign(n, HourlySeries{});
  std::vector<bool> has_load(n, false);
  for (const ProfileSeries& p : profiles) {
    if (!s.network.has_bus(p.bus)) throw ScenarioError("profile for unknown bus " + std::to_string(p.bus));
    if (p.bus == s.network.reference_bus())
      throw ScenarioError("profile given for the reference bus " + std::to_string(p.bus));
    const auto i = static_cast<std::size_t>(s.network.index_of(p.bus));
    auto& target = p.kind == ProfileKind::load ? s.load[i] : s.solar[i];
    for (int h = 0; h < hours_per_day; ++h) target[static_cast<std::size_t>(h)] += p.values[static_cast<std::size_t>(h)];
    if (p.kind == ProfileKind::load) has_load[i] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!has_load[i] && s.network.buses()[i].id != s.network.reference_bus())
      throw ScenarioError("no load profile for bus " + std::to_string(s.network.buses()[i].id));
  if (s.config.hours.empty()) s.config.hours = all_hours();
  return s;
}

Scenario prepare(const ScenarioConfig& config) {
  validate_config(config);
  Network net = load_network(config.network_path);
  std::vector<ProfileSeries> profiles;
  if (config.profiles_path) {
    profiles = ingest_csv(*config.profiles_path);
  } else {
    profiles = synth_profiles(net, config.solar_fraction, config.seed, *config.synth);
  }
  return prepare(config, std::move(net), profiles);
}

BlockOutcome run_block(const Scenario& scenario, int hour) {
  if (hour < 0 || hour >= hours_per_day) throw ScenarioError("hour out of range: " + std::to_string(hour));
  const Network& net = scenario.network;
  const ScenarioConfig& cfg = scenario.config;
  const auto h = static_cast<std::size_t>(hour);
  const Eigen::Index n = net.num_buses();

  // Own solar covers own load first; what is left is bid or offered.
  BlockOutcome out;
  std::map<BusId, double> surplus, net_load;
  std::vector<Order> buys, sells;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Bus& b = net.buses()[static_cast<std::size_t>(i)];
    if (b.id == net.reference_bus()) continue;
    const double load = scenario.load[static_cast<std::size_t>(i)][h];
    const double sun = scenario.solar[static_cast<std::size_t>(i)][h];
    surplus[b.id] = std::max(0.0, sun - load);
    net_load[b.id] = std::max(0.0, load - sun);
    if (net_load[b.id] > 0.0)
      out.orders.push_back({"b" + std::to_string(b.id), Side::buy, b.id, cfg.buy_reserve, net_load[b.id]});
    if (surplus[b.id] > 0.0)
      out.orders.push_back({"s" + std::to_string(b.id), Side::sell, b.id, cfg.sell_reserve, surplus[b.id]});
  }
  out.orders = cap_orders(out.orders, surplus, net_load);
  for (const Order& o : out.orders) (o.side == Side::buy ? buys : sells).push_back(o);
  MatchResult matched = match(buys, sells);

  // Inflexible load is what the proposed trades do not cover.
  Eigen::VectorXd g0 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd rho0 = Eigen::VectorXd::Zero(n);
  for (const auto& [bus, q] : net_load) rho0(net.index_of(bus)) = q;
  for (const Trade& t : matched.trades) {
    const Eigen::Index i = net.index_of(t.buyer_bus);
    rho0(i) = std::max(0.0, rho0(i) - t.quantity);
  }
  for (Trade& t : matched.trades) t.quantity *= cfg.scale_factor;

  out.problem.network = net.with_base(g0, rho0);
  out.problem.trades = std::move(matched.trades);
  if (const auto report = validate_network(out.problem.network); !report.empty())
    throw ScenarioError("hour " + std::to_string(hour) + ": " + report.front().to_string());

  out.solution = clear(out.problem);
  if (out.solution.status != ClearanceStatus::optimal) {
    std::string msg = "hour " + std::to_string(hour) + ": clearance infeasible";
    for (const auto& v : out.solution.report) msg += "; " + v.to_string();
    throw ScenarioError(msg);
  }

  HourBlockResult& r = out.result;
  r.hour = hour;
  r.trade_count = static_cast<int>(out.problem.trades.size());
  for (const Trade& t : out.problem.trades) r.matched_volume += t.quantity;
  for (Eigen::Index k = 0; k < out.solution.execution.size(); ++k)
    if (out.solution.execution(k) > 1e-9) ++r.executed_count;
  r.executed_volume = out.solution.executed_volume;
  r.slack = out.solution.slack;
  r.total_load = out.solution.adjusted_load.sum();
  if (r.total_load > 0.0) r.pct_load_fulfilled = 100.0 * r.executed_volume / r.total_load;
  return out;
}

std::vector<BlockOutcome> run_day(const Scenario& scenario, unsigned jobs) {
  const std::vector<int>& hours = scenario.config.hours;
  std::vector<BlockOutcome> out(hours.size());
  std::vector<std::string> errors(hours.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < hours.size(); k = next++) {
      try {
        out[k] = run_block(scenario, hours[k]);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(hours.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::string message;
  for (const auto& e : errors)
    if (!e.empty()) message += (message.empty() ? "" : "\n") + e;
  if (!message.empty()) throw ScenarioError(message);
  return out;
}

void write_results_csv(std::ostream& os, const std::vector<HourBlockResult>& rows) {
  os << "hour,executed_kwh,trade_count,slack_kwh,load_kwh,pct_fulfilled\n";
  for (const auto& r : rows) {
    const bool empty = r.empty();
    os << r.hour << ',' << format_number(empty ? 0.0 : r.executed_volume) << ',' << r.trade_count << ','
       << format_number(r.slack) << ',' << format_number(r.total_load) << ','
       << format_number(empty ? 0.0 : r.pct_load_fulfilled.value_or(0.0)) << '\n';
  }
}

void write_results_markdown(std::ostream& os, const std::vector<HourBlockResult>& rows) {
  os << "| Hour | Trade Qty (kWh) | Count Trades | Slack Power (kWh) | Loads (kWh) | % Load Fulfilled w/ P2P |\n"
     << "|---|---|---|---|---|---|\n";
  for (std::size_t k = 0; k < rows.size();) {
    if (rows[k].empty()) {
      // Collapse runs of consecutive empty hours into one row.
      std::size_t e = k;
      while (e + 1 < rows.size() && rows[e + 1].empty() && rows[e + 1].hour == rows[e].hour + 1) ++e;
      const std::string label = e == k ? std::to_string(rows[k].hour)
                                       : std::to_string(rows[k].hour) + "-" + std::to_string(rows[e].hour);
      os << "| " << label << " | -- | -- | -- | -- | -- |\n";
      k = e + 1;
      continue;
    }
    const auto& r = rows[k];
    const std::string qty = r.executed_volume < 0.01 ? "< 0.01" : fixed3(r.executed_volume);
    std::string pct = "--";
    if (r.pct_load_fulfilled) pct = *r.pct_load_fulfilled < 1.0 ? "< 1%" : fixed3(*r.pct_load_fulfilled) + "%";
    os << "| " << r.hour << " | " << qty << " | " << r.trade_count << " | " << fixed3(r.slack) << " | "
       << fixed3(r.total_load) << " | " << pct << " |\n";
    ++k;
  }
}

void write_day(const std::filesystem::path& dir, const std::vector<BlockOutcome>& blocks) {
  std::filesystem::create_directories(dir);
  std::vector<HourBlockResult> rows;
  for (const auto& b : blocks) rows.push_back(b.result);
  {
    std::ofstream os(dir / "results.csv");
    write_results_csv(os, rows);
  }
  {
    std::ofstream os(dir / "results.md");
    write_results_markdown(os, rows);
  }
  for (const auto& b : blocks) {
    const std::string prefix = "hour_" + two_digits(b.result.hour) + "_";
    {
      std::ofstream os(dir / (prefix + "orders.csv"));
      write_orders(os, b.orders);
    }
    {
      std::ofstream os(dir / (prefix + "proposed.csv"));
      write_trades(os, b.problem.trades);
    }
    write_solution(dir, prefix, b.problem, b.solution);
  }
}

}  // namespace p2p
