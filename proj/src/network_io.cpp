#include "p2p/network_io.hpp"

#include <fstream>

namespace p2p {

namespace {

using nlohmann::json;

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw FormatError(where + ": missing field \"" + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(where + ": field \"" + key + "\": " + e.what());
  }
}

Interval interval(const json& obj, const char* key, const std::string& where) {
  const auto pair = required<std::vector<double>>(obj, key, where);
  if (pair.size() != 2) throw FormatError(where + ": \"" + key + "\" must be [lower, upper]");
  return {pair[0], pair[1]};
}

}  // namespace

Network network_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("network: document must be an object");
  std::vector<Bus> buses;
  std::size_t k = 0;
  for (const json& b : required<json>(doc, "buses", "network")) {
    const std::string where = "buses[" + std::to_string(k++) + "]";
    Bus bus;
    bus.id = required<BusId>(b, "id", where);
    bus.is_reference = b.value("is_reference", false);
    bus.base_generation = required<double>(b, "base_generation", where);
    bus.base_load = required<double>(b, "base_load", where);
    bus.gen_bounds = interval(b, "gen_bounds", where);
    bus.load_bounds = interval(b, "load_bounds", where);
    buses.push_back(bus);
  }
  std::vector<Line> lines;
  k = 0;
  for (const json& l : required<json>(doc, "lines", "network")) {
    const std::string where = "lines[" + std::to_string(k++) + "]";
    Line line;
    line.from_bus = required<BusId>(l, "from_bus", where);
    line.to_bus = required<BusId>(l, "to_bus", where);
    if (l.contains("susceptance")) {
      line.susceptance = required<double>(l, "susceptance", where);
    } else if (l.contains("reactance")) {
      const double x = required<double>(l, "reactance", where);
      if (x == 0.0) throw FormatError(where + ": reactance must be non-zero");
      line.susceptance = 1.0 / x;
    } else {
      throw FormatError(where + ": needs \"susceptance\" or \"reactance\"");
    }
    line.capacity = required<double>(l, "capacity", where);
    lines.push_back(line);
  }
  return Network(std::move(buses), std::move(lines), required<BusId>(doc, "reference_bus", "network"),
                 required<double>(doc, "slack_limit_kw", "network"),
                 required<double>(doc, "power_base_kva", "network"));
}

json network_to_json(const Network& net) {
  json buses = json::array();
  for (const Bus& b : net.buses()) {
    buses.push_back({{"id", b.id},
                     {"is_reference", b.is_reference},
                     {"base_generation", b.base_generation},
                     {"base_load", b.base_load},
                     {"gen_bounds", {b.gen_bounds.lower, b.gen_bounds.upper}},
                     {"load_bounds", {b.load_bounds.lower, b.load_bounds.upper}}});
  }
  json lines = json::array();
  for (const Line& l : net.lines()) {
    lines.push_back({{"from_bus", l.from_bus},
                     {"to_bus", l.to_bus},
                     {"susceptance", l.susceptance},
                     {"capacity", l.capacity}});
  }
  return {{"power_base_kva", net.power_base()},
          {"reference_bus", net.reference_bus()},
          {"slack_limit_kw", net.slack_limit()},
          {"buses", buses},
          {"lines", lines}};
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open network file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return network_from_json(doc);
}

}  // namespace p2p
