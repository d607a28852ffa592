#include "p2p/profiles.hpp"

#include "p2p/csv.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace p2p {

namespace {

// Uniform in [0, 1) from the top 53 bits; stable across standard libraries.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<ProfileSeries> parse_profiles(std::istream& in, const std::string& source,
                                          DaylightWindow window) {
  const CsvTable table = parse_csv(in, source);
  if (table.header.size() < 2 || table.header[0] != "bus" || table.header[1] != "kind")
    throw FormatError(source + ": header must be bus,kind,h0..h23");
  if (table.header.size() != 2 + hours_per_day)
    throw FormatError(source + ": header must list h0..h23");
  for (int h = 0; h < hours_per_day; ++h)
    if (table.header[static_cast<std::size_t>(2 + h)] != "h" + std::to_string(h))
      throw FormatError(source + ": header must list h0..h23");

  std::vector<ProfileSeries> out;
  for (const CsvRecord& rec : table.records) {
    const std::string where = source + ":" + std::to_string(rec.line);
    if (rec.fields.size() != 2 + hours_per_day)
      throw FormatError(where + ": expected 24 hourly values, got " +
                        std::to_string(rec.fields.size() < 2 ? 0 : rec.fields.size() - 2));
    ProfileSeries s;
    s.bus = static_cast<BusId>(parse_integer(rec.fields[0], where));
    if (rec.fields[1] == "load") s.kind = ProfileKind::load;
    else if (rec.fields[1] == "solar") s.kind = ProfileKind::solar;
    else throw FormatError(where + ": kind must be load or solar");
    for (int h = 0; h < hours_per_day; ++h) {
      const double v = parse_number(rec.fields[static_cast<std::size_t>(2 + h)], where);
      if (v < 0.0) throw FormatError(where + ": negative energy at h" + std::to_string(h));
      const bool daylight = h >= window.sunrise && h < window.sunset;
      if (s.kind == ProfileKind::solar && !daylight && v != 0.0)
        throw FormatError(where + ": solar energy outside daylight window at h" + std::to_string(h));
      s.values[static_cast<std::size_t>(h)] = v;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<ProfileSeries> ingest_csv(const std::filesystem::path& path, DaylightWindow window) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_profiles(in, path.string(), window);
}

void write_profiles(std::ostream& os, const std::vector<ProfileSeries>& series) {
  os << "bus,kind";
  for (int h = 0; h < hours_per_day; ++h) os << ",h" << h;
  os << '\n';
  for (const auto& s : series) {
    os << s.bus << ',' << (s.kind == ProfileKind::load ? "load" : "solar");
    for (double v : s.values) os << ',' << format_number(v);
    os << '\n';
  }
}

HourlySeries synth_solar(double peak_kw, int sunrise, int sunset) {
  if (!(0 <= sunrise && sunrise < sunset && sunset <= hours_per_day))
    throw std::invalid_argument("synth_solar: need 0 <= sunrise < sunset <= 24");
  if (!(peak_kw >= 0.0)) throw std::invalid_argument("synth_solar: negative peak");
  HourlySeries out{};
  const double width = sunset - sunrise;
  for (int h = sunrise; h < sunset; ++h) {
    const double s = std::sin(std::numbers::pi * (h + 0.5 - sunrise) / width);
    out[static_cast<std::size_t>(h)] = peak_kw * s * s;
  }
  return out;
}

HourlySeries synth_residential(double base_kw, double evening_peak_kw) {
  if (!(base_kw >= 0.0 && evening_peak_kw >= base_kw))
    throw std::invalid_argument("synth_residential: need 0 <= base <= evening peak");
  HourlySeries out;
  out.fill(base_kw);
  constexpr double morning[] = {1.15, 1.30, 1.15};
  for (int k = 0; k < 3; ++k)
    out[static_cast<std::size_t>(7 + k)] = std::min(base_kw * morning[k], evening_peak_kw);
  constexpr double evening[] = {1.0 / 3.0, 2.0 / 3.0, 1.0, 2.0 / 3.0, 1.0 / 3.0};
  for (int k = 0; k < 5; ++k)
    out[static_cast<std::size_t>(17 + k)] = base_kw + (evening_peak_kw - base_kw) * evening[k];
  out[19] = evening_peak_kw;
  return out;
}

std::set<BusId> assign_solar(const Network& net, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw std::invalid_argument("assign_solar: fraction must lie in [0, 1]");
  std::vector<BusId> candidates;
  for (const Bus& b : net.buses())
    if (b.id != net.reference_bus()) candidates.push_back(b.id);
  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(candidates.size())));

  std::mt19937_64 rng(seed);
  for (std::size_t i = candidates.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(candidates[i - 1], candidates[j]);
  }
  return {candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(count)};
}

std::vector<ProfileSeries> synth_profiles(const Network& net, double solar_fraction,
                                          std::uint64_t seed, const SynthParameters& params) {
  const auto solar = assign_solar(net, solar_fraction, seed);
  const HourlySeries sun = synth_solar(params.solar_peak_kw, params.sunrise, params.sunset);
  const HourlySeries home = synth_residential(params.load_base_kw, params.load_evening_peak_kw);

  // Separate stream for load jitter so the solar choice does not shift it.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<ProfileSeries> out;
  for (const Bus& b : net.buses()) {
    if (b.id == net.reference_bus()) continue;
    const double scale = 1.0 + params.load_jitter * (2.0 * unit_draw(rng) - 1.0);
    ProfileSeries load{b.id, ProfileKind::load, {}};
    for (int h = 0; h < hours_per_day; ++h)
      load.values[static_cast<std::size_t>(h)] = home[static_cast<std::size_t>(h)] * scale;
    out.push_back(load);
    if (solar.contains(b.id)) out.push_back({b.id, ProfileKind::solar, sun});
  }
  return out;
}

}  // namespace p2p
