// Hourly load and solar series per bus.
#pragma once

#include "p2p/network.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace p2p {

inline constexpr int hours_per_day = 24;

using HourlySeries = std::array<double, hours_per_day>;

enum class ProfileKind { load, solar };

struct ProfileSeries {
  BusId bus = 0;
  ProfileKind kind = ProfileKind::load;
  HourlySeries values{};
};

/// Daylight window [sunrise, sunset) in hours.
struct DaylightWindow {
  int sunrise = 6;
  int sunset = 18;
};

/// CSV with header bus,kind,h0..h23. Throws FormatError naming the line for
/// wrong arity, negative energy or solar output outside the daylight window.
std::vector<ProfileSeries> ingest_csv(const std::filesystem::path& path, DaylightWindow window = {});
std::vector<ProfileSeries> parse_profiles(std::istream& in, const std::string& source,
                                          DaylightWindow window = {});
void write_profiles(std::ostream& os, const std::vector<ProfileSeries>& series);

/// peak_kw * sin^2(pi (h + 0.5 - sunrise) / (sunset - sunrise)) inside the
/// window, zero outside. Throws std::invalid_argument for a bad window or
/// negative peak.
HourlySeries synth_solar(double peak_kw, int sunrise = 6, int sunset = 18);

/// Residential demand shape:
///   base everywhere, except
///   07, 08, 09: base * (1.15, 1.30, 1.15), capped at evening_peak_kw
///   17..21:     base + (peak - base) * (1/3, 2/3, 1, 2/3, 1/3)
/// Throws std::invalid_argument unless 0 <= base_kw <= evening_peak_kw.
HourlySeries synth_residential(double base_kw, double evening_peak_kw);

/// Picks floor(fraction * #non-reference buses) non-reference buses with a
/// seeded Fisher-Yates shuffle (mt19937_64).
std::set<BusId> assign_solar(const Network& net, double fraction, std::uint64_t seed);

struct SynthParameters {
  double solar_peak_kw = 3.0;
  int sunrise = 6;
  int sunset = 18;
  double load_base_kw = 1.5;
  double load_evening_peak_kw = 3.0;
  double load_jitter = 0.15;  // per-bus load scale drawn from [1 - j, 1 + j]
};

/// Load series for every non-reference bus plus solar series for the buses
/// chosen by assign_solar. Deterministic in `seed`.
std::vector<ProfileSeries> synth_profiles(const Network& net, double solar_fraction,
                                          std::uint64_t seed, const SynthParameters& params = {});

}  // namespace p2p
