#include "frost/synthgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

namespace frost::synthgen {

namespace {

constexpr double kDiurnalPhase = 0.29;
constexpr int kFrostRampEnd = 12;  // pulse covers intervals 0..12 inclusive

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// splitmix64; decorrelates the per-stream seeds derived from one user seed
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void ClimateConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DataError(std::string("invalid climate config: ") + what);
  };
  auto finite = [](double v) { return std::isfinite(v); };
  require(finite(annual_mean), "annual_mean must be finite");
  require(finite(seasonal_amplitude) && seasonal_amplitude >= 0.0,
          "seasonal_amplitude must be >= 0");
  require(finite(diurnal_amplitude) && diurnal_amplitude >= 0.0,
          "diurnal_amplitude must be >= 0");
  require(finite(noise_sd) && noise_sd >= 0.0, "noise_sd must be >= 0");
  require(finite(ar_coeff) && ar_coeff >= 0.0 && ar_coeff < 1.0,
          "ar_coeff must lie in [0, 1)");
  require(finite(dew_offset_mean) && dew_offset_mean >= 0.0,
          "dew_offset_mean must be >= 0");
  require(finite(dew_offset_sd) && dew_offset_sd >= 0.0,
          "dew_offset_sd must be >= 0");
  require(finite(spread) && spread >= 0.0, "spread must be >= 0");
  require(finite(frost_prob) && frost_prob >= 0.0 && frost_prob <= 1.0,
          "frost_prob must lie in [0, 1]");
  require(finite(frost_depth) && frost_depth >= 0.0,
          "frost_depth must be >= 0");
}

double base_curve(const ClimateConfig& cfg, int day_index, int interval) {
  const double two_pi = 2.0 * std::numbers::pi;
  return cfg.annual_mean +
         cfg.seasonal_amplitude * std::sin(two_pi * day_index / 365.0) +
         cfg.diurnal_amplitude *
             std::sin(two_pi * interval / 48.0 - two_pi * kDiurnalPhase);
}

double frost_ramp(int interval) {
  if (interval < 0 || interval > kFrostRampEnd) return 0.0;
  const double s = std::sin(std::numbers::pi * interval / 12.0);
  return s * s;
}

GeneratedStation generate_station_detailed(const ClimateConfig& cfg, int n_days,
                                           std::string_view station_id) {
  cfg.validate();
  if (n_days < 1) throw DataError("n_days must be >= 1");

  const std::uint64_t base = cfg.seed ^ fnv1a64(station_id);
  std::mt19937_64 rng_noise(mix(base + 1));
  std::mt19937_64 rng_frost(mix(base + 2));
  std::mt19937_64 rng_dew(mix(base + 3));

  std::normal_distribution<double> innovation(0.0, 1.0);
  std::normal_distribution<double> dew_draw(cfg.dew_offset_mean,
                                            cfg.dew_offset_sd);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  GeneratedStation out;
  out.series.station_id = std::string(station_id);
  out.series.days.resize(static_cast<std::size_t>(n_days));
  out.frost_nights.resize(static_cast<std::size_t>(n_days));

  for (int d = 0; d < n_days; ++d) {
    out.frost_nights[static_cast<std::size_t>(d)] =
        unit(rng_frost) < cfg.frost_prob;
  }

  Date date(2020, 1, 1);
  double ar = 0.0;  // AR(1) state, evolves per interval across the series
  for (int d = 0; d < n_days; ++d) {
    DayRecord& day = out.series.days[static_cast<std::size_t>(d)];
    day.date = date;
    const bool frosted = d > 0 && out.frost_nights[static_cast<std::size_t>(d - 1)];
    for (int i = 0; i < kIntervalsPerDay; ++i) {
      ar = cfg.ar_coeff * ar + cfg.noise_sd * innovation(rng_noise);
      double b = base_curve(cfg, d, i) + ar;
      if (frosted) b -= cfg.frost_depth * frost_ramp(i);
      Sample& s = day.samples[static_cast<std::size_t>(i)];
      s.t_min = b - cfg.spread / 2.0;
      s.t_max = b + cfg.spread / 2.0;
      s.t_dew = s.t_min - std::max(0.0, dew_draw(rng_dew));
    }
    date = date.next_day();
  }
  return out;
}

StationSeries generate_station(const ClimateConfig& cfg, int n_days,
                               std::string_view station_id) {
  return generate_station_detailed(cfg, n_days, station_id).series;
}

void write_station_csv(const StationSeries& series, std::ostream& out) {
  out << "station,date,interval,t_min,t_max,t_dew\n";
  char buf[64];
  for (const DayRecord& day : series.days) {
    const std::string date = day.date.to_string();
    for (int i = 0; i < kIntervalsPerDay; ++i) {
      const Sample& s = day.samples[static_cast<std::size_t>(i)];
      std::snprintf(buf, sizeof(buf), "%d,%.4f,%.4f,%.4f", i, s.t_min, s.t_max,
                    s.t_dew);
      out << series.station_id << ',' << date << ',' << buf << '\n';
    }
  }
  if (!out) throw DataError("failed to write station file");
}

ClimateConfig parse_climate_config(std::istream& in) {
  ClimateConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) {
      sv.remove_prefix(1);
    }
    if (sv.empty() || sv.front() == '#') continue;
    const std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("climate config line " + std::to_string(line_no) +
                      ": expected key=value");
    }
    std::string_view key = sv.substr(0, eq);
    std::string_view val = sv.substr(eq + 1);
    while (!key.empty() && key.back() == ' ') key.remove_suffix(1);
    while (!val.empty() && val.front() == ' ') val.remove_prefix(1);

    auto as_double = [&] {
      double v = 0.0;
      auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (ec != std::errc{} || p != val.data() + val.size()) {
        throw DataError("climate config line " + std::to_string(line_no) +
                        ": malformed number '" + std::string(val) + "'");
      }
      return v;
    };

    if (key == "annual_mean") cfg.annual_mean = as_double();
    else if (key == "seasonal_amplitude") cfg.seasonal_amplitude = as_double();
    else if (key == "diurnal_amplitude") cfg.diurnal_amplitude = as_double();
    else if (key == "noise_sd") cfg.noise_sd = as_double();
    else if (key == "ar_coeff") cfg.ar_coeff = as_double();
    else if (key == "dew_offset_mean") cfg.dew_offset_mean = as_double();
    else if (key == "dew_offset_sd") cfg.dew_offset_sd = as_double();
    else if (key == "spread") cfg.spread = as_double();
    else if (key == "frost_prob") cfg.frost_prob = as_double();
    else if (key == "frost_depth") cfg.frost_depth = as_double();
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_double());
    else {
      throw DataError("climate config line " + std::to_string(line_no) +
                      ": unknown key '" + std::string(key) + "'");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace frost::synthgen
