#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "frost/timeseries.hpp"

namespace frost::synthgen {

/// Knobs for the synthetic station generator. Seasonal and diurnal cycles
/// plus AR(1) noise, with radiation-frost cold pulses on random nights.
struct ClimateConfig {
  double annual_mean = 12.0;        // degC
  double seasonal_amplitude = 10.0; // degC
  double diurnal_amplitude = 6.0;   // degC
  double noise_sd = 1.5;            // innovation sd of the AR(1) term
  double ar_coeff = 0.7;            // in [0, 1)
  double dew_offset_mean = 2.0;     // degC, >= 0
  double dew_offset_sd = 1.0;       // degC
  double spread = 2.0;              // t_max - t_min per interval, >= 0
  double frost_prob = 0.1;          // per-night probability in [0, 1]
  double frost_depth = 6.0;         // degC, >= 0
  std::uint64_t seed = 0;

  void validate() const;  // throws DataError on out-of-range fields
};

struct GeneratedStation {
  StationSeries series;
  // frost_nights[d] == true means the night after day d drew a frost
  // event; the cold pulse lands on intervals 0..12 of day d+1.
  std::vector<bool> frost_nights;
};

/// Deterministic smooth deterministic base temperature (no noise, no frost):
///   annual_mean + seasonal_amplitude*sin(2*pi*d/365)
///               + diurnal_amplitude*sin(2*pi*i/48 - 2*pi*0.29)
double base_curve(const ClimateConfig& cfg, int day_index, int interval);

/// Cold-pulse ramp over intervals 0..12 (sin^2 shape, peak 1 at interval 6,
/// zero elsewhere).
double frost_ramp(int interval);

/// Generates n_days of half-hourly records. Deterministic given
/// (config, n_days, station_id); independent RNG streams for noise, frost
/// draws, and dew offsets, so e.g. changing frost_prob leaves the noise
/// sequence untouched. First day starts at 2020-01-01.
GeneratedStation generate_station_detailed(const ClimateConfig& cfg, int n_days,
                                           std::string_view station_id);

StationSeries generate_station(const ClimateConfig& cfg, int n_days,
                               std::string_view station_id);

/// Writes the station file format (header + rows sorted by date, interval),
/// temperatures at 4 decimals. Output re-parses to an equal series within
/// printed precision.
void write_station_csv(const StationSeries& series, std::ostream& out);

/// Parses a key=value config file ('#' comments and blank lines allowed).
/// Unknown keys are rejected.
ClimateConfig parse_climate_config(std::istream& in);

}  // namespace frost::synthgen
