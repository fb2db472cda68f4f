#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "frost/errors.hpp"

namespace frost {

inline constexpr int kIntervalsPerDay = 48;  // half-hourly samples
inline constexpr int kChannels = 3;          // t_min, t_max, t_dew
inline constexpr int kFlatFeatures = kIntervalsPerDay * kChannels;  // 144

/// One half-hour observation. Invariants (enforced at ingestion):
/// t_dew <= t_min <= t_max, all finite, each within [-60, 60] degC.
struct Sample {
  double t_min = 0.0;
  double t_max = 0.0;
  double t_dew = 0.0;

  bool operator==(const Sample&) const = default;
};

/// Calendar day, ISO formatted as YYYY-MM-DD.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days d) : value_(d) {}
  Date(int year, unsigned month, unsigned day);

  static Date parse(std::string_view iso);  // throws DataError on bad input
  std::string to_string() const;
  Date next_day() const;

  std::chrono::sys_days value() const { return value_; }
  auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days value_{};
};

/// One station-day: exactly 48 samples, index i covering the half hour
/// starting i*30 minutes after local midnight.
struct DayRecord {
  Date date;
  std::array<Sample, kIntervalsPerDay> samples{};

  bool operator==(const DayRecord&) const = default;
};

/// Ordered daily records for one station; dates strictly increasing and
/// consecutive (no gaps).
struct StationSeries {
  std::string station_id;
  std::vector<DayRecord> days;

  bool operator==(const StationSeries&) const = default;
};

/// Training example: one day of inputs, the next day's 48-step t_min
/// channel as target sequence, and its minimum as the scalar target.
struct SupervisedPair {
  DayRecord input;
  std::array<double, kIntervalsPerDay> target_seq{};
  double target_min = 0.0;
};

/// Standardization fitted on training data only. apply then invert is the
/// identity within 1e-9.
class Scaler {
 public:
  Scaler() : mean_(0.0), sd_(1.0) {}
  Scaler(double mean, double sd);  // throws DataError when sd <= 0

  double apply(double x) const { return (x - mean_) / sd_; }
  double invert(double z) const { return z * sd_ + mean_; }

  double mean() const { return mean_; }
  double sd() const { return sd_; }

  bool is_identity() const { return mean_ == 0.0 && sd_ == 1.0; }

 private:
  double mean_;
  double sd_;
};

/// Parses the station file format:
///   station,date,interval,t_min,t_max,t_dew
/// Rows sorted by (date, interval), one station per file, header required.
/// Throws DataError with the offending line number on malformed input,
/// incomplete days, non-consecutive dates, or invariant violations.
StationSeries parse_station_csv(std::istream& in);

/// One pair per consecutive day couple, chronological; |days| - 1 pairs.
/// Throws DataError("insufficient days") when the series has fewer than
/// two days.
std::vector<SupervisedPair> build_pairs(const StationSeries& series);

/// Interval-major flattening: index 3*i+0 = t_min of interval i,
/// 3*i+1 = t_max, 3*i+2 = t_dew.
std::array<double, kFlatFeatures> flatten_features(const DayRecord& day);

struct TrainTestSplit {
  std::vector<SupervisedPair> train;
  std::vector<SupervisedPair> test;
};

/// Chronological split: the last ceil(n * test_fraction) pairs form the
/// test set; no shuffling.
TrainTestSplit split_train_test(const std::vector<SupervisedPair>& pairs,
                                double test_fraction);

/// Mean/sd over every temperature value (all three channels) of the
/// training inputs. Throws DataError("zero variance") on constant data.
Scaler fit_scaler(const std::vector<SupervisedPair>& train);

}  // namespace frost
