#include "frost/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>

namespace frost {

namespace {

constexpr double kMinPlausible = -60.0;
constexpr double kMaxPlausible = 60.0;

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line_no, const char* name) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    fail_line(line_no, std::string("malformed ") + name + " value '" +
                           std::string(s) + "'");
  }
  return v;
}

long parse_int(std::string_view s, std::size_t line_no, const char* name) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail_line(line_no, std::string("malformed ") + name + " value '" +
                           std::string(s) + "'");
  }
  return v;
}

void validate_sample(const Sample& s, std::size_t line_no) {
  const double vals[3] = {s.t_min, s.t_max, s.t_dew};
  for (double v : vals) {
    if (!std::isfinite(v)) fail_line(line_no, "non-finite temperature");
    if (v < kMinPlausible || v > kMaxPlausible) {
      fail_line(line_no, "temperature outside plausible range [-60, 60]");
    }
  }
  if (s.t_min > s.t_max) {
    fail_line(line_no, "minimum temperature exceeds maximum temperature");
  }
  if (s.t_dew > s.t_min) {
    fail_line(line_no, "dew point exceeds minimum temperature");
  }
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year},
                                  std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok()) throw DataError("invalid calendar date");
  value_ = std::chrono::sys_days{ymd};
}

Date Date::parse(std::string_view iso) {
  // YYYY-MM-DD, fixed width
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
    throw DataError("malformed date '" + std::string(iso) +
                    "' (expected YYYY-MM-DD)");
  }
  auto num = [&](std::size_t pos, std::size_t len) -> int {
    int v = 0;
    auto [ptr, ec] = std::from_chars(iso.data() + pos, iso.data() + pos + len, v);
    if (ec != std::errc{} || ptr != iso.data() + pos + len) {
      throw DataError("malformed date '" + std::string(iso) + "'");
    }
    return v;
  };
  int y = num(0, 4);
  int m = num(5, 2);
  int d = num(8, 2);
  return Date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::to_string() const {
  std::chrono::year_month_day ymd{value_};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

Date Date::next_day() const { return Date(value_ + std::chrono::days{1}); }

Scaler::Scaler(double mean, double sd) : mean_(mean), sd_(sd) {
  if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean)) {
    throw DataError("scaler requires finite mean and sd > 0");
  }
}

StationSeries parse_station_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw DataError("empty station file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "station,date,interval,t_min,t_max,t_dew") {
    fail_line(line_no, "bad header (expected "
                       "'station,date,interval,t_min,t_max,t_dew')");
  }

  StationSeries series;
  DayRecord current;
  int next_interval = 0;  // interval expected for the current day
  bool have_day = false;

  auto finish_day = [&](std::size_t at_line) {
    if (next_interval != kIntervalsPerDay) {
      fail_line(at_line, "incomplete day " + current.date.to_string() + " (" +
                             std::to_string(next_interval) + " of 48 intervals)");
    }
    if (!series.days.empty() &&
        current.date != series.days.back().date.next_day()) {
      fail_line(at_line, "non-consecutive dates: " +
                             series.days.back().date.to_string() + " -> " +
                             current.date.to_string());
    }
    series.days.push_back(current);
    next_interval = 0;
    have_day = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    auto fields = split_fields(line);
    if (fields.size() != 6) {
      fail_line(line_no, "expected 6 fields, got " +
                             std::to_string(fields.size()));
    }

    std::string station(fields[0]);
    if (series.station_id.empty() && series.days.empty() && !have_day) {
      series.station_id = station;
    } else if (station != series.station_id) {
      fail_line(line_no, "multiple stations in one file ('" +
                             series.station_id + "' vs '" + station + "')");
    }

    Date date;
    try {
      date = Date::parse(fields[1]);
    } catch (const DataError& e) {
      fail_line(line_no, e.what());
    }
    long interval = parse_int(fields[2], line_no, "interval");
    if (interval < 0 || interval >= kIntervalsPerDay) {
      fail_line(line_no, "interval out of range [0, 47]");
    }

    Sample s;
    s.t_min = parse_double(fields[3], line_no, "t_min");
    s.t_max = parse_double(fields[4], line_no, "t_max");
    s.t_dew = parse_double(fields[5], line_no, "t_dew");
    validate_sample(s, line_no);

    if (have_day && date != current.date) finish_day(line_no);

    if (!have_day) {
      current.date = date;
      have_day = true;
    }
    if (interval != next_interval) {
      fail_line(line_no, "out-of-order interval " + std::to_string(interval) +
                             " (expected " + std::to_string(next_interval) + ")");
    }
    current.samples[static_cast<std::size_t>(interval)] = s;
    ++next_interval;
  }

  if (have_day) finish_day(line_no + 1);
  if (series.days.empty()) throw DataError("station file contains no data rows");
  return series;
}

std::vector<SupervisedPair> build_pairs(const StationSeries& series) {
  if (series.days.size() < 2) {
    throw DataError("insufficient days: need at least 2, got " +
                    std::to_string(series.days.size()));
  }
  std::vector<SupervisedPair> pairs;
  pairs.reserve(series.days.size() - 1);
  for (std::size_t d = 0; d + 1 < series.days.size(); ++d) {
    SupervisedPair p;
    p.input = series.days[d];
    const DayRecord& next = series.days[d + 1];
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kIntervalsPerDay; ++i) {
      p.target_seq[static_cast<std::size_t>(i)] =
          next.samples[static_cast<std::size_t>(i)].t_min;
      mn = std::min(mn, next.samples[static_cast<std::size_t>(i)].t_min);
    }
    p.target_min = mn;
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::array<double, kFlatFeatures> flatten_features(const DayRecord& day) {
  std::array<double, kFlatFeatures> out{};
  for (int i = 0; i < kIntervalsPerDay; ++i) {
    const Sample& s = day.samples[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(3 * i + 0)] = s.t_min;
    out[static_cast<std::size_t>(3 * i + 1)] = s.t_max;
    out[static_cast<std::size_t>(3 * i + 2)] = s.t_dew;
  }
  return out;
}

TrainTestSplit split_train_test(const std::vector<SupervisedPair>& pairs,
                                double test_fraction) {
  if (pairs.empty()) throw DataError("cannot split empty pair list");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("test fraction must lie in (0, 1)");
  }
  const std::size_t n = pairs.size();
  auto n_test = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * test_fraction));
  n_test = std::min(n_test, n);
  const std::size_t n_train = n - n_test;

  TrainTestSplit out;
  out.train.assign(pairs.begin(), pairs.begin() + static_cast<long>(n_train));
  out.test.assign(pairs.begin() + static_cast<long>(n_train), pairs.end());
  return out;
}

Scaler fit_scaler(const std::vector<SupervisedPair>& train) {
  if (train.empty()) throw DataError("cannot fit scaler on empty training set");

  double sum = 0.0;
  std::size_t count = 0;
  for (const SupervisedPair& p : train) {
    for (const Sample& s : p.input.samples) {
      sum += s.t_min + s.t_max + s.t_dew;
      count += 3;
    }
  }
  const double mean = sum / static_cast<double>(count);

  double ss = 0.0;
  for (const SupervisedPair& p : train) {
    for (const Sample& s : p.input.samples) {
      ss += (s.t_min - mean) * (s.t_min - mean);
      ss += (s.t_max - mean) * (s.t_max - mean);
      ss += (s.t_dew - mean) * (s.t_dew - mean);
    }
  }
  const double sd = std::sqrt(ss / static_cast<double>(count));
  if (!(sd > 0.0)) throw DataError("zero variance in training inputs");
  return Scaler(mean, sd);
}

}  // namespace frost
