#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "frost/timeseries.hpp"

namespace testutil {

inline frost::DayRecord make_day(frost::Date date, double t_min, double t_max,
                                 double t_dew) {
  frost::DayRecord day;
  day.date = date;
  for (auto& s : day.samples) s = {t_min, t_max, t_dew};
  return day;
}

// day where sample i = (base + i*step, base + i*step + 2, base + i*step - 2)
inline frost::DayRecord make_ramp_day(frost::Date date, double base,
                                      double step) {
  frost::DayRecord day;
  day.date = date;
  for (int i = 0; i < frost::kIntervalsPerDay; ++i) {
    const double v = base + step * i;
    day.samples[static_cast<std::size_t>(i)] = {v, v + 2.0, v - 2.0};
  }
  return day;
}

inline frost::StationSeries make_series(int n_days, double base = 5.0) {
  frost::StationSeries s;
  s.station_id = "test";
  frost::Date date(2021, 3, 1);
  for (int d = 0; d < n_days; ++d) {
    s.days.push_back(make_ramp_day(date, base + 0.1 * d, 0.05));
    date = date.next_day();
  }
  return s;
}

// random physically-valid day
inline frost::DayRecord random_day(std::mt19937_64& rng, frost::Date date) {
  std::uniform_real_distribution<double> base(-15.0, 25.0);
  std::uniform_real_distribution<double> gap(0.0, 5.0);
  frost::DayRecord day;
  day.date = date;
  for (auto& s : day.samples) {
    const double mn = base(rng);
    s.t_min = mn;
    s.t_max = mn + gap(rng);
    s.t_dew = mn - gap(rng);
  }
  return day;
}

inline frost::SupervisedPair make_supervised(const frost::DayRecord& input,
                                             const frost::DayRecord& next) {
  frost::SupervisedPair p;
  p.input = input;
  double mn = 1e300;
  for (int i = 0; i < frost::kIntervalsPerDay; ++i) {
    p.target_seq[static_cast<std::size_t>(i)] =
        next.samples[static_cast<std::size_t>(i)].t_min;
    mn = std::min(mn, p.target_seq[static_cast<std::size_t>(i)]);
  }
  p.target_min = mn;
  return p;
}

inline std::vector<frost::SupervisedPair> random_pairs(std::mt19937_64& rng,
                                                       int n) {
  std::vector<frost::SupervisedPair> out;
  frost::Date date(2021, 6, 1);
  frost::DayRecord prev = random_day(rng, date);
  for (int i = 0; i < n; ++i) {
    date = date.next_day();
    frost::DayRecord next = random_day(rng, date);
    out.push_back(make_supervised(prev, next));
    prev = next;
  }
  return out;
}

}  // namespace testutil
