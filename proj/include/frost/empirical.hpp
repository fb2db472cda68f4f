#pragma once

#include <vector>

#include "frost/timeseries.hpp"

namespace frost::empirical {

/// Linear next-day-minimum model from one afternoon reading:
///   T_pred = a * t_max[afternoon] + b * t_dew[afternoon] + c
struct EmpiricalModel {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  int afternoon_interval = 29;  // 14:30 local
};

/// Least-squares fit of (a, b, c) against target_min over the training
/// pairs (Householder QR). Requires >= 3 pairs and a full-rank design;
/// throws DataError("insufficient data") / ("degenerate predictors").
EmpiricalModel fit_empirical(const std::vector<SupervisedPair>& train,
                             int afternoon_interval = 29);

double predict_empirical(const EmpiricalModel& model, const DayRecord& day);

}  // namespace frost::empirical
