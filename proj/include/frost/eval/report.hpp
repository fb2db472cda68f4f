#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "frost/errors.hpp"
#include "frost/timeseries.hpp"

namespace frost::eval {

/// sqrt(mean((p_i - t_i)^2)), in degC.
double rmse(std::span<const double> predictions, std::span<const double> truths);

/// Naive skill reference: tomorrow's minimum predicted as today's observed
/// minimum (min over the input day's t_min channel). Returns the RMSE
/// against target_min over the pairs.
double persistence_rmse(const std::vector<SupervisedPair>& pairs);

enum class Method { empirical, gru, tcn, xgb };

std::string to_string(Method m);
Method method_from_string(const std::string& s);  // throws DataError

struct RunResult {
  std::uint64_t seed = 0;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
};

/// Multi-run RMSE summary for one (station, method); best_* = min over
/// runs, avg_* = arithmetic mean, so best <= avg.
struct EvalReport {
  std::string station_id;
  Method method = Method::empirical;
  int n_runs = 0;
  double avg_train_rmse = 0.0;
  double best_train_rmse = 0.0;
  double avg_test_rmse = 0.0;
  double best_test_rmse = 0.0;
  std::vector<RunResult> per_run;
};

/// Builds the aggregates from per-run results (throws on empty input).
EvalReport make_report(std::string station_id, Method method,
                       std::vector<RunResult> per_run);

/// One station row of the method-vs-empirical table:
/// diff = empirical_rmse - method_avg_test_rmse (positive means the
/// method beats the empirical baseline).
struct ComparisonRow {
  std::string station_id;
  double empirical_rmse = 0.0;
  std::vector<double> diffs;  // parallel to ComparisonTable::methods
};

struct ComparisonTable {
  std::vector<Method> methods;
  std::vector<ComparisonRow> rows;
};

/// Builds a single-station comparison from an empirical report and one
/// report per method. All reports must share the station id, and the
/// first argument must be the empirical method.
ComparisonTable compare_methods(const EvalReport& empirical,
                                const std::vector<EvalReport>& others);

/// Row-wise merge of single-station tables with identical method lists.
ComparisonTable merge_comparisons(const std::vector<ComparisonTable>& tables);

}  // namespace frost::eval
