#include "frost/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace frost::eval {

double rmse(std::span<const double> predictions,
            std::span<const double> truths) {
  if (predictions.size() != truths.size()) {
    throw DataError("rmse: length mismatch");
  }
  if (predictions.empty()) throw DataError("rmse: empty input");
  double se = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - truths[i];
    se += d * d;
  }
  return std::sqrt(se / static_cast<double>(predictions.size()));
}

double persistence_rmse(const std::vector<SupervisedPair>& pairs) {
  if (pairs.empty()) throw DataError("persistence_rmse: empty input");
  std::vector<double> pred(pairs.size()), truth(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    double mn = std::numeric_limits<double>::infinity();
    for (const Sample& s : pairs[i].input.samples) mn = std::min(mn, s.t_min);
    pred[i] = mn;
    truth[i] = pairs[i].target_min;
  }
  return rmse(pred, truth);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::empirical: return "empirical";
    case Method::gru: return "gru";
    case Method::tcn: return "tcn";
    case Method::xgb: return "xgb";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "empirical") return Method::empirical;
  if (s == "gru") return Method::gru;
  if (s == "tcn") return Method::tcn;
  if (s == "xgb") return Method::xgb;
  throw DataError("unknown method '" + s + "'");
}

EvalReport make_report(std::string station_id, Method method,
                       std::vector<RunResult> per_run) {
  if (per_run.empty()) throw DataError("report needs at least one run");
  EvalReport rep;
  rep.station_id = std::move(station_id);
  rep.method = method;
  rep.n_runs = static_cast<int>(per_run.size());
  rep.per_run = std::move(per_run);

  double tr_sum = 0.0, te_sum = 0.0;
  double tr_best = std::numeric_limits<double>::infinity();
  double te_best = tr_best;
  for (const RunResult& r : rep.per_run) {
    tr_sum += r.train_rmse;
    te_sum += r.test_rmse;
    tr_best = std::min(tr_best, r.train_rmse);
    te_best = std::min(te_best, r.test_rmse);
  }
  const double n = static_cast<double>(rep.per_run.size());
  rep.avg_train_rmse = tr_sum / n;
  rep.avg_test_rmse = te_sum / n;
  rep.best_train_rmse = tr_best;
  rep.best_test_rmse = te_best;
  return rep;
}

ComparisonTable compare_methods(const EvalReport& empirical,
                                const std::vector<EvalReport>& others) {
  if (empirical.method != Method::empirical) {
    throw DataError("compare_methods: first report must be the empirical "
                    "baseline");
  }
  ComparisonTable table;
  ComparisonRow row;
  row.station_id = empirical.station_id;
  row.empirical_rmse = empirical.avg_test_rmse;
  for (const EvalReport& rep : others) {
    if (rep.station_id != empirical.station_id) {
      throw DataError("compare_methods: station mismatch ('" +
                      empirical.station_id + "' vs '" + rep.station_id + "')");
    }
    table.methods.push_back(rep.method);
    row.diffs.push_back(empirical.avg_test_rmse - rep.avg_test_rmse);
  }
  table.rows.push_back(std::move(row));
  return table;
}

ComparisonTable merge_comparisons(const std::vector<ComparisonTable>& tables) {
  if (tables.empty()) return {};
  ComparisonTable out;
  out.methods = tables.front().methods;
  for (const ComparisonTable& t : tables) {
    if (t.methods != out.methods) {
      throw DataError("merge_comparisons: method lists differ");
    }
    for (const ComparisonRow& r : t.rows) out.rows.push_back(r);
  }
  return out;
}

}  // namespace frost::eval
