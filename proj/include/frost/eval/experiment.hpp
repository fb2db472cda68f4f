#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frost/eval/report.hpp"
#include "frost/gbt/ensemble.hpp"
#include "frost/nn/train.hpp"
#include "frost/timeseries.hpp"

namespace frost::eval {

struct ExperimentConfig {
  int n_runs = 10;
  double test_fraction = 0.2;
  std::uint64_t base_seed = 1;
  nn::TrainConfig nn;          // gru/tcn training knobs
  gbt::GbtConfig gbt;          // xgb knobs
  int afternoon_interval = 29; // empirical baseline reading
};

/// Multi-seed train/evaluate cycle: run r uses seed base_seed + r, trains
/// on the chronological train split, and reports train/test RMSE of
/// predicted vs. true next-day minima in degC. The empirical method is
/// deterministic, so its n_runs collapses to 1. Training aborts carry the
/// failing run index.
EvalReport run_experiment(const StationSeries& series, Method method,
                          const ExperimentConfig& cfg);

struct AblationRun {
  std::uint64_t seed = 0;
  double mse_min_gap = 0.0;     // median |min(pred) - min(true)| on validation
  double custom_min_gap = 0.0;
};

/// Paired-seed comparison of the plain-MSE loss against the custom loss:
/// for each run, the same architecture and seed are trained once per loss
/// and scored by |predicted min - true min| on the validation (test)
/// split. The headline medians pool every (run, validation pair) gap.
struct AblationReport {
  std::string station_id;
  Method method = Method::gru;
  int n_runs = 0;
  std::vector<AblationRun> per_run;
  double mse_min_gap_median = 0.0;
  double custom_min_gap_median = 0.0;
};

AblationReport run_loss_ablation(const StationSeries& series, Method method,
                                 const ExperimentConfig& cfg);

}  // namespace frost::eval
