#include "frost/eval/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "frost/empirical.hpp"

namespace frost::eval {

namespace {

std::vector<double> true_minima(const std::vector<SupervisedPair>& pairs) {
  std::vector<double> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = pairs[i].target_min;
  return out;
}

std::vector<DayRecord> input_days(const std::vector<SupervisedPair>& pairs) {
  std::vector<DayRecord> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = pairs[i].input;
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw DataError("median of empty list");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct SplitData {
  TrainTestSplit split;
  std::vector<double> train_truth;
  std::vector<double> test_truth;
};

SplitData prepare(const StationSeries& series, const ExperimentConfig& cfg) {
  const auto pairs = build_pairs(series);
  SplitData d;
  d.split = split_train_test(pairs, cfg.test_fraction);
  if (d.split.train.size() < 2 || d.split.test.empty()) {
    throw DataError("insufficient data: need >= 2 train and >= 1 test pairs, "
                    "got " + std::to_string(d.split.train.size()) + "/" +
                    std::to_string(d.split.test.size()));
  }
  d.train_truth = true_minima(d.split.train);
  d.test_truth = true_minima(d.split.test);
  return d;
}

template <class PredictFn>
RunResult score_run(std::uint64_t seed, const SplitData& d, PredictFn&& predict) {
  RunResult r;
  r.seed = seed;
  r.train_rmse = rmse(predict(d.split.train), d.train_truth);
  r.test_rmse = rmse(predict(d.split.test), d.test_truth);
  return r;
}

template <class Model>
std::vector<double> nn_predictions(const Model& model,
                                   const std::vector<SupervisedPair>& pairs,
                                   const Scaler& scaler) {
  return nn::predict_min_batch(model, input_days(pairs), scaler);
}

}  // namespace

EvalReport run_experiment(const StationSeries& series, Method method,
                          const ExperimentConfig& cfg) {
  if (cfg.n_runs < 1) throw DataError("n_runs must be >= 1");
  const SplitData d = prepare(series, cfg);
  const int n_runs = method == Method::empirical ? 1 : cfg.n_runs;

  std::vector<RunResult> runs;
  runs.reserve(static_cast<std::size_t>(n_runs));

  for (int r = 0; r < n_runs; ++r) {
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(r);
    try {
      switch (method) {
        case Method::empirical: {
          const auto model =
              empirical::fit_empirical(d.split.train, cfg.afternoon_interval);
          runs.push_back(score_run(seed, d, [&](const auto& pairs) {
            std::vector<double> out(pairs.size());
            for (std::size_t i = 0; i < pairs.size(); ++i) {
              out[i] = empirical::predict_empirical(model, pairs[i].input);
            }
            return out;
          }));
          break;
        }
        case Method::gru: {
          const Scaler scaler = fit_scaler(d.split.train);
          nn::TrainConfig tc = cfg.nn;
          tc.seed = seed;
          nn::GruModel model(tc.hidden_dim, seed);
          nn::train(model, d.split.train, scaler, tc);
          runs.push_back(score_run(seed, d, [&](const auto& pairs) {
            return nn_predictions(model, pairs, scaler);
          }));
          break;
        }
        case Method::tcn: {
          const Scaler scaler = fit_scaler(d.split.train);
          nn::TrainConfig tc = cfg.nn;
          tc.seed = seed;
          nn::TcnSpec spec{tc.channels, tc.kernel_size, tc.dilations};
          nn::TcnModel model(spec, seed);
          model.require_full_receptive_field();
          nn::train(model, d.split.train, scaler, tc);
          runs.push_back(score_run(seed, d, [&](const auto& pairs) {
            return nn_predictions(model, pairs, scaler);
          }));
          break;
        }
        case Method::xgb: {
          gbt::GbtConfig gc = cfg.gbt;
          gc.seed = seed;
          const auto ens = gbt::fit_ensemble(d.split.train, gc);
          runs.push_back(score_run(seed, d, [&](const auto& pairs) {
            std::vector<double> out(pairs.size());
            for (std::size_t i = 0; i < pairs.size(); ++i) {
              out[i] = gbt::predict(ens, pairs[i].input);
            }
            return out;
          }));
          break;
        }
      }
    } catch (const TrainError& e) {
      throw TrainError("run " + std::to_string(r) + ": " + e.what());
    }
  }
  return make_report(series.station_id, method, std::move(runs));
}

AblationReport run_loss_ablation(const StationSeries& series, Method method,
                                 const ExperimentConfig& cfg) {
  if (method != Method::gru && method != Method::tcn) {
    throw DataError("loss ablation supports gru and tcn only");
  }
  if (cfg.n_runs < 1) throw DataError("n_runs must be >= 1");
  const SplitData d = prepare(series, cfg);
  const Scaler scaler = fit_scaler(d.split.train);
  const auto val_days = input_days(d.split.test);

  AblationReport rep;
  rep.station_id = series.station_id;
  rep.method = method;
  rep.n_runs = cfg.n_runs;

  std::vector<double> pooled_mse, pooled_custom;

  auto gaps_of = [&](const std::vector<double>& preds) {
    std::vector<double> gaps(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      gaps[i] = std::abs(preds[i] - d.test_truth[i]);
    }
    return gaps;
  };

  for (int r = 0; r < cfg.n_runs; ++r) {
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(r);
    nn::TrainConfig tc = cfg.nn;
    tc.seed = seed;

    std::vector<double> gaps_mse, gaps_custom;
    try {
      for (nn::LossKind loss : {nn::LossKind::mse, nn::LossKind::custom}) {
        tc.loss = loss;
        std::vector<double> preds;
        if (method == Method::gru) {
          nn::GruModel model(tc.hidden_dim, seed);
          nn::train(model, d.split.train, scaler, tc);
          preds = nn::predict_min_batch(model, val_days, scaler);
        } else {
          nn::TcnSpec spec{tc.channels, tc.kernel_size, tc.dilations};
          nn::TcnModel model(spec, seed);
          model.require_full_receptive_field();
          nn::train(model, d.split.train, scaler, tc);
          preds = nn::predict_min_batch(model, val_days, scaler);
        }
        (loss == nn::LossKind::mse ? gaps_mse : gaps_custom) = gaps_of(preds);
      }
    } catch (const TrainError& e) {
      throw TrainError("run " + std::to_string(r) + ": " + e.what());
    }

    AblationRun run;
    run.seed = seed;
    run.mse_min_gap = median(gaps_mse);
    run.custom_min_gap = median(gaps_custom);
    rep.per_run.push_back(run);
    pooled_mse.insert(pooled_mse.end(), gaps_mse.begin(), gaps_mse.end());
    pooled_custom.insert(pooled_custom.end(), gaps_custom.begin(),
                         gaps_custom.end());
  }

  rep.mse_min_gap_median = median(pooled_mse);
  rep.custom_min_gap_median = median(pooled_custom);
  return rep;
}

}  // namespace frost::eval
