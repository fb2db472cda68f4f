#pragma once

#include <span>
#include <vector>

#include "frost/gbt/tree.hpp"
#include "frost/timeseries.hpp"

namespace frost::gbt {

/// Additive tree model: prediction = base_score + sum_k tree_weights[k] *
/// tree_k(x). tree_weights carry the DART normalization state.
struct BoostedEnsemble {
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<Tree> trees;
  std::vector<double> tree_weights;

  double predict_flat(std::span<const double> x) const;
};

/// DART weight update for one boosting round: the incoming tree enters
/// with eta/(|D|+1) (returned), and every dropped tree's multiplier is
/// scaled by |D|/(|D|+1) in place. An empty drop set leaves existing
/// weights untouched and returns eta (plain boosting round).
double dart_normalize(std::vector<double>& tree_weights,
                      const std::vector<int>& dropped, double eta);

/// Boosts n_estimators rounds with a squared-error objective
/// (g = prediction - target, h = 1) on (features, targets) rows.
/// Each round drops existing trees independently with rate_drop, fits the
/// new tree on residuals of the surviving ensemble over a fresh column
/// subsample of ceil(colsample_bytree * cols) features, then applies the
/// DART normalization. Deterministic given config.seed.
BoostedEnsemble fit_ensemble_xy(const FeatureMatrix& x,
                                std::span<const double> y,
                                const GbtConfig& cfg);

/// fit_ensemble_xy on flattened day features (144 columns) against the
/// next-day minimum targets.
BoostedEnsemble fit_ensemble(const std::vector<SupervisedPair>& train,
                             const GbtConfig& cfg);

double predict(const BoostedEnsemble& ensemble, const DayRecord& day);

namespace reference {
/// Plain gradient boosting (no dropout, all features), kept as the
/// degenerate-DART comparison path.
BoostedEnsemble fit_plain_boosting(const FeatureMatrix& x,
                                   std::span<const double> y,
                                   const GbtConfig& cfg);
}  // namespace reference

}  // namespace frost::gbt
