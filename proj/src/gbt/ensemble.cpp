#include "frost/gbt/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace frost::gbt {

namespace {

FeatureMatrix features_from_pairs(const std::vector<SupervisedPair>& pairs) {
  FeatureMatrix x;
  x.rows = pairs.size();
  x.cols = kFlatFeatures;
  x.values.resize(x.rows * x.cols);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto flat = flatten_features(pairs[i].input);
    std::copy(flat.begin(), flat.end(), x.values.begin() + static_cast<long>(i * x.cols));
  }
  return x;
}

std::vector<int> all_features(std::size_t cols) {
  std::vector<int> fs(cols);
  std::iota(fs.begin(), fs.end(), 0);
  return fs;
}

// ceil(colsample * cols) distinct features, sorted ascending so the split
// tie-break sees them in original index order
std::vector<int> sample_features(std::size_t cols, double colsample,
                                 std::mt19937_64& rng) {
  const auto m = static_cast<std::size_t>(
      std::ceil(colsample * static_cast<double>(cols)));
  std::vector<int> pool = all_features(cols);
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, cols - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

double BoostedEnsemble::predict_flat(std::span<const double> x) const {
  double s = base_score;
  for (std::size_t k = 0; k < trees.size(); ++k) {
    s += tree_weights[k] * trees[k].eval(x);
  }
  return s;
}

double dart_normalize(std::vector<double>& tree_weights,
                      const std::vector<int>& dropped, double eta) {
  if (dropped.empty()) return eta;
  const double u = static_cast<double>(dropped.size());
  for (int k : dropped) {
    tree_weights[static_cast<std::size_t>(k)] *= u / (u + 1.0);
  }
  return eta / (u + 1.0);
}

BoostedEnsemble fit_ensemble_xy(const FeatureMatrix& x,
                                std::span<const double> y,
                                const GbtConfig& cfg) {
  cfg.validate();
  if (x.rows == 0 || y.size() != x.rows) {
    throw DataError("fit_ensemble: empty data or target length mismatch");
  }

  const std::size_t n = x.rows;
  BoostedEnsemble ens;
  ens.learning_rate = cfg.learning_rate;
  ens.base_score = std::accumulate(y.begin(), y.end(), 0.0) /
                   static_cast<double>(n);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // unweighted per-tree outputs on the training rows
  std::vector<std::vector<double>> outputs;
  std::vector<double> g(n), h(n, 1.0), pred(n);
  std::vector<int> dropped;

  for (int round = 0; round < cfg.n_estimators; ++round) {
    dropped.clear();
    if (cfg.rate_drop > 0.0) {
      for (std::size_t k = 0; k < ens.trees.size(); ++k) {
        if (unit(rng) < cfg.rate_drop) dropped.push_back(static_cast<int>(k));
      }
    }

    // residuals against the ensemble minus the drop set
    std::fill(pred.begin(), pred.end(), ens.base_score);
    std::size_t di = 0;
    for (std::size_t k = 0; k < ens.trees.size(); ++k) {
      if (di < dropped.size() && static_cast<std::size_t>(dropped[di]) == k) {
        ++di;
        continue;
      }
      const double w = ens.tree_weights[k];
      const std::vector<double>& out = outputs[k];
      for (std::size_t i = 0; i < n; ++i) pred[i] += w * out[i];
    }
    for (std::size_t i = 0; i < n; ++i) g[i] = pred[i] - y[i];

    const std::vector<int> subset =
        cfg.colsample_bytree < 1.0 ? sample_features(x.cols, cfg.colsample_bytree, rng)
                                   : all_features(x.cols);
    Tree tree = fit_tree(x, g, h, cfg, subset);

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = tree.eval(std::span<const double>(
          x.values.data() + i * x.cols, x.cols));
    }

    const double w_new = dart_normalize(ens.tree_weights, dropped,
                                        cfg.learning_rate);
    ens.trees.push_back(std::move(tree));
    ens.tree_weights.push_back(w_new);
    outputs.push_back(std::move(out));
  }
  return ens;
}

BoostedEnsemble fit_ensemble(const std::vector<SupervisedPair>& train,
                             const GbtConfig& cfg) {
  if (train.empty()) throw DataError("fit_ensemble: no training pairs");
  const FeatureMatrix x = features_from_pairs(train);
  std::vector<double> y(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) y[i] = train[i].target_min;
  return fit_ensemble_xy(x, y, cfg);
}

double predict(const BoostedEnsemble& ensemble, const DayRecord& day) {
  const auto flat = flatten_features(day);
  return ensemble.predict_flat(flat);
}

namespace reference {

BoostedEnsemble fit_plain_boosting(const FeatureMatrix& x,
                                   std::span<const double> y,
                                   const GbtConfig& cfg) {
  cfg.validate();
  if (x.rows == 0 || y.size() != x.rows) {
    throw DataError("fit_plain_boosting: empty data or target length mismatch");
  }
  const std::size_t n = x.rows;
  BoostedEnsemble ens;
  ens.learning_rate = cfg.learning_rate;
  ens.base_score = std::accumulate(y.begin(), y.end(), 0.0) /
                   static_cast<double>(n);

  const std::vector<int> subset = all_features(x.cols);
  std::vector<std::vector<double>> outputs;
  std::vector<double> g(n), h(n, 1.0), pred(n);

  for (int round = 0; round < cfg.n_estimators; ++round) {
    std::fill(pred.begin(), pred.end(), ens.base_score);
    for (std::size_t k = 0; k < ens.trees.size(); ++k) {
      const double w = ens.tree_weights[k];
      for (std::size_t i = 0; i < n; ++i) pred[i] += w * outputs[k][i];
    }
    for (std::size_t i = 0; i < n; ++i) g[i] = pred[i] - y[i];

    Tree tree = fit_tree(x, g, h, cfg, subset);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = tree.eval(std::span<const double>(
          x.values.data() + i * x.cols, x.cols));
    }
    ens.trees.push_back(std::move(tree));
    ens.tree_weights.push_back(cfg.learning_rate);
    outputs.push_back(std::move(out));
  }
  return ens;
}

}  // namespace reference

}  // namespace frost::gbt
