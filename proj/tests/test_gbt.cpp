#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <set>

#include "frost/gbt/ensemble.hpp"
#include "frost/gbt/tree.hpp"
#include "gbt_oracle.hpp"
#include "helpers.hpp"

using namespace frost;
using namespace frost::gbt;

namespace {

// independent recursive walk for prediction checking
double walk(const Tree& t, int node, std::span<const double> x) {
  const TreeNode& n = t.nodes[static_cast<std::size_t>(node)];
  if (n.is_leaf) return n.weight;
  return x[static_cast<std::size_t>(n.feature)] < n.threshold
             ? walk(t, n.left, x)
             : walk(t, n.right, x);
}

FeatureMatrix random_matrix(std::mt19937_64& rng, std::size_t rows,
                            std::size_t cols) {
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  FeatureMatrix x;
  x.rows = rows;
  x.cols = cols;
  x.values.resize(rows * cols);
  for (double& v : x.values) v = dist(rng);
  return x;
}

double train_rmse(const BoostedEnsemble& ens, const FeatureMatrix& x,
                  std::span<const double> y) {
  double se = 0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double p = ens.predict_flat(
        std::span<const double>(x.values.data() + i * x.cols, x.cols));
    se += (p - y[i]) * (p - y[i]);
  }
  return std::sqrt(se / static_cast<double>(x.rows));
}

}  // namespace

TEST_CASE("constant gradients collapse to a single mean-residual leaf") {
  std::mt19937_64 rng(81);
  const auto x = random_matrix(rng, 20, 3);
  std::vector<double> g(20, -2.5), h(20, 1.0);
  GbtConfig cfg;
  cfg.lambda = 0.0;
  const Tree t = fit_tree(x, g, h, cfg, {0, 1, 2});
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.nodes[0].is_leaf);
  CHECK(t.nodes[0].weight == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("max_depth zero yields the regularized mean leaf") {
  std::mt19937_64 rng(82);
  const auto x = random_matrix(rng, 10, 2);
  std::vector<double> g{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, h(10, 1.0);
  GbtConfig cfg;
  cfg.max_depth = 0;
  cfg.lambda = 1.0;
  const Tree t = fit_tree(x, g, h, cfg, {0, 1});
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.nodes[0].weight == doctest::Approx(-55.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("single-feature split matches the brute-force oracle") {
  FeatureMatrix x;
  x.rows = 4;
  x.cols = 1;
  x.values = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> g{-3.0, -2.5, 4.0, 5.0}, h(4, 1.0);
  GbtConfig cfg;
  cfg.max_depth = 1;
  const Tree got = fit_tree(x, g, h, cfg, {0});
  const Tree want = testutil::oracle_tree(x, g, h, cfg, {0});
  CHECK(got == want);
  REQUIRE(!got.nodes[0].is_leaf);
  CHECK(got.nodes[0].threshold == doctest::Approx(2.5));  // between 2 and 3
}

TEST_CASE("fit_tree equals the exhaustive oracle on random datasets") {
  std::mt19937_64 rng(83);
  std::uniform_int_distribution<std::size_t> nrows(2, 50);
  std::uniform_int_distribution<std::size_t> ncols(1, 3);
  std::uniform_real_distribution<double> gdist(-5.0, 5.0);
  std::uniform_real_distribution<double> hdist(0.5, 2.0);
  for (int rep = 0; rep < 60; ++rep) {
    const auto rows = nrows(rng);
    const auto cols = ncols(rng);
    const auto x = random_matrix(rng, rows, cols);
    std::vector<double> g(rows), h(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      g[i] = gdist(rng);
      h[i] = hdist(rng);
    }
    GbtConfig cfg;
    cfg.max_depth = rep % 4;  // depths 0..3
    cfg.lambda = (rep % 2 == 0) ? 1.0 : 0.0;
    cfg.min_child_weight = (rep % 3 == 0) ? 1.0 : 0.0;
    std::vector<int> subset(cols);
    for (std::size_t c = 0; c < cols; ++c) subset[c] = static_cast<int>(c);
    CHECK(fit_tree(x, g, h, cfg, subset) == testutil::oracle_tree(x, g, h, cfg, subset));
  }
}

TEST_CASE("duplicate feature values share one threshold candidate") {
  FeatureMatrix x;
  x.rows = 6;
  x.cols = 1;
  x.values = {1.0, 1.0, 1.0, 5.0, 5.0, 5.0};
  std::vector<double> g{-1, -1, -1, 2, 2, 2}, h(6, 1.0);
  GbtConfig cfg;
  cfg.max_depth = 2;
  const Tree t = fit_tree(x, g, h, cfg, {0});
  const Tree want = testutil::oracle_tree(x, g, h, cfg, {0});
  CHECK(t == want);
  REQUIRE(!t.nodes[0].is_leaf);
  CHECK(t.nodes[0].threshold == doctest::Approx(3.0));
  // children are pure: no further candidates exist
  CHECK(t.nodes[static_cast<std::size_t>(t.nodes[0].left)].is_leaf);
  CHECK(t.nodes[static_cast<std::size_t>(t.nodes[0].right)].is_leaf);
}

TEST_CASE("min_child_weight and gamma block marginal splits") {
  FeatureMatrix x;
  x.rows = 4;
  x.cols = 1;
  x.values = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> g{-1.0, 1.0, 1.0, 1.0}, h(4, 1.0);
  GbtConfig cfg;
  cfg.max_depth = 3;
  cfg.lambda = 0.0;

  cfg.min_child_weight = 2.0;  // singleton children forbidden
  const Tree constrained = fit_tree(x, g, h, cfg, {0});
  for (const TreeNode& n : constrained.nodes) {
    if (n.is_leaf) continue;
    // the 1.5 threshold would isolate one row
    CHECK(n.threshold != doctest::Approx(1.5));
  }

  cfg.min_child_weight = 0.0;
  cfg.gamma = 1e6;  // penalty exceeds any achievable gain
  const Tree pruned = fit_tree(x, g, h, cfg, {0});
  REQUIRE(pruned.nodes.size() == 1);
  CHECK(pruned.nodes[0].is_leaf);
}

TEST_CASE("disabled dropout reproduces plain boosting bit for bit") {
  std::mt19937_64 rng(84);
  auto pairs = testutil::random_pairs(rng, 40);
  FeatureMatrix x;
  x.rows = pairs.size();
  x.cols = kFlatFeatures;
  x.values.resize(x.rows * x.cols);
  std::vector<double> y(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto flat = flatten_features(pairs[i].input);
    std::copy(flat.begin(), flat.end(),
              x.values.begin() + static_cast<long>(i * x.cols));
    y[i] = pairs[i].target_min;
  }

  GbtConfig cfg;
  cfg.n_estimators = 30;
  cfg.rate_drop = 0.0;
  cfg.colsample_bytree = 1.0;
  cfg.seed = 5;
  const BoostedEnsemble dart = fit_ensemble_xy(x, y, cfg);
  const BoostedEnsemble plain = reference::fit_plain_boosting(x, y, cfg);

  REQUIRE(dart.trees.size() == plain.trees.size());
  CHECK(dart.base_score == plain.base_score);
  CHECK(dart.tree_weights == plain.tree_weights);
  for (std::size_t k = 0; k < dart.trees.size(); ++k) {
    CHECK(dart.trees[k] == plain.trees[k]);
  }
  for (double w : dart.tree_weights) CHECK(w == cfg.learning_rate);
}

TEST_CASE("training rmse is non-increasing without dropout") {
  std::mt19937_64 rng(85);
  auto pairs = testutil::random_pairs(rng, 60);
  FeatureMatrix x;
  x.rows = pairs.size();
  x.cols = kFlatFeatures;
  x.values.resize(x.rows * x.cols);
  std::vector<double> y(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto flat = flatten_features(pairs[i].input);
    std::copy(flat.begin(), flat.end(),
              x.values.begin() + static_cast<long>(i * x.cols));
    y[i] = pairs[i].target_min;
  }
  GbtConfig cfg;
  cfg.rate_drop = 0.0;
  cfg.colsample_bytree = 1.0;
  cfg.learning_rate = 0.2;
  double prev = 1e300;
  for (int rounds : {0, 5, 10, 20, 40}) {
    cfg.n_estimators = rounds;
    const auto ens = fit_ensemble_xy(x, y, cfg);
    const double r = train_rmse(ens, x, y);
    CHECK(r <= prev + 1e-12);
    prev = r;
  }
}

TEST_CASE("forced dropout halves both multipliers after round two") {
  std::mt19937_64 rng(86);
  auto pairs = testutil::random_pairs(rng, 25);
  GbtConfig cfg;
  cfg.n_estimators = 2;
  cfg.rate_drop = 1.0;  // every existing tree always drops
  cfg.colsample_bytree = 1.0;
  cfg.seed = 9;
  const BoostedEnsemble ens = fit_ensemble(pairs, cfg);
  REQUIRE(ens.tree_weights.size() == 2);
  // round 1: empty drop set, plain entry at eta; round 2 drops tree 0:
  // |D| = 1, so tree 0 scales by 1/2 and the new tree enters at eta/2
  CHECK(ens.tree_weights[0] == cfg.learning_rate * 0.5);
  CHECK(ens.tree_weights[1] == cfg.learning_rate * 0.5);
}

TEST_CASE("dart_normalize applies the k/(k+1) rule in place") {
  std::vector<double> weights{0.3, 0.2, 0.1};
  const double w_new = dart_normalize(weights, {0, 2}, 0.3);
  CHECK(w_new == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(weights[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(weights[1] == 0.2);  // untouched
  CHECK(weights[2] == doctest::Approx(0.1 * 2.0 / 3.0).epsilon(1e-12));

  std::vector<double> untouched{0.5};
  CHECK(dart_normalize(untouched, {}, 0.4) == 0.4);
  CHECK(untouched[0] == 0.5);
}

TEST_CASE("prediction identities and the independent tree walk") {
  BoostedEnsemble empty;
  empty.base_score = 7.25;
  const auto day = testutil::make_day(Date(2021, 12, 1), 1.0, 3.0, 0.0);
  CHECK(predict(empty, day) == 7.25);

  BoostedEnsemble constant;
  constant.base_score = 1.0;
  Tree stub;
  stub.nodes.push_back(TreeNode{true, -1, 0.0, -1, -1, 2.0});
  constant.trees.push_back(stub);
  constant.tree_weights.push_back(0.25);
  CHECK(predict(constant, day) == doctest::Approx(1.5).epsilon(1e-12));

  std::mt19937_64 rng(87);
  auto pairs = testutil::random_pairs(rng, 30);
  GbtConfig cfg;
  cfg.n_estimators = 15;
  cfg.seed = 77;
  const BoostedEnsemble ens = fit_ensemble(pairs, cfg);
  for (const auto& p : pairs) {
    const auto flat = flatten_features(p.input);
    double expect = ens.base_score;
    for (std::size_t k = 0; k < ens.trees.size(); ++k) {
      expect += ens.tree_weights[k] * walk(ens.trees[k], 0, flat);
    }
    CHECK(predict(ens, p.input) == expect);
  }
}

TEST_CASE("identical config and data produce identical ensembles") {
  std::mt19937_64 rng(88);
  auto pairs = testutil::random_pairs(rng, 30);
  GbtConfig cfg;
  cfg.n_estimators = 20;
  cfg.seed = 4242;
  const BoostedEnsemble a = fit_ensemble(pairs, cfg);
  const BoostedEnsemble b = fit_ensemble(pairs, cfg);
  REQUIRE(a.trees.size() == b.trees.size());
  CHECK(a.tree_weights == b.tree_weights);
  for (std::size_t k = 0; k < a.trees.size(); ++k) CHECK(a.trees[k] == b.trees[k]);
}

TEST_CASE("trees only read valid features and route boundaries right") {
  std::mt19937_64 rng(89);
  auto pairs = testutil::random_pairs(rng, 40);
  GbtConfig cfg;
  cfg.n_estimators = 25;
  cfg.seed = 11;
  const BoostedEnsemble ens = fit_ensemble(pairs, cfg);
  for (const Tree& t : ens.trees) {
    for (const TreeNode& n : t.nodes) {
      if (n.is_leaf) continue;
      CHECK(n.feature >= 0);
      CHECK(n.feature < kFlatFeatures);
      CHECK(n.left > 0);
      CHECK(n.right > 0);
    }
  }

  // boundary: a value equal to the threshold goes right
  Tree t;
  t.nodes.push_back(TreeNode{false, 0, 2.0, 1, 2, 0.0});
  t.nodes.push_back(TreeNode{true, -1, 0.0, -1, -1, -1.0});  // left
  t.nodes.push_back(TreeNode{true, -1, 0.0, -1, -1, +1.0});  // right
  std::vector<double> at_threshold{2.0};
  CHECK(t.eval(at_threshold) == 1.0);
  std::vector<double> below{1.9999999};
  CHECK(t.eval(below) == -1.0);
}

TEST_CASE("deep ensembles overfit small training sets") {
  std::mt19937_64 rng(90);
  auto pairs = testutil::random_pairs(rng, 30);
  FeatureMatrix x;
  x.rows = pairs.size();
  x.cols = kFlatFeatures;
  x.values.resize(x.rows * x.cols);
  std::vector<double> y(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto flat = flatten_features(pairs[i].input);
    std::copy(flat.begin(), flat.end(),
              x.values.begin() + static_cast<long>(i * x.cols));
    y[i] = pairs[i].target_min;
  }
  GbtConfig cfg;
  cfg.n_estimators = 200;
  cfg.max_depth = 6;
  cfg.learning_rate = 0.3;
  cfg.rate_drop = 0.0;
  cfg.seed = 3;
  const auto ens = fit_ensemble_xy(x, y, cfg);
  CHECK(train_rmse(ens, x, y) < 0.1);
}
