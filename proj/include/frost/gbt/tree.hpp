#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "frost/errors.hpp"

namespace frost::gbt {

/// Row-major feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // rows * cols

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct GbtConfig {
  int max_depth = 3;
  int n_estimators = 200;
  double colsample_bytree = 0.5;
  double rate_drop = 0.1;        // 0 disables DART dropout
  double learning_rate = 0.1;
  double lambda = 1.0;           // L2 leaf regularizer
  double gamma = 0.0;            // split penalty
  double min_child_weight = 1.0; // minimum hessian sum per child
  std::uint64_t seed = 0;

  void validate() const;  // throws DataError on out-of-range fields
};

/// Pool node; children refer to indices in Tree::nodes. Routing is strict
/// less-than: feature value < threshold goes left, otherwise right.
struct TreeNode {
  bool is_leaf = true;
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double weight = 0.0;  // leaf value

  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // preorder, root at index 0

  double eval(std::span<const double> x) const;
  bool operator==(const Tree&) const = default;
};

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

/// Second-order split gain:
///   1/2 * [GL^2/(HL+lambda) + GR^2/(HR+lambda) - (GL+GR)^2/(HL+HR+lambda)] - gamma
double split_gain(double gl, double hl, double gr, double hr, double lambda,
                  double gamma);

/// Exact greedy search over candidate thresholds (midpoints between
/// consecutive distinct sorted values) for every feature in the subset.
/// Candidates leaving a child hessian sum below min_child_weight are
/// skipped. Ties broken by (lower feature index, lower threshold).
/// Candidate scoring convention: left-side g/h sums accumulate in
/// ascending (value, node position) order and the right side is
/// total - left, so candidates inducing the same row partition score
/// bit-identically and the tie-break is well defined.
/// Parallel across features; identical result to the serial reference.
std::optional<SplitCandidate> find_best_split(
    const FeatureMatrix& x, std::span<const double> g,
    std::span<const double> h, const std::vector<int>& rows,
    const std::vector<int>& feature_subset, const GbtConfig& cfg);

/// Exact greedy tree construction; recursion stops at max_depth, when no
/// candidate has positive gain, or when min_child_weight blocks every
/// split. Leaf weight is -G/(H+lambda).
Tree fit_tree(const FeatureMatrix& x, std::span<const double> g,
              std::span<const double> h, const GbtConfig& cfg,
              const std::vector<int>& feature_subset);

namespace reference {
/// Sequential split scan with a running best, kept for testing the
/// parallel reduction.
std::optional<SplitCandidate> find_best_split(
    const FeatureMatrix& x, std::span<const double> g,
    std::span<const double> h, const std::vector<int>& rows,
    const std::vector<int>& feature_subset, const GbtConfig& cfg);
}  // namespace reference

}  // namespace frost::gbt
