#include "frost/gbt/tree.hpp"

#include <algorithm>
#include <cmath>

#include "frost/parallel.hpp"

namespace frost::gbt {

namespace {

// Best candidate for a single feature, or nullopt when no admissible
// split exists. Scanning ascending thresholds with a strict > comparison
// keeps the lowest threshold among equal-gain candidates.
std::optional<SplitCandidate> scan_feature(const FeatureMatrix& x,
                                           std::span<const double> g,
                                           std::span<const double> h,
                                           const std::vector<int>& rows,
                                           int feature, const GbtConfig& cfg) {
  struct Entry {
    double value, g, h;
    int pos;  // position in the node row list, for a fully ordered sort
  };
  std::vector<Entry> entries;
  entries.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<std::size_t>(rows[i]);
    entries.push_back({x.at(r, static_cast<std::size_t>(feature)), g[r], h[r],
                       static_cast<int>(i)});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.value < b.value || (a.value == b.value && a.pos < b.pos);
  });

  double gtot = 0.0, htot = 0.0;
  for (const Entry& e : entries) {
    gtot += e.g;
    htot += e.h;
  }

  std::optional<SplitCandidate> best;
  double gl = 0.0, hl = 0.0;
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
    gl += entries[i].g;
    hl += entries[i].h;
    if (entries[i].value == entries[i + 1].value) continue;
    const double thr = (entries[i].value + entries[i + 1].value) * 0.5;
    // midpoint of adjacent floats can round onto an endpoint; such a
    // threshold would not reproduce the prefix partition under strict <
    if (!(thr > entries[i].value && thr <= entries[i + 1].value)) continue;
    const double gr = gtot - gl;
    const double hr = htot - hl;
    if (hl < cfg.min_child_weight || hr < cfg.min_child_weight) continue;
    const double gain = split_gain(gl, hl, gr, hr, cfg.lambda, cfg.gamma);
    if (!best || gain > best->gain) {
      best = SplitCandidate{feature, thr, gain};
    }
  }
  return best;
}

// candidate a beats b under (higher gain, lower feature, lower threshold)
bool better(const SplitCandidate& a, const SplitCandidate& b) {
  if (a.gain != b.gain) return a.gain > b.gain;
  if (a.feature != b.feature) return a.feature < b.feature;
  return a.threshold < b.threshold;
}

struct TreeBuilder {
  const FeatureMatrix& x;
  std::span<const double> g;
  std::span<const double> h;
  const GbtConfig& cfg;
  const std::vector<int>& subset;
  std::vector<TreeNode> nodes;

  int build(const std::vector<int>& rows, int depth) {
    double gsum = 0.0, hsum = 0.0;
    for (int r : rows) {
      gsum += g[static_cast<std::size_t>(r)];
      hsum += h[static_cast<std::size_t>(r)];
    }
    const double leaf_weight = -gsum / (hsum + cfg.lambda);

    const int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[static_cast<std::size_t>(idx)].weight = leaf_weight;

    if (depth >= cfg.max_depth || rows.size() < 2) return idx;
    const auto best = find_best_split(x, g, h, rows, subset, cfg);
    if (!best || best->gain <= 0.0) return idx;

    std::vector<int> left_rows, right_rows;
    for (int r : rows) {
      if (x.at(static_cast<std::size_t>(r),
               static_cast<std::size_t>(best->feature)) < best->threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }

    nodes[static_cast<std::size_t>(idx)].is_leaf = false;
    nodes[static_cast<std::size_t>(idx)].feature = best->feature;
    nodes[static_cast<std::size_t>(idx)].threshold = best->threshold;
    nodes[static_cast<std::size_t>(idx)].weight = 0.0;
    const int left = build(left_rows, depth + 1);
    nodes[static_cast<std::size_t>(idx)].left = left;
    const int right = build(right_rows, depth + 1);
    nodes[static_cast<std::size_t>(idx)].right = right;
    return idx;
  }
};

}  // namespace

void GbtConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DataError(std::string("invalid gbt config: ") + what);
  };
  require(max_depth >= 0, "max_depth must be >= 0");
  require(n_estimators >= 0, "n_estimators must be >= 0");
  require(colsample_bytree > 0.0 && colsample_bytree <= 1.0,
          "colsample_bytree must lie in (0, 1]");
  // rate_drop 0 turns DART into plain boosting
  require(rate_drop >= 0.0 && rate_drop <= 1.0,
          "rate_drop must lie in [0, 1]");
  require(learning_rate > 0.0 && std::isfinite(learning_rate),
          "learning_rate must be positive");
  require(lambda >= 0.0, "lambda must be >= 0");
  require(gamma >= 0.0, "gamma must be >= 0");
  require(min_child_weight >= 0.0, "min_child_weight must be >= 0");
}

double Tree::eval(std::span<const double> x) const {
  const TreeNode* node = &nodes[0];
  while (!node->is_leaf) {
    const double v = x[static_cast<std::size_t>(node->feature)];
    node = &nodes[static_cast<std::size_t>(v < node->threshold ? node->left
                                                               : node->right)];
  }
  return node->weight;
}

double split_gain(double gl, double hl, double gr, double hr, double lambda,
                  double gamma) {
  const double parent = (gl + gr) * (gl + gr) / (hl + hr + lambda);
  return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent) -
         gamma;
}

std::optional<SplitCandidate> find_best_split(
    const FeatureMatrix& x, std::span<const double> g,
    std::span<const double> h, const std::vector<int>& rows,
    const std::vector<int>& feature_subset, const GbtConfig& cfg) {
  std::vector<std::optional<SplitCandidate>> per_feature(feature_subset.size());
  parallel::for_each_index(feature_subset.size(), [&](std::size_t j) {
    per_feature[j] = scan_feature(x, g, h, rows, feature_subset[j], cfg);
  });

  std::optional<SplitCandidate> best;
  for (const auto& cand : per_feature) {  // reduce in subset order
    if (cand && (!best || better(*cand, *best))) best = cand;
  }
  return best;
}

Tree fit_tree(const FeatureMatrix& x, std::span<const double> g,
              std::span<const double> h, const GbtConfig& cfg,
              const std::vector<int>& feature_subset) {
  if (x.rows == 0 || g.size() != x.rows || h.size() != x.rows) {
    throw DataError("fit_tree: empty data or mismatched gradient lengths");
  }
  if (feature_subset.empty()) {
    throw DataError("fit_tree: feature subset must not be empty");
  }
  for (int f : feature_subset) {
    if (f < 0 || static_cast<std::size_t>(f) >= x.cols) {
      throw DataError("fit_tree: feature index out of range");
    }
  }

  std::vector<int> rows(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) rows[i] = static_cast<int>(i);

  TreeBuilder builder{x, g, h, cfg, feature_subset, {}};
  builder.build(rows, 0);
  Tree t;
  t.nodes = std::move(builder.nodes);
  return t;
}

namespace reference {

std::optional<SplitCandidate> find_best_split(
    const FeatureMatrix& x, std::span<const double> g,
    std::span<const double> h, const std::vector<int>& rows,
    const std::vector<int>& feature_subset, const GbtConfig& cfg) {
  std::optional<SplitCandidate> best;
  for (int f : feature_subset) {
    const auto cand = scan_feature(x, g, h, rows, f, cfg);
    if (cand && (!best || better(*cand, *best))) best = cand;
  }
  return best;
}

}  // namespace reference

}  // namespace frost::gbt
