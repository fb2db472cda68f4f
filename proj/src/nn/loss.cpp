#include "frost/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace frost::nn {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("loss requires equal nonzero-length sequences");
  }
}

}  // namespace

LossValue custom_loss(std::span<const double> y_pred,
                      std::span<const double> y_true) {
  check_lengths(y_pred, y_true);
  const double n = static_cast<double>(y_pred.size());
  double se = 0.0;
  for (std::size_t i = 0; i < y_pred.size(); ++i) {
    const double d = y_pred[i] - y_true[i];
    se += d * d;
  }
  const double min_pred = *std::min_element(y_pred.begin(), y_pred.end());
  const double min_true = *std::min_element(y_true.begin(), y_true.end());

  LossValue v;
  v.mse_term = se / n;
  v.min_gap_term = std::abs(min_pred - min_true);
  v.total = v.mse_term + v.min_gap_term;
  return v;
}

std::vector<double> custom_loss_grad(std::span<const double> y_pred,
                                     std::span<const double> y_true) {
  check_lengths(y_pred, y_true);
  const double n = static_cast<double>(y_pred.size());
  std::vector<double> g(y_pred.size());
  for (std::size_t i = 0; i < y_pred.size(); ++i) {
    g[i] = (2.0 / n) * (y_pred[i] - y_true[i]);
  }
  // min_element returns the first minimum: lowest-index tie-break
  const auto argmin = static_cast<std::size_t>(
      std::min_element(y_pred.begin(), y_pred.end()) - y_pred.begin());
  const double min_true = *std::min_element(y_true.begin(), y_true.end());
  const double gap = y_pred[argmin] - min_true;
  const double s = gap > 0.0 ? 1.0 : (gap < 0.0 ? -1.0 : 0.0);
  g[argmin] += s;
  return g;
}

LossValue mse_loss(std::span<const double> y_pred,
                   std::span<const double> y_true) {
  check_lengths(y_pred, y_true);
  const double n = static_cast<double>(y_pred.size());
  double se = 0.0;
  for (std::size_t i = 0; i < y_pred.size(); ++i) {
    const double d = y_pred[i] - y_true[i];
    se += d * d;
  }
  LossValue v;
  v.mse_term = se / n;
  v.min_gap_term = 0.0;
  v.total = v.mse_term;
  return v;
}

std::vector<double> mse_loss_grad(std::span<const double> y_pred,
                                  std::span<const double> y_true) {
  check_lengths(y_pred, y_true);
  const double n = static_cast<double>(y_pred.size());
  std::vector<double> g(y_pred.size());
  for (std::size_t i = 0; i < y_pred.size(); ++i) {
    g[i] = (2.0 / n) * (y_pred[i] - y_true[i]);
  }
  return g;
}

LossValue eval_loss(LossKind kind, std::span<const double> y_pred,
                    std::span<const double> y_true) {
  return kind == LossKind::mse ? mse_loss(y_pred, y_true)
                               : custom_loss(y_pred, y_true);
}

std::vector<double> eval_loss_grad(LossKind kind,
                                   std::span<const double> y_pred,
                                   std::span<const double> y_true) {
  return kind == LossKind::mse ? mse_loss_grad(y_pred, y_true)
                               : custom_loss_grad(y_pred, y_true);
}

}  // namespace frost::nn
