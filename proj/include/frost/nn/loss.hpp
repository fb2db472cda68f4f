#pragma once

#include <span>
#include <vector>

namespace frost::nn {

enum class LossKind { mse, custom };

/// total = mse_term + min_gap_term. For plain MSE the min-gap term is 0.
struct LossValue {
  double total = 0.0;
  double mse_term = 0.0;
  double min_gap_term = 0.0;
};

/// Mean squared error plus the absolute gap between sequence minima:
///   (1/n) * sum_i (y_pred_i - y_true_i)^2 + |min(y_pred) - min(y_true)|
LossValue custom_loss(std::span<const double> y_pred,
                      std::span<const double> y_true);

/// Subgradient of custom_loss w.r.t. y_pred:
///   g_i = (2/n)(y_pred_i - y_true_i) + s * [i == argmin(y_pred)]
/// with s = sign(min(y_pred) - min(y_true)), sign(0) = 0, and argmin ties
/// broken by lowest index.
std::vector<double> custom_loss_grad(std::span<const double> y_pred,
                                     std::span<const double> y_true);

LossValue mse_loss(std::span<const double> y_pred,
                   std::span<const double> y_true);

std::vector<double> mse_loss_grad(std::span<const double> y_pred,
                                  std::span<const double> y_true);

LossValue eval_loss(LossKind kind, std::span<const double> y_pred,
                    std::span<const double> y_true);

std::vector<double> eval_loss_grad(LossKind kind, std::span<const double> y_pred,
                                   std::span<const double> y_true);

}  // namespace frost::nn
