#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "frost/nn/gru.hpp"
#include "frost/nn/loss.hpp"
#include "frost/nn/tcn.hpp"
#include "frost/timeseries.hpp"

namespace frost::nn {

enum class OptimizerKind { sgd, adam };

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 1e-3;
  int batch_size = 32;
  OptimizerKind optimizer = OptimizerKind::adam;
  AdamParams adam;
  LossKind loss = LossKind::custom;
  std::optional<double> grad_clip = 5.0;  // global-norm clip; nullopt disables
  std::uint64_t seed = 0;

  // architecture knobs
  int hidden_dim = 64;                      // GRU
  int channels = 32;                        // TCN
  int kernel_size = 3;                      // TCN
  std::vector<int> dilations = {1, 2, 4, 8};  // TCN

  void validate() const;  // throws DataError on non-positive fields
};

/// Mean loss and mean parameter gradient over a set of pairs. Inputs are
/// standardized with the scaler; model outputs are mapped back to degC
/// before the loss, so losses and gradients are in degC units.
struct BatchResult {
  LossValue loss;                    // mean of per-pair loss values
  std::vector<double> grad;          // mean gradient, flat parameter order
  std::vector<LossValue> per_pair;   // parallel to the batch index list
};

/// Parallel kernel: per-pair gradients computed concurrently into disjoint
/// slots, then reduced in pair order (bit-equal to the serial reference).
BatchResult batch_gradient(const GruModel& model,
                           const std::vector<FlatDay>& inputs_std,
                           const std::vector<Seq48>& targets,
                           const std::vector<std::size_t>& batch,
                           const Scaler& scaler, LossKind loss);
BatchResult batch_gradient(const TcnModel& model,
                           const std::vector<FlatDay>& inputs_std,
                           const std::vector<Seq48>& targets,
                           const std::vector<std::size_t>& batch,
                           const Scaler& scaler, LossKind loss);

namespace reference {
/// Straightforward sequential accumulation, kept as the comparison point
/// for the parallel kernel.
BatchResult batch_gradient(const GruModel& model,
                           const std::vector<FlatDay>& inputs_std,
                           const std::vector<Seq48>& targets,
                           const std::vector<std::size_t>& batch,
                           const Scaler& scaler, LossKind loss);
BatchResult batch_gradient(const TcnModel& model,
                           const std::vector<FlatDay>& inputs_std,
                           const std::vector<Seq48>& targets,
                           const std::vector<std::size_t>& batch,
                           const Scaler& scaler, LossKind loss);
}  // namespace reference

/// Minibatch gradient descent on the configured loss. Shuffles pair order
/// each epoch with the config seed, deterministic end to end. Returns the
/// per-epoch mean training loss (degC units), length == epochs.
/// Throws TrainError naming (epoch, batch) when the loss turns non-finite.
std::vector<double> train(GruModel& model,
                          const std::vector<SupervisedPair>& pairs,
                          const Scaler& scaler, const TrainConfig& cfg);
std::vector<double> train(TcnModel& model,
                          const std::vector<SupervisedPair>& pairs,
                          const Scaler& scaler, const TrainConfig& cfg);

/// Max relative error between analytic and central-finite-difference
/// parameter gradients of the configured loss on one pair:
///   max_p |g_a - g_n| / max(1e-8, |g_a| + |g_n|)
double grad_check(const GruModel& model, const SupervisedPair& pair,
                  const Scaler& scaler, LossKind loss, double epsilon);
double grad_check(const TcnModel& model, const SupervisedPair& pair,
                  const Scaler& scaler, LossKind loss, double epsilon);

/// Forward pass on the standardized day, outputs inverted to degC, min
/// over the 48 de-standardized values.
double predict_min(const GruModel& model, const DayRecord& day,
                   const Scaler& scaler);
double predict_min(const TcnModel& model, const DayRecord& day,
                   const Scaler& scaler);

/// Standardizes all three channels of a day into the flat interval-major
/// layout the sequence models consume.
FlatDay standardize_day(const DayRecord& day, const Scaler& scaler);

/// predict_min for a list of days; parallel over days.
std::vector<double> predict_min_batch(const GruModel& model,
                                      const std::vector<DayRecord>& days,
                                      const Scaler& scaler);
std::vector<double> predict_min_batch(const TcnModel& model,
                                      const std::vector<DayRecord>& days,
                                      const Scaler& scaler);

}  // namespace frost::nn
