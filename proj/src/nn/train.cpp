#include "frost/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "frost/errors.hpp"
#include "frost/parallel.hpp"

namespace frost::nn {

namespace {

// Dispatch shims so the training loop below can be written once.
Seq48 model_forward(const GruModel& m, const FlatDay& x, GruCache* c) {
  return gru_forward(m, x, c);
}
Seq48 model_forward(const TcnModel& m, const FlatDay& x, TcnCache* c) {
  return tcn_forward(m, x, c);
}
void model_backward(const GruModel& m, const FlatDay& x, const GruCache& c,
                    const Seq48& dy, std::span<double> g) {
  gru_backward(m, x, c, dy, g);
}
void model_backward(const TcnModel& m, const FlatDay&, const TcnCache& c,
                    const Seq48& dy, std::span<double> g) {
  tcn_backward(m, c, dy, g);
}
template <class M> struct CacheOf;
template <> struct CacheOf<GruModel> { using type = GruCache; };
template <> struct CacheOf<TcnModel> { using type = TcnCache; };

// Loss and parameter gradient for one pair, written into slot.
template <class Model>
LossValue pair_gradient(const Model& model, const FlatDay& x_std,
                        const Seq48& target, const Scaler& scaler,
                        LossKind loss, std::span<double> slot) {
  typename CacheOf<Model>::type cache;
  const Seq48 y_std = model_forward(model, x_std, &cache);

  Seq48 y_degc{};
  for (int t = 0; t < kIntervalsPerDay; ++t) y_degc[t] = scaler.invert(y_std[t]);

  const LossValue lv = eval_loss(loss, y_degc, target);
  const std::vector<double> dloss = eval_loss_grad(loss, y_degc, target);

  // chain through de-standardization: dy_std = sd * dy_degc
  Seq48 dy{};
  for (int t = 0; t < kIntervalsPerDay; ++t) dy[t] = scaler.sd() * dloss[t];

  model_backward(model, x_std, cache, dy, slot);
  return lv;
}

template <class Model>
BatchResult batch_gradient_parallel(const Model& model,
                                    const std::vector<FlatDay>& inputs,
                                    const std::vector<Seq48>& targets,
                                    const std::vector<std::size_t>& batch,
                                    const Scaler& scaler, LossKind loss) {
  const std::size_t np = model.param_count();
  const std::size_t b = batch.size();
  std::vector<std::vector<double>> slots(b);
  std::vector<LossValue> losses(b);

  parallel::for_each_index(b, [&](std::size_t i) {
    slots[i].assign(np, 0.0);
    const std::size_t p = batch[i];
    losses[i] = pair_gradient(model, inputs[p], targets[p], scaler, loss,
                              slots[i]);
  });

  BatchResult out;
  out.grad.assign(np, 0.0);
  for (std::size_t i = 0; i < b; ++i) {  // reduce in pair order
    const std::vector<double>& s = slots[i];
    for (std::size_t j = 0; j < np; ++j) out.grad[j] += s[j];
    out.loss.total += losses[i].total;
    out.loss.mse_term += losses[i].mse_term;
    out.loss.min_gap_term += losses[i].min_gap_term;
  }
  const double inv = 1.0 / static_cast<double>(b);
  for (double& v : out.grad) v *= inv;
  out.loss.total *= inv;
  out.loss.mse_term *= inv;
  out.loss.min_gap_term *= inv;
  out.per_pair = std::move(losses);
  return out;
}

template <class Model>
BatchResult batch_gradient_serial(const Model& model,
                                  const std::vector<FlatDay>& inputs,
                                  const std::vector<Seq48>& targets,
                                  const std::vector<std::size_t>& batch,
                                  const Scaler& scaler, LossKind loss) {
  const std::size_t np = model.param_count();
  BatchResult out;
  out.grad.assign(np, 0.0);
  std::vector<double> slot(np);
  for (std::size_t p : batch) {
    std::fill(slot.begin(), slot.end(), 0.0);
    const LossValue lv =
        pair_gradient(model, inputs[p], targets[p], scaler, loss, slot);
    for (std::size_t j = 0; j < np; ++j) out.grad[j] += slot[j];
    out.loss.total += lv.total;
    out.loss.mse_term += lv.mse_term;
    out.loss.min_gap_term += lv.min_gap_term;
    out.per_pair.push_back(lv);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& v : out.grad) v *= inv;
  out.loss.total *= inv;
  out.loss.mse_term *= inv;
  out.loss.min_gap_term *= inv;
  return out;
}

class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, std::size_t n_params)
      : cfg_(cfg) {
    if (cfg.optimizer == OptimizerKind::adam) {
      m_.assign(n_params, 0.0);
      v_.assign(n_params, 0.0);
    }
  }

  void step(std::vector<double>& params, std::vector<double>& grad) {
    if (cfg_.grad_clip) {
      double norm2 = 0.0;
      for (double gv : grad) norm2 += gv * gv;
      const double norm = std::sqrt(norm2);
      if (norm > *cfg_.grad_clip && norm > 0.0) {
        const double scale = *cfg_.grad_clip / norm;
        for (double& gv : grad) gv *= scale;
      }
    }
    if (cfg_.optimizer == OptimizerKind::sgd) {
      for (std::size_t j = 0; j < params.size(); ++j) {
        params[j] -= cfg_.learning_rate * grad[j];
      }
      return;
    }
    ++t_;
    const AdamParams& a = cfg_.adam;
    const double bc1 = 1.0 - std::pow(a.beta1, t_);
    const double bc2 = 1.0 - std::pow(a.beta2, t_);
    for (std::size_t j = 0; j < params.size(); ++j) {
      m_[j] = a.beta1 * m_[j] + (1.0 - a.beta1) * grad[j];
      v_[j] = a.beta2 * v_[j] + (1.0 - a.beta2) * grad[j] * grad[j];
      const double mhat = m_[j] / bc1;
      const double vhat = v_[j] / bc2;
      params[j] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + a.epsilon);
    }
  }

 private:
  TrainConfig cfg_;
  std::vector<double> m_, v_;
  int t_ = 0;
};

template <class Model>
std::vector<double> train_impl(Model& model,
                               const std::vector<SupervisedPair>& pairs,
                               const Scaler& scaler, const TrainConfig& cfg) {
  cfg.validate();
  if (pairs.empty()) throw DataError("training requires at least one pair");

  const std::size_t n = pairs.size();
  std::vector<FlatDay> inputs(n);
  std::vector<Seq48> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    inputs[i] = standardize_day(pairs[i].input, scaler);
    targets[i] = pairs[i].target_seq;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);
  Optimizer opt(cfg, model.param_count());

  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(cfg.epochs));
  const auto bs = static_cast<std::size_t>(cfg.batch_size);

  std::vector<double> pair_loss(n);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    int batch_index = 0;
    for (std::size_t start = 0; start < n; start += bs, ++batch_index) {
      const std::size_t end = std::min(start + bs, n);
      std::vector<std::size_t> batch(order.begin() + static_cast<long>(start),
                                     order.begin() + static_cast<long>(end));
      BatchResult res =
          batch_gradient_parallel(model, inputs, targets, batch, scaler,
                                  cfg.loss);
      if (!std::isfinite(res.loss.total)) {
        throw TrainError("non-finite loss at epoch " + std::to_string(epoch) +
                         ", batch " + std::to_string(batch_index));
      }
      for (std::size_t i = 0; i < batch.size(); ++i) {
        pair_loss[batch[i]] = res.per_pair[i].total;
      }
      opt.step(model.params(), res.grad);
    }
    // summed in pair order so the reported loss is shuffle-invariant
    double loss_sum = 0.0;
    for (double v : pair_loss) loss_sum += v;
    history.push_back(loss_sum / static_cast<double>(n));
  }
  return history;
}

template <class Model>
double grad_check_impl(const Model& model, const SupervisedPair& pair,
                       const Scaler& scaler, LossKind loss, double epsilon) {
  const FlatDay x = standardize_day(pair.input, scaler);
  const Seq48& target = pair.target_seq;

  std::vector<double> analytic(model.param_count(), 0.0);
  pair_gradient(model, x, target, scaler, loss, analytic);

  Model probe = model;
  auto loss_at = [&]() {
    const Seq48 y_std = model_forward(probe, x, nullptr);
    Seq48 y{};
    for (int t = 0; t < kIntervalsPerDay; ++t) y[t] = scaler.invert(y_std[t]);
    return eval_loss(loss, y, target).total;
  };

  double max_rel = 0.0;
  for (std::size_t j = 0; j < probe.param_count(); ++j) {
    const double saved = probe.params()[j];
    probe.params()[j] = saved + epsilon;
    const double up = loss_at();
    probe.params()[j] = saved - epsilon;
    const double down = loss_at();
    probe.params()[j] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double rel = std::abs(analytic[j] - numeric) /
                       std::max(1e-8, std::abs(analytic[j]) + std::abs(numeric));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

template <class Model>
double predict_min_impl(const Model& model, const DayRecord& day,
                        const Scaler& scaler) {
  const FlatDay x = standardize_day(day, scaler);
  const Seq48 y = model_forward(model, x, nullptr);
  double mn = std::numeric_limits<double>::infinity();
  for (double v : y) mn = std::min(mn, scaler.invert(v));
  return mn;
}

template <class Model>
std::vector<double> predict_min_batch_impl(const Model& model,
                                           const std::vector<DayRecord>& days,
                                           const Scaler& scaler) {
  std::vector<double> out(days.size());
  parallel::for_each_index(days.size(), [&](std::size_t i) {
    out[i] = predict_min_impl(model, days[i], scaler);
  });
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0) throw DataError("epochs must be >= 0");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw DataError("learning rate must be finite and >= 0");
  }
  if (batch_size < 1) throw DataError("batch size must be >= 1");
  if (grad_clip && !(*grad_clip > 0.0)) {
    throw DataError("gradient clip must be positive when set");
  }
  if (hidden_dim < 1) throw DataError("hidden_dim must be >= 1");
  if (channels < 1) throw DataError("channels must be >= 1");
  if (kernel_size < 1) throw DataError("kernel_size must be >= 1");
}

FlatDay standardize_day(const DayRecord& day, const Scaler& scaler) {
  FlatDay x{};
  for (int i = 0; i < kIntervalsPerDay; ++i) {
    const Sample& s = day.samples[static_cast<std::size_t>(i)];
    x[static_cast<std::size_t>(3 * i + 0)] = scaler.apply(s.t_min);
    x[static_cast<std::size_t>(3 * i + 1)] = scaler.apply(s.t_max);
    x[static_cast<std::size_t>(3 * i + 2)] = scaler.apply(s.t_dew);
  }
  return x;
}

BatchResult batch_gradient(const GruModel& model,
                           const std::vector<FlatDay>& inputs_std,
                           const std::vector<Seq48>& targets,
                           const std::vector<std::size_t>& batch,
                           const Scaler& scaler, LossKind loss) {
  return batch_gradient_parallel(model, inputs_std, targets, batch, scaler,
                                 loss);
}
BatchResult batch_gradient(const TcnModel& model,
                           const std::vector<FlatDay>& inputs_std,
                           const std::vector<Seq48>& targets,
                           const std::vector<std::size_t>& batch,
                           const Scaler& scaler, LossKind loss) {
  return batch_gradient_parallel(model, inputs_std, targets, batch, scaler,
                                 loss);
}

namespace reference {
BatchResult batch_gradient(const GruModel& model,
                           const std::vector<FlatDay>& inputs_std,
                           const std::vector<Seq48>& targets,
                           const std::vector<std::size_t>& batch,
                           const Scaler& scaler, LossKind loss) {
  return batch_gradient_serial(model, inputs_std, targets, batch, scaler,
                               loss);
}
BatchResult batch_gradient(const TcnModel& model,
                           const std::vector<FlatDay>& inputs_std,
                           const std::vector<Seq48>& targets,
                           const std::vector<std::size_t>& batch,
                           const Scaler& scaler, LossKind loss) {
  return batch_gradient_serial(model, inputs_std, targets, batch, scaler,
                               loss);
}
}  // namespace reference

std::vector<double> train(GruModel& model,
                          const std::vector<SupervisedPair>& pairs,
                          const Scaler& scaler, const TrainConfig& cfg) {
  return train_impl(model, pairs, scaler, cfg);
}
std::vector<double> train(TcnModel& model,
                          const std::vector<SupervisedPair>& pairs,
                          const Scaler& scaler, const TrainConfig& cfg) {
  return train_impl(model, pairs, scaler, cfg);
}

double grad_check(const GruModel& model, const SupervisedPair& pair,
                  const Scaler& scaler, LossKind loss, double epsilon) {
  return grad_check_impl(model, pair, scaler, loss, epsilon);
}
double grad_check(const TcnModel& model, const SupervisedPair& pair,
                  const Scaler& scaler, LossKind loss, double epsilon) {
  return grad_check_impl(model, pair, scaler, loss, epsilon);
}

double predict_min(const GruModel& model, const DayRecord& day,
                   const Scaler& scaler) {
  return predict_min_impl(model, day, scaler);
}
double predict_min(const TcnModel& model, const DayRecord& day,
                   const Scaler& scaler) {
  return predict_min_impl(model, day, scaler);
}

std::vector<double> predict_min_batch(const GruModel& model,
                                      const std::vector<DayRecord>& days,
                                      const Scaler& scaler) {
  return predict_min_batch_impl(model, days, scaler);
}
std::vector<double> predict_min_batch(const TcnModel& model,
                                      const std::vector<DayRecord>& days,
                                      const Scaler& scaler) {
  return predict_min_batch_impl(model, days, scaler);
}

}  // namespace frost::nn
