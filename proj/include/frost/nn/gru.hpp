#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "frost/timeseries.hpp"

namespace frost::nn {

using FlatDay = std::array<double, kFlatFeatures>;     // 48 steps x 3 channels
using Seq48 = std::array<double, kIntervalsPerDay>;

/// Gated recurrent unit over the 48 half-hour steps of one day, with a
/// linear readout from the final hidden state to all 48 outputs.
///
/// Cell equations (logistic sigma, elementwise products):
///   z = sigma(W_z x + U_z h + b_z)
///   r = sigma(W_r x + U_r h + b_r)
///   hc = tanh(W_h x + U_h (r . h) + b_h)
///   h' = (1 - z) . h + z . hc
///
/// Parameters live in one flat vector in this order (all row-major):
///   W_z (H x 3), W_r, W_h, U_z (H x H), U_r, U_h,
///   b_z (H), b_r, b_h, readout_W (48 x H), readout_b (48)
/// The same order is used for gradients and serialization.
class GruModel {
 public:
  /// Seeded init: weights uniform in +-1/sqrt(fan_in), biases zero.
  GruModel(int hidden_dim, std::uint64_t seed);

  static GruModel zeros(int hidden_dim);

  int hidden_dim() const { return hidden_; }
  std::size_t param_count() const { return params_.size(); }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // named views into the flat parameter vector
  std::span<const double> w_z() const { return view(off_w_z_, 3 * hidden_); }
  std::span<const double> w_r() const { return view(off_w_r_, 3 * hidden_); }
  std::span<const double> w_h() const { return view(off_w_h_, 3 * hidden_); }
  std::span<const double> u_z() const { return view(off_u_z_, hidden_ * hidden_); }
  std::span<const double> u_r() const { return view(off_u_r_, hidden_ * hidden_); }
  std::span<const double> u_h() const { return view(off_u_h_, hidden_ * hidden_); }
  std::span<const double> b_z() const { return view(off_b_z_, hidden_); }
  std::span<const double> b_r() const { return view(off_b_r_, hidden_); }
  std::span<const double> b_h() const { return view(off_b_h_, hidden_); }
  std::span<const double> readout_w() const {
    return view(off_ro_w_, kIntervalsPerDay * hidden_);
  }
  std::span<double> readout_w_mut() {
    return {params_.data() + off_ro_w_,
            static_cast<std::size_t>(kIntervalsPerDay * hidden_)};
  }
  std::span<const double> readout_b() const {
    return view(off_ro_b_, kIntervalsPerDay);
  }
  std::span<double> readout_b_mut() {
    return {params_.data() + off_ro_b_,
            static_cast<std::size_t>(kIntervalsPerDay)};
  }

  struct Offsets {
    std::size_t w_z, w_r, w_h, u_z, u_r, u_h, b_z, b_r, b_h, ro_w, ro_b, total;
  };
  Offsets offsets() const;

 private:
  explicit GruModel(int hidden_dim);
  std::span<const double> view(std::size_t off, int len) const {
    return {params_.data() + off, static_cast<std::size_t>(len)};
  }

  int hidden_;
  std::size_t off_w_z_, off_w_r_, off_w_h_;
  std::size_t off_u_z_, off_u_r_, off_u_h_;
  std::size_t off_b_z_, off_b_r_, off_b_h_;
  std::size_t off_ro_w_, off_ro_b_;
  std::vector<double> params_;
};

/// Forward intermediates kept for backpropagation through time.
struct GruCache {
  std::vector<double> h;   // (49) x H, h[0] = 0
  std::vector<double> z;   // 48 x H
  std::vector<double> r;   // 48 x H
  std::vector<double> hc;  // 48 x H
  std::vector<double> rh;  // 48 x H, r . h_prev
};

/// Single cell step; x has 3 entries, h_prev has hidden_dim entries.
std::vector<double> gru_cell_forward(const GruModel& model,
                                     std::span<const double> x,
                                     std::span<const double> h_prev);

/// Runs the cell over the 48 steps of a standardized day (interval-major
/// layout, 3 channels per step) from h_0 = 0, then applies the readout.
Seq48 gru_forward(const GruModel& model, const FlatDay& x,
                  GruCache* cache = nullptr);

/// BPTT. dy is dLoss/doutput (standardized units); gradients are
/// accumulated into grad, which must have param_count() entries.
void gru_backward(const GruModel& model, const FlatDay& x,
                  const GruCache& cache, const Seq48& dy,
                  std::span<double> grad);

}  // namespace frost::nn
