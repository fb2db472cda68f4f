#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "frost/nn/gru.hpp"  // FlatDay / Seq48 aliases

namespace frost::nn {

struct TcnSpec {
  int channels = 32;
  int kernel_size = 3;
  std::vector<int> dilations = {1, 2, 4, 8};  // one residual block each
};

/// Temporal convolutional network: a stack of residual blocks
///   causal dilated conv -> ReLU -> causal dilated conv -> ReLU,
/// added to the identity (or 1x1-projected) block input, followed by a
/// 1x1 head down to one output channel. All convolutions are left-padded
/// only, so output step t depends on input steps <= t exclusively.
///
/// Flat parameter order, block by block (row-major):
///   conv1_w (out_c x in_c x k), conv1_b (out_c),
///   conv2_w (out_c x out_c x k), conv2_b (out_c),
///   proj_w (out_c x in_c, present only when in_c != out_c)
/// then head_w (channels), head_b (1).
class TcnModel {
 public:
  TcnModel(const TcnSpec& spec, std::uint64_t seed);
  static TcnModel zeros(const TcnSpec& spec);

  const TcnSpec& spec() const { return spec_; }
  int channels() const { return spec_.channels; }
  std::size_t param_count() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  /// 1 + 2*(kernel_size-1)*sum(dilations)
  int receptive_field() const;

  /// Throws DataError unless the receptive field covers the full day.
  void require_full_receptive_field() const;

  struct BlockLayout {
    int in_c, out_c, dilation;
    std::size_t conv1_w, conv1_b, conv2_w, conv2_b, proj_w;
    bool has_proj;
  };
  const std::vector<BlockLayout>& blocks() const { return blocks_; }
  std::size_t head_w_offset() const { return off_head_w_; }
  std::size_t head_b_offset() const { return off_head_b_; }

 private:
  explicit TcnModel(const TcnSpec& spec);

  TcnSpec spec_;
  std::vector<BlockLayout> blocks_;
  std::size_t off_head_w_ = 0, off_head_b_ = 0;
  std::vector<double> params_;
};

/// Per-block forward intermediates (channel-major buffers, c*48+t).
struct TcnCache {
  std::vector<std::vector<double>> inputs;  // inputs[b] feeds block b; back() is the last block's output
  std::vector<std::vector<double>> a1;      // pre-ReLU of conv1 per block
  std::vector<std::vector<double>> a2;      // pre-ReLU of conv2 per block
};

Seq48 tcn_forward(const TcnModel& model, const FlatDay& x,
                  TcnCache* cache = nullptr);

/// dy is dLoss/doutput; gradients accumulate into grad (param_count()).
void tcn_backward(const TcnModel& model, const TcnCache& cache, const Seq48& dy,
                  std::span<double> grad);

}  // namespace frost::nn
