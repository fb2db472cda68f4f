#include "frost/nn/tcn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "frost/errors.hpp"

namespace frost::nn {

namespace {

constexpr int kT = kIntervalsPerDay;

// out[oc][t] = bias[oc] + sum_ic sum_j w[oc][ic][j] * in[ic][t - (k-1-j)*dil]
// with zero left padding; tap j = k-1 reads the current step.
void causal_conv(const double* w, const double* bias, const double* in,
                 int in_c, int out_c, int k, int dil, double* out) {
  for (int oc = 0; oc < out_c; ++oc) {
    double* orow = out + static_cast<std::size_t>(oc) * kT;
    for (int t = 0; t < kT; ++t) orow[t] = bias[oc];
    for (int ic = 0; ic < in_c; ++ic) {
      const double* irow = in + static_cast<std::size_t>(ic) * kT;
      const double* wrow = w + (static_cast<std::size_t>(oc) * in_c + ic) * k;
      for (int j = 0; j < k; ++j) {
        const int back = (k - 1 - j) * dil;
        const double wj = wrow[j];
        if (wj == 0.0) continue;
        for (int t = back; t < kT; ++t) orow[t] += wj * irow[t - back];
      }
    }
  }
}

void conv_backward(const double* w, const double* in, const double* dout,
                   int in_c, int out_c, int k, int dil, double* dw, double* db,
                   double* din) {
  for (int oc = 0; oc < out_c; ++oc) {
    const double* drow = dout + static_cast<std::size_t>(oc) * kT;
    double s = 0.0;
    for (int t = 0; t < kT; ++t) s += drow[t];
    db[oc] += s;
    for (int ic = 0; ic < in_c; ++ic) {
      const double* irow = in + static_cast<std::size_t>(ic) * kT;
      double* dwrow = dw + (static_cast<std::size_t>(oc) * in_c + ic) * k;
      for (int j = 0; j < k; ++j) {
        const int back = (k - 1 - j) * dil;
        double acc = 0.0;
        for (int t = back; t < kT; ++t) acc += drow[t] * irow[t - back];
        dwrow[j] += acc;
      }
    }
  }
  if (din) {
    for (int ic = 0; ic < in_c; ++ic) {
      double* dirow = din + static_cast<std::size_t>(ic) * kT;
      for (int oc = 0; oc < out_c; ++oc) {
        const double* drow = dout + static_cast<std::size_t>(oc) * kT;
        const double* wrow = w + (static_cast<std::size_t>(oc) * in_c + ic) * k;
        for (int j = 0; j < k; ++j) {
          const int back = (k - 1 - j) * dil;
          const double wj = wrow[j];
          if (wj == 0.0) continue;
          for (int t = back; t < kT; ++t) dirow[t - back] += wj * drow[t];
        }
      }
    }
  }
}

void init_uniform(double* w, std::size_t len, int fan_in,
                  std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (std::size_t i = 0; i < len; ++i) w[i] = dist(rng);
}

}  // namespace

TcnModel::TcnModel(const TcnSpec& spec) : spec_(spec) {
  if (spec.channels < 1 || spec.kernel_size < 1 || spec.dilations.empty()) {
    throw std::invalid_argument("tcn spec: need channels >= 1, kernel >= 1, "
                                "at least one dilation");
  }
  for (int d : spec.dilations) {
    if (d < 1) throw std::invalid_argument("tcn spec: dilations must be >= 1");
  }
  const int c = spec.channels;
  const int k = spec.kernel_size;
  std::size_t off = 0;
  for (std::size_t b = 0; b < spec.dilations.size(); ++b) {
    BlockLayout bl;
    bl.in_c = b == 0 ? kChannels : c;
    bl.out_c = c;
    bl.dilation = spec.dilations[b];
    bl.conv1_w = off; off += static_cast<std::size_t>(bl.out_c) * bl.in_c * k;
    bl.conv1_b = off; off += static_cast<std::size_t>(bl.out_c);
    bl.conv2_w = off; off += static_cast<std::size_t>(bl.out_c) * bl.out_c * k;
    bl.conv2_b = off; off += static_cast<std::size_t>(bl.out_c);
    bl.has_proj = bl.in_c != bl.out_c;
    bl.proj_w = off;
    if (bl.has_proj) off += static_cast<std::size_t>(bl.out_c) * bl.in_c;
    blocks_.push_back(bl);
  }
  off_head_w_ = off; off += static_cast<std::size_t>(c);
  off_head_b_ = off; off += 1;
  params_.assign(off, 0.0);
}

TcnModel::TcnModel(const TcnSpec& spec, std::uint64_t seed) : TcnModel(spec) {
  std::mt19937_64 rng(seed);
  const int k = spec_.kernel_size;
  for (const BlockLayout& bl : blocks_) {
    init_uniform(params_.data() + bl.conv1_w,
                 static_cast<std::size_t>(bl.out_c) * bl.in_c * k, bl.in_c * k,
                 rng);
    init_uniform(params_.data() + bl.conv2_w,
                 static_cast<std::size_t>(bl.out_c) * bl.out_c * k,
                 bl.out_c * k, rng);
    if (bl.has_proj) {
      init_uniform(params_.data() + bl.proj_w,
                   static_cast<std::size_t>(bl.out_c) * bl.in_c, bl.in_c, rng);
    }
  }
  init_uniform(params_.data() + off_head_w_,
               static_cast<std::size_t>(spec_.channels), spec_.channels, rng);
}

TcnModel TcnModel::zeros(const TcnSpec& spec) { return TcnModel(spec); }

int TcnModel::receptive_field() const {
  const int sum = std::accumulate(spec_.dilations.begin(),
                                  spec_.dilations.end(), 0);
  return 1 + 2 * (spec_.kernel_size - 1) * sum;
}

void TcnModel::require_full_receptive_field() const {
  if (receptive_field() < kIntervalsPerDay) {
    throw DataError("tcn receptive field " + std::to_string(receptive_field()) +
                    " does not cover the 48-step day");
  }
}

Seq48 tcn_forward(const TcnModel& model, const FlatDay& x, TcnCache* cache) {
  const int k = model.spec().kernel_size;
  const double* p = model.params().data();

  // de-interleave the day into channel-major rows
  std::vector<double> cur(static_cast<std::size_t>(kChannels) * kT);
  for (int t = 0; t < kT; ++t) {
    for (int c = 0; c < kChannels; ++c) {
      cur[static_cast<std::size_t>(c) * kT + t] = x[3 * t + c];
    }
  }

  if (cache) {
    cache->inputs.clear();
    cache->a1.clear();
    cache->a2.clear();
  }

  std::vector<double> a1, r1, a2, out;
  for (const auto& bl : model.blocks()) {
    const auto out_len = static_cast<std::size_t>(bl.out_c) * kT;
    a1.assign(out_len, 0.0);
    causal_conv(p + bl.conv1_w, p + bl.conv1_b, cur.data(), bl.in_c, bl.out_c,
                k, bl.dilation, a1.data());
    r1.resize(out_len);
    for (std::size_t i = 0; i < out_len; ++i) r1[i] = std::max(a1[i], 0.0);

    a2.assign(out_len, 0.0);
    causal_conv(p + bl.conv2_w, p + bl.conv2_b, r1.data(), bl.out_c, bl.out_c,
                k, bl.dilation, a2.data());

    out.resize(out_len);
    if (bl.has_proj) {
      const double* proj = p + bl.proj_w;
      for (int oc = 0; oc < bl.out_c; ++oc) {
        double* orow = out.data() + static_cast<std::size_t>(oc) * kT;
        for (int t = 0; t < kT; ++t) {
          orow[t] = std::max(a2[static_cast<std::size_t>(oc) * kT + t], 0.0);
        }
        for (int ic = 0; ic < bl.in_c; ++ic) {
          const double w = proj[static_cast<std::size_t>(oc) * bl.in_c + ic];
          const double* irow = cur.data() + static_cast<std::size_t>(ic) * kT;
          for (int t = 0; t < kT; ++t) orow[t] += w * irow[t];
        }
      }
    } else {
      for (std::size_t i = 0; i < out_len; ++i) {
        out[i] = std::max(a2[i], 0.0) + cur[i];
      }
    }

    if (cache) {
      cache->inputs.push_back(cur);
      cache->a1.push_back(a1);
      cache->a2.push_back(a2);
    }
    cur.swap(out);
  }
  if (cache) cache->inputs.push_back(cur);  // last block's output

  Seq48 y{};
  const double* head_w = p + model.head_w_offset();
  const double head_b = p[model.head_b_offset()];
  for (int t = 0; t < kT; ++t) {
    double s = head_b;
    for (int c = 0; c < model.channels(); ++c) {
      s += head_w[c] * cur[static_cast<std::size_t>(c) * kT + t];
    }
    y[t] = s;
  }
  return y;
}

void tcn_backward(const TcnModel& model, const TcnCache& cache, const Seq48& dy,
                  std::span<double> grad) {
  if (grad.size() != model.param_count()) {
    throw std::invalid_argument("tcn_backward: gradient size mismatch");
  }
  const int k = model.spec().kernel_size;
  const int c_last = model.channels();
  const double* p = model.params().data();
  double* g = grad.data();

  const std::vector<double>& out_last = cache.inputs.back();

  // head
  std::vector<double> dcur(static_cast<std::size_t>(c_last) * kT, 0.0);
  const double* head_w = p + model.head_w_offset();
  double dhb = 0.0;
  for (int t = 0; t < kT; ++t) dhb += dy[t];
  g[model.head_b_offset()] += dhb;
  for (int c = 0; c < c_last; ++c) {
    const double* orow = out_last.data() + static_cast<std::size_t>(c) * kT;
    double dw = 0.0;
    for (int t = 0; t < kT; ++t) {
      dw += dy[t] * orow[t];
      dcur[static_cast<std::size_t>(c) * kT + t] = head_w[c] * dy[t];
    }
    g[model.head_w_offset() + static_cast<std::size_t>(c)] += dw;
  }

  std::vector<double> da2, dr1, da1, din;
  for (std::size_t bi = model.blocks().size(); bi-- > 0;) {
    const auto& bl = model.blocks()[bi];
    const std::vector<double>& in = cache.inputs[bi];
    const std::vector<double>& a1 = cache.a1[bi];
    const std::vector<double>& a2 = cache.a2[bi];
    const auto out_len = static_cast<std::size_t>(bl.out_c) * kT;

    // through the second ReLU
    da2.resize(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
      da2[i] = a2[i] > 0.0 ? dcur[i] : 0.0;
    }

    // conv2 consumed relu(a1)
    std::vector<double> r1(out_len);
    for (std::size_t i = 0; i < out_len; ++i) r1[i] = std::max(a1[i], 0.0);

    dr1.assign(out_len, 0.0);
    conv_backward(p + bl.conv2_w, r1.data(), da2.data(), bl.out_c, bl.out_c, k,
                  bl.dilation, g + bl.conv2_w, g + bl.conv2_b, dr1.data());

    da1.resize(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
      da1[i] = a1[i] > 0.0 ? dr1[i] : 0.0;
    }

    din.assign(static_cast<std::size_t>(bl.in_c) * kT, 0.0);
    conv_backward(p + bl.conv1_w, in.data(), da1.data(), bl.in_c, bl.out_c, k,
                  bl.dilation, g + bl.conv1_w, g + bl.conv1_b, din.data());

    // residual branch
    if (bl.has_proj) {
      const double* proj = p + bl.proj_w;
      double* gproj = g + bl.proj_w;
      for (int oc = 0; oc < bl.out_c; ++oc) {
        const double* drow = dcur.data() + static_cast<std::size_t>(oc) * kT;
        for (int ic = 0; ic < bl.in_c; ++ic) {
          const double* irow = in.data() + static_cast<std::size_t>(ic) * kT;
          double* dirow = din.data() + static_cast<std::size_t>(ic) * kT;
          const double w = proj[static_cast<std::size_t>(oc) * bl.in_c + ic];
          double acc = 0.0;
          for (int t = 0; t < kT; ++t) {
            acc += drow[t] * irow[t];
            dirow[t] += w * drow[t];
          }
          gproj[static_cast<std::size_t>(oc) * bl.in_c + ic] += acc;
        }
      }
    } else {
      for (std::size_t i = 0; i < out_len; ++i) din[i] += dcur[i];
    }

    dcur.swap(din);
  }
}

}  // namespace frost::nn
