#include "frost/nn/gru.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace frost::nn {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y += W * x, W row-major (rows x cols)
void matvec_acc(const double* w, const double* x, int rows, int cols,
                double* y) {
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    const double* row = w + static_cast<std::size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) s += row[j] * x[j];
    y[i] += s;
  }
}

// y += W^T * x, W row-major (rows x cols), x length rows, y length cols
void matvec_t_acc(const double* w, const double* x, int rows, int cols,
                  double* y) {
  for (int i = 0; i < rows; ++i) {
    const double* row = w + static_cast<std::size_t>(i) * cols;
    const double xi = x[i];
    for (int j = 0; j < cols; ++j) y[j] += row[j] * xi;
  }
}

// W += a * b^T, W row-major (rows x cols)
void outer_acc(double* w, const double* a, const double* b, int rows,
               int cols) {
  for (int i = 0; i < rows; ++i) {
    double* row = w + static_cast<std::size_t>(i) * cols;
    const double ai = a[i];
    for (int j = 0; j < cols; ++j) row[j] += ai * b[j];
  }
}

void init_uniform(std::span<double> w, int fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : w) v = dist(rng);
}

}  // namespace

GruModel::GruModel(int hidden_dim) : hidden_(hidden_dim) {
  if (hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");
  const auto h = static_cast<std::size_t>(hidden_dim);
  std::size_t off = 0;
  off_w_z_ = off; off += h * 3;
  off_w_r_ = off; off += h * 3;
  off_w_h_ = off; off += h * 3;
  off_u_z_ = off; off += h * h;
  off_u_r_ = off; off += h * h;
  off_u_h_ = off; off += h * h;
  off_b_z_ = off; off += h;
  off_b_r_ = off; off += h;
  off_b_h_ = off; off += h;
  off_ro_w_ = off; off += static_cast<std::size_t>(kIntervalsPerDay) * h;
  off_ro_b_ = off; off += kIntervalsPerDay;
  params_.assign(off, 0.0);
}

GruModel::GruModel(int hidden_dim, std::uint64_t seed) : GruModel(hidden_dim) {
  std::mt19937_64 rng(seed);
  const auto h = static_cast<std::size_t>(hidden_);
  auto mut = [&](std::size_t off, std::size_t len) {
    return std::span<double>(params_.data() + off, len);
  };
  init_uniform(mut(off_w_z_, h * 3), 3, rng);
  init_uniform(mut(off_w_r_, h * 3), 3, rng);
  init_uniform(mut(off_w_h_, h * 3), 3, rng);
  init_uniform(mut(off_u_z_, h * h), hidden_, rng);
  init_uniform(mut(off_u_r_, h * h), hidden_, rng);
  init_uniform(mut(off_u_h_, h * h), hidden_, rng);
  init_uniform(mut(off_ro_w_, static_cast<std::size_t>(kIntervalsPerDay) * h),
               hidden_, rng);
  // biases stay zero
}

GruModel GruModel::zeros(int hidden_dim) { return GruModel(hidden_dim); }

GruModel::Offsets GruModel::offsets() const {
  return {off_w_z_, off_w_r_, off_w_h_, off_u_z_, off_u_r_, off_u_h_,
          off_b_z_, off_b_r_, off_b_h_, off_ro_w_, off_ro_b_, params_.size()};
}

std::vector<double> gru_cell_forward(const GruModel& model,
                                     std::span<const double> x,
                                     std::span<const double> h_prev) {
  const int h = model.hidden_dim();
  if (x.size() != 3 || h_prev.size() != static_cast<std::size_t>(h)) {
    throw std::invalid_argument("gru_cell_forward: bad input shapes");
  }
  std::vector<double> az(model.b_z().begin(), model.b_z().end());
  std::vector<double> ar(model.b_r().begin(), model.b_r().end());
  matvec_acc(model.w_z().data(), x.data(), h, 3, az.data());
  matvec_acc(model.u_z().data(), h_prev.data(), h, h, az.data());
  matvec_acc(model.w_r().data(), x.data(), h, 3, ar.data());
  matvec_acc(model.u_r().data(), h_prev.data(), h, h, ar.data());

  std::vector<double> rh(static_cast<std::size_t>(h));
  for (int i = 0; i < h; ++i) rh[i] = sigmoid(ar[i]) * h_prev[i];

  std::vector<double> ah(model.b_h().begin(), model.b_h().end());
  matvec_acc(model.w_h().data(), x.data(), h, 3, ah.data());
  matvec_acc(model.u_h().data(), rh.data(), h, h, ah.data());

  std::vector<double> out(static_cast<std::size_t>(h));
  for (int i = 0; i < h; ++i) {
    const double z = sigmoid(az[i]);
    const double hc = std::tanh(ah[i]);
    out[i] = (1.0 - z) * h_prev[i] + z * hc;
  }
  return out;
}

Seq48 gru_forward(const GruModel& model, const FlatDay& x, GruCache* cache) {
  const int h = model.hidden_dim();
  const auto hs = static_cast<std::size_t>(h);

  std::vector<double> h_state(hs, 0.0);
  if (cache) {
    cache->h.assign((kIntervalsPerDay + 1) * hs, 0.0);
    cache->z.assign(kIntervalsPerDay * hs, 0.0);
    cache->r.assign(kIntervalsPerDay * hs, 0.0);
    cache->hc.assign(kIntervalsPerDay * hs, 0.0);
    cache->rh.assign(kIntervalsPerDay * hs, 0.0);
  }

  std::vector<double> az(hs), ar(hs), ah(hs), rh(hs);
  for (int t = 0; t < kIntervalsPerDay; ++t) {
    const double* xt = x.data() + 3 * t;

    std::copy(model.b_z().begin(), model.b_z().end(), az.begin());
    matvec_acc(model.w_z().data(), xt, h, 3, az.data());
    matvec_acc(model.u_z().data(), h_state.data(), h, h, az.data());

    std::copy(model.b_r().begin(), model.b_r().end(), ar.begin());
    matvec_acc(model.w_r().data(), xt, h, 3, ar.data());
    matvec_acc(model.u_r().data(), h_state.data(), h, h, ar.data());

    for (int i = 0; i < h; ++i) rh[i] = sigmoid(ar[i]) * h_state[i];

    std::copy(model.b_h().begin(), model.b_h().end(), ah.begin());
    matvec_acc(model.w_h().data(), xt, h, 3, ah.data());
    matvec_acc(model.u_h().data(), rh.data(), h, h, ah.data());

    for (int i = 0; i < h; ++i) {
      const double z = sigmoid(az[i]);
      const double r = sigmoid(ar[i]);
      const double hc = std::tanh(ah[i]);
      const double hn = (1.0 - z) * h_state[i] + z * hc;
      if (cache) {
        const std::size_t at = static_cast<std::size_t>(t) * hs + i;
        cache->z[at] = z;
        cache->r[at] = r;
        cache->hc[at] = hc;
        cache->rh[at] = rh[i];
        cache->h[(static_cast<std::size_t>(t) + 1) * hs + i] = hn;
      }
      h_state[i] = hn;
    }
  }

  Seq48 y{};
  std::copy(model.readout_b().begin(), model.readout_b().end(), y.begin());
  matvec_acc(model.readout_w().data(), h_state.data(), kIntervalsPerDay, h,
             y.data());
  return y;
}

void gru_backward(const GruModel& model, const FlatDay& x,
                  const GruCache& cache, const Seq48& dy,
                  std::span<double> grad) {
  const int h = model.hidden_dim();
  const auto hs = static_cast<std::size_t>(h);
  const auto off = model.offsets();
  if (grad.size() != off.total) {
    throw std::invalid_argument("gru_backward: gradient size mismatch");
  }

  double* g = grad.data();
  const double* h_final = cache.h.data() + static_cast<std::size_t>(kIntervalsPerDay) * hs;

  // readout
  outer_acc(g + off.ro_w, dy.data(), h_final, kIntervalsPerDay, h);
  for (int t = 0; t < kIntervalsPerDay; ++t) g[off.ro_b + t] += dy[t];

  std::vector<double> dh(hs, 0.0);
  matvec_t_acc(model.readout_w().data(), dy.data(), kIntervalsPerDay, h,
               dh.data());

  std::vector<double> daz(hs), dar(hs), dah(hs), drh(hs), dh_prev(hs);
  for (int t = kIntervalsPerDay - 1; t >= 0; --t) {
    const std::size_t base = static_cast<std::size_t>(t) * hs;
    const double* zt = cache.z.data() + base;
    const double* rt = cache.r.data() + base;
    const double* hct = cache.hc.data() + base;
    const double* rht = cache.rh.data() + base;
    const double* h_prev = cache.h.data() + base;  // h[t]
    const double* xt = x.data() + 3 * t;

    for (int i = 0; i < h; ++i) {
      const double dz = dh[i] * (hct[i] - h_prev[i]);
      const double dhc = dh[i] * zt[i];
      dah[i] = dhc * (1.0 - hct[i] * hct[i]);
      daz[i] = dz * zt[i] * (1.0 - zt[i]);
    }

    std::fill(drh.begin(), drh.end(), 0.0);
    matvec_t_acc(model.u_h().data(), dah.data(), h, h, drh.data());
    for (int i = 0; i < h; ++i) {
      const double dr = drh[i] * h_prev[i];
      dar[i] = dr * rt[i] * (1.0 - rt[i]);
    }

    outer_acc(g + off.w_z, daz.data(), xt, h, 3);
    outer_acc(g + off.w_r, dar.data(), xt, h, 3);
    outer_acc(g + off.w_h, dah.data(), xt, h, 3);
    outer_acc(g + off.u_z, daz.data(), h_prev, h, h);
    outer_acc(g + off.u_r, dar.data(), h_prev, h, h);
    outer_acc(g + off.u_h, dah.data(), rht, h, h);
    for (int i = 0; i < h; ++i) {
      g[off.b_z + i] += daz[i];
      g[off.b_r + i] += dar[i];
      g[off.b_h + i] += dah[i];
    }

    for (int i = 0; i < h; ++i) {
      dh_prev[i] = dh[i] * (1.0 - zt[i]) + drh[i] * rt[i];
    }
    matvec_t_acc(model.u_z().data(), daz.data(), h, h, dh_prev.data());
    matvec_t_acc(model.u_r().data(), dar.data(), h, h, dh_prev.data());
    dh.swap(dh_prev);
  }
}

}  // namespace frost::nn
