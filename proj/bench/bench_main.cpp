// Compares the OpenMP kernels against their serial reference paths:
// split search across features, minibatch gradients across pairs, and
// batch prediction across days. Results must match bit for bit; only the
// wall time differs.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "frost/gbt/ensemble.hpp"
#include "frost/gbt/tree.hpp"
#include "frost/nn/train.hpp"
#include "frost/parallel.hpp"
#include "frost/synthgen.hpp"
#include "frost/timeseries.hpp"

using namespace frost;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const double t0 = now_seconds();
    f();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

void report(const char* name, double serial_s, double parallel_s) {
  std::printf("%-28s serial %8.2f ms   openmp %8.2f ms   speedup %.2fx\n",
              name, serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s);
}

struct Workload {
  gbt::FeatureMatrix x;
  std::vector<double> g, h;
  std::vector<int> rows, subset;
  std::vector<SupervisedPair> pairs;
  Scaler scaler;
  std::vector<nn::FlatDay> inputs;
  std::vector<nn::Seq48> targets;
  std::vector<std::size_t> batch;
  std::vector<DayRecord> days;
};

Workload build_workload() {
  synthgen::ClimateConfig cfg;
  cfg.seed = 7;
  cfg.frost_prob = 0.15;
  const StationSeries series = synthgen::generate_station(cfg, 721, "bench");
  Workload w{.x = {}, .g = {}, .h = {}, .rows = {}, .subset = {},
             .pairs = build_pairs(series), .scaler = Scaler(),
             .inputs = {}, .targets = {}, .batch = {}, .days = {}};
  w.scaler = fit_scaler(w.pairs);

  w.x.rows = w.pairs.size();
  w.x.cols = kFlatFeatures;
  w.x.values.resize(w.x.rows * w.x.cols);
  w.g.resize(w.x.rows);
  w.h.assign(w.x.rows, 1.0);
  for (std::size_t i = 0; i < w.pairs.size(); ++i) {
    const auto flat = flatten_features(w.pairs[i].input);
    std::copy(flat.begin(), flat.end(),
              w.x.values.begin() + static_cast<long>(i * w.x.cols));
    w.g[i] = w.pairs[i].target_min;
    w.rows.push_back(static_cast<int>(i));
  }
  for (int f = 0; f < kFlatFeatures; ++f) w.subset.push_back(f);

  for (std::size_t i = 0; i < 64 && i < w.pairs.size(); ++i) {
    w.inputs.push_back(nn::standardize_day(w.pairs[i].input, w.scaler));
    w.targets.push_back(w.pairs[i].target_seq);
    w.batch.push_back(i);
  }
  for (std::size_t i = 0; i < w.pairs.size(); ++i) {
    w.days.push_back(w.pairs[i].input);
  }
  return w;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", parallel::max_threads());
  const Workload w = build_workload();
  const gbt::GbtConfig gcfg;

  // split search over all 144 features at the root
  const double split_serial = time_best_of(5, [&] {
    (void)gbt::reference::find_best_split(w.x, w.g, w.h, w.rows, w.subset, gcfg);
  });
  const double split_parallel = time_best_of(5, [&] {
    (void)gbt::find_best_split(w.x, w.g, w.h, w.rows, w.subset, gcfg);
  });
  report("gbt split search (n=720)", split_serial, split_parallel);

  const nn::GruModel gru(64, 11);
  const double gru_serial = time_best_of(3, [&] {
    (void)nn::reference::batch_gradient(gru, w.inputs, w.targets, w.batch,
                                        w.scaler, nn::LossKind::custom);
  });
  const double gru_parallel = time_best_of(3, [&] {
    (void)nn::batch_gradient(gru, w.inputs, w.targets, w.batch, w.scaler,
                             nn::LossKind::custom);
  });
  report("gru batch gradient (b=64)", gru_serial, gru_parallel);

  const nn::TcnModel tcn(nn::TcnSpec{32, 3, {1, 2, 4, 8}}, 12);
  const double tcn_serial = time_best_of(3, [&] {
    (void)nn::reference::batch_gradient(tcn, w.inputs, w.targets, w.batch,
                                        w.scaler, nn::LossKind::custom);
  });
  const double tcn_parallel = time_best_of(3, [&] {
    (void)nn::batch_gradient(tcn, w.inputs, w.targets, w.batch, w.scaler,
                             nn::LossKind::custom);
  });
  report("tcn batch gradient (b=64)", tcn_serial, tcn_parallel);

  const double pred_serial = time_best_of(3, [&] {
    parallel::set_enabled(false);
    (void)nn::predict_min_batch(tcn, w.days, w.scaler);
    parallel::set_enabled(true);
  });
  const double pred_parallel = time_best_of(3, [&] {
    (void)nn::predict_min_batch(tcn, w.days, w.scaler);
  });
  report("tcn batch predict (n=720)", pred_serial, pred_parallel);

  // sanity: identical results on both paths
  const auto a = gbt::find_best_split(w.x, w.g, w.h, w.rows, w.subset, gcfg);
  const auto b =
      gbt::reference::find_best_split(w.x, w.g, w.h, w.rows, w.subset, gcfg);
  if (!a || !b || a->feature != b->feature || a->threshold != b->threshold ||
      a->gain != b->gain) {
    std::printf("\nERROR: serial and parallel split search disagree\n");
    return 1;
  }
  std::printf("\nserial/parallel agreement verified\n");
  return 0;
}
