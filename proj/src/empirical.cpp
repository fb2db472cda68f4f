#include "frost/empirical.hpp"

#include <cmath>
#include <cstddef>

namespace frost::empirical {

namespace {

// Least squares via Householder QR on the n x p design (p = 3 here).
// Returns false when the design is rank deficient.
bool qr_solve(std::vector<double>& a, std::vector<double>& y, std::size_t n,
              std::size_t p, double* beta) {
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm += a[i * p + k] * a[i * p + k];
    norm = std::sqrt(norm);
    if (norm == 0.0) return false;
    if (a[k * p + k] > 0.0) norm = -norm;

    // v = x - norm*e1, stored in place of column k
    a[k * p + k] -= norm;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) vnorm2 += a[i * p + k] * a[i * p + k];
    if (vnorm2 == 0.0) return false;

    for (std::size_t j = k + 1; j < p; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += a[i * p + k] * a[i * p + j];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < n; ++i) a[i * p + j] -= f * a[i * p + k];
    }
    double dot = 0.0;
    for (std::size_t i = k; i < n; ++i) dot += a[i * p + k] * y[i];
    const double f = 2.0 * dot / vnorm2;
    for (std::size_t i = k; i < n; ++i) y[i] -= f * a[i * p + k];

    a[k * p + k] = norm;  // diagonal of R
  }

  // rank check on R's diagonal
  double max_diag = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    max_diag = std::max(max_diag, std::abs(a[k * p + k]));
  }
  for (std::size_t k = 0; k < p; ++k) {
    if (std::abs(a[k * p + k]) < 1e-10 * std::max(1.0, max_diag)) return false;
  }

  for (std::size_t k = p; k-- > 0;) {
    double s = y[k];
    for (std::size_t j = k + 1; j < p; ++j) s -= a[k * p + j] * beta[j];
    beta[k] = s / a[k * p + k];
  }
  return true;
}

}  // namespace

EmpiricalModel fit_empirical(const std::vector<SupervisedPair>& train,
                             int afternoon_interval) {
  if (afternoon_interval < 0 || afternoon_interval >= kIntervalsPerDay) {
    throw DataError("afternoon interval out of range [0, 47]");
  }
  if (train.size() < 3) {
    throw DataError("insufficient data: empirical fit needs >= 3 pairs, got " +
                    std::to_string(train.size()));
  }

  const std::size_t n = train.size();
  const std::size_t p = 3;
  std::vector<double> design(n * p);
  std::vector<double> target(n);
  const auto k = static_cast<std::size_t>(afternoon_interval);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = train[i].input.samples[k];
    design[i * p + 0] = s.t_max;
    design[i * p + 1] = s.t_dew;
    design[i * p + 2] = 1.0;
    target[i] = train[i].target_min;
  }

  double beta[3] = {0.0, 0.0, 0.0};
  if (!qr_solve(design, target, n, p, beta)) {
    throw DataError("degenerate predictors: design matrix is rank deficient");
  }

  EmpiricalModel model;
  model.a = beta[0];
  model.b = beta[1];
  model.c = beta[2];
  model.afternoon_interval = afternoon_interval;
  return model;
}

double predict_empirical(const EmpiricalModel& model, const DayRecord& day) {
  const Sample& s =
      day.samples[static_cast<std::size_t>(model.afternoon_interval)];
  return model.a * s.t_max + model.b * s.t_dew + model.c;
}

}  // namespace frost::empirical
