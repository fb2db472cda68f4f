#pragma once

#include <optional>
#include <string>
#include <variant>

#include "frost/empirical.hpp"
#include "frost/eval/experiment.hpp"
#include "frost/eval/report.hpp"
#include "frost/gbt/ensemble.hpp"
#include "frost/nn/gru.hpp"
#include "frost/nn/tcn.hpp"
#include "frost/timeseries.hpp"

namespace frost::io {

/// A trained model plus the scaler it was fitted with (identity for the
/// empirical and tree methods, which work in raw degC).
struct ModelBundle {
  eval::Method method = eval::Method::empirical;
  Scaler scaler;
  std::variant<empirical::EmpiricalModel, nn::GruModel, nn::TcnModel,
               gbt::BoostedEnsemble>
      model;
  std::string config_echo;  // free-form description of the training setup

  double predict_min_for(const DayRecord& day) const;
};

/// Versioned text container: format_version, method tag, scaler,
/// method-specific payload, and a checksum over the payload. Loading a
/// saved model predicts identically (bit-equal trees; full double
/// precision for neural parameters).
void save_model(const ModelBundle& bundle, const std::string& path);

/// Throws DataError on unknown versions, checksum/parse failures
/// ("corrupt payload"), or a method tag differing from `expected`.
ModelBundle load_model(const std::string& path,
                       std::optional<eval::Method> expected = std::nullopt);

void save_report(const eval::EvalReport& report, const std::string& path);
eval::EvalReport load_report(const std::string& path);

void save_ablation_report(const eval::AblationReport& report,
                          const std::string& path);
eval::AblationReport load_ablation_report(const std::string& path);

}  // namespace frost::io
