#include "frost/io/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "frost/nn/train.hpp"

namespace frost::io {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

json tree_to_json(const gbt::Tree& tree) {
  json nodes = json::array();
  for (const gbt::TreeNode& n : tree.nodes) {
    if (n.is_leaf) {
      nodes.push_back(json{{"w", n.weight}});
    } else {
      nodes.push_back(json{{"f", n.feature}, {"t", n.threshold},
                           {"l", n.left}, {"r", n.right}});
    }
  }
  return nodes;
}

gbt::Tree tree_from_json(const json& nodes) {
  gbt::Tree tree;
  for (const json& jn : nodes) {
    gbt::TreeNode n;
    if (jn.contains("w")) {
      n.is_leaf = true;
      n.weight = jn.at("w").get<double>();
    } else {
      n.is_leaf = false;
      n.feature = jn.at("f").get<int>();
      n.threshold = jn.at("t").get<double>();
      n.left = jn.at("l").get<int>();
      n.right = jn.at("r").get<int>();
    }
    tree.nodes.push_back(n);
  }
  return tree;
}

json payload_of(const ModelBundle& bundle) {
  json p;
  switch (bundle.method) {
    case eval::Method::empirical: {
      const auto& m = std::get<empirical::EmpiricalModel>(bundle.model);
      p["a"] = m.a;
      p["b"] = m.b;
      p["c"] = m.c;
      p["afternoon_interval"] = m.afternoon_interval;
      break;
    }
    case eval::Method::gru: {
      const auto& m = std::get<nn::GruModel>(bundle.model);
      p["hidden_dim"] = m.hidden_dim();
      p["params"] = m.params();
      break;
    }
    case eval::Method::tcn: {
      const auto& m = std::get<nn::TcnModel>(bundle.model);
      p["channels"] = m.spec().channels;
      p["kernel_size"] = m.spec().kernel_size;
      p["dilations"] = m.spec().dilations;
      p["params"] = m.params();
      break;
    }
    case eval::Method::xgb: {
      const auto& m = std::get<gbt::BoostedEnsemble>(bundle.model);
      p["base_score"] = m.base_score;
      p["learning_rate"] = m.learning_rate;
      p["tree_weights"] = m.tree_weights;
      json trees = json::array();
      for (const gbt::Tree& t : m.trees) trees.push_back(tree_to_json(t));
      p["trees"] = std::move(trees);
      break;
    }
  }
  return p;
}

ModelBundle bundle_from_payload(eval::Method method, const Scaler& scaler,
                                const json& p, std::string config_echo) {
  ModelBundle b;
  b.method = method;
  b.scaler = scaler;
  b.config_echo = std::move(config_echo);
  switch (method) {
    case eval::Method::empirical: {
      empirical::EmpiricalModel m;
      m.a = p.at("a").get<double>();
      m.b = p.at("b").get<double>();
      m.c = p.at("c").get<double>();
      m.afternoon_interval = p.at("afternoon_interval").get<int>();
      b.model = m;
      break;
    }
    case eval::Method::gru: {
      nn::GruModel m = nn::GruModel::zeros(p.at("hidden_dim").get<int>());
      auto params = p.at("params").get<std::vector<double>>();
      if (params.size() != m.param_count()) {
        throw DataError("corrupt payload: gru parameter count mismatch");
      }
      m.params() = std::move(params);
      b.model = std::move(m);
      break;
    }
    case eval::Method::tcn: {
      nn::TcnSpec spec;
      spec.channels = p.at("channels").get<int>();
      spec.kernel_size = p.at("kernel_size").get<int>();
      spec.dilations = p.at("dilations").get<std::vector<int>>();
      nn::TcnModel m = nn::TcnModel::zeros(spec);
      auto params = p.at("params").get<std::vector<double>>();
      if (params.size() != m.param_count()) {
        throw DataError("corrupt payload: tcn parameter count mismatch");
      }
      m.params() = std::move(params);
      b.model = std::move(m);
      break;
    }
    case eval::Method::xgb: {
      gbt::BoostedEnsemble m;
      m.base_score = p.at("base_score").get<double>();
      m.learning_rate = p.at("learning_rate").get<double>();
      m.tree_weights = p.at("tree_weights").get<std::vector<double>>();
      for (const json& jt : p.at("trees")) m.trees.push_back(tree_from_json(jt));
      if (m.trees.size() != m.tree_weights.size()) {
        throw DataError("corrupt payload: tree/weight count mismatch");
      }
      b.model = std::move(m);
      break;
    }
  }
  return b;
}

json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw DataError(std::string("cannot open ") + what + " file '" +
                           path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupt payload: ") + what +
                    " file is not valid JSON (" + e.what() + ")");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file '" + path + "'");
  out << text;
  if (!out) throw DataError("failed to write '" + path + "'");
}

}  // namespace

double ModelBundle::predict_min_for(const DayRecord& day) const {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, empirical::EmpiricalModel>) {
          return empirical::predict_empirical(m, day);
        } else if constexpr (std::is_same_v<T, gbt::BoostedEnsemble>) {
          return gbt::predict(m, day);
        } else {
          return nn::predict_min(m, day, scaler);
        }
      },
      model);
}

void save_model(const ModelBundle& bundle, const std::string& path) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["method"] = eval::to_string(bundle.method);
  doc["scaler"] = {{"mean", bundle.scaler.mean()}, {"sd", bundle.scaler.sd()}};
  doc["config"] = bundle.config_echo;
  json payload = payload_of(bundle);
  doc["checksum"] = fnv1a_hex(payload.dump());
  doc["payload"] = std::move(payload);
  write_text_file(path, doc.dump(2) + "\n");
}

ModelBundle load_model(const std::string& path,
                       std::optional<eval::Method> expected) {
  const json doc = read_json_file(path, "model");
  if (!doc.contains("format_version") ||
      !doc.at("format_version").is_number_integer()) {
    throw DataError("corrupt payload: missing format_version");
  }
  const int version = doc.at("format_version").get<int>();
  if (version != kFormatVersion) {
    throw DataError("unknown model format version " + std::to_string(version));
  }
  try {
    const eval::Method method =
        eval::method_from_string(doc.at("method").get<std::string>());
    if (expected && method != *expected) {
      throw DataError("method tag mismatch: file holds '" +
                      eval::to_string(method) + "', expected '" +
                      eval::to_string(*expected) + "'");
    }
    const json& payload = doc.at("payload");
    if (fnv1a_hex(payload.dump()) != doc.at("checksum").get<std::string>()) {
      throw DataError("corrupt payload: checksum mismatch");
    }
    const Scaler scaler(doc.at("scaler").at("mean").get<double>(),
                        doc.at("scaler").at("sd").get<double>());
    return bundle_from_payload(method, scaler, payload,
                               doc.value("config", std::string{}));
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupt payload: ") + e.what());
  }
}

void save_report(const eval::EvalReport& report, const std::string& path) {
  json doc;
  doc["kind"] = "eval_report";
  doc["format_version"] = kFormatVersion;
  doc["station_id"] = report.station_id;
  doc["method"] = eval::to_string(report.method);
  doc["n_runs"] = report.n_runs;
  doc["avg_train_rmse"] = report.avg_train_rmse;
  doc["best_train_rmse"] = report.best_train_rmse;
  doc["avg_test_rmse"] = report.avg_test_rmse;
  doc["best_test_rmse"] = report.best_test_rmse;
  json runs = json::array();
  for (const eval::RunResult& r : report.per_run) {
    runs.push_back(json{{"seed", r.seed},
                        {"train_rmse", r.train_rmse},
                        {"test_rmse", r.test_rmse}});
  }
  doc["per_run"] = std::move(runs);
  write_text_file(path, doc.dump(2) + "\n");
}

eval::EvalReport load_report(const std::string& path) {
  const json doc = read_json_file(path, "report");
  try {
    if (doc.at("kind").get<std::string>() != "eval_report") {
      throw DataError("not an eval report file: '" + path + "'");
    }
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      throw DataError("unknown report format version");
    }
    eval::EvalReport rep;
    rep.station_id = doc.at("station_id").get<std::string>();
    rep.method = eval::method_from_string(doc.at("method").get<std::string>());
    rep.n_runs = doc.at("n_runs").get<int>();
    rep.avg_train_rmse = doc.at("avg_train_rmse").get<double>();
    rep.best_train_rmse = doc.at("best_train_rmse").get<double>();
    rep.avg_test_rmse = doc.at("avg_test_rmse").get<double>();
    rep.best_test_rmse = doc.at("best_test_rmse").get<double>();
    for (const json& jr : doc.at("per_run")) {
      eval::RunResult r;
      r.seed = jr.at("seed").get<std::uint64_t>();
      r.train_rmse = jr.at("train_rmse").get<double>();
      r.test_rmse = jr.at("test_rmse").get<double>();
      rep.per_run.push_back(r);
    }
    return rep;
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupt report file: ") + e.what());
  }
}

void save_ablation_report(const eval::AblationReport& report,
                          const std::string& path) {
  json doc;
  doc["kind"] = "ablation_report";
  doc["format_version"] = kFormatVersion;
  doc["station_id"] = report.station_id;
  doc["method"] = eval::to_string(report.method);
  doc["n_runs"] = report.n_runs;
  doc["mse_min_gap_median"] = report.mse_min_gap_median;
  doc["custom_min_gap_median"] = report.custom_min_gap_median;
  json runs = json::array();
  for (const eval::AblationRun& r : report.per_run) {
    runs.push_back(json{{"seed", r.seed},
                        {"mse_min_gap", r.mse_min_gap},
                        {"custom_min_gap", r.custom_min_gap}});
  }
  doc["per_run"] = std::move(runs);
  write_text_file(path, doc.dump(2) + "\n");
}

eval::AblationReport load_ablation_report(const std::string& path) {
  const json doc = read_json_file(path, "ablation report");
  try {
    if (doc.at("kind").get<std::string>() != "ablation_report") {
      throw DataError("not an ablation report file: '" + path + "'");
    }
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      throw DataError("unknown report format version");
    }
    eval::AblationReport rep;
    rep.station_id = doc.at("station_id").get<std::string>();
    rep.method = eval::method_from_string(doc.at("method").get<std::string>());
    rep.n_runs = doc.at("n_runs").get<int>();
    rep.mse_min_gap_median = doc.at("mse_min_gap_median").get<double>();
    rep.custom_min_gap_median = doc.at("custom_min_gap_median").get<double>();
    for (const json& jr : doc.at("per_run")) {
      eval::AblationRun r;
      r.seed = jr.at("seed").get<std::uint64_t>();
      r.mse_min_gap = jr.at("mse_min_gap").get<double>();
      r.custom_min_gap = jr.at("custom_min_gap").get<double>();
      rep.per_run.push_back(r);
    }
    return rep;
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupt report file: ") + e.what());
  }
}

}  // namespace frost::io
