// frostcast: synthetic station generation, model training, and RMSE
// evaluation for next-day minimum temperature forecasting.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "frost/empirical.hpp"
#include "frost/errors.hpp"
#include "frost/eval/experiment.hpp"
#include "frost/eval/render.hpp"
#include "frost/io/model_io.hpp"
#include "frost/parallel.hpp"
#include "frost/synthgen.hpp"
#include "frost/timeseries.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTrain = 3;

frost::StationSeries load_station(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw frost::DataError("cannot open station file '" + path + "'");
  return frost::parse_station_csv(in);
}

struct NnFlags {
  int epochs = 200;
  double lr = 1e-3;
  int batch_size = 32;
  std::string optimizer = "adam";
  std::string loss = "custom";
  double grad_clip = 5.0;
  bool no_grad_clip = false;
  int hidden_dim = 64;
  int channels = 32;
  int kernel_size = 3;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--epochs", epochs, "Training epochs");
    cmd->add_option("--lr", lr, "Learning rate");
    cmd->add_option("--batch-size", batch_size, "Minibatch size");
    cmd->add_option("--optimizer", optimizer, "sgd or adam")
        ->check(CLI::IsMember({"sgd", "adam"}));
    cmd->add_option("--loss", loss, "mse or custom")
        ->check(CLI::IsMember({"mse", "custom"}));
    cmd->add_option("--grad-clip", grad_clip, "Global-norm gradient clip");
    cmd->add_flag("--no-grad-clip", no_grad_clip, "Disable gradient clipping");
    cmd->add_option("--hidden-dim", hidden_dim, "GRU hidden units");
    cmd->add_option("--channels", channels, "TCN channels per block");
    cmd->add_option("--kernel-size", kernel_size, "TCN kernel size");
  }

  frost::nn::TrainConfig to_config(std::uint64_t seed) const {
    frost::nn::TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.learning_rate = lr;
    cfg.batch_size = batch_size;
    cfg.optimizer = optimizer == "sgd" ? frost::nn::OptimizerKind::sgd
                                       : frost::nn::OptimizerKind::adam;
    cfg.loss = loss == "mse" ? frost::nn::LossKind::mse
                             : frost::nn::LossKind::custom;
    cfg.grad_clip = no_grad_clip ? std::nullopt : std::optional<double>(grad_clip);
    cfg.seed = seed;
    cfg.hidden_dim = hidden_dim;
    cfg.channels = channels;
    cfg.kernel_size = kernel_size;
    return cfg;
  }

  std::string echo(const std::string& method, std::uint64_t seed) const {
    return "method=" + method + " epochs=" + std::to_string(epochs) +
           " lr=" + std::to_string(lr) + " batch=" + std::to_string(batch_size) +
           " optimizer=" + optimizer + " loss=" + loss +
           " seed=" + std::to_string(seed);
  }
};

struct GbtFlags {
  int trees = 200;
  int max_depth = 3;
  double colsample = 0.5;
  double rate_drop = 0.1;
  double lr = 0.1;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--trees", trees, "Boosting rounds");
    cmd->add_option("--max-depth", max_depth, "Tree depth limit");
    cmd->add_option("--colsample", colsample, "Column subsample per tree");
    cmd->add_option("--rate-drop", rate_drop, "DART dropout rate (0 disables)");
    cmd->add_option("--gbt-lr", lr, "Boosting learning rate");
    cmd->add_option("--lambda", lambda, "L2 leaf regularizer");
    cmd->add_option("--gamma", gamma, "Split penalty");
    cmd->add_option("--min-child-weight", min_child_weight,
                    "Minimum hessian sum per child");
  }

  frost::gbt::GbtConfig to_config(std::uint64_t seed) const {
    frost::gbt::GbtConfig cfg;
    cfg.n_estimators = trees;
    cfg.max_depth = max_depth;
    cfg.colsample_bytree = colsample;
    cfg.rate_drop = rate_drop;
    cfg.learning_rate = lr;
    cfg.lambda = lambda;
    cfg.gamma = gamma;
    cfg.min_child_weight = min_child_weight;
    cfg.seed = seed;
    return cfg;
  }

  std::string echo(std::uint64_t seed) const {
    return "method=xgb trees=" + std::to_string(trees) +
           " max_depth=" + std::to_string(max_depth) +
           " colsample=" + std::to_string(colsample) +
           " rate_drop=" + std::to_string(rate_drop) +
           " lr=" + std::to_string(lr) + " seed=" + std::to_string(seed);
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Next-day minimum temperature forecasting toolkit"};
  app.require_subcommand(1);

  bool serial = false;
  int threads = 0;
  app.add_flag("--serial", serial, "Disable OpenMP kernels");
  app.add_option("--threads", threads, "OpenMP thread count (0 = default)");

  // generate
  auto* gen = app.add_subcommand("generate", "Emit a synthetic station file");
  int gen_days = 365;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_config, gen_station = "synthetic";
  frost::synthgen::ClimateConfig climate;
  gen->add_option("--days", gen_days, "Number of days")->required();
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output station file")->required();
  gen->add_option("--config", gen_config, "key=value climate config file");
  gen->add_option("--station", gen_station, "Station id");
  gen->add_option("--annual-mean", climate.annual_mean, "Mean temperature");
  gen->add_option("--seasonal-amplitude", climate.seasonal_amplitude,
                  "Seasonal swing");
  gen->add_option("--diurnal-amplitude", climate.diurnal_amplitude,
                  "Daily swing");
  gen->add_option("--noise-sd", climate.noise_sd, "AR(1) innovation sd");
  gen->add_option("--ar-coeff", climate.ar_coeff, "AR(1) coefficient");
  gen->add_option("--dew-offset-mean", climate.dew_offset_mean,
                  "Mean dew point offset");
  gen->add_option("--dew-offset-sd", climate.dew_offset_sd,
                  "Dew point offset sd");
  gen->add_option("--spread", climate.spread, "t_max - t_min per interval");
  gen->add_option("--frost-prob", climate.frost_prob,
                  "Frost night probability");
  gen->add_option("--frost-depth", climate.frost_depth, "Cold pulse depth");

  // train
  auto* tr = app.add_subcommand("train", "Train one model and save it");
  std::string tr_method, tr_data, tr_out;
  std::uint64_t tr_seed = 1;
  double tr_fraction = 0.2;
  int tr_afternoon = 29;
  NnFlags tr_nn;
  GbtFlags tr_gbt;
  tr->add_option("--method", tr_method, "empirical|gru|tcn|xgb")
      ->required()
      ->check(CLI::IsMember({"empirical", "gru", "tcn", "xgb"}));
  tr->add_option("--data", tr_data, "Station file")->required();
  tr->add_option("--out", tr_out, "Model output path")->required();
  tr->add_option("--seed", tr_seed, "Training seed");
  tr->add_option("--test-fraction", tr_fraction,
                 "Held-out fraction (training uses the rest)");
  tr->add_option("--afternoon-interval", tr_afternoon,
                 "Empirical baseline reading interval");
  tr_nn.add_options(tr);
  tr_gbt.add_options(tr);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Score a saved model");
  std::string ev_model, ev_data, ev_report;
  double ev_fraction = 0.2;
  ev->add_option("--model", ev_model, "Model file")->required();
  ev->add_option("--data", ev_data, "Station file")->required();
  ev->add_option("--report", ev_report, "Report output path")->required();
  ev->add_option("--test-fraction", ev_fraction, "Held-out fraction");

  // experiment
  auto* ex = app.add_subcommand("experiment",
                                "Multi-seed train/evaluate report");
  std::string ex_method, ex_data, ex_report;
  int ex_runs = 10;
  std::uint64_t ex_seed = 1;
  double ex_fraction = 0.2;
  int ex_afternoon = 29;
  NnFlags ex_nn;
  GbtFlags ex_gbt;
  ex->add_option("--method", ex_method, "empirical|gru|tcn|xgb")
      ->required()
      ->check(CLI::IsMember({"empirical", "gru", "tcn", "xgb"}));
  ex->add_option("--data", ex_data, "Station file")->required();
  ex->add_option("--runs", ex_runs, "Number of seeded runs");
  ex->add_option("--report", ex_report, "Report output path")->required();
  ex->add_option("--seed", ex_seed, "Base seed");
  ex->add_option("--test-fraction", ex_fraction, "Held-out fraction");
  ex->add_option("--afternoon-interval", ex_afternoon,
                 "Empirical baseline reading interval");
  ex_nn.add_options(ex);
  ex_gbt.add_options(ex);

  // compare
  auto* cp = app.add_subcommand("compare",
                                "Render the vs-empirical difference table");
  std::string cp_empirical, cp_format = "csv", cp_out;
  std::vector<std::string> cp_methods;
  cp->add_option("--empirical", cp_empirical, "Empirical report file")
      ->required();
  cp->add_option("--method", cp_methods, "Method report file(s)")
      ->required()
      ->take_all();
  cp->add_option("--format", cp_format, "csv or md")
      ->check(CLI::IsMember({"csv", "md"}));
  cp->add_option("--out", cp_out, "Write table here instead of stdout");

  // ablate-loss
  auto* ab = app.add_subcommand(
      "ablate-loss", "Paired-seed custom-loss vs MSE min-gap comparison");
  std::string ab_data, ab_method, ab_report;
  int ab_runs = 5;
  std::uint64_t ab_seed = 1;
  double ab_fraction = 0.2;
  NnFlags ab_nn;
  ab->add_option("--data", ab_data, "Station file")->required();
  ab->add_option("--method", ab_method, "gru or tcn")
      ->required()
      ->check(CLI::IsMember({"gru", "tcn"}));
  ab->add_option("--runs", ab_runs, "Number of paired runs");
  ab->add_option("--report", ab_report, "Report output path")->required();
  ab->add_option("--seed", ab_seed, "Base seed");
  ab->add_option("--test-fraction", ab_fraction, "Validation fraction");
  ab_nn.add_options(ab);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (serial) frost::parallel::set_enabled(false);
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (app.got_subcommand(gen)) {
      if (!gen_config.empty()) {
        std::ifstream cfg_in(gen_config);
        if (!cfg_in) {
          throw frost::DataError("cannot open config file '" + gen_config + "'");
        }
        frost::synthgen::ClimateConfig from_file =
            frost::synthgen::parse_climate_config(cfg_in);
        // flags passed on the command line override file values
        const std::pair<const char*, double frost::synthgen::ClimateConfig::*>
            overrides[] = {
                {"--annual-mean", &frost::synthgen::ClimateConfig::annual_mean},
                {"--seasonal-amplitude",
                 &frost::synthgen::ClimateConfig::seasonal_amplitude},
                {"--diurnal-amplitude",
                 &frost::synthgen::ClimateConfig::diurnal_amplitude},
                {"--noise-sd", &frost::synthgen::ClimateConfig::noise_sd},
                {"--ar-coeff", &frost::synthgen::ClimateConfig::ar_coeff},
                {"--dew-offset-mean",
                 &frost::synthgen::ClimateConfig::dew_offset_mean},
                {"--dew-offset-sd",
                 &frost::synthgen::ClimateConfig::dew_offset_sd},
                {"--spread", &frost::synthgen::ClimateConfig::spread},
                {"--frost-prob", &frost::synthgen::ClimateConfig::frost_prob},
                {"--frost-depth", &frost::synthgen::ClimateConfig::frost_depth}};
        for (const auto& [opt, field] : overrides) {
          if (gen->count(opt) > 0) from_file.*field = climate.*field;
        }
        climate = from_file;
      }
      climate.seed = gen_seed;
      const auto series =
          frost::synthgen::generate_station(climate, gen_days, gen_station);
      std::ofstream out(gen_out);
      if (!out) throw frost::DataError("cannot open output '" + gen_out + "'");
      frost::synthgen::write_station_csv(series, out);
      std::cout << "wrote " << gen_days << " days to " << gen_out << "\n";
      return kExitOk;
    }

    if (app.got_subcommand(tr)) {
      const auto series = load_station(tr_data);
      const auto pairs = frost::build_pairs(series);
      const auto split = frost::split_train_test(pairs, tr_fraction);
      if (split.train.size() < 2) {
        throw frost::DataError("insufficient training pairs");
      }
      const auto method = frost::eval::method_from_string(tr_method);

      frost::io::ModelBundle bundle;
      bundle.method = method;
      switch (method) {
        case frost::eval::Method::empirical: {
          bundle.model =
              frost::empirical::fit_empirical(split.train, tr_afternoon);
          bundle.config_echo = "method=empirical afternoon_interval=" +
                               std::to_string(tr_afternoon);
          break;
        }
        case frost::eval::Method::gru: {
          const frost::Scaler scaler = frost::fit_scaler(split.train);
          auto cfg = tr_nn.to_config(tr_seed);
          frost::nn::GruModel model(cfg.hidden_dim, tr_seed);
          frost::nn::train(model, split.train, scaler, cfg);
          bundle.scaler = scaler;
          bundle.model = std::move(model);
          bundle.config_echo = tr_nn.echo("gru", tr_seed);
          break;
        }
        case frost::eval::Method::tcn: {
          const frost::Scaler scaler = frost::fit_scaler(split.train);
          auto cfg = tr_nn.to_config(tr_seed);
          frost::nn::TcnSpec spec{cfg.channels, cfg.kernel_size, cfg.dilations};
          frost::nn::TcnModel model(spec, tr_seed);
          model.require_full_receptive_field();
          frost::nn::train(model, split.train, scaler, cfg);
          bundle.scaler = scaler;
          bundle.model = std::move(model);
          bundle.config_echo = tr_nn.echo("tcn", tr_seed);
          break;
        }
        case frost::eval::Method::xgb: {
          bundle.model =
              frost::gbt::fit_ensemble(split.train, tr_gbt.to_config(tr_seed));
          bundle.config_echo = tr_gbt.echo(tr_seed);
          break;
        }
      }
      frost::io::save_model(bundle, tr_out);
      std::cout << "saved " << tr_method << " model to " << tr_out << "\n";
      return kExitOk;
    }

    if (app.got_subcommand(ev)) {
      const auto bundle = frost::io::load_model(ev_model);
      const auto series = load_station(ev_data);
      const auto pairs = frost::build_pairs(series);
      const auto split = frost::split_train_test(pairs, ev_fraction);
      if (split.train.empty() || split.test.empty()) {
        throw frost::DataError("split leaves an empty train or test set");
      }
      auto rmse_of = [&](const std::vector<frost::SupervisedPair>& ps) {
        std::vector<double> pred(ps.size()), truth(ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) {
          pred[i] = bundle.predict_min_for(ps[i].input);
          truth[i] = ps[i].target_min;
        }
        return frost::eval::rmse(pred, truth);
      };
      frost::eval::RunResult run_result;
      run_result.seed = 0;
      run_result.train_rmse = rmse_of(split.train);
      run_result.test_rmse = rmse_of(split.test);
      const auto report = frost::eval::make_report(
          series.station_id, bundle.method, {run_result});
      frost::io::save_report(report, ev_report);
      std::cout << "train RMSE " << run_result.train_rmse << "  test RMSE "
                << run_result.test_rmse << "  -> " << ev_report << "\n";
      return kExitOk;
    }

    if (app.got_subcommand(ex)) {
      const auto series = load_station(ex_data);
      frost::eval::ExperimentConfig cfg;
      cfg.n_runs = ex_runs;
      cfg.test_fraction = ex_fraction;
      cfg.base_seed = ex_seed;
      cfg.nn = ex_nn.to_config(ex_seed);
      cfg.gbt = ex_gbt.to_config(ex_seed);
      cfg.afternoon_interval = ex_afternoon;
      const auto report = frost::eval::run_experiment(
          series, frost::eval::method_from_string(ex_method), cfg);
      frost::io::save_report(report, ex_report);
      std::cout << ex_method << " avg test RMSE " << report.avg_test_rmse
                << " (best " << report.best_test_rmse << ") over "
                << report.n_runs << " runs -> " << ex_report << "\n";
      return kExitOk;
    }

    if (app.got_subcommand(cp)) {
      const auto empirical = frost::io::load_report(cp_empirical);
      std::vector<frost::eval::EvalReport> others;
      for (const std::string& path : cp_methods) {
        others.push_back(frost::io::load_report(path));
      }
      const auto table = frost::eval::compare_methods(empirical, others);
      const auto format = cp_format == "csv" ? frost::eval::TableFormat::csv
                                             : frost::eval::TableFormat::markdown;
      const std::string text = frost::eval::render_comparison_table(table, format);
      if (cp_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(cp_out);
        if (!out) throw frost::DataError("cannot open output '" + cp_out + "'");
        out << text;
      }
      return kExitOk;
    }

    if (app.got_subcommand(ab)) {
      const auto series = load_station(ab_data);
      frost::eval::ExperimentConfig cfg;
      cfg.n_runs = ab_runs;
      cfg.test_fraction = ab_fraction;
      cfg.base_seed = ab_seed;
      cfg.nn = ab_nn.to_config(ab_seed);
      const auto report = frost::eval::run_loss_ablation(
          series, frost::eval::method_from_string(ab_method), cfg);
      frost::io::save_ablation_report(report, ab_report);
      std::cout << "median validation |min gap|: mse "
                << report.mse_min_gap_median << ", custom "
                << report.custom_min_gap_median << " -> " << ab_report << "\n";
      return kExitOk;
    }
  } catch (const frost::TrainError& e) {
    std::cerr << "training abort: " << e.what() << "\n";
    return kExitTrain;
  } catch (const frost::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
