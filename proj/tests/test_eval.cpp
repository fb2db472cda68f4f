#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "frost/eval/experiment.hpp"
#include "frost/eval/render.hpp"
#include "frost/eval/report.hpp"
#include "frost/synthgen.hpp"
#include "helpers.hpp"

using namespace frost;
using namespace frost::eval;

namespace {

EvalReport injected(const std::string& station, Method m, double avg_test) {
  RunResult r;
  r.seed = 1;
  r.train_rmse = 1.0;
  r.test_rmse = avg_test;
  return make_report(station, m, {r});
}

StationSeries quick_station(int days, std::uint64_t seed) {
  synthgen::ClimateConfig cfg;
  cfg.seed = seed;
  cfg.frost_prob = 0.2;
  return synthgen::generate_station(cfg, days, "st");
}

}  // namespace

TEST_CASE("rmse identities") {
  std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(rmse(a, a) == 0.0);

  std::vector<double> p{0.0, 0.0}, t{3.0, 4.0};
  CHECK(rmse(p, t) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));

  std::vector<double> base{5.0, -2.0, 7.5, 0.0};
  for (double delta : {-1.5, 0.25, 4.0}) {
    std::vector<double> shifted = base;
    for (double& v : shifted) v += delta;
    CHECK(rmse(shifted, base) == doctest::Approx(std::abs(delta)).epsilon(1e-12));
  }

  std::vector<double> shorter{1.0};
  CHECK_THROWS_AS(rmse(a, shorter), DataError);
  CHECK_THROWS_AS(rmse({}, {}), DataError);
}

TEST_CASE("persistence baseline predicts today's minimum") {
  std::mt19937_64 rng(91);
  const auto pairs = testutil::random_pairs(rng, 20);
  std::vector<double> pred(pairs.size()), truth(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    double mn = 1e300;
    for (const Sample& s : pairs[i].input.samples) mn = std::min(mn, s.t_min);
    pred[i] = mn;
    truth[i] = pairs[i].target_min;
  }
  CHECK(persistence_rmse(pairs) == doctest::Approx(rmse(pred, truth)));
}

TEST_CASE("report aggregates follow the best <= avg invariants") {
  std::vector<RunResult> runs{{1, 2.0, 3.0}, {2, 1.5, 3.5}, {3, 2.5, 2.8}};
  const EvalReport rep = make_report("s", Method::gru, runs);
  CHECK(rep.n_runs == 3);
  CHECK(rep.avg_train_rmse == doctest::Approx(2.0));
  CHECK(rep.best_train_rmse == 1.5);
  CHECK(rep.avg_test_rmse == doctest::Approx(3.1).epsilon(1e-12));
  CHECK(rep.best_test_rmse == 2.8);
  CHECK(rep.best_train_rmse <= rep.avg_train_rmse);
  CHECK(rep.best_test_rmse <= rep.avg_test_rmse);
}

TEST_CASE("single-run experiments have avg equal to best") {
  const auto series = quick_station(40, 7);
  ExperimentConfig cfg;
  cfg.n_runs = 1;
  cfg.gbt.n_estimators = 10;
  const EvalReport rep = run_experiment(series, Method::xgb, cfg);
  CHECK(rep.n_runs == 1);
  CHECK(rep.avg_train_rmse == rep.best_train_rmse);
  CHECK(rep.avg_test_rmse == rep.best_test_rmse);
}

TEST_CASE("experiments are deterministic and aggregate per-run values") {
  const auto series = quick_station(50, 8);
  ExperimentConfig cfg;
  cfg.n_runs = 5;
  cfg.base_seed = 21;
  cfg.gbt.n_estimators = 12;
  const EvalReport a = run_experiment(series, Method::xgb, cfg);
  const EvalReport b = run_experiment(series, Method::xgb, cfg);
  REQUIRE(a.per_run.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.per_run[i].seed == 21 + i);
    CHECK(a.per_run[i].train_rmse == b.per_run[i].train_rmse);
    CHECK(a.per_run[i].test_rmse == b.per_run[i].test_rmse);
  }
  double best = 1e300;
  for (const RunResult& r : a.per_run) best = std::min(best, r.test_rmse);
  CHECK(a.best_test_rmse == best);
}

TEST_CASE("empirical experiments collapse to one run") {
  const auto series = quick_station(40, 9);
  ExperimentConfig cfg;
  cfg.n_runs = 10;
  const EvalReport rep = run_experiment(series, Method::empirical, cfg);
  CHECK(rep.n_runs == 1);
}

TEST_CASE("experiment rejects insufficient data") {
  const auto series = quick_station(3, 10);  // 2 pairs -> 1 train, 1 test
  ExperimentConfig cfg;
  CHECK_THROWS_WITH_AS(run_experiment(series, Method::empirical, cfg),
                       doctest::Contains("insufficient"), DataError);
}

TEST_CASE("comparison reproduces the golden sign conventions") {
  // Kamfiruz: empirical 1.91, xgb avg test 1.60 -> diff 0.31
  const EvalReport emp_k = injected("Kamfiruz", Method::empirical, 1.91);
  const EvalReport xgb_k = injected("Kamfiruz", Method::xgb, 1.60);
  const EvalReport gru_k = injected("Kamfiruz", Method::gru, 2.26);
  const ComparisonTable k = compare_methods(emp_k, {gru_k, xgb_k});
  CHECK(k.rows[0].diffs[0] == doctest::Approx(-0.35).epsilon(1e-9));
  CHECK(k.rows[0].diffs[1] == doctest::Approx(0.31).epsilon(1e-9));

  // Lar: empirical 6.43, xgb 1.22 -> diff 5.21
  const ComparisonTable lar = compare_methods(
      injected("Lar", Method::empirical, 6.43),
      {injected("Lar", Method::xgb, 1.22)});
  CHECK(lar.rows[0].diffs[0] == doctest::Approx(5.21).epsilon(1e-9));

  // diff + method RMSE reconstructs the empirical RMSE exactly
  CHECK(k.rows[0].diffs[1] + 1.60 == doctest::Approx(1.91).epsilon(1e-12));

  // a method equal to the baseline differs by zero
  const ComparisonTable self = compare_methods(
      injected("X", Method::empirical, 2.0), {injected("X", Method::tcn, 2.0)});
  CHECK(self.rows[0].diffs[0] == 0.0);
}

TEST_CASE("comparison rejects mismatched stations and non-empirical bases") {
  const EvalReport emp = injected("A", Method::empirical, 2.0);
  const EvalReport other = injected("B", Method::xgb, 1.0);
  CHECK_THROWS_WITH_AS(compare_methods(emp, {other}),
                       doctest::Contains("station mismatch"), DataError);
  CHECK_THROWS_AS(compare_methods(injected("A", Method::xgb, 1.0), {}),
                  DataError);
}

TEST_CASE("comparison tables render golden values at 2 decimals") {
  const ComparisonTable k = compare_methods(
      injected("Kamfiruz", Method::empirical, 1.91),
      {injected("Kamfiruz", Method::gru, 2.26),
       injected("Kamfiruz", Method::xgb, 1.60)});
  const std::string csv = render_comparison_table(k, TableFormat::csv);
  CHECK(csv == "station,empirical,gru,xgb\nKamfiruz,1.91,-0.35,0.31\n");
  const std::string md = render_comparison_table(k, TableFormat::markdown);
  CHECK(md.find("| Kamfiruz | 1.91 | -0.35 | 0.31 |") != std::string::npos);
}

TEST_CASE("report tables render stations alphabetically unless ordered") {
  std::vector<EvalReport> reports{injected("Lar", Method::xgb, 1.22),
                                  injected("Kamfiruz", Method::xgb, 1.60)};
  reports[0].avg_train_rmse = 1.0;
  reports[1].avg_train_rmse = 1.1;
  const std::string csv = render_report_table(reports, TableFormat::csv);
  CHECK(csv.find("metric,Kamfiruz,Lar") == 0);
  CHECK(csv.find("avg_test_rmse,1.60,1.22") != std::string::npos);

  const std::string ordered = render_report_table(
      reports, TableFormat::csv, std::vector<std::string>{"Lar", "Kamfiruz"});
  CHECK(ordered.find("metric,Lar,Kamfiruz") == 0);

  const std::string md = render_report_table(reports, TableFormat::markdown);
  CHECK(md.find("| Stations | Kamfiruz | Lar |") == 0);
  CHECK(md.find("| Avg. Test RMSE | 1.60 | 1.22 |") != std::string::npos);
}

TEST_CASE("empty method list renders a header-only comparison") {
  ComparisonTable empty;
  ComparisonRow row;
  row.station_id = "S";
  row.empirical_rmse = 2.5;
  empty.rows.push_back(row);
  const std::string csv = render_comparison_table(empty, TableFormat::csv);
  CHECK(csv == "station,empirical\nS,2.50\n");
}

TEST_CASE("render -> parse -> render is a fixed point for csv tables") {
  const ComparisonTable k = merge_comparisons(
      {compare_methods(injected("Kamfiruz", Method::empirical, 1.91),
                       {injected("Kamfiruz", Method::gru, 2.26),
                        injected("Kamfiruz", Method::xgb, 1.605)}),
       compare_methods(injected("Lar", Method::empirical, 6.43),
                       {injected("Lar", Method::gru, 1.79),
                        injected("Lar", Method::xgb, 1.22)})});
  const std::string once = render_comparison_table(k, TableFormat::csv);
  const ComparisonTable parsed = parse_comparison_csv(once);
  const std::string twice = render_comparison_table(parsed, TableFormat::csv);
  CHECK(once == twice);

  std::vector<EvalReport> reports{injected("A", Method::tcn, 1.337),
                                  injected("B", Method::tcn, 2.444)};
  const std::string r_once = render_report_table(reports, TableFormat::csv);
  const auto r_parsed = parse_report_table_csv(r_once, Method::tcn);
  CHECK(render_report_table(r_parsed, TableFormat::csv) == r_once);
}

TEST_CASE("loss ablation pairs seeds and pools validation gaps") {
  const auto series = quick_station(60, 11);
  ExperimentConfig cfg;
  cfg.n_runs = 2;
  cfg.base_seed = 5;
  cfg.nn.epochs = 3;
  cfg.nn.hidden_dim = 4;
  cfg.nn.batch_size = 16;
  const AblationReport rep = run_loss_ablation(series, Method::gru, cfg);
  CHECK(rep.n_runs == 2);
  REQUIRE(rep.per_run.size() == 2);
  CHECK(rep.per_run[0].seed == 5);
  CHECK(rep.per_run[1].seed == 6);
  CHECK(rep.mse_min_gap_median >= 0.0);
  CHECK(rep.custom_min_gap_median >= 0.0);

  // deterministic across invocations
  const AblationReport again = run_loss_ablation(series, Method::gru, cfg);
  CHECK(again.mse_min_gap_median == rep.mse_min_gap_median);
  CHECK(again.custom_min_gap_median == rep.custom_min_gap_median);

  CHECK_THROWS_AS(run_loss_ablation(series, Method::xgb, cfg), DataError);
}

TEST_CASE("training aborts surface the failing run index") {
  const auto series = quick_station(40, 12);
  ExperimentConfig cfg;
  cfg.n_runs = 2;
  cfg.nn.epochs = 60;
  cfg.nn.hidden_dim = 6;
  cfg.nn.optimizer = nn::OptimizerKind::sgd;
  cfg.nn.learning_rate = 1e18;
  cfg.nn.grad_clip = std::nullopt;
  CHECK_THROWS_WITH_AS(run_experiment(series, Method::gru, cfg),
                       doctest::Contains("run 0"), TrainError);
}

TEST_CASE("report rendering rejects mixed methods and partial orders") {
  std::vector<EvalReport> mixed{injected("A", Method::gru, 1.0),
                                injected("B", Method::tcn, 2.0)};
  CHECK_THROWS_WITH_AS(render_report_table(mixed, TableFormat::csv),
                       doctest::Contains("mixed methods"), DataError);

  std::vector<EvalReport> reports{injected("A", Method::gru, 1.0),
                                  injected("B", Method::gru, 2.0)};
  CHECK_THROWS_AS(render_report_table(reports, TableFormat::csv,
                                      std::vector<std::string>{"A"}),
                  DataError);
}
