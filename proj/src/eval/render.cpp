#include "frost/eval/render.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace frost::eval {

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string pretty_method(Method m) {
  switch (m) {
    case Method::empirical: return "Empirical";
    case Method::gru: return "GRU";
    case Method::tcn: return "TCN";
    case Method::xgb: return "XGBoost";
  }
  return "?";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_num(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw DataError("table parse: malformed number '" + s + "'");
  }
  return v;
}

// returns indices into items giving the rendering order
template <class GetId>
std::vector<std::size_t> ordered_indices(
    std::size_t n, GetId&& id_of,
    const std::optional<std::vector<std::string>>& explicit_order) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (explicit_order) {
    std::vector<std::size_t> out;
    for (const std::string& want : *explicit_order) {
      for (std::size_t i = 0; i < n; ++i) {
        if (id_of(i) == want) out.push_back(i);
      }
    }
    if (out.size() != n) {
      throw DataError("station order list does not cover all stations");
    }
    return out;
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return id_of(a) < id_of(b);
  });
  return idx;
}

const char* kMetricKeys[4] = {"avg_train_rmse", "best_train_rmse",
                              "avg_test_rmse", "best_test_rmse"};
const char* kMetricLabels[4] = {"Avg. Train RMSE", "Best Train RMSE",
                                "Avg. Test RMSE", "Best Test RMSE"};

double metric_of(const EvalReport& r, int m) {
  switch (m) {
    case 0: return r.avg_train_rmse;
    case 1: return r.best_train_rmse;
    case 2: return r.avg_test_rmse;
    default: return r.best_test_rmse;
  }
}

}  // namespace

std::string render_report_table(
    const std::vector<EvalReport>& reports, TableFormat format,
    const std::optional<std::vector<std::string>>& station_order) {
  for (const EvalReport& r : reports) {
    if (r.method != reports.front().method) {
      throw DataError("report table: mixed methods");
    }
  }
  const auto order = ordered_indices(
      reports.size(), [&](std::size_t i) { return reports[i].station_id; },
      station_order);

  std::ostringstream out;
  if (format == TableFormat::csv) {
    out << "metric";
    for (std::size_t i : order) out << ',' << reports[i].station_id;
    out << '\n';
    for (int m = 0; m < 4; ++m) {
      out << kMetricKeys[m];
      for (std::size_t i : order) out << ',' << fmt2(metric_of(reports[i], m));
      out << '\n';
    }
  } else {
    out << "| Stations |";
    for (std::size_t i : order) out << ' ' << reports[i].station_id << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < order.size(); ++i) out << "---|";
    out << '\n';
    for (int m = 0; m < 4; ++m) {
      out << "| " << kMetricLabels[m] << " |";
      for (std::size_t i : order) out << ' ' << fmt2(metric_of(reports[i], m)) << " |";
      out << '\n';
    }
  }
  return out.str();
}

std::string render_comparison_table(
    const ComparisonTable& table, TableFormat format,
    const std::optional<std::vector<std::string>>& station_order) {
  const auto order = ordered_indices(
      table.rows.size(),
      [&](std::size_t i) { return table.rows[i].station_id; }, station_order);

  std::ostringstream out;
  if (format == TableFormat::csv) {
    out << "station,empirical";
    for (Method m : table.methods) out << ',' << to_string(m);
    out << '\n';
    for (std::size_t i : order) {
      const ComparisonRow& row = table.rows[i];
      out << row.station_id << ',' << fmt2(row.empirical_rmse);
      for (double d : row.diffs) out << ',' << fmt2(d);
      out << '\n';
    }
  } else {
    out << "| Station | Empirical |";
    for (Method m : table.methods) out << ' ' << pretty_method(m) << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < table.methods.size(); ++i) out << "---|";
    out << '\n';
    for (std::size_t i : order) {
      const ComparisonRow& row = table.rows[i];
      out << "| " << row.station_id << " | " << fmt2(row.empirical_rmse) << " |";
      for (double d : row.diffs) out << ' ' << fmt2(d) << " |";
      out << '\n';
    }
  }
  return out.str();
}

ComparisonTable parse_comparison_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("comparison parse: empty input");
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "station" || header[1] != "empirical") {
    throw DataError("comparison parse: bad header");
  }
  ComparisonTable table;
  for (std::size_t i = 2; i < header.size(); ++i) {
    table.methods.push_back(method_from_string(header[i]));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("comparison parse: column count mismatch");
    }
    ComparisonRow row;
    row.station_id = fields[0];
    row.empirical_rmse = parse_num(fields[1]);
    for (std::size_t i = 2; i < fields.size(); ++i) {
      row.diffs.push_back(parse_num(fields[i]));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<EvalReport> parse_report_table_csv(const std::string& text,
                                               Method method) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("report parse: empty input");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "metric") {
    throw DataError("report parse: bad header");
  }
  std::vector<EvalReport> reports(header.size() - 1);
  for (std::size_t i = 1; i < header.size(); ++i) {
    reports[i - 1].station_id = header[i];
    reports[i - 1].method = method;
  }
  int metric_row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size() || metric_row >= 4 ||
        fields[0] != kMetricKeys[metric_row]) {
      throw DataError("report parse: unexpected row");
    }
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const double v = parse_num(fields[i]);
      switch (metric_row) {
        case 0: reports[i - 1].avg_train_rmse = v; break;
        case 1: reports[i - 1].best_train_rmse = v; break;
        case 2: reports[i - 1].avg_test_rmse = v; break;
        default: reports[i - 1].best_test_rmse = v; break;
      }
    }
    ++metric_row;
  }
  if (metric_row != 4) throw DataError("report parse: missing metric rows");
  return reports;
}

}  // namespace frost::eval
