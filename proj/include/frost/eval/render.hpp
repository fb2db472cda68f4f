#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frost/eval/report.hpp"

namespace frost::eval {

enum class TableFormat { csv, markdown };

/// Renders one method's reports with stations as columns and the four
/// RMSE aggregates as rows, values rounded to 2 decimals. Stations are
/// ordered alphabetically unless an explicit order is supplied. All
/// reports must share the same method.
std::string render_report_table(const std::vector<EvalReport>& reports,
                                TableFormat format,
                                const std::optional<std::vector<std::string>>&
                                    station_order = std::nullopt);

/// Renders the method-vs-empirical comparison, one station per row:
/// station, empirical RMSE, then one signed diff column per method.
std::string render_comparison_table(const ComparisonTable& table,
                                    TableFormat format,
                                    const std::optional<std::vector<std::string>>&
                                        station_order = std::nullopt);

/// Inverse of the csv renderings at the rounded precision; render ->
/// parse -> render is a fixed point.
ComparisonTable parse_comparison_csv(const std::string& text);
std::vector<EvalReport> parse_report_table_csv(const std::string& text,
                                               Method method);

}  // namespace frost::eval
