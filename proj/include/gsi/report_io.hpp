#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsi/evaluation.hpp"
#include "gsi/synthgen.hpp"

namespace gsi {

inline constexpr int kReportSchemaVersion = 1;

struct ReportMeta {
  std::string dataset;
  std::optional<std::string> generated_at;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> a_labels;
  std::vector<std::string> b_labels;
};

nlohmann::ordered_json report_to_json(const EvaluationReport& report,
                                      const ReportMeta& meta);
/// Rebuilds targets, records and comparisons; aggregates are recomputed.
EvaluationReport report_from_json(const nlohmann::json& j);

/// One column per estimator, one row per target; empty field where the
/// estimator failed or NRMSE is undefined.
void write_metric_columns(std::ostream& out, const EvaluationReport& report,
                          Metric metric);

nlohmann::ordered_json synthetic_truth_json(const SyntheticInstance& inst,
                                            const std::vector<std::string>& a_labels,
                                            const std::vector<std::string>& b_labels);

std::string_view to_string(Metric m) noexcept;
std::optional<Metric> parse_metric(std::string_view s);

}  // namespace gsi
