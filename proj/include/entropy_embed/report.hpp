#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entropy_embed/nue.hpp"

namespace entropy_embed {

constexpr int kReportSchemaVersion = 1;

/// Row sums of the CTE matrix: the information each channel sends.
Vector information_sent(const Matrix& cte);

/// Analysis report as JSON. Everything except the "timings" member is a pure
/// function of the inputs and the configuration.
nlohmann::json analysis_report(const MultivariateSeries& series, const NueConfig& config,
                               const DependencyResult& result);

/// CTE matrix with a header of target labels and one row per source.
void write_cte_csv(std::ostream& out, const MultivariateSeries& series, const Matrix& cte);

/// Plain-text summary: per-target embedding sizes and the top senders.
void print_summary(std::ostream& out, const MultivariateSeries& series,
                   const DependencyResult& result, int top = 5);

}  // namespace entropy_embed
