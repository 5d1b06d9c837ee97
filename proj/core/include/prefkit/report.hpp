#pragma once

#include <optional>
#include <span>
#include <string>

#include "prefkit/aggregation.hpp"
#include "prefkit/audit.hpp"
#include "prefkit/curation.hpp"
#include "prefkit/divisiveness.hpp"

namespace prefkit {

// Every report file self-describes: tool version plus a hash of the run
// configuration, so outputs can be traced back to the exact run.
struct ReportMeta {
  std::string version;
  std::string config_hash;
};

ReportMeta make_meta(std::string_view config_text);
std::string fnv1a_hex(std::string_view text);

// CSV reports carry a leading "# prefkit/<version> config=<hash>" comment
// line and format numbers to 6 significant digits. JSON reports embed a
// "meta" object and keep full precision.

std::string score_table_csv(const ScoreTable& table, const Ranking* ranking,
                            const ReportMeta& meta);
std::string score_table_json(const ScoreTable& table, const Ranking* ranking,
                             const ReportMeta& meta);

std::string divisiveness_csv(std::span<const DivisivenessTable> tables,
                             const ReportMeta& meta);
std::string divisiveness_json(std::span<const DivisivenessTable> tables,
                              const ReportMeta& meta);

std::string multidimensional_csv(const MultidimensionalReport& report,
                                 const ReportMeta& meta);

std::string suspicion_report_json(const SuspicionReport& report,
                                  const ReportMeta& meta);

std::string responsiveness_json(const ResponsivenessMatrix& matrix,
                                const std::string& scenario,
                                const ReportMeta& meta);

struct AuditBundle {
  std::optional<double> efficiency;
  std::optional<IiaReport> iia;
  std::optional<IiaReport> iia_divisiveness;
  std::optional<ConvergenceReport> convergence;
  std::optional<ConvergenceReport> convergence_divisiveness;
  std::optional<SpectralReport> spectral;
  std::optional<AlignmentTable> alignment;
};

std::string audit_report_json(const AuditBundle& bundle, const ReportMeta& meta);
std::string convergence_csv(const ConvergenceReport& report,
                            const ReportMeta& meta);
std::string spectral_csv(const SpectralReport& spectral,
                         const AlignmentTable* alignment,
                         const ReportMeta& meta);

// 6-significant-digit formatting used by the CSV reports.
std::string format_number(double value);

// One regression summary as a JSON object string (embeddable in larger
// documents).
std::string regression_summary_json(const stats::RegressionSummary& summary);

}  // namespace prefkit
