#include "prefkit/report.hpp"

#include <cstdio>

#include <json.hpp>

#include "prefkit/version.hpp"

namespace prefkit {

using nlohmann::json;

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

ReportMeta make_meta(std::string_view config_text) {
  return {kVersion, fnv1a_hex(config_text)};
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

namespace {

std::string csv_header_comment(const ReportMeta& meta) {
  return "# prefkit/" + meta.version + " config=" + meta.config_hash + "\n";
}

json meta_json(const ReportMeta& meta) {
  return json{{"tool", "prefkit"},
              {"version", meta.version},
              {"config_hash", meta.config_hash}};
}

json regression_json(const stats::RegressionSummary& summary) {
  json coefficients = json::array();
  for (std::size_t i = 0; i < summary.names.size(); ++i) {
    coefficients.push_back(json{{"name", summary.names[i]},
                                {"estimate", summary.coefficients[i]},
                                {"std_error", summary.std_errors[i]},
                                {"t_value", summary.t_values[i]},
                                {"p_value", summary.p_values[i]}});
  }
  return json{{"coefficients", coefficients},
              {"r2", summary.r2},
              {"adjusted_r2", summary.adjusted_r2},
              {"residual_std_error", summary.residual_std_error},
              {"df", summary.df},
              {"n", summary.n}};
}

}  // namespace

std::string regression_summary_json(const stats::RegressionSummary& summary) {
  return regression_json(summary).dump();
}

std::string score_table_csv(const ScoreTable& table, const Ranking* ranking,
                            const ReportMeta& meta) {
  std::string out = csv_header_comment(meta);
  out += "proposal_id,mean,ci_low,ci_high,n,rank\n";
  for (const auto& row : table.rows) {
    std::string rank;
    if (ranking) {
      auto it = ranking->position.find(row.proposal_id);
      if (it != ranking->position.end()) rank = std::to_string(it->second);
    }
    if (!row.defined) {
      out += std::to_string(row.proposal_id) + ",,,," +
             std::to_string(row.n) + ",\n";
      continue;
    }
    out += std::to_string(row.proposal_id) + "," + format_number(row.mean) +
           "," + format_number(row.ci_low) + "," + format_number(row.ci_high) +
           "," + std::to_string(row.n) + "," + rank + "\n";
  }
  return out;
}

std::string score_table_json(const ScoreTable& table, const Ranking* ranking,
                             const ReportMeta& meta) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r{{"proposal_id", row.proposal_id},
           {"n", row.n},
           {"defined", row.defined}};
    if (row.defined) {
      r["mean"] = row.mean;
      r["ci_low"] = row.ci_low;
      r["ci_high"] = row.ci_high;
    }
    if (ranking) {
      auto it = ranking->position.find(row.proposal_id);
      if (it != ranking->position.end()) r["rank"] = it->second;
    }
    rows.push_back(std::move(r));
  }
  json doc{{"meta", meta_json(meta)},
           {"function", table.function},
           {"scores", rows}};
  return doc.dump(2) + "\n";
}

std::string divisiveness_csv(std::span<const DivisivenessTable> tables,
                             const ReportMeta& meta) {
  std::string out = csv_header_comment(meta);
  out += "proposal_id,metric,value,ci_low,ci_high,n_valid_terms,flags\n";
  for (const auto& table : tables) {
    for (const auto& row : table.rows) {
      out += std::to_string(row.proposal_id) + "," + table.metric + ",";
      if (row.defined) {
        out += format_number(row.value) + "," + format_number(row.ci_low) +
               "," + format_number(row.ci_high);
      } else {
        out += ",,";
      }
      out += "," + std::to_string(row.n_valid_terms) + "," +
             (row.defined ? "" : "undefined") + "\n";
    }
  }
  return out;
}

std::string divisiveness_json(std::span<const DivisivenessTable> tables,
                              const ReportMeta& meta) {
  json list = json::array();
  for (const auto& table : tables) {
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r{{"proposal_id", row.proposal_id},
             {"n_valid_terms", row.n_valid_terms},
             {"defined", row.defined}};
      if (row.defined) {
        r["value"] = row.value;
        r["ci_low"] = row.ci_low;
        r["ci_high"] = row.ci_high;
      }
      rows.push_back(std::move(r));
    }
    list.push_back(json{{"metric", table.metric}, {"rows", rows}});
  }
  json doc{{"meta", meta_json(meta)}, {"tables", list}};
  return doc.dump(2) + "\n";
}

std::string multidimensional_csv(const MultidimensionalReport& report,
                                 const ReportMeta& meta) {
  std::string out = csv_header_comment(meta);
  out += "proposal_id";
  for (const auto& column : report.columns) out += "," + column;
  out += "\n";
  for (std::size_t i = 0; i < report.proposal_ids.size(); ++i) {
    out += std::to_string(report.proposal_ids[i]);
    for (const auto& value : report.values[i]) {
      out += ",";
      if (value) out += format_number(*value);
    }
    out += "\n";
  }
  return out;
}

std::string suspicion_report_json(const SuspicionReport& report,
                                  const ReportMeta& meta) {
  json users = json::array();
  for (const auto& [user, entry] : report.users) {
    json criteria = json::array();
    for (int c : entry.criteria) criteria.push_back(c);
    users.push_back(json{
        {"user_id", user}, {"criteria", criteria}, {"flagged", entry.flagged}});
  }
  json disabled = json::array();
  for (int c : report.disabled_criteria) disabled.push_back(c);
  json doc{{"meta", meta_json(meta)},
           {"disabled_criteria", disabled},
           {"flagged_count", report.flagged_count()},
           {"users", users}};
  return doc.dump(2) + "\n";
}

std::string responsiveness_json(const ResponsivenessMatrix& matrix,
                                const std::string& scenario,
                                const ReportMeta& meta) {
  const char* participant[2] = {"left", "right"};
  const char* proposal[2] = {"left", "right"};
  json cells = json::array();
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      cells.push_back(json{{"participants", participant[p]},
                           {"proposals", proposal[q]},
                           {"approval_rate", matrix.rate[p][q]},
                           {"judgments", matrix.denom[p][q]}});
    }
  }
  json doc{{"meta", meta_json(meta)},
           {"scenario", scenario},
           {"left_proposals", matrix.left_proposals},
           {"right_proposals", matrix.right_proposals},
           {"dropped_proposals", matrix.dropped_proposals},
           {"cells", cells}};
  return doc.dump(2) + "\n";
}

namespace {

json iia_json(const IiaReport& iia) {
  json removals = json::array();
  for (const auto& removal : iia.removals) {
    json distances = json::object();
    for (const auto& [id, d] : removal.distances) {
      distances[std::to_string(id)] = d;
    }
    removals.push_back(json{{"removed", removal.removed_id},
                            {"failed", removal.failed},
                            {"distances", distances}});
  }
  return json{{"threshold", iia.threshold},
              {"robustness", iia.robustness},
              {"top_robustness", iia.top_robustness},
              {"cells", iia.cells},
              {"violations", iia.violations},
              {"missing", iia.missing},
              {"removals", removals}};
}

json convergence_json(const ConvergenceReport& convergence) {
  json points = json::array();
  for (const auto& point : convergence.points) {
    points.push_back(json{{"size", point.size},
                          {"median", point.median},
                          {"q25", point.q25},
                          {"q75", point.q75},
                          {"taus", point.taus}});
  }
  json doc{{"tau_threshold", convergence.tau_threshold}, {"points", points}};
  if (convergence.converged_size) {
    doc["converged_size"] = *convergence.converged_size;
  } else {
    doc["converged_size"] = nullptr;
  }
  return doc;
}

json spectral_json(const SpectralReport& spectral,
                   const AlignmentTable* alignment) {
  json factors = json::array();
  for (std::size_t t = 0; t < spectral.singular_values.size(); ++t) {
    json row{{"index", t + 1},
             {"sigma", spectral.singular_values[t]},
             {"variance_share", spectral.variance_share[t]}};
    if (alignment && t < alignment->rows.size()) {
      const auto& a = alignment->rows[t];
      row["r2_vs_win"] = a.r2_vs_score ? json(*a.r2_vs_score) : json(nullptr);
      row["r2_vs_div"] = a.r2_vs_divisiveness ? json(*a.r2_vs_divisiveness)
                                              : json(nullptr);
    }
    factors.push_back(std::move(row));
  }
  json doc{{"n", spectral.n}, {"k", spectral.k}, {"factors", factors}};
  if (alignment) {
    if (alignment->score_regression) {
      doc["win_on_eigenvectors"] = regression_json(*alignment->score_regression);
    }
    if (alignment->divisiveness_regression) {
      doc["divisiveness_on_eigenvectors"] =
          regression_json(*alignment->divisiveness_regression);
    }
  }
  return doc;
}

}  // namespace

std::string audit_report_json(const AuditBundle& bundle,
                              const ReportMeta& meta) {
  json doc{{"meta", meta_json(meta)}};
  doc["efficiency"] = bundle.efficiency ? json(*bundle.efficiency) : json(nullptr);
  if (bundle.iia) doc["iia"] = iia_json(*bundle.iia);
  if (bundle.iia_divisiveness) {
    doc["iia_divisiveness"] = iia_json(*bundle.iia_divisiveness);
  }
  if (bundle.convergence) {
    doc["convergence"] = convergence_json(*bundle.convergence);
  }
  if (bundle.convergence_divisiveness) {
    doc["convergence_divisiveness"] =
        convergence_json(*bundle.convergence_divisiveness);
  }
  if (bundle.spectral) {
    doc["spectral"] = spectral_json(
        *bundle.spectral,
        bundle.alignment ? &*bundle.alignment : nullptr);
  }
  return doc.dump(2) + "\n";
}

std::string convergence_csv(const ConvergenceReport& report,
                            const ReportMeta& meta) {
  std::string out = csv_header_comment(meta);
  out += "size,median,q25,q75,iterations\n";
  for (const auto& point : report.points) {
    out += std::to_string(point.size) + "," + format_number(point.median) +
           "," + format_number(point.q25) + "," + format_number(point.q75) +
           "," + std::to_string(point.taus.size()) + "\n";
  }
  return out;
}

std::string spectral_csv(const SpectralReport& spectral,
                         const AlignmentTable* alignment,
                         const ReportMeta& meta) {
  std::string out = csv_header_comment(meta);
  out += "index,sigma,variance_share,r2_vs_win,r2_vs_div\n";
  for (std::size_t t = 0; t < spectral.singular_values.size(); ++t) {
    out += std::to_string(t + 1) + "," +
           format_number(spectral.singular_values[t]) + "," +
           format_number(spectral.variance_share[t]);
    std::string r2w, r2d;
    if (alignment && t < alignment->rows.size()) {
      const auto& a = alignment->rows[t];
      if (a.r2_vs_score) r2w = format_number(*a.r2_vs_score);
      if (a.r2_vs_divisiveness) r2d = format_number(*a.r2_vs_divisiveness);
    }
    out += "," + r2w + "," + r2d + "\n";
  }
  return out;
}

}  // namespace prefkit
