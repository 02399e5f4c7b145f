#pragma once

#include <ostream>
#include <string>

#include "deltasim/delta.hpp"

namespace deltasim {

// Every emitted file embeds the resolved config (JSON documents carry a
// "config" object, CSVs a leading `# config <json>` line) so results stay
// auditable and bit-stable given identical inputs.

void write_report_json(std::ostream& os, const SweepResult& result,
                       const std::string& model,
                       const std::string& config_echo_json);

// Rows replicating the failure-analysis and model-summary table shapes.
void write_tables_csv(std::ostream& os, const SweepResult& result,
                      const std::string& model,
                      const std::string& config_echo_json);

// Per-scenario replay-vs-original metametric and minADE pairs.
void write_scatter_csv(std::ostream& os, const SweepResult& result,
                       const std::string& config_echo_json);

// Binned per-domain histograms of the signed deltas.
void write_hist_csv(std::ostream& os, const SweepResult& result,
                    const std::string& config_echo_json);

struct ReportData {
  SweepResult result;
  std::string model;
  std::string config_echo_json;
};

// Parses a report.json back into memory; confusion summaries can then be
// recomputed at different thresholds from the per-scenario rows.
ReportData load_report_json(const std::string& bytes);

// Rebuilds the confusion summaries of every domain at the given thresholds.
void recompute_confusion(SweepResult& result, std::span<const double> taus);

}  // namespace deltasim
