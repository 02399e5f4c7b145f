#pragma once

#include <string>
#include <vector>

#include "deltasim/delta.hpp"
#include "deltasim/generator.hpp"
#include "deltasim/toy_model.hpp"

namespace deltasim {

// Resolved harness settings: config-file values overlaid by CLI flags.
struct HarnessConfig {
  std::string corpus_dir;
  std::string out_dir = "out";
  std::string model = "replay";
  std::string causal_labels;

  int k = 32;
  std::uint64_t seed = 1;
  std::vector<double> taus{0.035, 0.05};
  std::vector<DomainBase> domains{DomainBase::EvalSet, DomainBase::Causal,
                                  DomainBase::Union};
  int jobs = 1;
  HistogramSpec hist = HistogramSpec::defaults();
  Weights weights = Weights::uniform();
  MetricParams metric_params;

  GeneratorConfig gen;
  TrainConfig train;

  // Full resolved settings as canonical JSON, embedded in every output file.
  std::string echo_json() const;
};

// One `key = value` assignment; unknown keys throw ConfigError.
void apply_config_entry(HarnessConfig& config, const std::string& key,
                        const std::string& value);

// Plain-text key-value document: one assignment per line, `#` comments.
void apply_config_text(HarnessConfig& config, const std::string& text);
void apply_config_file(HarnessConfig& config, const std::string& path);

std::vector<double> parse_double_list(const std::string& text);

}  // namespace deltasim
