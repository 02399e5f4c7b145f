#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "deltasim/metrics.hpp"

namespace deltasim {

struct MetricRange {
  double lower = 0.0;
  double upper = 1.0;
  int bins = 20;
};

// Histogram estimator settings per metric. Boolean metrics use Bernoulli
// estimation; their range entry is ignored.
struct HistogramSpec {
  double eps = 0.1;  // additive smoothing mass per bin
  std::array<MetricRange, kMetricCount> ranges;

  static HistogramSpec defaults();
  const MetricRange& of(Metric m) const { return ranges[static_cast<int>(m)]; }
  MetricRange& of(Metric m) { return ranges[static_cast<int>(m)]; }
  void validate() const;
};

// Probability mass function over histogram bins (2 bins for booleans).
struct Pmf {
  Metric metric = Metric::speed;
  bool boolean = false;
  double lower = 0.0;
  double upper = 1.0;
  std::vector<double> mass;

  int bin_of(double v) const;
  double mass_of(double v) const { return mass[bin_of(v)]; }
};

// Smoothed histogram / Bernoulli fit of the simulated values. Empty input
// yields the uniform pmf.
Pmf build_distribution(std::span<const double> sim_values,
                       const HistogramSpec& spec, Metric metric);

struct MetricScore {
  Metric metric = Metric::speed;
  double m = 0.0;    // exp(-nll), in (0, 1] when valid
  double nll = 0.0;
  std::int64_t sample_count = 0;
  bool valid = false;
};

// NLL of the GT samples under the pmf; m = exp(-nll). Empty input marks the
// score invalid so aggregation can skip it.
MetricScore likelihood_score(const Pmf& pmf, std::span<const double> gt_values);

struct Weights {
  std::array<double, kMetricCount> w;

  static Weights uniform();
  void validate() const;
};

struct ScenarioScores {
  std::string scenario_id;
  std::string domain;
  double metametric = 0.0;  // weighted mean of valid per-metric scores
  std::array<MetricScore, kMetricCount> scores;
  Weights weights = Weights::uniform();
};

// Precomputed component series for one rollout set, reusable across domains.
struct ScenarioMetrics {
  std::vector<SeriesSet> per_rollout;
  SeriesSet gt;
};

ScenarioMetrics compute_scenario_metrics(const RolloutSet& rollouts,
                                         const Scenario& scenario,
                                         const MetricParams& params = {});

// Pools sim values over domain agents x timesteps x rollouts into per-metric
// pmfs, scores the pooled GT values against them, and aggregates.
// Throws Error("unscorable scenario") when every metric ends up invalid.
ScenarioScores score_domain(const ScenarioMetrics& metrics,
                            const Scenario& scenario,
                            std::span<const std::int64_t> domain,
                            const HistogramSpec& spec, const Weights& weights,
                            const std::string& domain_name);

// Convenience single-call form.
ScenarioScores scenario_metametric(const RolloutSet& rollouts,
                                   const Scenario& scenario,
                                   std::span<const std::int64_t> domain,
                                   const HistogramSpec& spec,
                                   const Weights& weights);

// Unweighted mean of per-scenario metametrics.
double corpus_metametric(std::span<const ScenarioScores> per_scenario);

}  // namespace deltasim
