#include "deltasim/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "deltasim/errors.hpp"

namespace deltasim {

HistogramSpec HistogramSpec::defaults() {
  HistogramSpec s;
  s.eps = 0.1;
  s.of(Metric::speed) = {0.0, 30.0, 20};
  s.of(Metric::accel) = {-8.0, 8.0, 20};
  s.of(Metric::ang_speed) = {-2.0, 2.0, 20};
  s.of(Metric::ang_accel) = {-4.0, 4.0, 20};
  s.of(Metric::dist_nearest) = {0.0, 40.0, 20};
  s.of(Metric::collision) = {0.0, 1.0, 2};
  s.of(Metric::ttc) = {0.0, 5.0, 20};
  s.of(Metric::dist_road_edge) = {-20.0, 20.0, 20};
  s.of(Metric::offroad) = {0.0, 1.0, 2};
  return s;
}

void HistogramSpec::validate() const {
  if (!(eps > 0.0)) throw ConfigError("histogram eps must be > 0");
  for (Metric m : kAllMetrics) {
    if (metric_is_boolean(m)) continue;
    const MetricRange& r = of(m);
    if (!(r.upper > r.lower)) throw ConfigError("histogram range upper <= lower");
    if (r.bins < 2) throw ConfigError("histogram bin count < 2");
  }
}

int Pmf::bin_of(double v) const {
  if (boolean) return v != 0.0 ? 1 : 0;
  const int bins = static_cast<int>(mass.size());
  const double clamped = std::clamp(v, lower, upper);
  const int b = static_cast<int>((clamped - lower) / (upper - lower) * bins);
  return std::clamp(b, 0, bins - 1);
}

Pmf build_distribution(std::span<const double> sim_values,
                       const HistogramSpec& spec, Metric metric) {
  spec.validate();
  Pmf pmf;
  pmf.metric = metric;
  pmf.boolean = metric_is_boolean(metric);
  const double eps = spec.eps;
  if (pmf.boolean) {
    pmf.lower = 0.0;
    pmf.upper = 1.0;
    double ones = 0.0;
    for (double v : sim_values) ones += v != 0.0 ? 1.0 : 0.0;
    const double n = static_cast<double>(sim_values.size());
    const double p1 = (ones + eps) / (n + 2.0 * eps);
    pmf.mass = {1.0 - p1, p1};
    return pmf;
  }
  const MetricRange& range = spec.of(metric);
  pmf.lower = range.lower;
  pmf.upper = range.upper;
  pmf.mass.assign(range.bins, 0.0);
  for (double v : sim_values) pmf.mass[pmf.bin_of(v)] += 1.0;
  const double denom = static_cast<double>(sim_values.size()) + range.bins * eps;
  for (double& m : pmf.mass) m = (m + eps) / denom;
  return pmf;
}

MetricScore likelihood_score(const Pmf& pmf, std::span<const double> gt_values) {
  MetricScore score;
  score.metric = pmf.metric;
  score.sample_count = static_cast<std::int64_t>(gt_values.size());
  if (gt_values.empty()) return score;  // invalid, excluded from aggregation
  double nll = 0.0;
  for (double v : gt_values) nll -= std::log(pmf.mass_of(v));
  score.nll = nll / static_cast<double>(gt_values.size());
  score.m = std::exp(-score.nll);
  score.valid = true;
  return score;
}

Weights Weights::uniform() {
  Weights w;
  w.w.fill(1.0);
  return w;
}

void Weights::validate() const {
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("negative metric weight");
    sum += v;
  }
  if (!(sum > 0.0)) throw ConfigError("metric weights sum to zero");
}

ScenarioMetrics compute_scenario_metrics(const RolloutSet& rollouts,
                                         const Scenario& scenario,
                                         const MetricParams& params) {
  std::vector<AgentMeta> metas;
  metas.reserve(scenario.agents.size());
  for (const Agent& a : scenario.agents) metas.push_back(a.meta);

  ScenarioMetrics out;
  out.per_rollout.reserve(rollouts.K);
  for (int k = 0; k < rollouts.K; ++k) {
    out.per_rollout.push_back(compute_series(rollout_grid(rollouts, k), metas,
                                             scenario.map, scenario.dt, params));
  }
  out.gt = compute_series(gt_future_grid(scenario), metas, scenario.map,
                          scenario.dt, params);
  return out;
}

ScenarioScores score_domain(const ScenarioMetrics& metrics,
                            const Scenario& scenario,
                            std::span<const std::int64_t> domain,
                            const HistogramSpec& spec, const Weights& weights,
                            const std::string& domain_name) {
  if (domain.empty()) throw ValidationError("empty scoring domain");
  weights.validate();

  std::vector<int> agent_indices;
  for (std::int64_t id : domain) {
    const auto idx = scenario.agent_index(id);
    if (!idx) throw ValidationError("domain agent missing from scenario");
    agent_indices.push_back(static_cast<int>(*idx));
  }

  ScenarioScores out;
  out.scenario_id = scenario.id;
  out.domain = domain_name;
  out.weights = weights;

  std::vector<double> sim_values, gt_values;
  double weighted = 0.0, weight_sum = 0.0;
  bool any_valid = false;
  for (Metric m : kAllMetrics) {
    sim_values.clear();
    gt_values.clear();
    for (const SeriesSet& set : metrics.per_rollout) {
      const SeriesGrid& g = set.of(m);
      for (int a : agent_indices) {
        for (int t = 0; t < g.steps; ++t) {
          if (g.is_valid(a, t)) sim_values.push_back(g.value(a, t));
        }
      }
    }
    const SeriesGrid& gt = metrics.gt.of(m);
    for (int a : agent_indices) {
      for (int t = 0; t < gt.steps; ++t) {
        if (gt.is_valid(a, t)) gt_values.push_back(gt.value(a, t));
      }
    }
    const Pmf pmf = build_distribution(sim_values, spec, m);
    MetricScore score = likelihood_score(pmf, gt_values);
    out.scores[static_cast<int>(m)] = score;
    if (score.valid) {
      const double w = weights.w[static_cast<int>(m)];
      weighted += w * score.m;
      weight_sum += w;
      any_valid = true;
    }
  }
  if (!any_valid || !(weight_sum > 0.0)) throw Error("unscorable scenario");
  out.metametric = weighted / weight_sum;
  return out;
}

ScenarioScores scenario_metametric(const RolloutSet& rollouts,
                                   const Scenario& scenario,
                                   std::span<const std::int64_t> domain,
                                   const HistogramSpec& spec,
                                   const Weights& weights) {
  const ScenarioMetrics metrics = compute_scenario_metrics(rollouts, scenario);
  return score_domain(metrics, scenario, domain, spec, weights, "custom");
}

double corpus_metametric(std::span<const ScenarioScores> per_scenario) {
  if (per_scenario.empty()) throw ValidationError("empty corpus");
  double sum = 0.0;
  for (const ScenarioScores& s : per_scenario) sum += s.metametric;
  return sum / static_cast<double>(per_scenario.size());
}

}  // namespace deltasim
