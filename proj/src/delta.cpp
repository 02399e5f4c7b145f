#include "deltasim/delta.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <variant>

#include "deltasim/errors.hpp"

namespace deltasim {

namespace {

std::uint64_t scenario_seed(std::uint64_t base_seed, const std::string& id) {
  return mix_key(base_seed, fnv1a64(id));
}

struct DomainOutcome {
  bool scored = false;
  std::string reason;  // exclusion reason when !scored
  ScenarioEvalRow row;
};

struct ScenarioOutcome {
  std::vector<DomainOutcome> per_domain;
  std::vector<std::string> low_validity_causal;
};

ScenarioOutcome evaluate_scenario(const Scenario& scenario,
                                  const ModelFactory& factory,
                                  const SweepConfig& config) {
  ScenarioOutcome outcome;
  outcome.per_domain.resize(config.domains.size());

  for (const Agent& a : scenario.agents) {
    if (!a.meta.is_causal) continue;
    int valid = 0;
    for (int t = 0; t < scenario.future_len; ++t) {
      if (a.track[scenario.history_len + t].valid) ++valid;
    }
    if (valid * 2 < scenario.future_len) {
      outcome.low_validity_causal.push_back(scenario.id + ":" +
                                            std::to_string(a.meta.id));
    }
  }

  const std::unique_ptr<WorldModel> model = factory.create(scenario);
  const std::uint64_t seed = scenario_seed(config.seed, scenario.id);
  const RolloutSet full =
      rollout(scenario, *model, full_control_mask(scenario), config.K, seed);
  const RolloutSet replay =
      rollout(scenario, *model, ego_replay_mask(scenario), config.K, seed);
  const ScenarioMetrics metrics_full =
      compute_scenario_metrics(full, scenario, config.metric_params);
  const ScenarioMetrics metrics_replay =
      compute_scenario_metrics(replay, scenario, config.metric_params);

  for (std::size_t d = 0; d < config.domains.size(); ++d) {
    DomainOutcome& out = outcome.per_domain[d];
    const DomainBase base = config.domains[d];
    const std::string name = domain_base_name(base);
    try {
      const auto dom_ego = select_domain(scenario, {base, true});
      const auto dom_sim = select_domain(scenario, {base, false});
      if (dom_ego.empty()) throw ValidationError("empty evaluation domain");
      if (dom_sim.empty()) throw ValidationError("empty sim domain");
      ScenarioEvalRow row;
      row.scenario_id = scenario.id;
      row.m = score_domain(metrics_full, scenario, dom_ego, config.spec,
                           config.weights, name)
                  .metametric;
      row.m_hat = score_domain(metrics_replay, scenario, dom_ego, config.spec,
                               config.weights, name)
                      .metametric;
      row.m_sim = score_domain(metrics_full, scenario, dom_sim, config.spec,
                               config.weights, name)
                      .metametric;
      row.m_hat_sim = score_domain(metrics_replay, scenario, dom_sim, config.spec,
                                   config.weights, name)
                          .metametric;
      row.dm = row.m - row.m_hat;
      row.dm_sim = row.m_sim - row.m_hat_sim;
      row.minade_full = min_ade(full, scenario, dom_sim);
      row.minade_replay = min_ade(replay, scenario, dom_sim);
      out.scored = true;
      out.row = std::move(row);
    } catch (const Error& e) {
      out.scored = false;
      out.reason = e.what();
    }
  }
  return outcome;
}

}  // namespace

FourWayScores four_way_scores(const Scenario& scenario, const WorldModel& model,
                              int K, std::uint64_t seed, DomainBase base,
                              const HistogramSpec& spec, const Weights& weights) {
  const auto dom_ego = select_domain(scenario, {base, true});
  const auto dom_sim = select_domain(scenario, {base, false});
  if (dom_ego.empty()) throw ValidationError("empty evaluation domain");
  if (dom_sim.empty()) throw ValidationError("empty sim domain");

  const RolloutSet full =
      rollout(scenario, model, full_control_mask(scenario), K, seed);
  const RolloutSet replay =
      rollout(scenario, model, ego_replay_mask(scenario), K, seed);
  const ScenarioMetrics metrics_full = compute_scenario_metrics(full, scenario);
  const ScenarioMetrics metrics_replay = compute_scenario_metrics(replay, scenario);

  const std::string name = domain_base_name(base);
  FourWayScores s;
  s.scenario_id = scenario.id;
  s.m = score_domain(metrics_full, scenario, dom_ego, spec, weights, name).metametric;
  s.m_hat =
      score_domain(metrics_replay, scenario, dom_ego, spec, weights, name).metametric;
  s.m_sim =
      score_domain(metrics_full, scenario, dom_sim, spec, weights, name).metametric;
  s.m_hat_sim =
      score_domain(metrics_replay, scenario, dom_sim, spec, weights, name).metametric;
  return s;
}

std::vector<DeltaRecord> delta_records(std::span<const FourWayScores> scores) {
  std::vector<DeltaRecord> out;
  out.reserve(scores.size());
  for (const FourWayScores& s : scores) {
    out.push_back({s.scenario_id, s.m - s.m_hat, s.m_sim - s.m_hat_sim});
  }
  return out;
}

DeltaAggregate delta_metrics(std::span<const DeltaRecord> records) {
  if (records.empty()) throw ValidationError("no delta records");
  DeltaAggregate agg;
  for (const DeltaRecord& r : records) {
    agg.abs_dm += std::abs(r.dm);
    agg.signed_dm += r.dm;
    agg.abs_dm_sim += std::abs(r.dm_sim);
    agg.signed_dm_sim += r.dm_sim;
  }
  const double n = static_cast<double>(records.size());
  agg.abs_dm /= n;
  agg.signed_dm /= n;
  agg.abs_dm_sim /= n;
  agg.signed_dm_sim /= n;
  return agg;
}

ConfusionSummary confusion_rates(std::span<const DeltaRecord> records, double tau) {
  if (!(tau > 0.0)) throw ValidationError("tau must be > 0");
  if (records.empty()) throw ValidationError("no delta records");
  ConfusionSummary out;
  out.tau = tau;
  out.n = static_cast<std::int64_t>(records.size());
  std::int64_t n_dm = 0, n_dm_sim = 0;
  for (const DeltaRecord& r : records) {
    const bool dm_hit = r.dm > tau;
    const bool dm_sim_hit = r.dm_sim > tau;
    if (dm_hit) ++n_dm;
    if (dm_sim_hit) ++n_dm_sim;
    // A scenario flagged by both conditions counts once in the union.
    if (dm_hit || dm_sim_hit) out.sim_confused.push_back(r.scenario_id);
    if (r.dm_sim < -tau) out.policy_confused.push_back(r.scenario_id);
  }
  const double n = static_cast<double>(records.size());
  out.rate_dm = n_dm / n;
  out.rate_dm_sim = n_dm_sim / n;
  out.c_s = static_cast<double>(out.sim_confused.size()) / n;
  out.c_p = static_cast<double>(out.policy_confused.size()) / n;
  return out;
}

bool SweepResult::has_exclusions() const {
  for (const DomainResult& d : domains) {
    if (!d.exclusions.empty()) return true;
  }
  return false;
}

SweepResult domain_sweep(std::span<const Scenario> corpus,
                         const ModelFactory& factory, const SweepConfig& config) {
  if (corpus.empty()) throw ValidationError("empty corpus");
  if (config.K < 1) throw ValidationError("rollout count K < 1");
  for (double tau : config.taus) {
    if (!(tau > 0.0)) throw ValidationError("tau must be > 0");
  }
  config.spec.validate();
  config.weights.validate();

  std::vector<ScenarioOutcome> outcomes(corpus.size());
  const int jobs = std::max(1, std::min<int>(config.jobs,
                                             static_cast<int>(corpus.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      outcomes[i] = evaluate_scenario(corpus[i], factory, config);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= corpus.size()) return;
          outcomes[i] = evaluate_scenario(corpus[i], factory, config);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  SweepResult result;
  result.scenario_count = static_cast<std::int64_t>(corpus.size());
  for (const ScenarioOutcome& o : outcomes) {
    for (const std::string& flag : o.low_validity_causal) {
      result.low_validity_causal.push_back(flag);
    }
  }

  for (std::size_t d = 0; d < config.domains.size(); ++d) {
    DomainResult dom;
    dom.base = config.domains[d];
    dom.name = domain_base_name(dom.base);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const DomainOutcome& o = outcomes[i].per_domain[d];
      if (o.scored) {
        dom.rows.push_back(o.row);
      } else {
        dom.exclusions.push_back({corpus[i].id, o.reason});
      }
    }
    if (!dom.rows.empty()) {
      std::vector<DeltaRecord> records;
      records.reserve(dom.rows.size());
      double m = 0, mh = 0, ms = 0, mhs = 0, ade_f = 0, ade_r = 0;
      for (const ScenarioEvalRow& row : dom.rows) {
        records.push_back({row.scenario_id, row.dm, row.dm_sim});
        m += row.m;
        mh += row.m_hat;
        ms += row.m_sim;
        mhs += row.m_hat_sim;
        ade_f += row.minade_full;
        ade_r += row.minade_replay;
      }
      const double n = static_cast<double>(dom.rows.size());
      dom.metametric_full = m / n;
      dom.metametric_replay = mh / n;
      dom.metametric_sim_full = ms / n;
      dom.metametric_sim_replay = mhs / n;
      dom.minade_full = ade_f / n;
      dom.minade_replay = ade_r / n;
      dom.agg = delta_metrics(records);
      for (double tau : config.taus) {
        dom.confusion.push_back(confusion_rates(records, tau));
      }
    }
    result.domains.push_back(std::move(dom));
  }
  return result;
}

}  // namespace deltasim
