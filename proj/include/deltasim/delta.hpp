#pragma once

#include <span>
#include <string>
#include <vector>

#include "deltasim/likelihood.hpp"
#include "deltasim/models.hpp"

namespace deltasim {

// The four-way protocol: metametrics of the full-control rollout set and the
// ego-replay rollout set, scored with and without the ego in the domain.
struct FourWayScores {
  std::string scenario_id;
  double m = 0.0;          // full control, ego included
  double m_hat = 0.0;      // ego replay, ego included
  double m_sim = 0.0;      // full control, ego excluded
  double m_hat_sim = 0.0;  // ego replay, ego excluded
};

struct DeltaRecord {
  std::string scenario_id;
  double dm = 0.0;      // m - m_hat
  double dm_sim = 0.0;  // m_sim - m_hat_sim
};

// Aggregates over a record list. The absolute means are the headline shift
// numbers; the signed means are kept alongside since cancellation hides
// bidirectional failures.
struct DeltaAggregate {
  double abs_dm = 0.0;
  double signed_dm = 0.0;
  double abs_dm_sim = 0.0;
  double signed_dm_sim = 0.0;
};

struct ConfusionSummary {
  double tau = 0.0;
  std::int64_t n = 0;
  double rate_dm = 0.0;      // fraction with dm > tau
  double rate_dm_sim = 0.0;  // fraction with dm_sim > tau
  double c_s = 0.0;          // union rate: dm > tau or dm_sim > tau
  double c_p = 0.0;          // fraction with dm_sim < -tau
  std::vector<std::string> sim_confused;
  std::vector<std::string> policy_confused;
};

// Both rollout sets share K and seed, so paired substreams keep shared
// controlled agents on identical noise. Throws ValidationError when the
// requested domain (with or without ego) is empty.
FourWayScores four_way_scores(const Scenario& scenario, const WorldModel& model,
                              int K, std::uint64_t seed, DomainBase base,
                              const HistogramSpec& spec, const Weights& weights);

std::vector<DeltaRecord> delta_records(std::span<const FourWayScores> scores);
DeltaAggregate delta_metrics(std::span<const DeltaRecord> records);
ConfusionSummary confusion_rates(std::span<const DeltaRecord> records, double tau);

struct ScenarioEvalRow {
  std::string scenario_id;
  double m = 0.0, m_hat = 0.0, m_sim = 0.0, m_hat_sim = 0.0;
  double dm = 0.0, dm_sim = 0.0;
  double minade_full = 0.0, minade_replay = 0.0;  // over the sim domain
};

struct Exclusion {
  std::string scenario_id;
  std::string reason;
};

struct DomainResult {
  DomainBase base = DomainBase::EvalSet;
  std::string name;
  std::vector<ScenarioEvalRow> rows;  // corpus order, scored scenarios only
  std::vector<Exclusion> exclusions;
  DeltaAggregate agg;
  double metametric_full = 0.0;
  double metametric_replay = 0.0;
  double metametric_sim_full = 0.0;
  double metametric_sim_replay = 0.0;
  double minade_full = 0.0;
  double minade_replay = 0.0;
  std::vector<ConfusionSummary> confusion;  // one per requested tau
};

struct SweepConfig {
  int K = 32;
  std::uint64_t seed = 1;
  std::vector<double> taus{0.035, 0.05};
  HistogramSpec spec = HistogramSpec::defaults();
  Weights weights = Weights::uniform();
  MetricParams metric_params;
  std::vector<DomainBase> domains{DomainBase::EvalSet, DomainBase::Causal,
                                  DomainBase::Union};
  int jobs = 1;
};

struct SweepResult {
  std::vector<DomainResult> domains;
  std::int64_t scenario_count = 0;
  // Causal agents valid for under half the future, flagged for review.
  std::vector<std::string> low_validity_causal;  // "scenario_id:agent_id"

  bool has_exclusions() const;
};

// Full evaluation per requested domain. Rollouts are computed once per
// scenario and shared across domains; scenario-level failures become
// exclusions with a reason, never silent drops. Output is identical for any
// jobs value.
SweepResult domain_sweep(std::span<const Scenario> corpus,
                         const ModelFactory& factory, const SweepConfig& config);

}  // namespace deltasim
