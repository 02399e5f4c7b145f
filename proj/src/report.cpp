#include "deltasim/report.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "deltasim/errors.hpp"
#include "deltasim/format.hpp"

namespace deltasim {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json confusion_to_json(const ConfusionSummary& c) {
  ordered_json j;
  j["tau"] = c.tau;
  j["n"] = c.n;
  j["rate_dm"] = c.rate_dm;
  j["rate_dm_sim"] = c.rate_dm_sim;
  j["c_s"] = c.c_s;
  j["c_p"] = c.c_p;
  j["sim_confused"] = c.sim_confused;
  j["policy_confused"] = c.policy_confused;
  return j;
}

ConfusionSummary confusion_from_json(const nlohmann::json& j) {
  ConfusionSummary c;
  c.tau = j.at("tau").get<double>();
  c.n = j.at("n").get<std::int64_t>();
  c.rate_dm = j.at("rate_dm").get<double>();
  c.rate_dm_sim = j.at("rate_dm_sim").get<double>();
  c.c_s = j.at("c_s").get<double>();
  c.c_p = j.at("c_p").get<double>();
  c.sim_confused = j.at("sim_confused").get<std::vector<std::string>>();
  c.policy_confused = j.at("policy_confused").get<std::vector<std::string>>();
  return c;
}

}  // namespace

void write_report_json(std::ostream& os, const SweepResult& result,
                       const std::string& model,
                       const std::string& config_echo_json) {
  ordered_json j;
  j["config"] = nlohmann::json::parse(config_echo_json);
  j["model"] = model;
  j["scenario_count"] = result.scenario_count;
  j["low_validity_causal"] = result.low_validity_causal;
  ordered_json domains = ordered_json::array();
  for (const DomainResult& d : result.domains) {
    ordered_json jd;
    jd["name"] = d.name;
    jd["scored"] = d.rows.size();
    jd["excluded"] = d.exclusions.size();
    ordered_json excl = ordered_json::array();
    for (const Exclusion& e : d.exclusions) {
      ordered_json je;
      je["scenario_id"] = e.scenario_id;
      je["reason"] = e.reason;
      excl.push_back(std::move(je));
    }
    jd["exclusions"] = std::move(excl);
    ordered_json agg;
    agg["metametric_full"] = d.metametric_full;
    agg["metametric_replay"] = d.metametric_replay;
    agg["metametric_sim_full"] = d.metametric_sim_full;
    agg["metametric_sim_replay"] = d.metametric_sim_replay;
    agg["delta_abs"] = d.agg.abs_dm;
    agg["delta_signed"] = d.agg.signed_dm;
    agg["delta_sim_abs"] = d.agg.abs_dm_sim;
    agg["delta_sim_signed"] = d.agg.signed_dm_sim;
    agg["minade_full"] = d.minade_full;
    agg["minade_replay"] = d.minade_replay;
    jd["aggregates"] = std::move(agg);
    ordered_json confusion = ordered_json::array();
    for (const ConfusionSummary& c : d.confusion) {
      confusion.push_back(confusion_to_json(c));
    }
    jd["confusion"] = std::move(confusion);
    ordered_json rows = ordered_json::array();
    for (const ScenarioEvalRow& r : d.rows) {
      ordered_json jr;
      jr["id"] = r.scenario_id;
      jr["m"] = r.m;
      jr["m_hat"] = r.m_hat;
      jr["m_sim"] = r.m_sim;
      jr["m_hat_sim"] = r.m_hat_sim;
      jr["dm"] = r.dm;
      jr["dm_sim"] = r.dm_sim;
      jr["minade_full"] = r.minade_full;
      jr["minade_replay"] = r.minade_replay;
      rows.push_back(std::move(jr));
    }
    jd["scenarios"] = std::move(rows);
    domains.push_back(std::move(jd));
  }
  j["domains"] = std::move(domains);
  os << j.dump(2) << "\n";
}

void write_tables_csv(std::ostream& os, const SweepResult& result,
                      const std::string& model,
                      const std::string& config_echo_json) {
  os << "# config " << config_echo_json << "\n";
  os << "row_kind,model,domain,tau,rate_dm,rate_dm_sim,c_s,c_p,n,"
        "metametric,metametric_replay,delta_abs,delta_signed,delta_sim_abs,"
        "delta_sim_signed,minade_full,minade_replay\n";
  for (const DomainResult& d : result.domains) {
    for (const ConfusionSummary& c : d.confusion) {
      os << "failure_analysis," << model << ',' << d.name << ','
         << fmt_double(c.tau) << ',' << fmt_double(c.rate_dm) << ','
         << fmt_double(c.rate_dm_sim) << ',' << fmt_double(c.c_s) << ','
         << fmt_double(c.c_p) << ',' << c.n << ",,,,,,,,\n";
    }
  }
  for (const DomainResult& d : result.domains) {
    for (const ConfusionSummary& c : d.confusion) {
      os << "model_summary," << model << ',' << d.name << ',' << fmt_double(c.tau)
         << ",,," << fmt_double(c.c_s) << ',' << fmt_double(c.c_p) << ',' << c.n
         << ',' << fmt_double(d.metametric_full) << ','
         << fmt_double(d.metametric_replay) << ',' << fmt_double(d.agg.abs_dm)
         << ',' << fmt_double(d.agg.signed_dm) << ','
         << fmt_double(d.agg.abs_dm_sim) << ',' << fmt_double(d.agg.signed_dm_sim)
         << ',' << fmt_double(d.minade_full) << ',' << fmt_double(d.minade_replay)
         << "\n";
    }
  }
}

void write_scatter_csv(std::ostream& os, const SweepResult& result,
                       const std::string& config_echo_json) {
  os << "# config " << config_echo_json << "\n";
  os << "domain,scenario_id,m_sim_full,m_sim_replay,minade_full,minade_replay\n";
  for (const DomainResult& d : result.domains) {
    for (const ScenarioEvalRow& r : d.rows) {
      os << d.name << ',' << r.scenario_id << ',' << fmt_double(r.m_sim) << ','
         << fmt_double(r.m_hat_sim) << ',' << fmt_double(r.minade_full) << ','
         << fmt_double(r.minade_replay) << "\n";
    }
  }
}

void write_hist_csv(std::ostream& os, const SweepResult& result,
                    const std::string& config_echo_json) {
  constexpr double kLo = -0.3, kHi = 0.3, kWidth = 0.005;
  constexpr int kBins = static_cast<int>((kHi - kLo) / kWidth + 0.5);
  os << "# config " << config_echo_json << "\n";
  os << "domain,bin_lo,bin_hi,count_dm,count_dm_sim\n";
  for (const DomainResult& d : result.domains) {
    std::vector<std::int64_t> dm(kBins, 0), dm_sim(kBins, 0);
    auto bin_of = [&](double v) {
      const int b = static_cast<int>((std::clamp(v, kLo, kHi) - kLo) / kWidth);
      return std::clamp(b, 0, kBins - 1);
    };
    for (const ScenarioEvalRow& r : d.rows) {
      ++dm[bin_of(r.dm)];
      ++dm_sim[bin_of(r.dm_sim)];
    }
    for (int b = 0; b < kBins; ++b) {
      os << d.name << ',' << fmt_double(kLo + b * kWidth) << ','
         << fmt_double(kLo + (b + 1) * kWidth) << ',' << dm[b] << ',' << dm_sim[b]
         << "\n";
    }
  }
}

ReportData load_report_json(const std::string& bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report parse error: ") + e.what());
  }
  ReportData data;
  try {
    data.config_echo_json = j.at("config").dump();
    data.model = j.at("model").get<std::string>();
    data.result.scenario_count = j.at("scenario_count").get<std::int64_t>();
    data.result.low_validity_causal =
        j.at("low_validity_causal").get<std::vector<std::string>>();
    for (const auto& jd : j.at("domains")) {
      DomainResult d;
      d.name = jd.at("name").get<std::string>();
      d.base = domain_base_from_name(d.name);
      for (const auto& je : jd.at("exclusions")) {
        d.exclusions.push_back({je.at("scenario_id").get<std::string>(),
                                je.at("reason").get<std::string>()});
      }
      const auto& agg = jd.at("aggregates");
      d.metametric_full = agg.at("metametric_full").get<double>();
      d.metametric_replay = agg.at("metametric_replay").get<double>();
      d.metametric_sim_full = agg.at("metametric_sim_full").get<double>();
      d.metametric_sim_replay = agg.at("metametric_sim_replay").get<double>();
      d.agg.abs_dm = agg.at("delta_abs").get<double>();
      d.agg.signed_dm = agg.at("delta_signed").get<double>();
      d.agg.abs_dm_sim = agg.at("delta_sim_abs").get<double>();
      d.agg.signed_dm_sim = agg.at("delta_sim_signed").get<double>();
      d.minade_full = agg.at("minade_full").get<double>();
      d.minade_replay = agg.at("minade_replay").get<double>();
      for (const auto& jc : jd.at("confusion")) {
        d.confusion.push_back(confusion_from_json(jc));
      }
      for (const auto& jr : jd.at("scenarios")) {
        ScenarioEvalRow r;
        r.scenario_id = jr.at("id").get<std::string>();
        r.m = jr.at("m").get<double>();
        r.m_hat = jr.at("m_hat").get<double>();
        r.m_sim = jr.at("m_sim").get<double>();
        r.m_hat_sim = jr.at("m_hat_sim").get<double>();
        r.dm = jr.at("dm").get<double>();
        r.dm_sim = jr.at("dm_sim").get<double>();
        r.minade_full = jr.at("minade_full").get<double>();
        r.minade_replay = jr.at("minade_replay").get<double>();
        d.rows.push_back(std::move(r));
      }
      data.result.domains.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report parse error: ") + e.what());
  }
  return data;
}

void recompute_confusion(SweepResult& result, std::span<const double> taus) {
  for (DomainResult& d : result.domains) {
    d.confusion.clear();
    if (d.rows.empty()) continue;
    std::vector<DeltaRecord> records;
    records.reserve(d.rows.size());
    for (const ScenarioEvalRow& r : d.rows) {
      records.push_back({r.scenario_id, r.dm, r.dm_sim});
    }
    for (double tau : taus) d.confusion.push_back(confusion_rates(records, tau));
  }
}

}  // namespace deltasim
