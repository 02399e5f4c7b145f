#include "deltasim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "deltasim/errors.hpp"

namespace deltasim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("trailing characters in number: " + s);
    return v;
  } catch (const std::invalid_argument&) {
    throw ConfigError("not a number: " + s);
  } catch (const std::out_of_range&) {
    throw ConfigError("number out of range: " + s);
  }
}

std::int64_t parse_int(const std::string& s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("not an integer: " + s);
  }
  return v;
}

Metric weight_metric(const std::string& name) { return metric_from_name(name); }

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) {
    if (!item.empty()) out.push_back(parse_double(item));
  }
  return out;
}

void apply_config_entry(HarnessConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "corpus") {
    config.corpus_dir = value;
  } else if (key == "out") {
    config.out_dir = value;
  } else if (key == "model") {
    config.model = value;
  } else if (key == "causal_labels") {
    config.causal_labels = value;
  } else if (key == "k") {
    config.k = static_cast<int>(parse_int(value));
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_int(value));
  } else if (key == "jobs") {
    config.jobs = static_cast<int>(parse_int(value));
  } else if (key == "tau") {
    config.taus = parse_double_list(value);
  } else if (key == "domains") {
    config.domains.clear();
    for (const std::string& d : split(value, ',')) {
      if (!d.empty()) config.domains.push_back(domain_base_from_name(d));
    }
  } else if (key == "hist.eps") {
    config.hist.eps = parse_double(value);
  } else if (key == "hist.bins") {
    const int bins = static_cast<int>(parse_int(value));
    for (Metric m : kAllMetrics) {
      if (!metric_is_boolean(m)) config.hist.of(m).bins = bins;
    }
  } else if (key.rfind("hist.", 0) == 0) {
    const Metric m = metric_from_name(key.substr(5));
    const auto parts = parse_double_list(value);
    if (parts.size() != 2 && parts.size() != 3) {
      throw ConfigError("histogram range needs lo,hi[,bins]: " + key);
    }
    config.hist.of(m).lower = parts[0];
    config.hist.of(m).upper = parts[1];
    if (parts.size() == 3) config.hist.of(m).bins = static_cast<int>(parts[2]);
  } else if (key == "weights") {
    const auto parts = parse_double_list(value);
    if (parts.size() != kMetricCount) {
      throw ConfigError("weights needs 9 comma-separated values");
    }
    for (int i = 0; i < kMetricCount; ++i) config.weights.w[i] = parts[i];
  } else if (key.rfind("weight.", 0) == 0) {
    config.weights.w[static_cast<int>(weight_metric(key.substr(7)))] =
        parse_double(value);
  } else if (key == "metrics.d_cap") {
    config.metric_params.d_cap = parse_double(value);
  } else if (key == "metrics.ttc_max") {
    config.metric_params.ttc_max = parse_double(value);
  } else if (key == "gen.n") {
    config.gen.count = static_cast<int>(parse_int(value));
  } else if (key == "gen.template") {
    config.gen.tmpl = template_kind_from_name(value);
  } else if (key == "gen.dt") {
    config.gen.dt = parse_double(value);
  } else if (key == "gen.history_len") {
    config.gen.history_len = static_cast<int>(parse_int(value));
  } else if (key == "gen.future_len") {
    config.gen.future_len = static_cast<int>(parse_int(value));
  } else if (key == "train.p_drop") {
    config.train.p_drop = parse_double(value);
  } else if (key == "train.epochs") {
    config.train.epochs = static_cast<int>(parse_int(value));
  } else if (key == "train.lr") {
    config.train.lr = parse_double(value);
  } else if (key == "train.k_train") {
    config.train.k_train = static_cast<int>(parse_int(value));
  } else if (key == "train.sigma_accel") {
    config.train.sigma_accel = parse_double(value);
  } else if (key == "train.sigma_yaw") {
    config.train.sigma_yaw = parse_double(value);
  } else if (key == "train.ego_dropout") {
    if (value == "eligible") {
      config.train.ego_dropout = EgoDropout::eligible;
    } else if (value == "never") {
      config.train.ego_dropout = EgoDropout::never;
    } else {
      throw ConfigError("train.ego_dropout must be eligible|never");
    }
  } else if (key == "train.mask_resample") {
    if (value == "scenario_epoch") {
      config.train.mask_resample = MaskResample::per_scenario_epoch;
    } else if (value == "epoch") {
      config.train.mask_resample = MaskResample::per_epoch;
    } else {
      throw ConfigError("train.mask_resample must be scenario_epoch|epoch");
    }
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

void apply_config_text(HarnessConfig& config, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        " is not key = value");
    }
    apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_config_file(HarnessConfig& config, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(config, buf.str());
}

std::string HarnessConfig::echo_json() const {
  nlohmann::ordered_json j;
  j["corpus"] = corpus_dir;
  j["out"] = out_dir;
  j["model"] = model;
  j["causal_labels"] = causal_labels;
  j["k"] = k;
  j["seed"] = seed;
  j["tau"] = taus;
  nlohmann::ordered_json doms = nlohmann::ordered_json::array();
  for (DomainBase d : domains) doms.push_back(domain_base_name(d));
  j["domains"] = std::move(doms);
  j["jobs"] = jobs;
  nlohmann::ordered_json hist_j;
  hist_j["eps"] = hist.eps;
  for (Metric m : kAllMetrics) {
    if (metric_is_boolean(m)) continue;
    const MetricRange& r = hist.of(m);
    hist_j[metric_name(m)] = nlohmann::ordered_json::array({r.lower, r.upper, r.bins});
  }
  j["hist"] = std::move(hist_j);
  nlohmann::ordered_json w = nlohmann::ordered_json::array();
  for (double v : weights.w) w.push_back(v);
  j["weights"] = std::move(w);
  nlohmann::ordered_json metrics_j;
  metrics_j["d_cap"] = metric_params.d_cap;
  metrics_j["ttc_max"] = metric_params.ttc_max;
  j["metrics"] = std::move(metrics_j);
  nlohmann::ordered_json gen_j;
  gen_j["n"] = gen.count;
  gen_j["template"] = template_kind_name(gen.tmpl);
  gen_j["dt"] = gen.dt;
  gen_j["history_len"] = gen.history_len;
  gen_j["future_len"] = gen.future_len;
  j["gen"] = std::move(gen_j);
  nlohmann::ordered_json train_j;
  train_j["p_drop"] = train.p_drop;
  train_j["epochs"] = train.epochs;
  train_j["lr"] = train.lr;
  train_j["k_train"] = train.k_train;
  train_j["seed"] = train.seed;
  train_j["sigma_accel"] = train.sigma_accel;
  train_j["sigma_yaw"] = train.sigma_yaw;
  train_j["ego_dropout"] =
      train.ego_dropout == EgoDropout::eligible ? "eligible" : "never";
  train_j["mask_resample"] = train.mask_resample == MaskResample::per_scenario_epoch
                                 ? "scenario_epoch"
                                 : "epoch";
  j["train"] = std::move(train_j);
  return j.dump();
}

}  // namespace deltasim
