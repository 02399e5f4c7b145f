#include "deltasim/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "deltasim/errors.hpp"
#include "deltasim/format.hpp"
#include "deltasim/report.hpp"

namespace deltasim {

namespace fs = std::filesystem;

namespace {

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_outputs(const fs::path& dir, const SweepResult& result,
                   const std::string& model, const std::string& echo) {
  {
    std::ostringstream os;
    write_report_json(os, result, model, echo);
    write_text_file(dir / "report.json", os.str());
  }
  {
    std::ostringstream os;
    write_tables_csv(os, result, model, echo);
    write_text_file(dir / "tables.csv", os.str());
  }
  {
    std::ostringstream os;
    write_scatter_csv(os, result, echo);
    write_text_file(dir / "scatter.csv", os.str());
  }
  {
    std::ostringstream os;
    write_hist_csv(os, result, echo);
    write_text_file(dir / "hist.csv", os.str());
  }
}

}  // namespace

std::vector<Scenario> load_corpus(const HarnessConfig& config) {
  if (config.corpus_dir.empty()) throw ConfigError("no corpus directory given");
  const fs::path dir(config.corpus_dir);
  if (!fs::is_directory(dir)) {
    throw IoError("corpus directory not found: " + config.corpus_dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > 14 && name.substr(name.size() - 14) == ".scenario.json") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw IoError("no *.scenario.json files in " + config.corpus_dir);
  }
  std::sort(files.begin(), files.end());

  std::vector<CausalLabel> labels;
  if (!config.causal_labels.empty()) {
    labels = load_causal_labels_file(config.causal_labels);
  }
  std::vector<Scenario> corpus;
  corpus.reserve(files.size());
  for (const fs::path& f : files) {
    Scenario s = load_scenario_file(f.string());
    if (!labels.empty()) apply_causal_labels(s, labels);
    corpus.push_back(std::move(s));
  }
  return corpus;
}

int cmd_gen(const HarnessConfig& config, std::ostream& log) {
  if (config.gen.count < 1) throw ConfigError("gen requires --n >= 1");
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);

  const std::vector<Scenario> corpus = generate_corpus(config.gen, config.seed);
  nlohmann::ordered_json manifest;
  manifest["config"] = nlohmann::json::parse(config.echo_json());
  manifest["seed"] = config.seed;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const Scenario& s : corpus) {
    const std::string filename = s.id + ".scenario.json";
    write_text_file(dir / filename, save_scenario(s));
    files.push_back(filename);
  }
  manifest["files"] = std::move(files);
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  log << "wrote " << corpus.size() << " scenarios to " << config.out_dir << "\n";
  return 0;
}

int cmd_eval(const HarnessConfig& config, std::ostream& log) {
  const std::vector<Scenario> corpus = load_corpus(config);
  const std::unique_ptr<ModelFactory> factory = make_model_factory(config.model);

  SweepConfig sweep;
  sweep.K = config.k;
  sweep.seed = config.seed;
  sweep.taus = config.taus;
  sweep.spec = config.hist;
  sweep.weights = config.weights;
  sweep.metric_params = config.metric_params;
  sweep.domains = config.domains;
  sweep.jobs = config.jobs;

  const SweepResult result = domain_sweep(corpus, *factory, sweep);

  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  write_outputs(dir, result, factory->name(), config.echo_json());

  for (const DomainResult& d : result.domains) {
    log << "domain " << d.name << ": scored " << d.rows.size() << ", excluded "
        << d.exclusions.size() << ", M " << fmt_double(d.metametric_full)
        << ", dM " << fmt_double(d.agg.abs_dm) << ", dM_sim "
        << fmt_double(d.agg.abs_dm_sim);
    for (const ConfusionSummary& c : d.confusion) {
      log << ", C_s(" << fmt_double(c.tau) << ") " << fmt_double(c.c_s) << ", C_p("
          << fmt_double(c.tau) << ") " << fmt_double(c.c_p);
    }
    log << "\n";
  }
  return result.has_exclusions() ? 2 : 0;
}

int cmd_train(const HarnessConfig& config, std::ostream& log) {
  const std::vector<Scenario> corpus = load_corpus(config);
  TrainConfig tc = config.train;
  tc.seed = config.seed;

  const TrainResult trained = train(corpus, tc);
  for (std::size_t e = 0; e < trained.epoch_losses.size(); ++e) {
    log << "epoch " << e << " loss " << fmt_double(trained.epoch_losses[e]) << "\n";
  }

  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  HarnessConfig resolved = config;
  resolved.train = tc;
  write_text_file(dir / "params.json",
                  save_params(trained.params, resolved.echo_json()));
  log << "wrote " << (dir / "params.json").string() << "\n";
  return 0;
}

int cmd_report(const HarnessConfig& config, std::ostream& log) {
  const fs::path dir(config.out_dir);
  ReportData data = load_report_json(read_text_file(dir / "report.json"));
  recompute_confusion(data.result, config.taus);
  write_outputs(dir, data.result, data.model, data.config_echo_json);
  log << "rebuilt report outputs in " << config.out_dir << "\n";
  return 0;
}

}  // namespace deltasim
