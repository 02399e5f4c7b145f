#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deltasim/cli.hpp"
#include "deltasim/errors.hpp"

namespace {

struct FlagValues {
  std::string config_path;
  std::string corpus, out, model, causal_labels, tmpl, domains;
  std::vector<double> taus;
  int n = -1, k = -1, jobs = -1, epochs = -1;
  long long seed = -1;
  double p_drop = -1.0;
};

void add_common(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--config", flags.config_path, "config file (key = value lines)");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--seed", flags.seed, "master seed");
}

deltasim::HarnessConfig resolve(const FlagValues& flags) {
  deltasim::HarnessConfig config;
  if (!flags.config_path.empty()) {
    deltasim::apply_config_file(config, flags.config_path);
  }
  // CLI flags win over config-file values.
  if (!flags.corpus.empty()) config.corpus_dir = flags.corpus;
  if (!flags.out.empty()) config.out_dir = flags.out;
  if (!flags.model.empty()) config.model = flags.model;
  if (!flags.causal_labels.empty()) config.causal_labels = flags.causal_labels;
  if (!flags.tmpl.empty()) {
    config.gen.tmpl = deltasim::template_kind_from_name(flags.tmpl);
  }
  if (!flags.domains.empty()) {
    deltasim::apply_config_entry(config, "domains", flags.domains);
  }
  if (!flags.taus.empty()) config.taus = flags.taus;
  if (flags.n >= 0) config.gen.count = flags.n;
  if (flags.k >= 0) config.k = flags.k;
  if (flags.jobs >= 0) config.jobs = flags.jobs;
  if (flags.epochs >= 0) config.train.epochs = flags.epochs;
  if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.p_drop >= 0.0) config.train.p_drop = flags.p_drop;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delta-sim: paired-rollout world-model evaluation harness"};
  app.require_subcommand(1);

  FlagValues flags;

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic scenario corpus");
  add_common(gen, flags);
  gen->add_option("--n", flags.n, "number of scenarios");
  gen->add_option("--template", flags.tmpl,
                  "leader_follower_signal|crossing_intersection|lane_merge|mixed");

  CLI::App* eval = app.add_subcommand("eval", "run the paired-rollout evaluation");
  add_common(eval, flags);
  eval->add_option("--corpus", flags.corpus, "corpus directory");
  eval->add_option("--model", flags.model,
                   "replay|open_loop|aggressive_follower|<params.json>");
  eval->add_option("--k", flags.k, "rollouts per scenario");
  eval->add_option("--tau", flags.taus, "confusion thresholds")->delimiter(',');
  eval->add_option("--jobs", flags.jobs, "scenario-level worker threads");
  eval->add_option("--domains", flags.domains, "eval,causal,union subset");
  eval->add_option("--causal-labels", flags.causal_labels,
                   "JSON list of {scenario_id, agent_id} pairs");

  CLI::App* train = app.add_subcommand("train", "train the toy world model");
  add_common(train, flags);
  train->add_option("--corpus", flags.corpus, "corpus directory");
  train->add_option("--p-drop", flags.p_drop, "control dropout probability");
  train->add_option("--epochs", flags.epochs, "training epochs");

  CLI::App* report = app.add_subcommand("report",
                                        "rebuild tables/plot data from report.json");
  add_common(report, flags);
  report->add_option("--tau", flags.taus, "confusion thresholds")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    const deltasim::HarnessConfig config = resolve(flags);
    if (gen->parsed()) return deltasim::cmd_gen(config, std::cout);
    if (eval->parsed()) return deltasim::cmd_eval(config, std::cout);
    if (train->parsed()) return deltasim::cmd_train(config, std::cout);
    if (report->parsed()) return deltasim::cmd_report(config, std::cout);
  } catch (const deltasim::TrainingDivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const deltasim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
