#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "deltasim/config.hpp"

namespace deltasim {

// Exit codes: 0 success, 1 input error, 2 partial exclusions, 3 training
// divergence. Input errors surface as exceptions; the CLI maps them.

// Loads every *.scenario.json under the directory, sorted by filename, and
// applies causal labels when a label file is configured.
std::vector<Scenario> load_corpus(const HarnessConfig& config);

int cmd_gen(const HarnessConfig& config, std::ostream& log);
int cmd_eval(const HarnessConfig& config, std::ostream& log);
int cmd_train(const HarnessConfig& config, std::ostream& log);
int cmd_report(const HarnessConfig& config, std::ostream& log);

}  // namespace deltasim
