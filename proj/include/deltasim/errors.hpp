#pragma once

#include <stdexcept>
#include <string>

namespace deltasim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input bytes (JSON syntax, wrong shapes).
struct ParseError : Error {
  using Error::Error;
};

// Structurally sound input violating a data-model invariant. The message
// names the first violated invariant.
struct ValidationError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// A world model produced a non-finite action. Message names agent and step.
struct ModelContractError : Error {
  using Error::Error;
};

struct TrainingDivergenceError : Error {
  using Error::Error;
};

}  // namespace deltasim
