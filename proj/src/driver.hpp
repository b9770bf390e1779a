#pragma once

// JSON-in/JSON-out engine shared by the C API (and through it the CLI).
// Usage errors (bad flags, malformed inputs, validation failures) and numeric
// failures (fit breakdowns) map to the stable exit codes 2 and 3.

#include <stdexcept>
#include <string>

#include "curesem/io.hpp"

namespace curesem::driver {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// config keys (all optional unless noted): algo (required), iters, burnin,
// mle-rule, phi-grid, seed, eps, mc-samples, init ("auto" or named-parameter
// object), cure-profiles (array of z vectors). Returns a FitReport document.
std::string run_fit(const DatasetFile& data, const std::string& config_json);

// config keys: algos (array), replicates, jobs, seed. Returns a document with
// a files[] array of {suffix, content} ready to write under an out-prefix.
std::string run_simulate(const std::string& scenario_json,
                         const std::string& config_json);

// config keys: seed, replicates (residual randomizations). Returns a document
// with files[] ({suffix, content}) plus the KS result.
std::string run_diagnose(const DatasetFile& data, const std::string& fit_json,
                         const std::string& config_json);

}  // namespace curesem::driver
