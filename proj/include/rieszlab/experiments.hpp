#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace riesz {

struct ExperimentContext {
  std::filesystem::path out_dir;
  std::uint64_t seed = 1;
  int threads = 1;
  // Manifest-style "section.key" -> value overrides of the built-in defaults.
  std::map<std::string, std::string> overrides;
};

struct Assertion {
  std::string name;
  bool pass = false;
  std::string details;  // the numbers behind the verdict
};

struct ExperimentResult {
  std::string name;
  std::vector<Assertion> assertions;
  bool passed() const;
};

// Names of the built-in studies, in canonical order.
const std::vector<std::string>& experiment_names();

// Runs one study: writes its resolved manifest, CSV tables and result files
// under ctx.out_dir / name, and returns the checked assertions. Outputs are
// byte-identical across runs with the same inputs, seed and thread count.
ExperimentResult run_experiment(const std::string& name, const ExperimentContext& ctx);

}  // namespace riesz
