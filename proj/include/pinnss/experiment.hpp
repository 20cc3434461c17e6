#pragma once

#include "pinnss/pde.hpp"
#include "pinnss/train.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pinnss {

/// Which collocation samplers an experiment runs.
enum class SamplerChoice { classical, stratified, both };

/// Everything a training run needs, as read from a key=value config file.
struct ExperimentConfig {
  std::string problem = "advection";
  double speed = 1.0; // advection transport speed
  Domain domain{-20, 80, 0, 60};

  std::vector<int> neurons{20, 20, 20}; // hidden layer widths

  // Either `epochs` (split 20/80 between the stages) or explicit counts.
  int stage1_epochs = 4000;
  int stage2_epochs = 16000;

  TrainConfig train; // epoch counts above take precedence over these
  SamplerChoice sampler_choice = SamplerChoice::stratified;
  std::vector<std::uint64_t> seeds{1};

  std::string out_dir = "out";
  int checkpoint_stride = 0; // 0 = final checkpoint only
  int threads = 1;

  void validate() const;
  NetworkShape shape() const { return NetworkShape{neurons}; }
  PdeProblem make_problem() const { return problem_by_name(problem, speed, domain); }
  TrainConfig resolved_train(SamplerKind kind, std::uint64_t seed) const;
};

/// Parses a flat `key = value` file ('#' comments, blank lines allowed).
/// Unknown keys and malformed values raise std::runtime_error with the line
/// number. See README for the key list.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

/// Re-serializes the fully resolved configuration.
std::string format_config(const ExperimentConfig& config);

struct RunResult {
  std::string kind; // "classical" or "stratified"
  std::uint64_t seed = 0;
  double best_total_loss = 0;
  double final_total_loss = 0;
  double final_mse = -1;
  double seconds = 0;
  std::string dir; // where this run's artifacts were written
};

/// Trains every (sampler kind, seed) combination, writing per-run
/// metrics.csv, checkpoint.txt, summary.txt, result.txt, loss.svg, mse.svg
/// and samples.svg under out_dir/<kind>/seed<seed>/, plus the effective
/// config at out_dir/effective_config.txt.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

/// Draws one collocation set per configured sampler kind from a freshly
/// initialized network and writes samples.csv, zones.csv (stratified only)
/// and samples.svg under out_dir/<kind>/.
void dump_samples(const ExperimentConfig& config);

/// Per-kind aggregate of final MSE and best loss across seeds:
/// median, minimum and maximum. Plain text, one row per kind.
std::string make_table(const std::vector<RunResult>& runs);

/// Reloads RunResults from the result.txt files under a past out_dir.
std::vector<RunResult> load_results(const std::string& out_dir);

} // namespace pinnss
