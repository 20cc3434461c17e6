#include "pinnss/experiment.hpp"
#include "pinnss/verify.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out;
  int threads = 0;
  long epochs = -1;
  std::string sampler;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* c = cmd->add_option("--config", args.config_path, "experiment config file");
  if (config_required) c->required();
  cmd->add_option("--seed", args.seeds, "random seed (repeatable, overrides config)");
  cmd->add_option("--out", args.out, "output directory (overrides config)");
  cmd->add_option("--threads", args.threads, "worker thread count (overrides config)");
  cmd->add_option("--epochs", args.epochs, "total epoch budget (overrides config)");
  cmd->add_option("--sampler", args.sampler, "classical | stratified | both (overrides config)")
      ->check(CLI::IsMember({"classical", "stratified", "both"}));
}

pinnss::ExperimentConfig load_config(const CommonArgs& args) {
  pinnss::ExperimentConfig cfg = args.config_path.empty()
                                     ? pinnss::ExperimentConfig{}
                                     : pinnss::parse_config_file(args.config_path);
  if (!args.seeds.empty()) cfg.seeds = args.seeds;
  if (!args.out.empty()) cfg.out_dir = args.out;
  if (args.threads > 0) cfg.threads = args.threads;
  if (args.epochs >= 0) {
    cfg.stage1_epochs = static_cast<int>(args.epochs / 5);
    cfg.stage2_epochs = static_cast<int>(args.epochs) - cfg.stage1_epochs;
  }
  if (args.sampler == "classical") cfg.sampler_choice = pinnss::SamplerChoice::classical;
  if (args.sampler == "stratified") cfg.sampler_choice = pinnss::SamplerChoice::stratified;
  if (args.sampler == "both") cfg.sampler_choice = pinnss::SamplerChoice::both;
  cfg.validate();
  Eigen::setNbThreads(cfg.threads);
  return cfg;
}

int run_training(const pinnss::ExperimentConfig& cfg) {
  auto results = pinnss::run_experiment(cfg);
  for (const auto& r : results)
    std::cout << r.kind << " seed " << r.seed << ": best loss " << r.best_total_loss
              << ", final mse " << r.final_mse << " (" << r.seconds << " s) -> " << r.dir << "\n";
  std::cout << "\n" << pinnss::make_table(results);
  return 0;
}

int run_verify(const pinnss::ExperimentConfig& cfg, const std::string& checkpoint, int audit_points) {
  pinnss::PdeProblem problem = cfg.make_problem();
  pinnss::NetworkParams params = checkpoint.empty()
                                     ? pinnss::init_params(cfg.shape(), cfg.seeds.front())
                                     : pinnss::load_checkpoint(checkpoint);

  pinnss::SamplerConfig sc = cfg.train.sampler;
  sc.seed = cfg.seeds.front();
  auto audits = pinnss::audit_zone_derivatives(params, problem.domain, sc, audit_points,
                                               cfg.seeds.front());
  for (const auto& a : audits) {
    std::cout << a.derivative_name << ": ";
    if (a.skipped)
      std::cout << "skipped (could not fill both point classes)\n";
    else
      std::cout << "inside max " << a.inside_max << ", outside max " << a.outside_max << "\n";
  }

  pinnss::SampleSet sample = pinnss::sample_classical(problem.domain, sc);
  auto report = pinnss::compare_gradient_filtered(params, problem, sample, /*include_pde=*/true,
                                                  pinnss::zone_threshold(sc));
  std::filesystem::create_directories(cfg.out_dir);
  std::string csv = (std::filesystem::path(cfg.out_dir) / "grad_filter.csv").string();
  pinnss::write_filtered_csv(report, csv);
  std::cout << "filtered-gradient check: removed " << report.removed_points << " of "
            << report.total_points << " points; " << report.fraction_ge * 100.0
            << "% of first-layer gradients did not shrink\n"
            << "rows written to " << csv << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"stratified-sampling trainer for sigmoid physics-informed networks"};
  app.require_subcommand(1);

  CommonArgs train_args, compare_args, verify_args, dump_args;
  std::string checkpoint, table_dir;
  int audit_points = 200;

  auto* train_cmd = app.add_subcommand("train", "train with the configured sampler");
  add_common(train_cmd, train_args, false);

  auto* compare_cmd =
      app.add_subcommand("compare", "train classical and stratified runs back to back");
  add_common(compare_cmd, compare_args, false);

  auto* verify_cmd =
      app.add_subcommand("verify", "zone audit and filtered-gradient check for a network");
  add_common(verify_cmd, verify_args, false);
  verify_cmd->add_option("--checkpoint", checkpoint, "network checkpoint to audit");
  verify_cmd->add_option("--audit-points", audit_points, "points per class in the zone audit");

  auto* dump_cmd = app.add_subcommand("sample-dump", "write one collocation draw as CSV/SVG");
  add_common(dump_cmd, dump_args, false);

  auto* table_cmd = app.add_subcommand("table", "aggregate results from a past output directory");
  table_cmd->add_option("--out", table_dir, "output directory of a previous run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return run_training(load_config(train_args));
    if (compare_cmd->parsed()) {
      auto cfg = load_config(compare_args);
      cfg.sampler_choice = pinnss::SamplerChoice::both;
      return run_training(cfg);
    }
    if (verify_cmd->parsed()) return run_verify(load_config(verify_args), checkpoint, audit_points);
    if (dump_cmd->parsed()) {
      auto cfg = load_config(dump_args);
      pinnss::dump_samples(cfg);
      std::cout << "samples written under " << cfg.out_dir << "\n";
      return 0;
    }
    if (table_cmd->parsed()) {
      std::cout << pinnss::make_table(pinnss::load_results(table_dir));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
