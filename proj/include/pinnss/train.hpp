#pragma once

#include "pinnss/network.hpp"
#include "pinnss/pde.hpp"
#include "pinnss/sampler.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pinnss {

enum class SamplerKind { classical, stratified };

struct TrainConfig {
  int stage1_epochs = 4000; // initial-condition pretraining
  int stage2_epochs = 16000;

  double eta_high = 1e-3;
  double eta_low = 1e-4;
  double grad_threshold = 1e-3; // infinity-norm switch point between the two rates
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  SamplerKind sampler_kind = SamplerKind::stratified;
  SamplerConfig sampler;
  int resample_every = 1; // epochs between fresh collocation draws

  // Test-error evaluation grid and cadence (0 stride disables).
  int eval_nx = 201;
  int eval_nt = 201;
  int eval_stride = 100;

  /// Invoked after every epoch (1-based, cumulative across stages) with the
  /// current parameters; used for periodic checkpointing.
  std::function<void(int, const NetworkParams&)> on_epoch;

  void validate() const; // throws std::invalid_argument
};

struct AdamState {
  Eigen::VectorXd m, v;
  long step = 0;

  explicit AdamState(long n) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

struct LossBreakdown {
  double total = 0, ic = 0, lbc = 0, rbc = 0, pde = 0;
};

struct EpochRecord {
  int epoch = 0;
  LossBreakdown loss;
  double mse = -1; // test-grid error; negative when not evaluated this epoch
  double eta = 0;
  int n_ic = 0, n_lbc = 0, n_rbc = 0, n_pde = 0;
};

struct TrainMetrics {
  std::vector<EpochRecord> records;
  double best_total_loss = 0; // minimum over recorded epochs
  double final_mse = -1;
};

/// Mean-square losses of the four partitions; an empty partition contributes
/// zero. Throws std::runtime_error naming the offending point if any network
/// output is non-finite.
LossBreakdown compute_losses(const NetworkParams& params, const PdeProblem& problem,
                             const SampleSet& sample, bool include_pde);

/// Total loss and its exact parameter gradient over the given sample. With
/// include_pde = false only the initial-condition term is used (stage 1).
std::pair<LossBreakdown, Eigen::VectorXd> loss_and_gradient(const NetworkParams& params,
                                                            const PdeProblem& problem,
                                                            const SampleSet& sample,
                                                            bool include_pde);

/// Two-level adaptive rate: eta_high when ||g||_inf > threshold, else eta_low.
double adaptive_eta(const Eigen::VectorXd& grad, const TrainConfig& config);

/// One bias-corrected Adam update in place. Throws std::runtime_error if the
/// gradient or updated parameters are non-finite.
void adam_step(NetworkParams& params, AdamState& state, const Eigen::VectorXd& grad, double eta,
               const TrainConfig& config);

/// Mean square error of the trial solution against the exact solution on a
/// uniform eval_nx x eval_nt tensor grid over the problem domain.
double mse_vs_exact(const NetworkParams& params, const PdeProblem& problem, int nx, int nt);

/// Stage 1: fit the initial condition only. The stratified sampler rebuilds
/// its initial-line zones at every resample. Appends to `metrics`.
void train_stage1(NetworkParams& params, AdamState& state, const PdeProblem& problem,
                  const TrainConfig& config, std::mt19937_64& rng, TrainMetrics& metrics);

/// Stage 2: full loss over all four partitions. Appends to `metrics`.
void train_stage2(NetworkParams& params, AdamState& state, const PdeProblem& problem,
                  const TrainConfig& config, std::mt19937_64& rng, TrainMetrics& metrics);

/// Both stages with a fresh optimizer state, recording per-epoch metrics.
TrainMetrics train(NetworkParams& params, const PdeProblem& problem, const TrainConfig& config);

/// CSV with header
/// `epoch,loss_total,loss_ic,loss_lbc,loss_rbc,loss_pde,mse,eta,n_ic,n_lbc,n_rbc,n_pde`.
void write_metrics_csv(const TrainMetrics& metrics, const std::string& path);

} // namespace pinnss
