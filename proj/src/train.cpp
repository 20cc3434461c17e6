#include "pinnss/train.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace pinnss {

namespace {

// The training loop allocates and frees large batch matrices every epoch.
// With glibc's default mmap threshold each of those round-trips through the
// kernel and the page-fault cost dominates the run time, so keep big blocks
// on the heap and reuse them.
[[maybe_unused]] const bool malloc_tuned = [] {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  return true;
}();

Eigen::VectorXd xs_of(const std::vector<Point>& pts) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) v(static_cast<Eigen::Index>(i)) = pts[i].x;
  return v;
}

Eigen::VectorXd ts_of(const std::vector<Point>& pts) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) v(static_cast<Eigen::Index>(i)) = pts[i].t;
  return v;
}

[[noreturn]] void throw_nonfinite(const char* partition, const Point& p) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "non-finite network output on partition '" << partition << "' at (x=" << p.x
      << ", t=" << p.t << ")";
  throw std::runtime_error(msg.str());
}

void check_finite(const Eigen::VectorXd& vals, const char* partition,
                  const std::vector<Point>& pts) {
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (!std::isfinite(vals(i))) throw_nonfinite(partition, pts[static_cast<std::size_t>(i)]);
}

// Mean-square value mismatch against a per-point target; no gradient.
double value_loss(const NetworkParams& params, const std::vector<Point>& pts,
                  const std::function<double(const Point&)>& target, const char* name) {
  if (pts.empty()) return 0.0;
  Eigen::VectorXd u = forward_batch(params, xs_of(pts), ts_of(pts));
  check_finite(u, name, pts);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double r = u(i) - target(pts[static_cast<std::size_t>(i)]);
    acc += r * r;
  }
  return acc / static_cast<double>(pts.size());
}

// Same, but also accumulates the exact gradient of the mean-square term.
double value_loss_grad(const NetworkParams& params, const std::vector<Point>& pts,
                       const std::function<double(const Point&)>& target, const char* name,
                       Eigen::VectorXd& grad_acc) {
  if (pts.empty()) return 0.0;
  ForwardCache cache;
  JetBatch jets = eval_jet_batch(params, xs_of(pts), ts_of(pts), &cache);
  check_finite(jets.u, name, pts);
  const auto n = static_cast<double>(pts.size());
  JetSeeds seeds;
  seeds.u.resize(jets.size());
  seeds.u_x = Eigen::VectorXd::Zero(jets.size());
  seeds.u_t = Eigen::VectorXd::Zero(jets.size());
  seeds.u_xx = Eigen::VectorXd::Zero(jets.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < jets.size(); ++i) {
    double r = jets.u(i) - target(pts[static_cast<std::size_t>(i)]);
    acc += r * r;
    seeds.u(i) = 2.0 * r / n;
  }
  grad_acc += backprop_batch(params, cache, seeds);
  return acc / n;
}

double pde_loss(const NetworkParams& params, const PdeProblem& problem,
                const std::vector<Point>& pts) {
  if (pts.empty()) return 0.0;
  JetBatch jets = eval_jet_batch(params, xs_of(pts), ts_of(pts));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < jets.size(); ++i) {
    EvalJet j{jets.u(i), jets.u_x(i), jets.u_t(i), jets.u_xx(i)};
    double r = problem.residual(j);
    if (!std::isfinite(r)) throw_nonfinite("pde", pts[static_cast<std::size_t>(i)]);
    acc += r * r;
  }
  return acc / static_cast<double>(pts.size());
}

double pde_loss_grad(const NetworkParams& params, const PdeProblem& problem,
                     const std::vector<Point>& pts, Eigen::VectorXd& grad_acc) {
  if (pts.empty()) return 0.0;
  ForwardCache cache;
  JetBatch jets = eval_jet_batch(params, xs_of(pts), ts_of(pts), &cache);
  const auto n = static_cast<double>(pts.size());
  JetSeeds seeds;
  seeds.u.resize(jets.size());
  seeds.u_x.resize(jets.size());
  seeds.u_t.resize(jets.size());
  seeds.u_xx.resize(jets.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < jets.size(); ++i) {
    EvalJet j{jets.u(i), jets.u_x(i), jets.u_t(i), jets.u_xx(i)};
    double r = problem.residual(j);
    if (!std::isfinite(r)) throw_nonfinite("pde", pts[static_cast<std::size_t>(i)]);
    ResidualGrad g = problem.residual_grad(j);
    double w = 2.0 * r / n;
    seeds.u(i) = w * g.du;
    seeds.u_x(i) = w * g.du_x;
    seeds.u_t(i) = w * g.du_t;
    seeds.u_xx(i) = w * g.du_xx;
    acc += r * r;
  }
  grad_acc += backprop_batch(params, cache, seeds);
  return acc / n;
}

SampleSet draw_sample(const NetworkParams& params, const PdeProblem& problem,
                      const TrainConfig& config, std::mt19937_64& rng, bool ic_only) {
  if (ic_only) {
    SampleSet s;
    const auto& dom = problem.domain;
    if (config.sampler_kind == SamplerKind::stratified)
      s.ic = sample_ic(build_ic_zones(params, dom, config.sampler), dom.t_lo,
                       config.sampler.density, rng);
    else
      s.ic = sample_ic({{dom.x_lo, dom.x_hi}}, dom.t_lo, config.sampler.density, rng);
    return s;
  }
  if (config.sampler_kind == SamplerKind::stratified)
    return sample_stratified(params, problem.domain, config.sampler, rng);
  return sample_classical(problem.domain, config.sampler.density, rng);
}

} // namespace

void TrainConfig::validate() const {
  if (stage1_epochs < 0 || stage2_epochs < 0)
    throw std::invalid_argument("TrainConfig: epoch counts must be >= 0");
  if (!(eta_high > 0.0) || !(eta_low > 0.0))
    throw std::invalid_argument("TrainConfig: learning rates must be > 0");
  if (!(grad_threshold >= 0.0))
    throw std::invalid_argument("TrainConfig: grad_threshold must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("TrainConfig: betas must lie in [0, 1)");
  if (resample_every < 1) throw std::invalid_argument("TrainConfig: resample_every must be >= 1");
  if (eval_nx < 2 || eval_nt < 2)
    throw std::invalid_argument("TrainConfig: evaluation grid needs at least 2 points per axis");
  if (eval_stride < 0) throw std::invalid_argument("TrainConfig: eval_stride must be >= 0");
  sampler.validate();
}

LossBreakdown compute_losses(const NetworkParams& params, const PdeProblem& problem,
                             const SampleSet& sample, bool include_pde) {
  LossBreakdown l;
  l.ic = value_loss(params, sample.ic,
                    [&](const Point& p) { return problem.initial_condition(p.x); }, "ic");
  l.lbc =
      value_loss(params, sample.lbc, [&](const Point& p) { return problem.left_value(p.t); }, "lbc");
  l.rbc = value_loss(params, sample.rbc,
                     [&](const Point& p) { return problem.right_value(p.t); }, "rbc");
  if (include_pde) l.pde = pde_loss(params, problem, sample.interior);
  l.total = l.ic + l.lbc + l.rbc + l.pde;
  return l;
}

std::pair<LossBreakdown, Eigen::VectorXd> loss_and_gradient(const NetworkParams& params,
                                                            const PdeProblem& problem,
                                                            const SampleSet& sample,
                                                            bool include_pde) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.param_count());
  LossBreakdown l;
  l.ic = value_loss_grad(params, sample.ic,
                         [&](const Point& p) { return problem.initial_condition(p.x); }, "ic",
                         grad);
  if (include_pde) {
    l.lbc = value_loss_grad(params, sample.lbc,
                            [&](const Point& p) { return problem.left_value(p.t); }, "lbc", grad);
    l.rbc = value_loss_grad(params, sample.rbc,
                            [&](const Point& p) { return problem.right_value(p.t); }, "rbc", grad);
    l.pde = pde_loss_grad(params, problem, sample.interior, grad);
  }
  l.total = l.ic + l.lbc + l.rbc + l.pde;
  return {l, std::move(grad)};
}

double adaptive_eta(const Eigen::VectorXd& grad, const TrainConfig& config) {
  double norm = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;
  return norm > config.grad_threshold ? config.eta_high : config.eta_low;
}

void adam_step(NetworkParams& params, AdamState& state, const Eigen::VectorXd& grad, double eta,
               const TrainConfig& config) {
  if (!grad.allFinite()) throw std::runtime_error("adam_step: non-finite gradient");
  ++state.step;
  state.m = config.beta1 * state.m + (1.0 - config.beta1) * grad;
  state.v = config.beta2 * state.v + (1.0 - config.beta2) * grad.cwiseProduct(grad);
  double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  Eigen::ArrayXd m_hat = state.m.array() / c1;
  Eigen::ArrayXd v_hat = state.v.array() / c2;
  Eigen::VectorXd theta = params.flatten();
  theta.array() -= eta * m_hat / (v_hat.sqrt() + config.adam_eps);
  if (!theta.allFinite()) throw std::runtime_error("adam_step: update produced non-finite values");
  params.unflatten(theta);
}

double mse_vs_exact(const NetworkParams& params, const PdeProblem& problem, int nx, int nt) {
  if (!problem.has_exact) throw std::logic_error("mse_vs_exact: problem has no exact solution");
  if (nx < 2 || nt < 2) throw std::invalid_argument("mse_vs_exact: grid needs >= 2 per axis");
  const auto& d = problem.domain;
  Eigen::VectorXd xs(static_cast<Eigen::Index>(nx) * nt), ts(xs.size());
  Eigen::Index k = 0;
  for (int j = 0; j < nt; ++j) {
    double t = d.t_lo + d.duration() * j / (nt - 1);
    for (int i = 0; i < nx; ++i, ++k) {
      xs(k) = d.x_lo + d.width() * i / (nx - 1);
      ts(k) = t;
    }
  }
  Eigen::VectorXd u = forward_batch(params, xs, ts);
  double acc = 0.0;
  for (Eigen::Index p = 0; p < u.size(); ++p) {
    double e = u(p) - problem.exact(xs(p), ts(p));
    acc += e * e;
  }
  return acc / static_cast<double>(u.size());
}

namespace {

void run_stage(NetworkParams& params, AdamState& state, const PdeProblem& problem,
               const TrainConfig& config, std::mt19937_64& rng, TrainMetrics& metrics, int epochs,
               bool include_pde, int epoch_offset) {
  SampleSet sample;
  for (int e = 0; e < epochs; ++e) {
    if (e % config.resample_every == 0)
      sample = draw_sample(params, problem, config, rng, !include_pde);
    auto [loss, grad] = loss_and_gradient(params, problem, sample, include_pde);
    double eta = adaptive_eta(grad, config);
    adam_step(params, state, grad, eta, config);

    EpochRecord rec;
    rec.epoch = epoch_offset + e + 1;
    rec.loss = loss;
    rec.eta = eta;
    rec.n_ic = static_cast<int>(sample.ic.size());
    rec.n_lbc = static_cast<int>(sample.lbc.size());
    rec.n_rbc = static_cast<int>(sample.rbc.size());
    rec.n_pde = static_cast<int>(sample.interior.size());
    bool last = include_pde && e + 1 == epochs;
    if (problem.has_exact &&
        (last || (config.eval_stride > 0 && (epoch_offset + e + 1) % config.eval_stride == 0)))
      rec.mse = mse_vs_exact(params, problem, config.eval_nx, config.eval_nt);
    metrics.records.push_back(rec);
    if (config.on_epoch) config.on_epoch(rec.epoch, params);
  }
}

} // namespace

void train_stage1(NetworkParams& params, AdamState& state, const PdeProblem& problem,
                  const TrainConfig& config, std::mt19937_64& rng, TrainMetrics& metrics) {
  config.validate();
  run_stage(params, state, problem, config, rng, metrics, config.stage1_epochs, false,
            static_cast<int>(metrics.records.size()));
}

void train_stage2(NetworkParams& params, AdamState& state, const PdeProblem& problem,
                  const TrainConfig& config, std::mt19937_64& rng, TrainMetrics& metrics) {
  config.validate();
  run_stage(params, state, problem, config, rng, metrics, config.stage2_epochs, true,
            static_cast<int>(metrics.records.size()));
}

TrainMetrics train(NetworkParams& params, const PdeProblem& problem, const TrainConfig& config) {
  config.validate();
  TrainMetrics metrics;
  AdamState state(params.param_count());
  std::mt19937_64 rng(config.sampler.seed);
  train_stage1(params, state, problem, config, rng, metrics);
  train_stage2(params, state, problem, config, rng, metrics);

  // Best full loss over the stage-2 epochs (they carry interior points).
  bool found = false;
  for (const auto& r : metrics.records) {
    if (r.n_pde == 0 && config.stage2_epochs > 0) continue;
    if (!found || r.loss.total < metrics.best_total_loss) {
      metrics.best_total_loss = r.loss.total;
      found = true;
    }
    if (r.mse >= 0.0) metrics.final_mse = r.mse;
  }
  return metrics;
}

void write_metrics_csv(const TrainMetrics& metrics, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  out << "epoch,loss_total,loss_ic,loss_lbc,loss_rbc,loss_pde,mse,eta,n_ic,n_lbc,n_rbc,n_pde\n";
  for (const auto& r : metrics.records) {
    out << r.epoch << ',' << r.loss.total << ',' << r.loss.ic << ',' << r.loss.lbc << ','
        << r.loss.rbc << ',' << r.loss.pde << ',';
    if (r.mse >= 0.0)
      out << r.mse;
    out << ',' << r.eta << ',' << r.n_ic << ',' << r.n_lbc << ',' << r.n_rbc << ',' << r.n_pde
        << '\n';
  }
}

} // namespace pinnss
