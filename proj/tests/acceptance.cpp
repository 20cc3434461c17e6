// Acceptance suite: one pass/fail line per criterion. Run with no arguments
// for everything, or pass criterion numbers to run a subset. Exit status is
// the number of failures. The training criteria take hours on one core.
#include "pinnss/calculus.hpp"
#include "pinnss/experiment.hpp"
#include "pinnss/network.hpp"
#include "pinnss/pde.hpp"
#include "pinnss/sampler.hpp"
#include "pinnss/train.hpp"
#include "pinnss/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace pinnss;

namespace {

std::vector<std::uint64_t> partition_counts(int m) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(m) + 1, 0);
  auto rec = [&](auto&& self, int i, int max_so_far) -> void {
    if (i == m) {
      ++counts[static_cast<std::size_t>(max_so_far) + 1];
      return;
    }
    for (int v = 0; v <= max_so_far + 1; ++v) self(self, i + 1, std::max(max_so_far, v));
  };
  rec(rec, 1, 0);
  return counts;
}

template <class F>
double richardson(F f, double x, double h) {
  auto d = [&](double step) { return (f(x + step) - f(x - step)) / (2 * step); };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

double median3(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome criterion1() {
  for (int m = 1; m <= 12; ++m) {
    auto counts = partition_counts(m);
    for (int n = 1; n <= m; ++n)
      if (stirling2(m, n) != counts[static_cast<std::size_t>(n)])
        return {false, "mismatch at S(" + std::to_string(m) + "," + std::to_string(n) + ")"};
  }
  return {true, "all S(m,n) up to m=12 match brute-force set-partition enumeration"};
}

Outcome criterion2() {
  double worst = 0;
  for (double x = -10.0; x <= 10.0; x += 0.0625) {
    double s = sigmoid(x);
    double refs[4] = {s, s * (1 - s), s * (1 - s) * (1 - 2 * s),
                      s * (1 - s) * (1 - 6 * s + 6 * s * s)};
    for (int n = 0; n <= 3; ++n)
      worst = std::max(worst, std::abs(sigmoid_derivative(n, x) - refs[n]));
    for (int n = 1; n <= 6; ++n) {
      double sign = (n % 2 == 1) ? 1.0 : -1.0;
      worst = std::max(worst,
                       std::abs(sigmoid_derivative(n, -x) - sign * sigmoid_derivative(n, x)));
    }
  }
  std::ostringstream d;
  d << "max deviation " << worst << " (tolerance 1e-12)";
  return {worst < 1e-12, d.str()};
}

Outcome criterion3() {
  ZoneRadiusSpec spec{1e-3, 4};
  double delta = delta_epsilon(spec);
  double worst = 0;
  for (double off = 1e-9; off <= 40.0; off = off < 1e-3 ? off * 10 : off + 0.01)
    for (double sign : {-1.0, 1.0}) {
      double x = sign * (delta + off);
      for (int m = 1; m <= 4; ++m)
        worst = std::max(worst, std::abs(sigmoid_derivative(m, x)));
    }
  std::ostringstream d;
  d << "radius " << delta << ": max |derivative| outside is " << worst << " < 1e-3";
  return {worst < 1e-3, d.str()};
}

Outcome criterion4() {
  double worst_jet = 0, worst_grad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(trial));
    std::vector<int> widths;
    int layers = 1 + static_cast<int>(rng() % 3);
    for (int l = 0; l < layers; ++l) widths.push_back(3 + static_cast<int>(rng() % 8));
    auto p = init_params(NetworkShape{widths}, 2000 + static_cast<std::uint64_t>(trial));

    double x = 8.0 * canonical_open(rng) - 4.0;
    double t = 4.0 * canonical_open(rng);
    EvalJet j = eval_jet(p, x, t);
    auto rel = [](double got, double want) {
      return std::abs(got - want) / std::max(1e-6, std::abs(want));
    };
    worst_jet = std::max(
        {worst_jet,
         rel(j.u_x, richardson([&](double v) { return forward(p, v, t); }, x, 1e-4)),
         rel(j.u_t, richardson([&](double v) { return forward(p, x, v); }, t, 1e-4)),
         rel(j.u_xx, richardson([&](double v) { return eval_jet(p, v, t).u_x; }, x, 1e-4))});

    // Parameter gradient of a randomly seeded scalar at three points.
    Eigen::VectorXd xs(3), ts(3);
    for (int i = 0; i < 3; ++i) {
      xs(i) = 8.0 * canonical_open(rng) - 4.0;
      ts(i) = 4.0 * canonical_open(rng);
    }
    JetSeeds seeds;
    seeds.u = Eigen::VectorXd::Random(3);
    seeds.u_x = Eigen::VectorXd::Random(3);
    seeds.u_t = Eigen::VectorXd::Random(3);
    seeds.u_xx = Eigen::VectorXd::Random(3);
    ForwardCache cache;
    eval_jet_batch(p, xs, ts, &cache);
    Eigen::VectorXd grad = backprop_batch(p, cache, seeds);
    Eigen::VectorXd theta = p.flatten();
    auto scalar = [&](const Eigen::VectorXd& th) {
      NetworkParams q = p;
      q.unflatten(th);
      JetBatch jets = eval_jet_batch(q, xs, ts);
      return seeds.u.dot(jets.u) + seeds.u_x.dot(jets.u_x) + seeds.u_t.dot(jets.u_t) +
             seeds.u_xx.dot(jets.u_xx);
    };
    for (Eigen::Index i = 0; i < theta.size(); i += 5) {
      double fd = richardson(
          [&](double v) {
            Eigen::VectorXd th = theta;
            th(i) = v;
            return scalar(th);
          },
          theta(i), 1e-4);
      worst_grad = std::max(worst_grad, rel(grad(i), fd));
    }
  }
  std::ostringstream d;
  d << "worst relative error: jets " << worst_jet << ", parameter gradients " << worst_grad
    << " (tolerance 1e-5)";
  return {worst_jet < 1e-5 && worst_grad < 1e-5, d.str()};
}

Outcome criterion5() {
  auto grid = [](const Domain& dom) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j)
        pts.emplace_back(dom.x_lo + dom.width() * i / 39.0,
                         dom.t_lo + dom.duration() * j / 39.0);
    return pts;
  };
  Domain adv{-20, 80, 0, 60}, rd{-20, 80, 0, 30};
  double worst = std::max({exact_residual_check(advection_problem(1.0, adv), grid(adv)),
                           exact_residual_check(fisher_problem(rd), grid(rd)),
                           exact_residual_check(zeldovich_problem(rd), grid(rd))});
  std::ostringstream d;
  d << "max |residual of exact solution| = " << worst << " (tolerance 1e-10)";
  return {worst < 1e-10, d.str()};
}

double training_run(const PdeProblem& problem, const std::vector<int>& widths, int epochs,
                    SamplerKind kind, double density, std::uint64_t seed, bool want_mse,
                    double* out_other) {
  TrainConfig cfg;
  cfg.stage1_epochs = epochs / 5;
  cfg.stage2_epochs = epochs - epochs / 5;
  cfg.sampler_kind = kind;
  cfg.sampler.density = density;
  cfg.sampler.seed = seed;
  cfg.eval_stride = 0; // evaluate only at the end
  auto params = init_params(NetworkShape{widths}, seed);
  TrainMetrics m = train(params, problem, cfg);
  std::cerr << "#   " << problem.name << " " << (kind == SamplerKind::classical ? "cs" : "ss")
            << " seed " << seed << ": best loss " << m.best_total_loss << ", final mse "
            << m.final_mse << "\n";
  if (out_other) *out_other = want_mse ? m.best_total_loss : m.final_mse;
  return want_mse ? m.final_mse : m.best_total_loss;
}

Outcome desk_criterion(const PdeProblem& problem, const std::vector<int>& widths,
                       double threshold) {
  double best[3];
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    best[seed - 1] = training_run(problem, widths, 20000, SamplerKind::stratified, 1.0, seed,
                                  false, nullptr);
  double med = median3(best[0], best[1], best[2]);
  std::ostringstream d;
  d << "median best total loss over seeds 1-3 is " << med << " (threshold " << threshold << ")";
  return {med <= threshold, d.str()};
}

Outcome criterion6() {
  return desk_criterion(advection_problem(1.0, Domain{-20, 80, 0, 60}), {20, 20, 20}, 3e-5);
}

Outcome criterion7() {
  return desk_criterion(fisher_problem(Domain{-20, 80, 0, 30}), {40, 40, 40}, 3e-4);
}

Outcome criterion8() {
  // 15000 interior points for the uniform baseline over the 1000 x 600 box.
  auto problem = advection_problem(1.0, Domain{-200, 800, 0, 600});
  double density = 15000.0 / problem.domain.area();
  double cs[3], ss[3];
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    cs[seed - 1] = training_run(problem, {20, 20, 20}, 50000, SamplerKind::classical, density,
                                seed, true, nullptr);
    ss[seed - 1] = training_run(problem, {20, 20, 20}, 50000, SamplerKind::stratified, density,
                                seed, true, nullptr);
  }
  double cs_med = median3(cs[0], cs[1], cs[2]);
  double ss_med = median3(ss[0], ss[1], ss[2]);
  std::ostringstream d;
  d << "median final mse: stratified " << ss_med << " vs uniform " << cs_med;
  return {ss_med < cs_med, d.str()};
}

Outcome criterion9() {
  auto problem = fisher_problem(Domain{-20, 80, 0, 30});
  double frac[3];
  std::size_t removed = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto params = init_params(NetworkShape{{40, 40, 40}}, seed);
    TrainConfig cfg;
    cfg.stage1_epochs = 4000;
    cfg.stage2_epochs = 0;
    cfg.sampler.density = 1.0;
    cfg.sampler.seed = seed;
    cfg.eval_stride = 0;
    TrainMetrics metrics;
    AdamState state(params.param_count());
    std::mt19937_64 rng(seed);
    train_stage1(params, state, problem, cfg, rng, metrics);

    // Full-line initial-condition sample, then drop the points at which every
    // first-layer neuron is saturated and compare the gradients.
    SampleSet sample;
    std::mt19937_64 srng(99 + seed);
    sample.ic = sample_ic({{problem.domain.x_lo, problem.domain.x_hi}}, problem.domain.t_lo,
                          10.0, srng);
    auto report =
        compare_gradient_filtered(params, problem, sample, false, zone_threshold(cfg.sampler));
    frac[seed - 1] = report.fraction_ge;
    removed += report.removed_points;
    total += report.total_points;
  }
  double med = median3(frac[0], frac[1], frac[2]);
  std::ostringstream d;
  d << "removed " << removed << "/" << total << " points across 3 seeds; median "
    << med * 100 << "% of first-layer gradient entries did not shrink (threshold 90%)";
  return {med >= 0.9, d.str()};
}

Outcome criterion10() {
  // Merge idempotence and membership preservation on 1000 random instances.
  std::mt19937_64 rng(5);
  auto covered = [](const std::vector<Interval>& zs, double x) {
    for (const auto& z : zs)
      if (x >= z.lo && x <= z.hi) return true;
    return false;
  };
  for (int inst = 0; inst < 1000; ++inst) {
    std::vector<Interval> raw;
    int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      double a = 20.0 * canonical_open(rng) - 10.0;
      raw.push_back({a, a + 3.0 * canonical_open(rng)});
    }
    auto merged = merge_intervals(raw);
    auto twice = merge_intervals(merged);
    if (merged.size() != twice.size()) return {false, "merge is not idempotent"};
    for (std::size_t i = 0; i < merged.size(); ++i)
      if (merged[i].lo != twice[i].lo || merged[i].hi != twice[i].hi)
        return {false, "merge is not idempotent"};
    for (int probe = 0; probe < 500; ++probe) {
      double x = 28.0 * canonical_open(rng) - 12.0;
      if (covered(raw, x) != covered(merged, x))
        return {false, "merged intervals change membership at x=" + std::to_string(x)};
    }
  }

  // Stratified draws never need more interior points than the uniform
  // baseline (up to the per-interval ceil), and are deterministic.
  Domain dom{-20, 80, 0, 60};
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto params = init_params(NetworkShape{{20, 20, 20}}, seed);
    SamplerConfig cfg;
    cfg.density = 0.1;
    cfg.seed = seed;
    auto ss1 = sample_stratified(params, dom, cfg);
    auto ss2 = sample_stratified(params, dom, cfg);
    if (ss1.interior.size() != ss2.interior.size()) return {false, "draws are not deterministic"};
    for (std::size_t i = 0; i < ss1.interior.size(); ++i)
      if (ss1.interior[i].x != ss2.interior[i].x || ss1.interior[i].t != ss2.interior[i].t)
        return {false, "draws are not deterministic"};
    auto cs = sample_classical(dom, cfg);
    std::size_t slack = 0;
    for (const auto& slab : build_pde_zones(params, dom, cfg).slabs)
      slack += slab.intervals.size(); // one ceil per merged interval
    if (ss1.interior.size() > cs.interior.size() + slack)
      return {false, "stratified interior draw exceeded the uniform baseline"};
    if (ss1.ic.size() > cs.ic.size() + build_ic_zones(params, dom, cfg).size())
      return {false, "stratified initial draw exceeded the uniform baseline"};
  }
  return {true, "merge idempotence/membership on 1000 instances, draw determinism and "
                "stratified-vs-uniform point counts on 100 networks all hold"};
}

} // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  struct Entry {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {1, "Stirling numbers against set-partition enumeration", criterion1},
      {2, "sigmoid derivatives against hand formulas and parity", criterion2},
      {3, "derivative bound outside the order-4 zone radius", criterion3},
      {4, "network jets and gradients against finite differences", criterion4},
      {5, "exact benchmark solutions annihilate their residuals", criterion5},
      {6, "advection desk training reaches the loss target", criterion6},
      {7, "reaction-diffusion desk training reaches the loss target", criterion7},
      {8, "stratified beats uniform sampling on the large advection domain", criterion8},
      {9, "dropping saturated points does not shrink first-layer gradients", criterion9},
      {10, "sampler structural properties", criterion10},
  };

  int failures = 0;
  for (const auto& e : entries) {
    if (!wanted.empty() && !wanted.count(e.id)) continue;
    std::cerr << "# running criterion " << e.id << ": " << e.name << "\n";
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << e.id << ": " << e.name
              << " -- " << o.detail << std::endl;
    if (!o.pass) ++failures;
  }
  return failures;
}
