#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pinnss/verify.hpp"

#include "pinnss/calculus.hpp"
#include "pinnss/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace pinnss;

namespace {

// One-hidden-neuron network: U = w_out * sigma(w_x x + w_t t + b) + b_out.
NetworkParams one_neuron(double w_x, double w_t, double b, double w_out) {
  NetworkParams p;
  p.shape = NetworkShape{{1}};
  p.weights.resize(2);
  p.biases.resize(2);
  p.weights[0].resize(1, 2);
  p.weights[0] << w_x, w_t;
  p.biases[0] = Eigen::VectorXd::Constant(1, b);
  p.weights[1] = Eigen::MatrixXd::Constant(1, 1, w_out);
  p.biases[1] = Eigen::VectorXd::Zero(1);
  return p;
}

double db1_of(const NetworkParams& p, double x, double t) {
  Eigen::VectorXd xs(1), ts(1);
  xs << x;
  ts << t;
  ForwardCache cache;
  eval_jet_batch(p, xs, ts, &cache);
  JetSeeds seeds;
  seeds.u = Eigen::VectorXd::Ones(1);
  seeds.u_x = Eigen::VectorXd::Zero(1);
  seeds.u_t = Eigen::VectorXd::Zero(1);
  seeds.u_xx = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd g = backprop_batch(p, cache, seeds);
  return g(2); // canonical order: w_x, w_t, b, then the output layer
}

} // namespace

TEST_CASE("beyond the zone radius the bias gradient is negligible") {
  double w_out = 3.0;
  auto p = one_neuron(2.0, 0.0, 0.0, w_out);
  ZoneRadiusSpec spec; // epsilon 1e-3, order 1
  double delta = delta_epsilon(spec);
  // dU/db1 = w_out * sigma'(z); outside |z| > delta it drops below
  // w_out * eps_1 <= w_out * eps.
  for (double z : {delta + 1e-6, delta + 1.0, delta + 20.0})
    for (double sign : {-1.0, 1.0}) {
      double x = sign * z / 2.0; // preactivation is 2x here
      double g = std::abs(db1_of(p, x, 0.0));
      CHECK(g < w_out * spec.epsilon);
      CHECK(g == doctest::Approx(w_out * sigmoid_derivative(1, 2.0 * x)).epsilon(1e-10));
    }
  // And inside the zone it is far larger than the bound.
  CHECK(std::abs(db1_of(p, 0.0, 0.0)) > 100 * w_out * spec.epsilon);
}

TEST_CASE("zone audit separates inside from outside gradients") {
  auto params = init_params(NetworkShape{{12, 8}}, 6);
  // Spread the first layer so the zones leave part of the domain uncovered.
  params.weights[0] *= 10.0;
  Domain dom{-20, 80, 0, 60};
  SamplerConfig cfg;
  cfg.seed = 6;
  auto audits = audit_zone_derivatives(params, dom, cfg, 150, 17);
  REQUIRE(audits.size() == 3);
  for (const auto& a : audits) {
    REQUIRE_FALSE(a.skipped);
    CHECK(a.epsilon_used == cfg.epsilon);
    CHECK(a.outside_max < a.inside_max);
  }
  // The value-seeded family obeys the lemma bound up to the downstream
  // amplification factor, which for a fresh Glorot net stays modest.
  CHECK(audits[0].outside_max < 0.05);
}

TEST_CASE("zone audit reports saturation when a class cannot be filled") {
  // Zones of this single neuron cover the entire tiny domain, so no point
  // ever lands outside them.
  auto p = one_neuron(1.0, 0.0, 0.0, 1.0);
  Domain dom{-0.5, 0.5, 0, 1};
  SamplerConfig cfg;
  auto audits = audit_zone_derivatives(p, dom, cfg, 10, 1);
  for (const auto& a : audits) CHECK(a.skipped);
}

TEST_CASE("filtered gradient equals the full gradient when nothing is removed") {
  auto params = init_params(NetworkShape{{6, 5}}, 8);
  auto problem = fisher_problem(Domain{-20, 80, 0, 30});
  SamplerConfig sc;
  sc.density = 0.3;
  sc.seed = 8;
  auto sample = sample_classical(problem.domain, sc);
  // A huge threshold means no preactivation ever exceeds it.
  auto report = compare_gradient_filtered(params, problem, sample, true, 1e9);
  CHECK(report.removed_points == 0);
  CHECK(report.fraction_ge == 1.0);
  for (const auto& row : report.rows) {
    CHECK(row.grad_filtered == row.grad_full);
    CHECK(row.ratio == 1.0);
  }
  CHECK(report.rows.size() == 6 * 2 + 6); // first-layer weights plus biases
}

TEST_CASE("removing saturated points does not shrink first-layer gradients") {
  auto params = init_params(NetworkShape{{10, 10}}, 21);
  // Spread the first layer out so that genuinely saturated points exist.
  params.weights[0] *= 30.0;
  auto problem = fisher_problem(Domain{-20, 80, 0, 30});
  SamplerConfig sc;
  sc.density = 0.5;
  sc.seed = 21;
  auto sample = sample_classical(problem.domain, sc);
  SamplerConfig zone_cfg;
  auto report =
      compare_gradient_filtered(params, problem, sample, false, zone_threshold(zone_cfg));
  CHECK(report.removed_points > 0);
  CHECK(report.fraction_ge >= 0.9);
}

TEST_CASE("filtering that empties a partition is an error") {
  // All first-layer preactivations sit at 1000: every point is negligible.
  auto p = one_neuron(0.0, 0.0, 1000.0, 1.0);
  auto problem = advection_problem(1.0, Domain{-1, 1, 0, 1});
  SampleSet s;
  s.ic = {{0.0, 0.0}, {0.5, 0.0}};
  CHECK_THROWS_WITH_AS(compare_gradient_filtered(p, problem, s, false, 7.6),
                       doctest::Contains("'ic'"), std::runtime_error);
}

TEST_CASE("filtered-gradient CSV format") {
  auto params = init_params(NetworkShape{{3}}, 2);
  auto problem = advection_problem(1.0, Domain{-5, 5, 0, 1});
  SamplerConfig sc;
  sc.density = 2;
  auto sample = sample_classical(problem.domain, sc);
  auto report = compare_gradient_filtered(params, problem, sample, true, 1e9);
  write_filtered_csv(report, "verify_test_rows.csv");
  std::ifstream in("verify_test_rows.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "param_id,grad_full,grad_filtered,ratio");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == report.rows.size());
  std::remove("verify_test_rows.csv");
}
