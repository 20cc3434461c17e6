#include "pinnss/verify.hpp"

#include "pinnss/train.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

namespace pinnss {

namespace {

bool in_zone_set(const ZoneSet& zones, double x, double t) {
  for (const auto& slab : zones.slabs) {
    if (t < slab.t_lo || t > slab.t_hi) continue;
    for (const auto& z : slab.intervals)
      if (x >= z.lo && x <= z.hi) return true;
  }
  return false;
}

// Max |gradient| over the first-layer block (weights then bias of layer 0).
double first_layer_max(const NetworkParams& params, const Eigen::VectorXd& grad) {
  long n = static_cast<long>(params.weights[0].size() + params.biases[0].size());
  return grad.head(n).cwiseAbs().maxCoeff();
}

double seeded_first_layer_max(const NetworkParams& params, double x, double t, int component) {
  Eigen::VectorXd xs(1), ts(1);
  xs(0) = x;
  ts(0) = t;
  ForwardCache cache;
  eval_jet_batch(params, xs, ts, &cache);
  JetSeeds seeds;
  seeds.u = Eigen::VectorXd::Zero(1);
  seeds.u_x = Eigen::VectorXd::Zero(1);
  seeds.u_t = Eigen::VectorXd::Zero(1);
  seeds.u_xx = Eigen::VectorXd::Zero(1);
  if (component == 0) seeds.u(0) = 1.0;
  if (component == 1) seeds.u_x(0) = 1.0;
  if (component == 2) seeds.u_t(0) = 1.0;
  return first_layer_max(params, backprop_batch(params, cache, seeds));
}

} // namespace

std::vector<ZoneAudit> audit_zone_derivatives(const NetworkParams& params, const Domain& domain,
                                              const SamplerConfig& config, int points_per_class,
                                              std::uint64_t seed) {
  domain.validate();
  config.validate();
  if (points_per_class < 1)
    throw std::invalid_argument("audit_zone_derivatives: points_per_class must be >= 1");

  ZoneSet zones = build_pde_zones(params, domain, config);
  std::mt19937_64 rng(seed);
  std::vector<Point> inside, outside;
  constexpr long kMaxAttempts = 1'000'000;
  for (long attempt = 0; attempt < kMaxAttempts; ++attempt) {
    if (static_cast<int>(inside.size()) >= points_per_class &&
        static_cast<int>(outside.size()) >= points_per_class)
      break;
    double x = domain.x_lo + domain.width() * canonical_open(rng);
    double t = domain.t_lo + domain.duration() * canonical_open(rng);
    auto& bucket = in_zone_set(zones, x, t) ? inside : outside;
    if (static_cast<int>(bucket.size()) < points_per_class) bucket.push_back({x, t});
  }

  const char* names[3] = {"d(u)/dtheta1", "d(u_x)/dtheta1", "d(u_t)/dtheta1"};
  std::vector<ZoneAudit> audits(3);
  for (int c = 0; c < 3; ++c) {
    ZoneAudit& a = audits[static_cast<std::size_t>(c)];
    a.derivative_name = names[c];
    a.epsilon_used = config.epsilon;
    if (static_cast<int>(inside.size()) < points_per_class ||
        static_cast<int>(outside.size()) < points_per_class) {
      a.skipped = true;
      continue;
    }
    for (const auto& p : inside)
      a.inside_max = std::max(a.inside_max, seeded_first_layer_max(params, p.x, p.t, c));
    for (const auto& p : outside)
      a.outside_max = std::max(a.outside_max, seeded_first_layer_max(params, p.x, p.t, c));
  }
  return audits;
}

FilteredGradReport compare_gradient_filtered(const NetworkParams& params,
                                             const PdeProblem& problem, const SampleSet& sample,
                                             bool include_pde, double delta_prime) {
  if (!(delta_prime > 0.0))
    throw std::invalid_argument("compare_gradient_filtered: delta_prime must be > 0");

  const int h1 = params.shape.width(1);
  // A point is negligible when every first-layer neuron is saturated there.
  auto negligible = [&](const Point& p) {
    for (int j = 0; j < h1; ++j)
      if (std::abs(first_layer_preactivation(params, j, p.x, p.t)) <= delta_prime) return false;
    return true;
  };

  FilteredGradReport report;
  SampleSet filtered;
  auto filter = [&](const std::vector<Point>& pts, std::vector<Point>& out, const char* name) {
    for (const auto& p : pts) {
      if (negligible(p))
        ++report.removed_points;
      else
        out.push_back(p);
    }
    report.total_points += pts.size();
    if (!pts.empty() && out.empty())
      throw std::runtime_error(std::string("compare_gradient_filtered: filtering emptied "
                                           "partition '") +
                               name + "'");
  };
  filter(sample.ic, filtered.ic, "ic");
  if (include_pde) {
    filter(sample.lbc, filtered.lbc, "lbc");
    filter(sample.rbc, filtered.rbc, "rbc");
    filter(sample.interior, filtered.interior, "pde");
  }

  Eigen::VectorXd g_full = loss_and_gradient(params, problem, sample, include_pde).second;
  Eigen::VectorXd g_filt = loss_and_gradient(params, problem, filtered, include_pde).second;

  long n_first = static_cast<long>(params.weights[0].size() + params.biases[0].size());
  long ge = 0;
  report.rows.reserve(static_cast<std::size_t>(n_first));
  for (long i = 0; i < n_first; ++i) {
    FilteredGradRow row;
    row.param_id = i;
    row.grad_full = std::abs(g_full(i));
    row.grad_filtered = std::abs(g_filt(i));
    if (row.grad_full == 0.0)
      row.ratio = row.grad_filtered == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    else
      row.ratio = row.grad_filtered / row.grad_full;
    if (row.grad_filtered >= row.grad_full) ++ge;
    report.rows.push_back(row);
  }
  report.fraction_ge = static_cast<double>(ge) / static_cast<double>(n_first);
  return report;
}

void write_filtered_csv(const FilteredGradReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  out << "param_id,grad_full,grad_filtered,ratio\n";
  for (const auto& row : report.rows)
    out << row.param_id << ',' << row.grad_full << ',' << row.grad_filtered << ',' << row.ratio
        << '\n';
}

} // namespace pinnss
