#include "pinnss/pde.hpp"

#include <cmath>
#include <stdexcept>

namespace pinnss {

void Domain::validate() const {
  if (!(x_lo < x_hi) || !(t_lo < t_hi))
    throw std::invalid_argument("Domain: require x_lo < x_hi and t_lo < t_hi");
}

PdeProblem advection_problem(double c, const Domain& domain) {
  domain.validate();
  PdeProblem p;
  p.name = "advection";
  p.order = 1;
  p.domain = domain;
  p.residual = [c](const EvalJet& j) { return j.u_t + c * j.u_x; };
  p.residual_grad = [c](const EvalJet&) {
    ResidualGrad g;
    g.du_t = 1.0;
    g.du_x = c;
    return g;
  };
  p.initial_condition = [](double x) { return std::exp(-x * x); };
  p.left_value = [](double) { return 0.0; };
  p.right_value = [](double) { return 0.0; };
  p.has_exact = true;
  p.exact = [c](double x, double t) {
    double s = x - c * t;
    return std::exp(-s * s);
  };
  p.exact_jet = [c](double x, double t) {
    double s = x - c * t;
    double u = std::exp(-s * s);
    EvalJet j;
    j.u = u;
    j.u_x = -2.0 * s * u;
    j.u_t = 2.0 * c * s * u;
    j.u_xx = (4.0 * s * s - 2.0) * u;
    return j;
  };
  return p;
}

PdeProblem fisher_problem(const Domain& domain) {
  domain.validate();
  const double a = std::sqrt(1.0 / 6.0);
  const double b = 5.0 / 6.0;
  PdeProblem p;
  p.name = "fisher";
  p.order = 2;
  p.domain = domain;
  p.residual = [](const EvalJet& j) { return j.u_t - j.u_xx - j.u * (1.0 - j.u); };
  p.residual_grad = [](const EvalJet& j) {
    ResidualGrad g;
    g.du_t = 1.0;
    g.du_xx = -1.0;
    g.du = -(1.0 - 2.0 * j.u);
    return g;
  };
  p.initial_condition = [a](double x) {
    double e = std::exp(a * x);
    return 1.0 / ((1.0 + e) * (1.0 + e));
  };
  p.left_value = [](double) { return 1.0; };
  p.right_value = [](double) { return 0.0; };
  p.has_exact = true;
  p.exact = [a, b](double x, double t) {
    double e = std::exp(a * x - b * t);
    return 1.0 / ((1.0 + e) * (1.0 + e));
  };
  p.exact_jet = [a, b](double x, double t) {
    // u = (1+E)^{-2} with E = e^{a x - b t}; E_x = a E, E_t = -b E.
    double e = std::exp(a * x - b * t);
    double d = 1.0 + e;
    double d3 = d * d * d;
    EvalJet j;
    j.u = 1.0 / (d * d);
    j.u_x = -2.0 * a * e / d3;
    j.u_t = 2.0 * b * e / d3;
    j.u_xx = -2.0 * a * a * e / d3 + 6.0 * a * a * e * e / (d3 * d);
    return j;
  };
  return p;
}

PdeProblem zeldovich_problem(const Domain& domain) {
  domain.validate();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double v = inv_sqrt2; // wavefront speed
  PdeProblem p;
  p.name = "zeldovich";
  p.order = 2;
  p.domain = domain;
  p.residual = [](const EvalJet& j) { return j.u_t - j.u_xx - j.u * j.u * (1.0 - j.u); };
  p.residual_grad = [](const EvalJet& j) {
    ResidualGrad g;
    g.du_t = 1.0;
    g.du_xx = -1.0;
    g.du = -(2.0 * j.u - 3.0 * j.u * j.u);
    return g;
  };
  p.initial_condition = [inv_sqrt2](double x) {
    return 1.0 / (1.0 + std::exp(x * inv_sqrt2));
  };
  p.left_value = [](double) { return 1.0; };
  p.right_value = [](double) { return 0.0; };
  p.has_exact = true;
  p.exact = [inv_sqrt2, v](double x, double t) {
    return 1.0 / (1.0 + std::exp((x - v * t) * inv_sqrt2));
  };
  p.exact_jet = [inv_sqrt2, v](double x, double t) {
    // u = (1+E)^{-1} with E = e^{(x - v t)/sqrt(2)}.
    double e = std::exp((x - v * t) * inv_sqrt2);
    double d = 1.0 + e;
    double d2 = d * d;
    double d3 = d2 * d;
    EvalJet j;
    j.u = 1.0 / d;
    j.u_x = -inv_sqrt2 * e / d2;
    j.u_t = v * inv_sqrt2 * e / d2;
    j.u_xx = -0.5 * e / d2 + e * e / d3; // (1/2)(2E^2/d^3 - E/d^2)
    return j;
  };
  return p;
}

PdeProblem problem_by_name(const std::string& name, double speed, const Domain& domain) {
  if (name == "advection") return advection_problem(speed, domain);
  if (name == "fisher") return fisher_problem(domain);
  if (name == "zeldovich") return zeldovich_problem(domain);
  throw std::invalid_argument("unknown problem name: " + name);
}

RescaledPoint rescale_fisher(double D, double rho, double K, double z, double tau, double v) {
  if (!(D > 0.0) || !(rho > 0.0) || !(K > 0.0))
    throw std::invalid_argument("rescale_fisher: coefficients must be positive");
  return RescaledPoint{std::sqrt(rho / D) * z, rho * tau, K * v};
}

double exact_residual_check(const PdeProblem& problem,
                            const std::vector<std::pair<double, double>>& points) {
  if (!problem.has_exact)
    throw std::logic_error("exact_residual_check: problem has no exact solution");
  double worst = 0.0;
  for (auto [x, t] : points)
    worst = std::max(worst, std::abs(problem.residual(problem.exact_jet(x, t))));
  return worst;
}

} // namespace pinnss
