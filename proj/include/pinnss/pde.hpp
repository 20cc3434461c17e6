#pragma once

#include "pinnss/network.hpp"

#include <functional>
#include <string>
#include <vector>

namespace pinnss {

/// Space-time rectangle [x_lo, x_hi] x [t_lo, t_hi].
struct Domain {
  double x_lo = 0, x_hi = 1, t_lo = 0, t_hi = 1;

  void validate() const; // throws std::invalid_argument
  double width() const { return x_hi - x_lo; }
  double duration() const { return t_hi - t_lo; }
  double area() const { return width() * duration(); }
};

/// Partials of a residual with respect to the jet components it reads.
struct ResidualGrad {
  double du = 0, du_x = 0, du_t = 0, du_xx = 0;
};

/// One benchmark equation: residual operator, Dirichlet-style enforced
/// boundary values, initial data, and (when known) the exact solution with
/// its hand-coded analytic jet.
struct PdeProblem {
  std::string name;
  int order = 1; // highest input derivative the residual reads

  std::function<double(const EvalJet&)> residual;
  std::function<ResidualGrad(const EvalJet&)> residual_grad;
  std::function<double(double)> initial_condition; // u0(x)
  std::function<double(double)> left_value;        // enforced at x_lo, as a function of t
  std::function<double(double)> right_value;       // enforced at x_hi

  bool has_exact = false;
  std::function<double(double, double)> exact;    // u(x, t)
  std::function<EvalJet(double, double)> exact_jet; // analytic partials of exact

  Domain domain;
};

/// u_t + c u_x = 0 with a Gaussian pulse initial condition e^{-x^2}, zero
/// enforced at both boundaries, exact solution e^{-(x - c t)^2}.
PdeProblem advection_problem(double c, const Domain& domain);

/// u_t = u_xx + u(1 - u), logistic-squared front initial condition, boundary
/// values 1 (left) and 0 (right), exact solution (1 + e^{sqrt(1/6) x - (5/6) t})^{-2}.
PdeProblem fisher_problem(const Domain& domain);

/// u_t = u_xx + u^2 (1 - u), logistic front initial condition, boundary
/// values 1 (left) and 0 (right), exact solution 1 / (1 + e^{(x - t/sqrt(2))/sqrt(2)}).
PdeProblem zeldovich_problem(const Domain& domain);

/// Lookup by name ("advection", "fisher", "zeldovich"); `speed` applies to
/// advection only. Throws std::invalid_argument on an unknown name.
PdeProblem problem_by_name(const std::string& name, double speed, const Domain& domain);

/// Change of variables taking the dimensional reaction-diffusion form to the
/// dimensionless one: x = sqrt(rho/D) z, t = rho tau, u = K v.
struct RescaledPoint {
  double x, t, u;
};
RescaledPoint rescale_fisher(double D, double rho, double K, double z, double tau, double v);

/// Max |residual| of the exact solution's analytic jet over the given points.
/// Throws std::logic_error if the problem has no exact solution.
double exact_residual_check(const PdeProblem& problem,
                            const std::vector<std::pair<double, double>>& points);

} // namespace pinnss
