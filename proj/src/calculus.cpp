#include "pinnss/calculus.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pinnss {

namespace {

constexpr int kMaxStirlingM = 25; // S(25, k) still fits in uint64_t

// Triangular memo table, filled row by row on first use.
const std::vector<std::vector<std::uint64_t>>& stirling_table() {
  static const std::vector<std::vector<std::uint64_t>> table = [] {
    std::vector<std::vector<std::uint64_t>> t(kMaxStirlingM + 1);
    t[0] = {1}; // S(0,0) = 1
    for (int m = 1; m <= kMaxStirlingM; ++m) {
      t[m].assign(static_cast<std::size_t>(m) + 1, 0);
      t[m][0] = 0;
      for (int n = 1; n <= m; ++n) {
        std::uint64_t upper = (n <= m - 1) ? t[m - 1][n] : 0;
        t[m][n] = static_cast<std::uint64_t>(n) * upper + t[m - 1][n - 1];
      }
    }
    return t;
  }();
  return table;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

} // namespace

std::uint64_t stirling2(int m, int n) {
  if (m < 0 || n < 0) throw std::invalid_argument("stirling2: negative argument");
  if (n > m) throw std::invalid_argument("stirling2: n > m");
  if (m > kMaxStirlingM) throw std::overflow_error("stirling2: m > 25 overflows uint64");
  return stirling_table()[m][n];
}

double sigmoid(double x) {
  // IEEE-safe for any finite x: exp overflow yields inf and sigma -> 0.
  return 1.0 / (1.0 + std::exp(-x));
}

double sigmoid_derivative(int n, double x) {
  if (n < 0) throw std::invalid_argument("sigmoid_derivative: negative order");
  if (n > kMaxDerivativeOrder)
    throw std::invalid_argument("sigmoid_derivative: order exceeds supported cap of 20");
  double s = sigmoid(x);
  if (n == 0) return s;
  double result = 0.0;
  double sk = s;          // sigma^k(x)
  double fact = 1.0;      // (k-1)!
  double sign = 1.0;      // (-1)^{k+1}
  for (int k = 1; k <= n + 1; ++k) {
    result += sign * fact * static_cast<double>(stirling2(n + 1, k)) * sk;
    sk *= s;
    fact *= k;
    sign = -sign;
  }
  return result;
}

void ZoneRadiusSpec::validate() const {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("ZoneRadiusSpec: epsilon must lie in (0, 1/2)");
  if (derivative_order < 1)
    throw std::invalid_argument("ZoneRadiusSpec: derivative_order must be >= 1");
  if (derivative_order > kMaxDerivativeOrder)
    throw std::invalid_argument("ZoneRadiusSpec: derivative_order exceeds supported cap of 20");
}

double epsilon_n(const ZoneRadiusSpec& spec) {
  spec.validate();
  int n = spec.derivative_order;
  std::uint64_t max_s = 0;
  for (int k = 1; k <= n + 1; ++k) max_s = std::max(max_s, stirling2(n + 1, k));
  return spec.epsilon / (factorial(n + 1) * static_cast<double>(max_s));
}

double delta_epsilon(const ZoneRadiusSpec& spec) {
  double en = epsilon_n(spec);
  if (!(en < 0.5)) throw std::domain_error("delta_epsilon: epsilon_n >= 1/2, zone undefined");
  return std::log((1.0 - en) / en);
}

} // namespace pinnss
