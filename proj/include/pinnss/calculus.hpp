#pragma once

#include <cstdint>

namespace pinnss {

/// Highest derivative order supported by sigmoid_derivative / epsilon_n.
/// Beyond this the factorials in the closed form overflow 64-bit integers.
inline constexpr int kMaxDerivativeOrder = 20;

/// Stirling number of the second kind S(m, n): the number of partitions of an
/// m-element set into n non-empty blocks. Exact integer arithmetic via the
/// recurrence S(m+1, n) = n S(m, n) + S(m, n-1), memoized.
/// Throws std::invalid_argument if n > m, std::overflow_error if m > 25.
std::uint64_t stirling2(int m, int n);

/// Logistic function 1 / (1 + e^{-x}).
double sigmoid(double x);

/// n-th derivative of the logistic function,
///   sigma^(n)(x) = sum_{k=1}^{n+1} (-1)^{k+1} (k-1)! S(n+1, k) sigma^k(x),
/// with sigma^(0) = sigma. Throws std::invalid_argument for n < 0 or
/// n > kMaxDerivativeOrder.
double sigmoid_derivative(int n, double x);

/// Negligibility threshold and derivative-order bound that define the
/// active/diminishing gradient zones of the logistic activation.
struct ZoneRadiusSpec {
  double epsilon = 1e-3;    // must lie in (0, 1/2)
  int derivative_order = 1; // >= 1

  void validate() const; // throws std::invalid_argument on bad fields
};

/// eps_n = eps / ((n+1)! max_k S(n+1, k)), the per-derivative threshold that
/// makes |sigma^(m)| < eps for all m <= n outside the zone.
double epsilon_n(const ZoneRadiusSpec& spec);

/// Zone radius in preactivation units: delta = ln((1 - eps_n) / eps_n).
/// Requires eps_n < 1/2 (guaranteed by ZoneRadiusSpec validation).
double delta_epsilon(const ZoneRadiusSpec& spec);

} // namespace pinnss
