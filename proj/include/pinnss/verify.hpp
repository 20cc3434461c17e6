#pragma once

#include "pinnss/network.hpp"
#include "pinnss/pde.hpp"
#include "pinnss/sampler.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pinnss {

/// Result of one empirical check that first-layer parameter gradients decay
/// outside the sampler's active zones.
struct ZoneAudit {
  std::string derivative_name; // which seeded quantity was differentiated
  double inside_max = 0;       // max |d/dtheta_1| over points inside some zone
  double outside_max = 0;      // same over points outside every zone
  double epsilon_used = 0;
  bool skipped = false; // one of the two point classes could not be filled
};

/// Samples points uniformly over the domain, classifies them against the
/// interior zone set, and records the largest first-layer gradient magnitude
/// in each class for d(sum u), d(sum u_x) and d(sum u_t). Sampling attempts
/// are capped, so sparse classes come back with `skipped` set.
std::vector<ZoneAudit> audit_zone_derivatives(const NetworkParams& params, const Domain& domain,
                                              const SamplerConfig& config, int points_per_class,
                                              std::uint64_t seed);

/// One first-layer parameter in the full-versus-filtered gradient comparison.
struct FilteredGradRow {
  long param_id = 0;        // canonical flat index
  double grad_full = 0;     // |gradient| over the whole sample
  double grad_filtered = 0; // |gradient| with negligible points removed
  double ratio = 0;         // grad_filtered / grad_full (1 when both are 0)
};

struct FilteredGradReport {
  std::vector<FilteredGradRow> rows;
  std::size_t total_points = 0;   // points in the partitions that were used
  std::size_t removed_points = 0; // points where every first-layer neuron saturates
  double fraction_ge = 0;         // share of rows with grad_filtered >= grad_full
};

/// Removes from each used partition the points at which |preactivation| >
/// delta_prime for every first-layer neuron, then compares the first-layer
/// loss gradient with and without those points. With include_pde = false only
/// the initial-condition partition is used. Throws std::runtime_error naming
/// the partition if filtering empties one that was non-empty.
FilteredGradReport compare_gradient_filtered(const NetworkParams& params,
                                             const PdeProblem& problem, const SampleSet& sample,
                                             bool include_pde, double delta_prime);

/// CSV with header `param_id,grad_full,grad_filtered,ratio`.
void write_filtered_csv(const FilteredGradReport& report, const std::string& path);

} // namespace pinnss
