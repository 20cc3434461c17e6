#pragma once

#include "pinnss/calculus.hpp"
#include "pinnss/network.hpp"
#include "pinnss/pde.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace pinnss {

struct Interval {
  double lo = 0, hi = 0; // lo <= hi
  double length() const { return hi - lo; }
};

/// Sorted, pairwise-disjoint union of the inputs; touching intervals merge.
std::vector<Interval> merge_intervals(std::vector<Interval> raw);

/// One time slab with the merged active-zone intervals it contains.
struct Slab {
  double t_lo = 0, t_hi = 0;
  std::vector<Interval> intervals;
};

struct ZoneSet {
  std::vector<Slab> slabs;
};

struct Point {
  double x = 0, t = 0;
};

/// Four-way partitioned collocation set.
struct SampleSet {
  std::vector<Point> ic;       // on the initial line t = t_lo
  std::vector<Point> lbc;      // on x = x_lo
  std::vector<Point> rbc;      // on x = x_hi
  std::vector<Point> interior; // strictly inside the rectangle
};

/// How the per-neuron zone radius is derived from the threshold epsilon:
/// `lemma` converts epsilon through the derivative-order bound into a
/// preactivation radius ln((1-eps_n)/eps_n); `literal` treats epsilon itself
/// as the preactivation radius.
enum class RadiusMode { lemma, literal };

struct SamplerConfig {
  double density = 1.0;   // d_p: points per unit length (lines) / area (interior)
  double epsilon = 1e-3;  // zone negligibility threshold, in (0, 1/2)
  int n_slabs = 50;       // N time slabs for the interior sampler
  std::uint64_t seed = 0;
  int derivative_order = 1;
  RadiusMode radius_mode = RadiusMode::lemma;

  void validate() const; // throws std::invalid_argument
  ZoneRadiusSpec zone_spec() const { return ZoneRadiusSpec{epsilon, derivative_order}; }
};

/// Weights below this magnitude are treated as having no spatial variation.
inline constexpr double kDegenerateWeight = 1e-8;

/// Zone radius in preactivation units for the configured mode.
double zone_threshold(const SamplerConfig& config);

/// Spatial half-width of neuron j's active zone: threshold / |w_x|.
/// nullopt means unbounded (degenerate spatial weight).
std::optional<double> zone_radius_x(const NetworkParams& params, int j,
                                    const SamplerConfig& config);

/// x where neuron j's preactivation vanishes at time t0. Throws
/// std::domain_error for a degenerate spatial weight.
double ic_zone_center(const NetworkParams& params, int j, double t0);

/// Merged active-zone intervals on the initial line; falls back to the full
/// spatial domain when no neuron contributes a zone.
std::vector<Interval> build_ic_zones(const NetworkParams& params, const Domain& domain,
                                     const SamplerConfig& config);

/// Per-slab merged zone intervals for the interior sampler; each slab falls
/// back to the full spatial domain when empty.
ZoneSet build_pde_zones(const NetworkParams& params, const Domain& domain,
                        const SamplerConfig& config);

/// ceil(d_p * L) uniform points per interval, on the line t = t0.
std::vector<Point> sample_ic(const std::vector<Interval>& zones, double t0,
                             const SamplerConfig& config);
std::vector<Point> sample_ic(const std::vector<Interval>& zones, double t0, double density,
                             std::mt19937_64& rng);

/// ceil(d_p * L * dt) uniform points per slab interval.
std::vector<Point> sample_pde(const ZoneSet& zones, const SamplerConfig& config);
std::vector<Point> sample_pde(const ZoneSet& zones, double density, std::mt19937_64& rng);

/// ceil(d_p * (t_hi - t_lo)) points per boundary line.
std::pair<std::vector<Point>, std::vector<Point>> sample_boundary(const Domain& domain,
                                                                  const SamplerConfig& config);
std::pair<std::vector<Point>, std::vector<Point>> sample_boundary(const Domain& domain,
                                                                  double density,
                                                                  std::mt19937_64& rng);

/// Uniform baseline over the whole rectangle at the same density.
SampleSet sample_classical(const Domain& domain, const SamplerConfig& config);
SampleSet sample_classical(const Domain& domain, double density, std::mt19937_64& rng);

/// Full stratified sample: zone-restricted IC and interior, uniform boundaries.
SampleSet sample_stratified(const NetworkParams& params, const Domain& domain,
                            const SamplerConfig& config);
SampleSet sample_stratified(const NetworkParams& params, const Domain& domain,
                            const SamplerConfig& config, std::mt19937_64& rng);

/// Writes one CSV with header `x,t,partition` covering all four partitions.
void write_sample_csv(const SampleSet& sample, const std::string& path);

/// Writes header `slab_index,t_lo,t_hi,x_lo,x_hi`, one row per zone interval.
void write_zones_csv(const ZoneSet& zones, const std::string& path);

} // namespace pinnss
