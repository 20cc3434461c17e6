#include "pinnss/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace pinnss {

namespace {

// ceil(d * measure) points, at least 1 when the region is non-degenerate.
int point_budget(double density, double measure) {
  if (!(measure > 0.0)) return 0;
  return static_cast<int>(std::ceil(density * measure));
}

std::optional<Interval> clip(const Interval& z, double lo, double hi) {
  double a = std::max(z.lo, lo), b = std::min(z.hi, hi);
  if (a >= b) return std::nullopt;
  return Interval{a, b};
}

void check_path_open(const std::ofstream& out, const std::string& path) {
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
}

} // namespace

void SamplerConfig::validate() const {
  if (!(density > 0.0)) throw std::invalid_argument("SamplerConfig: density must be > 0");
  if (n_slabs < 1) throw std::invalid_argument("SamplerConfig: n_slabs must be >= 1");
  zone_spec().validate();
}

std::vector<Interval> merge_intervals(std::vector<Interval> raw) {
  for (const auto& z : raw)
    if (!(z.lo <= z.hi)) throw std::invalid_argument("merge_intervals: interval with lo > hi");
  std::sort(raw.begin(), raw.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& z : raw) {
    if (!merged.empty() && z.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, z.hi);
    else
      merged.push_back(z);
  }
  return merged;
}

double zone_threshold(const SamplerConfig& config) {
  config.validate();
  return config.radius_mode == RadiusMode::lemma ? delta_epsilon(config.zone_spec())
                                                 : config.epsilon;
}

std::optional<double> zone_radius_x(const NetworkParams& params, int j,
                                    const SamplerConfig& config) {
  if (j < 0 || j >= params.shape.width(1))
    throw std::out_of_range("zone_radius_x: neuron index out of range");
  double wx = params.weights[0](j, 0);
  if (std::abs(wx) < kDegenerateWeight) return std::nullopt;
  return zone_threshold(config) / std::abs(wx);
}

double ic_zone_center(const NetworkParams& params, int j, double t0) {
  if (j < 0 || j >= params.shape.width(1))
    throw std::out_of_range("ic_zone_center: neuron index out of range");
  double wx = params.weights[0](j, 0);
  if (std::abs(wx) < kDegenerateWeight)
    throw std::domain_error("ic_zone_center: degenerate spatial weight");
  return -(params.weights[0](j, 1) * t0 + params.biases[0](j)) / wx;
}

std::vector<Interval> build_ic_zones(const NetworkParams& params, const Domain& domain,
                                     const SamplerConfig& config) {
  domain.validate();
  const double thresh = zone_threshold(config);
  const int h1 = params.shape.width(1);
  std::vector<Interval> raw;
  for (int j = 0; j < h1; ++j) {
    double wx = params.weights[0](j, 0);
    if (std::abs(wx) < kDegenerateWeight) {
      // Preactivation is constant in x on the initial line; the neuron is
      // active everywhere if that constant lies inside the threshold.
      double z0 = params.weights[0](j, 1) * domain.t_lo + params.biases[0](j);
      if (std::abs(z0) < thresh) raw.push_back({domain.x_lo, domain.x_hi});
      continue;
    }
    double c = ic_zone_center(params, j, domain.t_lo);
    double r = thresh / std::abs(wx);
    if (auto z = clip({c - r, c + r}, domain.x_lo, domain.x_hi)) raw.push_back(*z);
  }
  auto merged = merge_intervals(std::move(raw));
  if (merged.empty()) merged.push_back({domain.x_lo, domain.x_hi});
  return merged;
}

ZoneSet build_pde_zones(const NetworkParams& params, const Domain& domain,
                        const SamplerConfig& config) {
  domain.validate();
  const double thresh = zone_threshold(config);
  const int h1 = params.shape.width(1);
  const double dt = domain.duration() / config.n_slabs;
  ZoneSet zones;
  zones.slabs.resize(static_cast<std::size_t>(config.n_slabs));
  for (int s = 0; s < config.n_slabs; ++s) {
    Slab& slab = zones.slabs[static_cast<std::size_t>(s)];
    slab.t_lo = domain.t_lo + s * dt;
    slab.t_hi = (s + 1 == config.n_slabs) ? domain.t_hi : domain.t_lo + (s + 1) * dt;
    std::vector<Interval> raw;
    for (int j = 0; j < h1; ++j) {
      double wx = params.weights[0](j, 0);
      double wt = params.weights[0](j, 1);
      double b = params.biases[0](j);
      if (std::abs(wx) < kDegenerateWeight) {
        // Active across the whole slab width if the x-independent
        // preactivation enters the threshold band at either slab edge.
        double z_lo = wt * slab.t_lo + b;
        double z_hi = wt * slab.t_hi + b;
        if (std::min(std::abs(z_lo), std::abs(z_hi)) < thresh ||
            (z_lo < 0.0) != (z_hi < 0.0))
          raw.push_back({domain.x_lo, domain.x_hi});
        continue;
      }
      // The zone center drifts linearly in t; cover the slab with the box
      // spanned by the extreme centers padded by the spatial radius.
      double c_lo = -(wt * slab.t_lo + b) / wx;
      double c_hi = -(wt * slab.t_hi + b) / wx;
      double r = thresh / std::abs(wx);
      Interval box{std::min(c_lo, c_hi) - r, std::max(c_lo, c_hi) + r};
      if (auto z = clip(box, domain.x_lo, domain.x_hi)) raw.push_back(*z);
    }
    slab.intervals = merge_intervals(std::move(raw));
    if (slab.intervals.empty()) slab.intervals.push_back({domain.x_lo, domain.x_hi});
  }
  return zones;
}

std::vector<Point> sample_ic(const std::vector<Interval>& zones, double t0, double density,
                             std::mt19937_64& rng) {
  std::vector<Point> pts;
  for (const auto& z : zones) {
    int n = point_budget(density, z.length());
    for (int i = 0; i < n; ++i) pts.push_back({z.lo + z.length() * canonical_open(rng), t0});
  }
  return pts;
}

std::vector<Point> sample_ic(const std::vector<Interval>& zones, double t0,
                             const SamplerConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  return sample_ic(zones, t0, config.density, rng);
}

std::vector<Point> sample_pde(const ZoneSet& zones, double density, std::mt19937_64& rng) {
  std::vector<Point> pts;
  for (const auto& slab : zones.slabs) {
    double dt = slab.t_hi - slab.t_lo;
    for (const auto& z : slab.intervals) {
      int n = point_budget(density, z.length() * dt);
      for (int i = 0; i < n; ++i) {
        double x = z.lo + z.length() * canonical_open(rng);
        double t = slab.t_lo + dt * canonical_open(rng);
        pts.push_back({x, t});
      }
    }
  }
  return pts;
}

std::vector<Point> sample_pde(const ZoneSet& zones, const SamplerConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  return sample_pde(zones, config.density, rng);
}

std::pair<std::vector<Point>, std::vector<Point>> sample_boundary(const Domain& domain,
                                                                  double density,
                                                                  std::mt19937_64& rng) {
  domain.validate();
  int n = point_budget(density, domain.duration());
  std::vector<Point> left, right;
  left.reserve(static_cast<std::size_t>(n));
  right.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    left.push_back({domain.x_lo, domain.t_lo + domain.duration() * canonical_open(rng)});
  for (int i = 0; i < n; ++i)
    right.push_back({domain.x_hi, domain.t_lo + domain.duration() * canonical_open(rng)});
  return {std::move(left), std::move(right)};
}

std::pair<std::vector<Point>, std::vector<Point>> sample_boundary(const Domain& domain,
                                                                  const SamplerConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  return sample_boundary(domain, config.density, rng);
}

SampleSet sample_classical(const Domain& domain, double density, std::mt19937_64& rng) {
  domain.validate();
  SampleSet s;
  s.ic = sample_ic({{domain.x_lo, domain.x_hi}}, domain.t_lo, density, rng);
  auto [left, right] = sample_boundary(domain, density, rng);
  s.lbc = std::move(left);
  s.rbc = std::move(right);
  int n = point_budget(density, domain.area());
  s.interior.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = domain.x_lo + domain.width() * canonical_open(rng);
    double t = domain.t_lo + domain.duration() * canonical_open(rng);
    s.interior.push_back({x, t});
  }
  return s;
}

SampleSet sample_classical(const Domain& domain, const SamplerConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  return sample_classical(domain, config.density, rng);
}

SampleSet sample_stratified(const NetworkParams& params, const Domain& domain,
                            const SamplerConfig& config, std::mt19937_64& rng) {
  SampleSet s;
  s.ic = sample_ic(build_ic_zones(params, domain, config), domain.t_lo, config.density, rng);
  auto [left, right] = sample_boundary(domain, config.density, rng);
  s.lbc = std::move(left);
  s.rbc = std::move(right);
  s.interior = sample_pde(build_pde_zones(params, domain, config), config.density, rng);
  return s;
}

SampleSet sample_stratified(const NetworkParams& params, const Domain& domain,
                            const SamplerConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  return sample_stratified(params, domain, config, rng);
}

void write_sample_csv(const SampleSet& sample, const std::string& path) {
  std::ofstream out(path);
  check_path_open(out, path);
  out.precision(17);
  out << "x,t,partition\n";
  auto emit = [&](const std::vector<Point>& pts, const char* tag) {
    for (const auto& p : pts) out << p.x << ',' << p.t << ',' << tag << '\n';
  };
  emit(sample.ic, "ic");
  emit(sample.lbc, "lbc");
  emit(sample.rbc, "rbc");
  emit(sample.interior, "pde");
}

void write_zones_csv(const ZoneSet& zones, const std::string& path) {
  std::ofstream out(path);
  check_path_open(out, path);
  out.precision(17);
  out << "slab_index,t_lo,t_hi,x_lo,x_hi\n";
  for (std::size_t s = 0; s < zones.slabs.size(); ++s)
    for (const auto& z : zones.slabs[s].intervals)
      out << s << ',' << zones.slabs[s].t_lo << ',' << zones.slabs[s].t_hi << ',' << z.lo << ','
          << z.hi << '\n';
}

} // namespace pinnss
