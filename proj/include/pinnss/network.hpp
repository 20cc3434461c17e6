#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace pinnss {

/// Layer widths of the trial-solution network. Input is fixed at (x, t),
/// output at a single scalar.
struct NetworkShape {
  std::vector<int> neurons_per_layer; // h_1 .. h_F, all >= 1

  int hidden_layer_count() const { return static_cast<int>(neurons_per_layer.size()); }
  void validate() const; // throws std::invalid_argument

  /// Width of layer k in {0 .. F+1}: h_0 = 2 (input), h_{F+1} = 1 (output).
  int width(int k) const;
};

/// All weights and biases. Layer index l in {0 .. F} where l < F are hidden
/// layers and l = F is the affine output layer; weights[l] has shape
/// width(l+1) x width(l), biases[l] has length width(l+1).
///
/// The canonical flat ordering (used by gradients, optimizer state, and
/// checkpoints) is: for each layer l = 0..F, the weight matrix in row-major
/// order followed by the bias vector.
struct NetworkParams {
  NetworkShape shape;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  int layer_count() const { return static_cast<int>(weights.size()); }
  long param_count() const;

  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& flat); // throws on length mismatch
  bool all_finite() const;
};

/// Trial-solution value and its input partials at one point.
struct EvalJet {
  double u = 0, u_x = 0, u_t = 0, u_xx = 0;
};

/// Batch of jets, one entry per point.
struct JetBatch {
  Eigen::VectorXd u, u_x, u_t, u_xx;
  Eigen::Index size() const { return u.size(); }
};

/// Per-layer intermediates saved by the forward pass so the parameter
/// gradient can be computed without re-evaluation.
struct LayerCache {
  Eigen::MatrixXd a, a_x, a_t, a_xx;   // activations and their input partials
  Eigen::MatrixXd z_x, z_t, z_xx;      // preactivation input partials
  Eigen::MatrixXd s1, s2, s3;          // sigma', sigma'', sigma''' at preactivation
};

struct ForwardCache {
  Eigen::VectorXd xs, ts;
  std::vector<LayerCache> layers; // one per hidden layer
  JetBatch out;
};

/// Glorot-style uniform initialization: weights drawn from
/// U[-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))] per layer,
/// biases zero. Bit-reproducible for a fixed seed.
NetworkParams init_params(const NetworkShape& shape, std::uint64_t seed);

/// Trial-solution value at one point. Throws on non-finite input.
double forward(const NetworkParams& params, double x, double t);

/// Values only, for a batch of points (no derivative bookkeeping).
Eigen::VectorXd forward_batch(const NetworkParams& params, const Eigen::VectorXd& xs,
                              const Eigen::VectorXd& ts);

/// Value and input partials up to u_xx at one point, exact (algorithmic
/// differentiation through the layer recurrence). Throws on non-finite input.
EvalJet eval_jet(const NetworkParams& params, double x, double t);

/// Batch variant; fills `cache` for a subsequent backprop_batch call.
JetBatch eval_jet_batch(const NetworkParams& params, const Eigen::VectorXd& xs,
                        const Eigen::VectorXd& ts, ForwardCache* cache = nullptr);

/// Adjoint seeds per point: the partial of the scalar being differentiated
/// with respect to each jet component.
struct JetSeeds {
  Eigen::VectorXd u, u_x, u_t, u_xx;
};

/// Exact gradient, in canonical flat order, of
///   sum_p [ seeds.u[p] du/dtheta + seeds.u_x[p] du_x/dtheta + ... ]
/// evaluated at the points recorded in `cache`.
Eigen::VectorXd backprop_batch(const NetworkParams& params, const ForwardCache& cache,
                               const JetSeeds& seeds);

/// Affine preactivation of first-hidden-layer neuron j (0-based) at (x, t).
/// Throws std::out_of_range on a bad index.
double first_layer_preactivation(const NetworkParams& params, int j, double x, double t);

/// Checkpoint I/O. Text format, one hexfloat per parameter in canonical
/// order, exact round trip:
///   pinnss-checkpoint 1
///   hidden <F>
///   widths <h_1> ... <h_F>
///   <param values, one per line>
void save_checkpoint(const NetworkParams& params, const std::string& path);
NetworkParams load_checkpoint(const std::string& path);

/// Uniform double in (0, 1), identical across platforms for a given
/// generator state (unlike std::uniform_real_distribution).
template <class Rng>
double canonical_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

} // namespace pinnss
