#include "pinnss/network.hpp"

#include "pinnss/calculus.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pinnss {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Elementwise logistic, routed through the same scalar expression as
// pinnss::sigmoid so activations match bit-for-bit across modules.
MatrixXd logistic(const MatrixXd& z) {
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

void check_finite_inputs(const VectorXd& xs, const VectorXd& ts) {
  if (xs.size() != ts.size())
    throw std::invalid_argument("evaluate: x and t batches differ in length");
  if (!xs.allFinite() || !ts.allFinite())
    throw std::invalid_argument("evaluate: non-finite input coordinate");
}

} // namespace

void NetworkShape::validate() const {
  if (neurons_per_layer.empty())
    throw std::invalid_argument("NetworkShape: at least one hidden layer required");
  for (int h : neurons_per_layer)
    if (h < 1) throw std::invalid_argument("NetworkShape: layer width must be >= 1");
}

int NetworkShape::width(int k) const {
  int f = hidden_layer_count();
  if (k == 0) return 2;
  if (k == f + 1) return 1;
  if (k < 0 || k > f + 1) throw std::out_of_range("NetworkShape::width: bad layer index");
  return neurons_per_layer[static_cast<std::size_t>(k) - 1];
}

long NetworkParams::param_count() const {
  long n = 0;
  for (int l = 0; l < layer_count(); ++l)
    n += weights[l].size() + biases[l].size();
  return n;
}

Eigen::VectorXd NetworkParams::flatten() const {
  VectorXd flat(param_count());
  long pos = 0;
  for (int l = 0; l < layer_count(); ++l) {
    const MatrixXd& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat[pos++] = w(r, c);
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) flat[pos++] = biases[l][r];
  }
  return flat;
}

void NetworkParams::unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() != param_count())
    throw std::invalid_argument("unflatten: length mismatch");
  long pos = 0;
  for (int l = 0; l < layer_count(); ++l) {
    MatrixXd& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[pos++];
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) biases[l][r] = flat[pos++];
  }
}

bool NetworkParams::all_finite() const {
  for (int l = 0; l < layer_count(); ++l)
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  return true;
}

NetworkParams init_params(const NetworkShape& shape, std::uint64_t seed) {
  shape.validate();
  NetworkParams p;
  p.shape = shape;
  std::mt19937_64 rng(seed);
  int f = shape.hidden_layer_count();
  for (int l = 0; l <= f; ++l) {
    int fan_in = shape.width(l);
    int fan_out = shape.width(l + 1);
    double limit = std::sqrt(6.0 / (fan_in + fan_out));
    MatrixXd w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = (2.0 * canonical_open(rng) - 1.0) * limit;
    p.weights.push_back(std::move(w));
    p.biases.push_back(VectorXd::Zero(fan_out));
  }
  return p;
}

Eigen::VectorXd forward_batch(const NetworkParams& params, const Eigen::VectorXd& xs,
                              const Eigen::VectorXd& ts) {
  check_finite_inputs(xs, ts);
  Eigen::Index n = xs.size();
  MatrixXd a(2, n);
  a.row(0) = xs.transpose();
  a.row(1) = ts.transpose();
  int f = params.shape.hidden_layer_count();
  for (int l = 0; l < f; ++l) {
    MatrixXd z = params.weights[l] * a;
    z.colwise() += params.biases[l];
    a = logistic(z);
  }
  MatrixXd out = params.weights[f] * a;
  out.colwise() += params.biases[f];
  return out.row(0).transpose();
}

double forward(const NetworkParams& params, double x, double t) {
  VectorXd xs(1), ts(1);
  xs[0] = x;
  ts[0] = t;
  return forward_batch(params, xs, ts)[0];
}

JetBatch eval_jet_batch(const NetworkParams& params, const Eigen::VectorXd& xs,
                        const Eigen::VectorXd& ts, ForwardCache* cache) {
  check_finite_inputs(xs, ts);
  Eigen::Index n = xs.size();
  int f = params.shape.hidden_layer_count();

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.xs = xs;
  c.ts = ts;
  c.layers.assign(static_cast<std::size_t>(f), LayerCache{});

  // Input jets: a = (x, t), da/dx = (1, 0), da/dt = (0, 1), d2a/dx2 = 0.
  MatrixXd a(2, n), a_x(2, n), a_t(2, n), a_xx(2, n);
  a.row(0) = xs.transpose();
  a.row(1) = ts.transpose();
  a_x.row(0).setOnes();
  a_x.row(1).setZero();
  a_t.row(0).setZero();
  a_t.row(1).setOnes();
  a_xx.setZero();

  const MatrixXd* prev_a = &a;
  const MatrixXd* prev_x = &a_x;
  const MatrixXd* prev_t = &a_t;
  const MatrixXd* prev_xx = &a_xx;

  for (int l = 0; l < f; ++l) {
    LayerCache& lc = c.layers[static_cast<std::size_t>(l)];
    const MatrixXd& w = params.weights[l];
    MatrixXd z = w * (*prev_a);
    z.colwise() += params.biases[l];
    lc.z_x = w * (*prev_x);
    lc.z_t = w * (*prev_t);
    lc.z_xx = w * (*prev_xx);

    MatrixXd s = logistic(z);
    lc.s1 = (s.array() * (1.0 - s.array())).matrix();
    lc.s2 = (lc.s1.array() * (1.0 - 2.0 * s.array())).matrix();
    lc.s3 = (lc.s1.array() * (1.0 - 6.0 * s.array() + 6.0 * s.array().square())).matrix();

    lc.a = std::move(s);
    lc.a_x = (lc.s1.array() * lc.z_x.array()).matrix();
    lc.a_t = (lc.s1.array() * lc.z_t.array()).matrix();
    lc.a_xx = (lc.s2.array() * lc.z_x.array().square() + lc.s1.array() * lc.z_xx.array()).matrix();

    prev_a = &lc.a;
    prev_x = &lc.a_x;
    prev_t = &lc.a_t;
    prev_xx = &lc.a_xx;
  }

  const MatrixXd& w_out = params.weights[f];
  double b_out = params.biases[f][0];
  JetBatch out;
  out.u = (w_out * (*prev_a)).row(0).transpose();
  out.u.array() += b_out;
  out.u_x = (w_out * (*prev_x)).row(0).transpose();
  out.u_t = (w_out * (*prev_t)).row(0).transpose();
  out.u_xx = (w_out * (*prev_xx)).row(0).transpose();
  c.out = out;
  return out;
}

EvalJet eval_jet(const NetworkParams& params, double x, double t) {
  VectorXd xs(1), ts(1);
  xs[0] = x;
  ts[0] = t;
  JetBatch b = eval_jet_batch(params, xs, ts);
  return EvalJet{b.u[0], b.u_x[0], b.u_t[0], b.u_xx[0]};
}

Eigen::VectorXd backprop_batch(const NetworkParams& params, const ForwardCache& cache,
                               const JetSeeds& seeds) {
  int f = params.shape.hidden_layer_count();
  Eigen::Index n = cache.xs.size();

  std::vector<MatrixXd> grad_w(static_cast<std::size_t>(f) + 1);
  std::vector<VectorXd> grad_b(static_cast<std::size_t>(f) + 1);

  // Preactivation adjoints of the current layer, one row per neuron.
  MatrixXd zb_v = seeds.u.transpose();
  MatrixXd zb_x = seeds.u_x.transpose();
  MatrixXd zb_t = seeds.u_t.transpose();
  MatrixXd zb_xx = seeds.u_xx.transpose();

  for (int l = f; l >= 0; --l) {
    // Jets of the layer input.
    MatrixXd in_a, in_x, in_t, in_xx;
    if (l == 0) {
      in_a.resize(2, n);
      in_a.row(0) = cache.xs.transpose();
      in_a.row(1) = cache.ts.transpose();
      in_x = MatrixXd::Zero(2, n);
      in_x.row(0).setOnes();
      in_t = MatrixXd::Zero(2, n);
      in_t.row(1).setOnes();
      in_xx = MatrixXd::Zero(2, n);
    } else {
      const LayerCache& pc = cache.layers[static_cast<std::size_t>(l) - 1];
      in_a = pc.a;
      in_x = pc.a_x;
      in_t = pc.a_t;
      in_xx = pc.a_xx;
    }

    grad_w[static_cast<std::size_t>(l)] = zb_v * in_a.transpose() + zb_x * in_x.transpose() +
                                          zb_t * in_t.transpose() + zb_xx * in_xx.transpose();
    grad_b[static_cast<std::size_t>(l)] = zb_v.rowwise().sum();

    if (l == 0) break;

    const MatrixXd& w = params.weights[l];
    MatrixXd ab_v = w.transpose() * zb_v;
    MatrixXd ab_x = w.transpose() * zb_x;
    MatrixXd ab_t = w.transpose() * zb_t;
    MatrixXd ab_xx = w.transpose() * zb_xx;

    // Chain through a = sigma(z), a_x = s1 z_x, a_t = s1 z_t,
    // a_xx = s2 z_x^2 + s1 z_xx of the layer below.
    const LayerCache& lc = cache.layers[static_cast<std::size_t>(l) - 1];
    zb_v = (ab_v.array() * lc.s1.array() + ab_x.array() * lc.s2.array() * lc.z_x.array() +
            ab_t.array() * lc.s2.array() * lc.z_t.array() +
            ab_xx.array() * (lc.s3.array() * lc.z_x.array().square() +
                             lc.s2.array() * lc.z_xx.array()))
               .matrix();
    zb_x = (ab_x.array() * lc.s1.array() +
            2.0 * ab_xx.array() * lc.s2.array() * lc.z_x.array())
               .matrix();
    zb_t = (ab_t.array() * lc.s1.array()).matrix();
    zb_xx = (ab_xx.array() * lc.s1.array()).matrix();
  }

  VectorXd flat(params.param_count());
  long pos = 0;
  for (int l = 0; l <= f; ++l) {
    const MatrixXd& gw = grad_w[static_cast<std::size_t>(l)];
    for (Eigen::Index r = 0; r < gw.rows(); ++r)
      for (Eigen::Index c2 = 0; c2 < gw.cols(); ++c2) flat[pos++] = gw(r, c2);
    const VectorXd& gb = grad_b[static_cast<std::size_t>(l)];
    for (Eigen::Index r = 0; r < gb.size(); ++r) flat[pos++] = gb[r];
  }
  return flat;
}

double first_layer_preactivation(const NetworkParams& params, int j, double x, double t) {
  const MatrixXd& w = params.weights[0];
  if (j < 0 || j >= w.rows())
    throw std::out_of_range("first_layer_preactivation: neuron index out of range");
  return w(j, 0) * x + w(j, 1) * t + params.biases[0][j];
}

void save_checkpoint(const NetworkParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << "pinnss-checkpoint 1\n";
  out << "hidden " << params.shape.hidden_layer_count() << "\n";
  out << "widths";
  for (int h : params.shape.neurons_per_layer) out << ' ' << h;
  out << "\n";
  out << std::hexfloat;
  VectorXd flat = params.flatten();
  for (Eigen::Index i = 0; i < flat.size(); ++i) out << flat[i] << "\n";
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

NetworkParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "pinnss-checkpoint" || version != 1)
    throw std::runtime_error("load_checkpoint: unrecognized header in " + path);
  std::string key;
  int f = 0;
  in >> key >> f;
  if (key != "hidden" || f < 1) throw std::runtime_error("load_checkpoint: bad layer count");
  in >> key;
  if (key != "widths") throw std::runtime_error("load_checkpoint: missing widths");
  NetworkShape shape;
  for (int i = 0; i < f; ++i) {
    int h = 0;
    in >> h;
    shape.neurons_per_layer.push_back(h);
  }
  shape.validate();

  NetworkParams p = init_params(shape, 0);
  VectorXd flat(p.param_count());
  std::string token;
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    if (!(in >> token)) throw std::runtime_error("load_checkpoint: truncated parameter list");
    flat[i] = std::strtod(token.c_str(), nullptr);
  }
  p.unflatten(flat);
  return p;
}

} // namespace pinnss
