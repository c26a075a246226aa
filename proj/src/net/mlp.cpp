#include "apo/net/mlp.hpp"

#include <cmath>

#include "apo/common/errors.hpp"
#include "apo/common/rng.hpp"

namespace apo::net {

namespace {

// Maps the flat vector onto (weight, bias) views per layer; weights are
// stored row-major.
struct Blocks {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
  Eigen::VectorXd extras;
};

Blocks unpack(const MlpSpec& spec, const ParamVector& params) {
  if (params.size() != spec.param_count())
    throw ShapeMismatch("mlp: parameter vector has wrong length");
  Blocks out;
  const auto dims = spec.layer_dims();
  int off = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], o = dims[l + 1];
    Eigen::MatrixXd w(o, in);
    for (int r = 0; r < o; ++r)
      for (int c = 0; c < in; ++c) w(r, c) = params[off + r * in + c];
    off += o * in;
    out.w.push_back(std::move(w));
    out.b.push_back(params.segment(off, o));
    off += o;
  }
  out.extras = params.segment(off, spec.extras);
  return out;
}

void pack_block(ParamVector& flat, int& off, const Eigen::MatrixXd& w,
                const Eigen::VectorXd& b) {
  const int o = static_cast<int>(w.rows()), in = static_cast<int>(w.cols());
  for (int r = 0; r < o; ++r)
    for (int c = 0; c < in; ++c) flat[off + r * in + c] = w(r, c);
  off += o * in;
  flat.segment(off, o) = b;
  off += o;
}

}  // namespace

int MlpSpec::param_count() const {
  const auto dims = layer_dims();
  int n = extras;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l)
    n += dims[l] * dims[l + 1] + dims[l + 1];
  return n;
}

std::vector<int> MlpSpec::layer_dims() const {
  if (input_dim < 1 || output_dim < 1)
    throw BadParam("mlp dims must be at least 1");
  std::vector<int> dims;
  dims.push_back(input_dim);
  for (int h : hidden) {
    if (h < 1) throw BadParam("hidden width must be at least 1");
    dims.push_back(h);
  }
  dims.push_back(output_dim);
  return dims;
}

ParamVector init_params(const MlpSpec& spec, std::uint64_t seed, double extras_init) {
  rng::Rng gen(seed);
  ParamVector p(spec.param_count());
  const auto dims = spec.layer_dims();
  int off = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], o = dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (int i = 0; i < o * in; ++i) p[off + i] = gen.uniform(-bound, bound);
    off += o * in;
    p.segment(off, o).setZero();
    off += o;
  }
  p.segment(off, spec.extras).setConstant(extras_init);
  return p;
}

Eigen::MatrixXd mlp_forward(const MlpSpec& spec, const ParamVector& params,
                            const Eigen::MatrixXd& obs, MlpWorkspace* ws) {
  if (obs.cols() != spec.input_dim)
    throw ShapeMismatch("mlp: observation width does not match input_dim");
  const Blocks blocks = unpack(spec, params);
  Eigen::MatrixXd h = obs;
  if (ws) {
    ws->acts.clear();
    ws->acts.push_back(h);
  }
  const std::size_t n_layers = blocks.w.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    h = ((h * blocks.w[l].transpose()).rowwise() + blocks.b[l].transpose()).eval();
    if (l + 1 < n_layers) h = h.array().tanh();
    if (ws) ws->acts.push_back(h);
  }
  if (!h.allFinite()) throw NonFiniteValue("mlp: non-finite forward output");
  return h;
}

Eigen::MatrixXd mlp_jvp(const MlpSpec& spec, const ParamVector& params,
                        const MlpWorkspace& ws, const ParamVector& tangent) {
  const Blocks blocks = unpack(spec, params);
  const Blocks dblocks = unpack(spec, tangent);
  const std::size_t n_layers = blocks.w.size();
  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(ws.acts[0].rows(), spec.input_dim);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Eigen::MatrixXd& x = ws.acts[l];
    Eigen::MatrixXd du =
        ((x * dblocks.w[l].transpose() + dh * blocks.w[l].transpose()).rowwise() +
         dblocks.b[l].transpose())
            .eval();
    if (l + 1 < n_layers) {
      const Eigen::MatrixXd& y = ws.acts[l + 1];  // tanh output
      dh = du.cwiseProduct((1.0 - y.array().square()).matrix());
    } else {
      dh = std::move(du);
    }
  }
  return dh;
}

ParamVector mlp_vjp(const MlpSpec& spec, const ParamVector& params,
                    const MlpWorkspace& ws, const Eigen::MatrixXd& seed) {
  const Blocks blocks = unpack(spec, params);
  const std::size_t n_layers = blocks.w.size();
  std::vector<Eigen::MatrixXd> gw(n_layers);
  std::vector<Eigen::VectorXd> gb(n_layers);
  Eigen::MatrixXd g = seed;
  for (std::size_t l = n_layers; l-- > 0;) {
    if (l + 1 < n_layers) {
      const Eigen::MatrixXd& y = ws.acts[l + 1];
      g = g.cwiseProduct((1.0 - y.array().square()).matrix());
    }
    gw[l] = g.transpose() * ws.acts[l];
    gb[l] = g.colwise().sum().transpose();
    if (l > 0) g = (g * blocks.w[l]).eval();
  }
  ParamVector flat = ParamVector::Zero(spec.param_count());
  int off = 0;
  for (std::size_t l = 0; l < n_layers; ++l) pack_block(flat, off, gw[l], gb[l]);
  return flat;
}

TapeMlp::TapeMlp(Tape& tape, const MlpSpec& spec, const ParamVector& params)
    : tape_(&tape), spec_(spec) {
  const Blocks blocks = unpack(spec, params);
  for (std::size_t l = 0; l < blocks.w.size(); ++l) {
    weights_.push_back(tape.input(blocks.w[l]));
    biases_.push_back(tape.input(blocks.b[l]));
  }
  if (spec.extras > 0)
    extras_ = tape.input(blocks.extras.transpose());  // (1, extras)
}

Tape::Var TapeMlp::forward(const Eigen::MatrixXd& obs) const {
  if (obs.cols() != spec_.input_dim)
    throw ShapeMismatch("mlp: observation width does not match input_dim");
  Tape::Var h = tape_->constant(obs);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = tape_->affine(h, weights_[l], biases_[l]);
    if (l + 1 < weights_.size()) h = tape_->tanh(h);
  }
  return h;
}

ParamVector TapeMlp::flat_grad() const {
  ParamVector flat = ParamVector::Zero(spec_.param_count());
  int off = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const Eigen::MatrixXd gw = tape_->grad(weights_[l]);
    const Eigen::MatrixXd gb = tape_->grad(biases_[l]);
    pack_block(flat, off, gw, gb.col(0));
  }
  if (spec_.extras > 0)
    flat.segment(off, spec_.extras) = tape_->grad(extras_).row(0).transpose();
  return flat;
}

}  // namespace apo::net
