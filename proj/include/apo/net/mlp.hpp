#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "apo/net/tape.hpp"

namespace apo::net {

using ParamVector = Eigen::VectorXd;

/// tanh MLP with a linear head.  extras is a trailing block of free
/// parameters outside the layer stack (the diagonal-Gaussian log-std).
///
/// Flat layout, in order: per layer the weight matrix row-major then the
/// bias, layers input->hidden...->output, then the extras block.
struct MlpSpec {
  int input_dim = 0;
  int output_dim = 0;
  std::vector<int> hidden = {64, 64};
  int extras = 0;

  int param_count() const;
  std::vector<int> layer_dims() const;  // [input, hidden..., output]
};

/// Weights uniform in +-1/sqrt(fan_in), biases zero, extras filled with
/// extras_init.
ParamVector init_params(const MlpSpec& spec, std::uint64_t seed,
                        double extras_init = -0.5);

struct MlpWorkspace {
  std::vector<Eigen::MatrixXd> acts;  // acts[0] = obs, acts[l+1] = layer output
};

/// Batched forward pass to the linear head output (n, output_dim).
Eigen::MatrixXd mlp_forward(const MlpSpec& spec, const ParamVector& params,
                            const Eigen::MatrixXd& obs,
                            MlpWorkspace* ws = nullptr);

/// Directional derivative of the head output along a flat tangent vector;
/// needs the workspace of the matching forward pass.
Eigen::MatrixXd mlp_jvp(const MlpSpec& spec, const ParamVector& params,
                        const MlpWorkspace& ws, const ParamVector& tangent);

/// Gradient of <seed, head output> with respect to the flat parameters.
ParamVector mlp_vjp(const MlpSpec& spec, const ParamVector& params,
                    const MlpWorkspace& ws, const Eigen::MatrixXd& seed);

/// The same network unrolled onto a tape: leaves per layer block plus the
/// extras row, with the flat gradient gathered back in layout order.
class TapeMlp {
 public:
  TapeMlp(Tape& tape, const MlpSpec& spec, const ParamVector& params);

  Tape::Var forward(const Eigen::MatrixXd& obs) const;
  Tape::Var extras() const { return extras_; }

  ParamVector flat_grad() const;

 private:
  Tape* tape_;
  MlpSpec spec_;
  std::vector<Tape::Var> weights_;
  std::vector<Tape::Var> biases_;
  Tape::Var extras_{};
};

}  // namespace apo::net
