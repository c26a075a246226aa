#pragma once

#include <Eigen/Dense>

#include "apo/common/rng.hpp"
#include "apo/net/mlp.hpp"

namespace apo::net {

enum class DistFamily {
  Categorical,
  DiagGaussian,
};

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Network plus head family; action_dim is the number of discrete actions or
/// the dimension of the continuous action.
struct PolicySpec {
  MlpSpec mlp;
  DistFamily family = DistFamily::Categorical;
  int action_dim = 0;

  static PolicySpec categorical(int obs_dim, int n_actions,
                                std::vector<int> hidden = {64, 64});
  static PolicySpec gaussian(int obs_dim, int act_dim,
                             std::vector<int> hidden = {64, 64});
};

MlpSpec value_spec(int obs_dim, std::vector<int> hidden = {64, 64});

/// Distribution parameters for a batch of states: logits for the categorical
/// family, (mean, shared log_std) for the Gaussian one.  log_std arrives
/// already clamped to [kLogStdMin, kLogStdMax].
struct DistBatch {
  DistFamily family = DistFamily::Categorical;
  Eigen::MatrixXd head;           // (n, K) logits or (n, D) means
  Eigen::RowVectorXd log_std;     // (D) for gaussians

  Eigen::VectorXd log_prob_discrete(const Eigen::VectorXi& actions) const;
  Eigen::VectorXd log_prob_continuous(const Eigen::MatrixXd& actions) const;
  Eigen::VectorXd entropy() const;
  /// Per-row KL(this || other); families and shapes must match.
  Eigen::VectorXd kl(const DistBatch& other) const;

  int sample_discrete(int row, rng::Rng& gen) const;
  Eigen::VectorXd sample_continuous(int row, rng::Rng& gen) const;
};

/// Forward pass through the policy net to distribution parameters.
DistBatch policy_forward(const PolicySpec& spec, const ParamVector& params,
                         const Eigen::MatrixXd& obs, MlpWorkspace* ws = nullptr);

Eigen::VectorXd value_forward(const MlpSpec& spec, const ParamVector& params,
                              const Eigen::MatrixXd& obs);

}  // namespace apo::net
