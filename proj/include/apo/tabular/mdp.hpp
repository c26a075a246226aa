#pragma once

#include <Eigen/Dense>
#include <vector>

namespace apo::tabular {

/// Finite MDP with per-action transition and reward matrices.
/// trans[a](s, s') is the probability of s -> s' under action a and
/// reward[a](s, s') is the reward collected on that transition.
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  std::vector<Eigen::MatrixXd> trans;
  std::vector<Eigen::MatrixXd> reward;
  Eigen::VectorXd init_dist;
  double gamma = 0.0;

  /// Throws InvalidMdp when shapes, stochasticity, or gamma are off.
  void validate() const;

  double max_abs_reward() const;
};

/// Row-stochastic policy matrix probs(s, a).
struct TabularPolicy {
  Eigen::MatrixXd probs;

  int n_states() const { return static_cast<int>(probs.rows()); }
  int n_actions() const { return static_cast<int>(probs.cols()); }
  void validate() const;
};

TabularPolicy uniform_policy(int n_states, int n_actions);

/// State-to-state transition matrix P_pi(s, s') = sum_a pi(a|s) P(s'|s,a).
Eigen::MatrixXd policy_transition(const TabularMdp& mdp, const TabularPolicy& pi);

/// Expected one-step reward r_pi(s) under the policy.
Eigen::VectorXd policy_reward(const TabularMdp& mdp, const TabularPolicy& pi);

/// Per-state KL(pi_new(.|s) || pi_old(.|s)); +inf where supports disagree.
Eigen::VectorXd policy_kl(const TabularPolicy& pi_new, const TabularPolicy& pi_old);

}  // namespace apo::tabular
