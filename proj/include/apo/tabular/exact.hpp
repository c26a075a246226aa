#pragma once

#include <Eigen/Dense>

#include "apo/tabular/mdp.hpp"

namespace apo::tabular {

/// Everything policy evaluation can say about one (mdp, policy) pair.
///
/// Produced by evaluate(); the individual solver entry points below expose
/// the same quantities one at a time.
struct ExactEvaluation {
  Eigen::VectorXd values;           // V(s)
  Eigen::MatrixXd q_values;         // Q(s, a)
  Eigen::MatrixXd advantages;       // A(s, a) = Q - V
  Eigen::VectorXd disc_state_dist;  // d_pi(s)
  Eigen::VectorXd omega;            // per-state variance of the action value
  Eigen::VectorXd var_vector;       // X(s) = Var of the return from s
  Eigen::MatrixXd policy_trans;     // P_pi(s, s')
  double perf = 0.0;                // J = mu' V
  double mean_variance = 0.0;       // MV = mu' X
  double variance_mean = 0.0;       // VM = E_mu[V^2] - J^2
  double total_variance = 0.0;      // MV + VM

  /// Lower probability bound B_k = J - k * total_variance.
  double abs_bound(double k) const { return perf - k * total_variance; }

  /// Three-argument advantage A(s, a, s') = R(s,a,s') + gamma V(s') - V(s).
  double advantage3(const TabularMdp& mdp, int s, int a, int sp) const {
    return mdp.reward[a](s, sp) + mdp.gamma * values[sp] - values[s];
  }
};

ExactEvaluation evaluate(const TabularMdp& mdp, const TabularPolicy& pi);

Eigen::VectorXd solve_values(const TabularMdp& mdp, const TabularPolicy& pi);

double performance(const TabularMdp& mdp, const TabularPolicy& pi);

Eigen::VectorXd disc_state_dist(const TabularMdp& mdp, const TabularPolicy& pi);

Eigen::VectorXd return_variance_vector(const TabularMdp& mdp, const TabularPolicy& pi);

struct VarianceSplit {
  double mean_variance = 0.0;
  double variance_mean = 0.0;
  double total = 0.0;
};

VarianceSplit variance_decomposition(const TabularMdp& mdp, const TabularPolicy& pi);

struct AbsoluteBound {
  double bound = 0.0;       // B_k
  double confidence = 0.0;  // 1 - 1/(k^2 psi + 1)
};

/// B_k with the diagnostic confidence computed from psi = total variance of
/// the evaluated policy.  The overload takes an explicit psi.
AbsoluteBound absolute_bound(const TabularMdp& mdp, const TabularPolicy& pi, double k);
AbsoluteBound absolute_bound(const TabularMdp& mdp, const TabularPolicy& pi, double k,
                             double psi);

}  // namespace apo::tabular
