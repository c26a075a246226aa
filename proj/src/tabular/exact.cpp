#include "apo/tabular/exact.hpp"

#include <cmath>
#include <string>

#include "apo/common/errors.hpp"

namespace apo::tabular {

namespace {

constexpr double kVarianceClamp = 1e-9;

Eigen::VectorXd lu_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs,
                         const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite())
    throw SingularSystem(std::string(what) + ": linear solve produced non-finite values");
  return x;
}

}  // namespace

Eigen::VectorXd solve_values(const TabularMdp& mdp, const TabularPolicy& pi) {
  const Eigen::MatrixXd p = policy_transition(mdp, pi);
  const Eigen::VectorXd r = policy_reward(mdp, pi);
  const int n = mdp.n_states;
  const Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(n, n) - mdp.gamma * p;
  return lu_solve(m, r, "solve_values");
}

double performance(const TabularMdp& mdp, const TabularPolicy& pi) {
  return mdp.init_dist.dot(solve_values(mdp, pi));
}

Eigen::VectorXd disc_state_dist(const TabularMdp& mdp, const TabularPolicy& pi) {
  const Eigen::MatrixXd p = policy_transition(mdp, pi);
  const int n = mdp.n_states;
  const Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(n, n) - mdp.gamma * p.transpose();
  Eigen::VectorXd d = lu_solve(m, mdp.init_dist, "disc_state_dist");
  return (1.0 - mdp.gamma) * d;
}

Eigen::VectorXd return_variance_vector(const TabularMdp& mdp, const TabularPolicy& pi) {
  return evaluate(mdp, pi).var_vector;
}

VarianceSplit variance_decomposition(const TabularMdp& mdp, const TabularPolicy& pi) {
  const ExactEvaluation ev = evaluate(mdp, pi);
  return {ev.mean_variance, ev.variance_mean, ev.total_variance};
}

AbsoluteBound absolute_bound(const TabularMdp& mdp, const TabularPolicy& pi, double k) {
  const ExactEvaluation ev = evaluate(mdp, pi);
  if (k < 0.0) throw NegativeK("probability factor k must be nonnegative");
  return {ev.abs_bound(k), 1.0 - 1.0 / (k * k * ev.total_variance + 1.0)};
}

AbsoluteBound absolute_bound(const TabularMdp& mdp, const TabularPolicy& pi, double k,
                             double psi) {
  if (k < 0.0) throw NegativeK("probability factor k must be nonnegative");
  const ExactEvaluation ev = evaluate(mdp, pi);
  return {ev.abs_bound(k), 1.0 - 1.0 / (k * k * psi + 1.0)};
}

ExactEvaluation evaluate(const TabularMdp& mdp, const TabularPolicy& pi) {
  if (pi.n_states() != mdp.n_states || pi.n_actions() != mdp.n_actions)
    throw DimensionMismatch("policy shape does not match mdp");

  const int n = mdp.n_states;
  const int na = mdp.n_actions;
  ExactEvaluation ev;
  ev.policy_trans = policy_transition(mdp, pi);
  const Eigen::VectorXd r_pi = policy_reward(mdp, pi);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  ev.values = lu_solve(eye - mdp.gamma * ev.policy_trans, r_pi, "solve_values");

  ev.q_values.resize(n, na);
  for (int a = 0; a < na; ++a)
    ev.q_values.col(a) =
        (mdp.trans[a].cwiseProduct(mdp.reward[a])).rowwise().sum() +
        mdp.gamma * (mdp.trans[a] * ev.values);
  ev.advantages = ev.q_values.colwise() - ev.values;

  ev.disc_state_dist =
      (1.0 - mdp.gamma) *
      lu_solve(eye - mdp.gamma * ev.policy_trans.transpose(), mdp.init_dist,
               "disc_state_dist");

  ev.perf = mdp.init_dist.dot(ev.values);

  // Omega(s) = E_{a~pi, s'~P}[(R + gamma V(s'))^2] - V(s)^2, the one-step
  // source term of the return-variance recursion.
  ev.omega.resize(n);
  for (int s = 0; s < n; ++s) {
    double second_moment = 0.0;
    for (int a = 0; a < na; ++a) {
      const double pa = pi.probs(s, a);
      if (pa == 0.0) continue;
      for (int sp = 0; sp < n; ++sp) {
        const double p = mdp.trans[a](s, sp);
        if (p == 0.0) continue;
        const double q3 = mdp.reward[a](s, sp) + mdp.gamma * ev.values[sp];
        second_moment += pa * p * q3 * q3;
      }
    }
    ev.omega[s] = second_moment - ev.values[s] * ev.values[s];
    if (ev.omega[s] < 0.0) {
      if (ev.omega[s] < -kVarianceClamp)
        throw SingularSystem("negative action-value variance beyond round-off: " +
                             std::to_string(ev.omega[s]));
      ev.omega[s] = 0.0;
    }
  }

  // Row-stochastic convention: X = (I - gamma^2 P_pi)^{-1} Omega.
  ev.var_vector = lu_solve(eye - mdp.gamma * mdp.gamma * ev.policy_trans, ev.omega,
                           "return_variance_vector");
  for (int s = 0; s < n; ++s) {
    if (ev.var_vector[s] < 0.0) {
      if (ev.var_vector[s] < -kVarianceClamp)
        throw SingularSystem("negative return variance beyond round-off: " +
                             std::to_string(ev.var_vector[s]));
      ev.var_vector[s] = 0.0;
    }
  }

  ev.mean_variance = mdp.init_dist.dot(ev.var_vector);
  ev.variance_mean =
      mdp.init_dist.dot(ev.values.cwiseProduct(ev.values)) - ev.perf * ev.perf;
  if (ev.variance_mean < 0.0 && ev.variance_mean > -kVarianceClamp)
    ev.variance_mean = 0.0;
  ev.total_variance = ev.mean_variance + ev.variance_mean;
  return ev;
}

}  // namespace apo::tabular
