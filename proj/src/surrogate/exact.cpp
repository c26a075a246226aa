#include "apo/surrogate/exact.hpp"

#include <cmath>

#include "apo/common/errors.hpp"

namespace apo::surrogate {

using tabular::ExactEvaluation;
using tabular::TabularMdp;
using tabular::TabularPolicy;

namespace {

double aggregate(const Eigen::VectorXd& v, Aggregation agg) {
  if (v.size() == 0) return 0.0;
  return agg == Aggregation::MaxOverStates ? v.maxCoeff() : v.mean();
}

}  // namespace

Eigen::VectorXd advantage_gap(const ExactEvaluation& eval_old,
                              const TabularPolicy& pi_new) {
  if (eval_old.advantages.rows() != pi_new.probs.rows() ||
      eval_old.advantages.cols() != pi_new.probs.cols())
    throw DimensionMismatch("policy shape does not match evaluation");
  return eval_old.advantages.cwiseProduct(pi_new.probs).rowwise().sum();
}

double interval_min_square(double lo, double hi) {
  if (lo <= 0.0 && 0.0 <= hi) return 0.0;
  return std::min(lo * lo, hi * hi);
}

SurrogateTerms objective_m_k(const TabularMdp& mdp, const ExactEvaluation& eval_old,
                             const TabularPolicy& pi_old, const TabularPolicy& pi_new,
                             const SurrogateConfig& cfg) {
  const int n = mdp.n_states;
  const int na = mdp.n_actions;
  const double gamma = mdp.gamma;

  SurrogateTerms out;
  const Eigen::VectorXd abar = advantage_gap(eval_old, pi_new);
  const Eigen::VectorXd kl = tabular::policy_kl(pi_new, pi_old);
  const Eigen::VectorXd& d = eval_old.disc_state_dist;

  out.epsilon = eval_old.advantages.cwiseAbs().maxCoeff();
  out.epsilon_prime = abar.cwiseAbs().maxCoeff();
  out.kl_mean = d.dot(kl);
  out.kl_max = kl.maxCoeff();

  // Expectation bounds.
  const Eigen::VectorXd kl_pen = (kl * 0.5).cwiseSqrt();
  const double pen_coef = 2.0 * gamma * out.epsilon_prime / (1.0 - gamma);
  out.j_lower = eval_old.perf + d.dot(abar - pen_coef * kl_pen) / (1.0 - gamma);
  out.j_upper = eval_old.perf + d.dot(abar + pen_coef * kl_pen) / (1.0 - gamma);

  // Resolvent of the expected advantage gap under the old dynamics.
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(eye - gamma * eval_old.policy_trans);
  const Eigen::VectorXd x = lu.solve(abar);

  // |H|_max: resolvent term aggregated over supported (s, a, s') triples,
  // plus the max-KL tail.
  if (cfg.h_max_hyper.has_value()) {
    out.h_max = *cfg.h_max_hyper;
  } else {
    double acc = 0.0;
    double count = 0.0;
    for (int a = 0; a < na; ++a)
      for (int s = 0; s < n; ++s)
        for (int sp = 0; sp < n; ++sp) {
          if (mdp.trans[a](s, sp) <= 0.0) continue;
          const double l = std::abs(gamma * x[sp] - x[s]);
          acc = cfg.aggregation == Aggregation::MaxOverStates ? std::max(acc, l)
                                                              : acc + l;
          count += 1.0;
        }
    if (cfg.aggregation == Aggregation::MeanOverStates && count > 0.0) acc /= count;
    out.h_max = acc + 2.0 * gamma * (1.0 + gamma) * out.epsilon /
                          ((1.0 - gamma) * (1.0 - gamma)) * out.kl_max;
  }

  // |eta(s)|_max per state.
  const double eta_tail =
      2.0 * gamma * out.epsilon / ((1.0 - gamma) * (1.0 - gamma)) * out.kl_max;
  const Eigen::VectorXd eta = x.cwiseAbs().array() + eta_tail;
  out.eta_max = aggregate(eta, cfg.aggregation);

  // MeanVariance bound.
  Eigen::VectorXd bracket(n);
  for (int s = 0; s < n; ++s) {
    double e_new_sq = 0.0;
    double e_old_sq = 0.0;
    for (int a = 0; a < na; ++a) {
      const double p_new = pi_new.probs(s, a);
      const double p_old = pi_old.probs(s, a);
      if (p_new == 0.0 && p_old == 0.0) continue;
      for (int sp = 0; sp < n; ++sp) {
        const double p = mdp.trans[a](s, sp);
        if (p == 0.0) continue;
        const double a3 = eval_old.advantage3(mdp, s, a, sp);
        e_new_sq += p_new * p * a3 * a3;
        e_old_sq += p_old * p * a3 * a3;
      }
    }
    bracket[s] = std::abs(e_new_sq - e_old_sq + 2.0 * abar[s] * out.h_max +
                          out.h_max * out.h_max);
  }
  const double one_minus_g2 = 1.0 - gamma * gamma;
  out.mv_barred =
      cfg.mu_inf_norm / one_minus_g2 * aggregate(bracket, cfg.aggregation);
  const double omega_inf = eval_old.omega.cwiseAbs().maxCoeff();
  out.mv = out.mv_barred + eval_old.mean_variance +
           2.0 * gamma * gamma * cfg.mu_inf_norm / (one_minus_g2 * one_minus_g2) *
               std::sqrt(0.5 * out.kl_max) * omega_inf;

  // VarianceMean bound.
  Eigen::VectorXd vbr(n);
  for (int s = 0; s < n; ++s)
    vbr[s] = eta[s] * eta[s] + 2.0 * std::abs(eval_old.values[s]) * eta[s];
  const double e_v_sq =
      mdp.init_dist.dot(eval_old.values.cwiseProduct(eval_old.values));
  out.vm_barred = cfg.mu_inf_norm * aggregate(vbr, cfg.aggregation) -
                  interval_min_square(out.j_lower, out.j_upper);
  out.vm = out.vm_barred + e_v_sq;

  out.m_k = out.j_lower - cfg.k * (out.mv + out.vm);
  return out;
}

SurrogateTerms objective_m_k(const TabularMdp& mdp, const TabularPolicy& pi_old,
                             const TabularPolicy& pi_new, const SurrogateConfig& cfg) {
  return objective_m_k(mdp, tabular::evaluate(mdp, pi_old), pi_old, pi_new, cfg);
}

std::pair<double, double> j_bounds(const TabularMdp& mdp, const TabularPolicy& pi_old,
                                   const TabularPolicy& pi_new,
                                   const SurrogateConfig& cfg) {
  const SurrogateTerms t = objective_m_k(mdp, pi_old, pi_new, cfg);
  return {t.j_lower, t.j_upper};
}

double h_max(const TabularMdp& mdp, const TabularPolicy& pi_old,
             const TabularPolicy& pi_new, const SurrogateConfig& cfg) {
  return objective_m_k(mdp, pi_old, pi_new, cfg).h_max;
}

EtaMax eta_max(const TabularMdp& mdp, const TabularPolicy& pi_old,
               const TabularPolicy& pi_new, const SurrogateConfig& cfg) {
  const ExactEvaluation eval_old = tabular::evaluate(mdp, pi_old);
  const Eigen::VectorXd abar = advantage_gap(eval_old, pi_new);
  const Eigen::VectorXd kl = tabular::policy_kl(pi_new, pi_old);
  const double gamma = mdp.gamma;
  const double epsilon = eval_old.advantages.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(mdp.n_states, mdp.n_states);
  const Eigen::VectorXd x =
      Eigen::PartialPivLU<Eigen::MatrixXd>(eye - gamma * eval_old.policy_trans)
          .solve(abar);
  const double tail =
      2.0 * gamma * epsilon / ((1.0 - gamma) * (1.0 - gamma)) * kl.maxCoeff();
  EtaMax out;
  out.per_state = x.cwiseAbs().array() + tail;
  out.aggregate = aggregate(out.per_state, cfg.aggregation);
  return out;
}

double mv_bound(const TabularMdp& mdp, const TabularPolicy& pi_old,
                const TabularPolicy& pi_new, const SurrogateConfig& cfg) {
  return objective_m_k(mdp, pi_old, pi_new, cfg).mv;
}

double vm_bound(const TabularMdp& mdp, const TabularPolicy& pi_old,
                const TabularPolicy& pi_new, const SurrogateConfig& cfg) {
  return objective_m_k(mdp, pi_old, pi_new, cfg).vm;
}

}  // namespace apo::surrogate
