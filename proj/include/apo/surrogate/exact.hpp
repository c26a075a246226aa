#pragma once

#include <Eigen/Dense>
#include <utility>

#include "apo/surrogate/config.hpp"
#include "apo/tabular/exact.hpp"
#include "apo/tabular/mdp.hpp"

namespace apo::surrogate {

/// Expected advantage gap per state: Abar(s) = sum_a pi_new(a|s) A_old(s,a).
Eigen::VectorXd advantage_gap(const tabular::ExactEvaluation& eval_old,
                              const tabular::TabularPolicy& pi_new);

std::pair<double, double> j_bounds(const tabular::TabularMdp& mdp,
                                   const tabular::TabularPolicy& pi_old,
                                   const tabular::TabularPolicy& pi_new,
                                   const SurrogateConfig& cfg);

double h_max(const tabular::TabularMdp& mdp, const tabular::TabularPolicy& pi_old,
             const tabular::TabularPolicy& pi_new, const SurrogateConfig& cfg);

struct EtaMax {
  Eigen::VectorXd per_state;
  double aggregate = 0.0;
};

EtaMax eta_max(const tabular::TabularMdp& mdp, const tabular::TabularPolicy& pi_old,
               const tabular::TabularPolicy& pi_new, const SurrogateConfig& cfg);

double mv_bound(const tabular::TabularMdp& mdp, const tabular::TabularPolicy& pi_old,
                const tabular::TabularPolicy& pi_new, const SurrogateConfig& cfg);

double vm_bound(const tabular::TabularMdp& mdp, const tabular::TabularPolicy& pi_old,
                const tabular::TabularPolicy& pi_new, const SurrogateConfig& cfg);

SurrogateTerms objective_m_k(const tabular::TabularMdp& mdp,
                             const tabular::TabularPolicy& pi_old,
                             const tabular::TabularPolicy& pi_new,
                             const SurrogateConfig& cfg);

/// Fast path for repeated evaluations against one anchor policy: the caller
/// keeps eval_old = evaluate(mdp, pi_old) and hands both in.
SurrogateTerms objective_m_k(const tabular::TabularMdp& mdp,
                             const tabular::ExactEvaluation& eval_old,
                             const tabular::TabularPolicy& pi_old,
                             const tabular::TabularPolicy& pi_new,
                             const SurrogateConfig& cfg);

/// Smallest squared value over the closed interval [lo, hi]: zero when the
/// interval straddles zero, min(lo^2, hi^2) otherwise.
double interval_min_square(double lo, double hi);

}  // namespace apo::surrogate
