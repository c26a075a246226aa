#include "apo/surrogate/exact_apo.hpp"

#include <cmath>

#include "apo/common/rng.hpp"
#include "apo/surrogate/exact.hpp"
#include "apo/tabular/exact.hpp"

namespace apo::surrogate {

using tabular::TabularMdp;
using tabular::TabularPolicy;

namespace {

TabularPolicy softmax_policy(const Eigen::MatrixXd& logits) {
  TabularPolicy pi;
  pi.probs.resizeLike(logits);
  for (int s = 0; s < logits.rows(); ++s) {
    const double m = logits.row(s).maxCoeff();
    Eigen::ArrayXd e = (logits.row(s).array() - m).exp();
    pi.probs.row(s) = (e / e.sum()).matrix();
  }
  return pi;
}

}  // namespace

ExactApoTrace run_exact_apo(const TabularMdp& mdp, const SurrogateConfig& cfg,
                            std::uint64_t seed, const ExactApoOptions& opts) {
  mdp.validate();
  rng::Rng gen(seed);
  Eigen::MatrixXd logits(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < logits.rows(); ++s)
    for (int a = 0; a < logits.cols(); ++a)
      logits(s, a) = opts.init_logit_scale * gen.normal();

  ExactApoTrace trace;
  TabularPolicy pi = softmax_policy(logits);

  {
    ExactApoRecord r0;
    const auto ev = tabular::evaluate(mdp, pi);
    r0.b_k = ev.abs_bound(cfg.k);
    r0.m_k = objective_m_k(mdp, ev, pi, pi, cfg).m_k;
    r0.accepted = true;
    trace.records.push_back(r0);
  }

  for (int iter = 0; iter < opts.iterations; ++iter) {
    const auto eval_old = tabular::evaluate(mdp, pi);
    auto mk_of = [&](const Eigen::MatrixXd& z) {
      return objective_m_k(mdp, eval_old, pi, softmax_policy(z), cfg);
    };
    const double mk_anchor = mk_of(logits).m_k;

    // Central-difference ascent direction in logit space.
    Eigen::MatrixXd grad(logits.rows(), logits.cols());
    for (int s = 0; s < logits.rows(); ++s)
      for (int a = 0; a < logits.cols(); ++a) {
        Eigen::MatrixXd z = logits;
        z(s, a) = logits(s, a) + opts.fd_step;
        const double up = mk_of(z).m_k;
        z(s, a) = logits(s, a) - opts.fd_step;
        const double dn = mk_of(z).m_k;
        grad(s, a) = (up - dn) / (2.0 * opts.fd_step);
      }
    const double gnorm = grad.norm();

    ExactApoRecord rec;
    if (gnorm > 0.0 && std::isfinite(gnorm)) {
      Eigen::MatrixXd dir = grad * (opts.initial_step / gnorm);
      double step = 1.0;
      for (int m = 0; m < opts.backtrack_steps; ++m, step *= opts.backtrack_coef) {
        const Eigen::MatrixXd z = logits + step * dir;
        const SurrogateTerms terms = mk_of(z);
        if (terms.kl_mean <= opts.target_kl && terms.m_k >= mk_anchor) {
          logits = z;
          pi = softmax_policy(logits);
          rec.accepted = true;
          rec.m_k = terms.m_k;
          rec.kl_mean = terms.kl_mean;
          break;
        }
      }
    }
    if (!rec.accepted) rec.m_k = mk_anchor;
    rec.b_k = tabular::evaluate(mdp, pi).abs_bound(cfg.k);
    trace.records.push_back(rec);
  }
  trace.final_policy = pi;
  return trace;
}

}  // namespace apo::surrogate
