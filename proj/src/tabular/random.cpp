#include "apo/tabular/random.hpp"

#include <cmath>

#include "apo/common/errors.hpp"

namespace apo::tabular {

namespace {

// Exponential(1) weights renormalized per row give a flat Dirichlet draw.
Eigen::VectorXd random_simplex(rng::Rng& gen, int n, double sparsity) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = -std::log(1.0 - gen.uniform());
  if (sparsity > 0.0 && n > 1) {
    for (int i = 0; i < n; ++i)
      if (gen.uniform() < sparsity) w[i] = 0.0;
    if (w.sum() == 0.0) w[static_cast<int>(gen.uniform_int(n))] = 1.0;
  }
  return w / w.sum();
}

}  // namespace

TabularMdp random_mdp(rng::Rng& gen, const RandomMdpOptions& opts) {
  TabularMdp mdp;
  mdp.n_states = opts.min_states +
                 static_cast<int>(gen.uniform_int(opts.max_states - opts.min_states + 1));
  mdp.n_actions = opts.min_actions +
                  static_cast<int>(gen.uniform_int(opts.max_actions - opts.min_actions + 1));
  mdp.gamma = gen.uniform(opts.gamma_low, opts.gamma_high);
  mdp.trans.assign(mdp.n_actions, Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_states));
  mdp.reward.assign(mdp.n_actions, Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_states));
  for (int a = 0; a < mdp.n_actions; ++a)
    for (int s = 0; s < mdp.n_states; ++s) {
      mdp.trans[a].row(s) = random_simplex(gen, mdp.n_states, opts.sparsity).transpose();
      for (int sp = 0; sp < mdp.n_states; ++sp)
        mdp.reward[a](s, sp) = gen.uniform(-opts.reward_scale, opts.reward_scale);
    }
  mdp.init_dist = random_simplex(gen, mdp.n_states, 0.0);
  return mdp;
}

TabularPolicy random_policy(rng::Rng& gen, int n_states, int n_actions) {
  TabularPolicy pi;
  pi.probs.resize(n_states, n_actions);
  for (int s = 0; s < n_states; ++s)
    pi.probs.row(s) = random_simplex(gen, n_actions, 0.0).transpose();
  return pi;
}

TabularPolicy mix_policies(const TabularPolicy& pi, const TabularPolicy& other,
                           double t) {
  if (pi.probs.rows() != other.probs.rows() || pi.probs.cols() != other.probs.cols())
    throw DimensionMismatch("policy pair has mismatched shapes");
  TabularPolicy out;
  out.probs = (1.0 - t) * pi.probs + t * other.probs;
  return out;
}

TabularPolicy perturb_policy(rng::Rng& gen, const TabularPolicy& pi, double scale) {
  TabularPolicy out = pi;
  for (int s = 0; s < out.probs.rows(); ++s) {
    for (int a = 0; a < out.probs.cols(); ++a)
      out.probs(s, a) = std::max(out.probs(s, a) * std::exp(scale * gen.normal()),
                                 1e-12);
    out.probs.row(s) /= out.probs.row(s).sum();
  }
  return out;
}

}  // namespace apo::tabular
