#pragma once

#include "apo/common/rng.hpp"
#include "apo/tabular/mdp.hpp"

namespace apo::tabular {

struct RandomMdpOptions {
  int min_states = 2;
  int max_states = 10;
  int min_actions = 2;
  int max_actions = 4;
  double gamma_low = 0.3;
  double gamma_high = 0.9;
  double reward_scale = 1.0;
  double sparsity = 0.0;  // fraction of transition entries zeroed before renorm
};

/// Dirichlet-ish random MDP: exponential weights renormalized per row,
/// uniform rewards in [-reward_scale, reward_scale].
TabularMdp random_mdp(rng::Rng& gen, const RandomMdpOptions& opts = {});

/// Random row-stochastic policy (exponential weights, renormalized).
TabularPolicy random_policy(rng::Rng& gen, int n_states, int n_actions);

/// Policy mixed toward a second one: (1 - t) * pi + t * other.
TabularPolicy mix_policies(const TabularPolicy& pi, const TabularPolicy& other,
                           double t);

/// Random perturbation of pi with roughly the requested KL scale.
TabularPolicy perturb_policy(rng::Rng& gen, const TabularPolicy& pi, double scale);

}  // namespace apo::tabular
