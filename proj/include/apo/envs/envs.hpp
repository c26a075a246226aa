#pragma once

#include <map>
#include <optional>
#include <string>

#include "apo/rollout/env.hpp"
#include "apo/tabular/mdp.hpp"

namespace apo::envs {

/// String parameters from the config file's env.* keys.
struct EnvParams {
  std::map<std::string, std::string> kv;

  double get(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
};

/// n-state chain, actions {left, right}; moves reverse with probability
/// slip and clamp at the ends; every transition out of the right end pays 1.
tabular::TabularMdp chain_mdp(int n, double slip, double gamma);

/// w x h grid, four moves, reflective walls; with probability noise the
/// executed move is uniform over the four directions.  Steps cost 0.01,
/// entering the goal pays 1, and the goal is absorbing with zero reward.
/// The start distribution is uniform over non-goal cells.
tabular::TabularMdp gridworld(int w, int h, int goal_x, int goal_y, double noise,
                              double gamma);

/// Step/reset view of a tabular MDP with one-hot observations.  Episodes
/// never terminate; length truncation is the collector's.
std::unique_ptr<rollout::Env> make_tabular_env(tabular::TabularMdp mdp,
                                               int max_episode_len);

std::unique_ptr<rollout::Env> make_point_goal(int max_episode_len = 1000);
std::unique_ptr<rollout::Env> make_cartpole(int max_episode_len = 1000);
std::unique_ptr<rollout::Env> make_pendulum(int max_episode_len = 1000);

// Raw dynamics hooks for the physics tests.
Eigen::Vector4d cartpole_dynamics_step(const Eigen::Vector4d& state, double force);
void pendulum_dynamics_step(double& theta, double& theta_dot, double torque);
double pendulum_energy(double theta, double theta_dot);
double pendulum_energy_step_bound();  // per-step |dE| bound under zero torque

/// Everything the trainer needs to know about an env id before running it.
struct EnvBundle {
  rollout::EnvFactory factory;
  rollout::EnvDescriptor descriptor;
  std::optional<tabular::TabularMdp> mdp;  // present for the tabular envs
};

/// ids: chain, grid, point_goal, cartpole, pendulum.
EnvBundle make_env_bundle(const std::string& id, const EnvParams& params);

}  // namespace apo::envs
