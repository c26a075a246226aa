#include <memory>

#include "apo/common/errors.hpp"
#include "apo/common/rng.hpp"
#include "apo/envs/envs.hpp"

namespace apo::envs {

using tabular::TabularMdp;

TabularMdp chain_mdp(int n, double slip, double gamma) {
  if (n < 2) throw BadParam("chain: need at least two states");
  if (!(slip >= 0.0 && slip < 1.0)) throw BadParam("chain: slip must be in [0,1)");
  TabularMdp mdp;
  mdp.n_states = n;
  mdp.n_actions = 2;
  mdp.gamma = gamma;
  mdp.trans.assign(2, Eigen::MatrixXd::Zero(n, n));
  mdp.reward.assign(2, Eigen::MatrixXd::Zero(n, n));
  for (int a = 0; a < 2; ++a) {
    const int dir = a == 1 ? 1 : -1;
    for (int s = 0; s < n; ++s) {
      const int fwd = std::clamp(s + dir, 0, n - 1);
      const int back = std::clamp(s - dir, 0, n - 1);
      mdp.trans[a](s, fwd) += 1.0 - slip;
      mdp.trans[a](s, back) += slip;
      if (s == n - 1) mdp.reward[a].row(s).setOnes();
    }
  }
  mdp.init_dist = Eigen::VectorXd::Zero(n);
  mdp.init_dist[0] = 1.0;
  mdp.validate();
  return mdp;
}

TabularMdp gridworld(int w, int h, int goal_x, int goal_y, double noise,
                     double gamma) {
  if (w < 1 || h < 1) throw BadParam("grid: dimensions must be positive");
  if (goal_x < 0 || goal_x >= w || goal_y < 0 || goal_y >= h)
    throw BadParam("grid: goal outside the grid");
  if (!(noise >= 0.0 && noise < 1.0)) throw BadParam("grid: noise must be in [0,1)");
  const int n = w * h;
  const int goal = goal_y * w + goal_x;
  const int dx[4] = {0, 0, -1, 1};
  const int dy[4] = {-1, 1, 0, 0};

  TabularMdp mdp;
  mdp.n_states = n;
  mdp.n_actions = 4;
  mdp.gamma = gamma;
  mdp.trans.assign(4, Eigen::MatrixXd::Zero(n, n));
  mdp.reward.assign(4, Eigen::MatrixXd::Zero(n, n));

  auto target = [&](int s, int dir) {
    const int x = s % w, y = s / w;
    const int nx = std::clamp(x + dx[dir], 0, w - 1);
    const int ny = std::clamp(y + dy[dir], 0, h - 1);
    return ny * w + nx;
  };

  for (int a = 0; a < 4; ++a)
    for (int s = 0; s < n; ++s) {
      if (s == goal) {
        mdp.trans[a](s, s) = 1.0;
        continue;
      }
      mdp.trans[a](s, target(s, a)) += 1.0 - noise;
      for (int dir = 0; dir < 4; ++dir)
        mdp.trans[a](s, target(s, dir)) += noise / 4.0;
      for (int sp = 0; sp < n; ++sp)
        mdp.reward[a](s, sp) = sp == goal ? 1.0 : -0.01;
    }

  mdp.init_dist = Eigen::VectorXd::Zero(n);
  const int starts = n > 1 ? n - 1 : 1;
  for (int s = 0; s < n; ++s)
    if (s != goal || n == 1) mdp.init_dist[s] = 1.0 / starts;
  mdp.validate();
  return mdp;
}

namespace {

class TabularEnv final : public rollout::Env {
 public:
  TabularEnv(TabularMdp mdp, int max_episode_len) : mdp_(std::move(mdp)) {
    desc_.obs_dim = mdp_.n_states;
    desc_.action_space = rollout::ActionSpace::discrete(mdp_.n_actions);
    desc_.max_episode_len = max_episode_len;
  }

  const rollout::EnvDescriptor& descriptor() const override { return desc_; }

  Eigen::VectorXd reset(std::uint64_t seed) override {
    gen_ = rng::Rng(seed);
    const double u = gen_.uniform();
    double acc = 0.0;
    state_ = mdp_.n_states - 1;
    for (int s = 0; s < mdp_.n_states; ++s) {
      acc += mdp_.init_dist[s];
      if (u < acc) {
        state_ = s;
        break;
      }
    }
    return one_hot(state_);
  }

  rollout::StepResult step(const rollout::Action& action) override {
    const int a = action.discrete;
    if (a < 0 || a >= mdp_.n_actions) throw OutOfSupport("tabular env: bad action");
    const double u = gen_.uniform();
    double acc = 0.0;
    int next = mdp_.n_states - 1;
    for (int sp = 0; sp < mdp_.n_states; ++sp) {
      acc += mdp_.trans[a](state_, sp);
      if (u < acc) {
        next = sp;
        break;
      }
    }
    rollout::StepResult out;
    out.reward = mdp_.reward[a](state_, next);
    state_ = next;
    out.obs = one_hot(state_);
    out.terminated = false;
    return out;
  }

 private:
  Eigen::VectorXd one_hot(int s) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp_.n_states);
    v[s] = 1.0;
    return v;
  }

  TabularMdp mdp_;
  rollout::EnvDescriptor desc_;
  rng::Rng gen_{0};
  int state_ = 0;
};

}  // namespace

std::unique_ptr<rollout::Env> make_tabular_env(TabularMdp mdp, int max_episode_len) {
  return std::make_unique<TabularEnv>(std::move(mdp), max_episode_len);
}

}  // namespace apo::envs
