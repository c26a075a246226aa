#include <cmath>
#include <memory>

#include "apo/common/rng.hpp"
#include "apo/envs/envs.hpp"

namespace apo::envs {

namespace {

// Cart-pole constants (classic control values, explicit Euler at dt = 0.02).
constexpr double kGravity = 9.8;
constexpr double kMassCart = 1.0;
constexpr double kMassPole = 0.1;
constexpr double kPoleHalfLen = 0.5;
constexpr double kForceMag = 10.0;
constexpr double kCartDt = 0.02;
constexpr double kThetaLimit = 12.0 * M_PI / 180.0;
constexpr double kXLimit = 2.4;

// Pendulum constants (rod of mass 1, length 1, gravity 10, semi-implicit
// Euler at dt = 0.02, speed clamped at 8, torque at 2).
constexpr double kPendG = 10.0;
constexpr double kPendM = 1.0;
constexpr double kPendL = 1.0;
constexpr double kPendDt = 0.02;
constexpr double kPendMaxSpeed = 8.0;
constexpr double kPendMaxTorque = 2.0;

double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

class CartPoleEnv final : public rollout::Env {
 public:
  explicit CartPoleEnv(int max_episode_len) {
    desc_.obs_dim = 4;
    desc_.action_space = rollout::ActionSpace::discrete(2);
    desc_.max_episode_len = max_episode_len;
  }

  const rollout::EnvDescriptor& descriptor() const override { return desc_; }

  Eigen::VectorXd reset(std::uint64_t seed) override {
    gen_ = rng::Rng(seed);
    for (int i = 0; i < 4; ++i) state_[i] = gen_.uniform(-0.05, 0.05);
    return state_;
  }

  rollout::StepResult step(const rollout::Action& action) override {
    const double force = action.discrete == 1 ? kForceMag : -kForceMag;
    state_ = cartpole_dynamics_step(state_, force);
    rollout::StepResult out;
    out.obs = state_;
    out.reward = 1.0;
    out.terminated = std::abs(state_[0]) > kXLimit || std::abs(state_[2]) > kThetaLimit;
    return out;
  }

 private:
  rollout::EnvDescriptor desc_;
  rng::Rng gen_{0};
  Eigen::Vector4d state_{0, 0, 0, 0};
};

class PendulumEnv final : public rollout::Env {
 public:
  explicit PendulumEnv(int max_episode_len) {
    desc_.obs_dim = 3;
    desc_.action_space = rollout::ActionSpace::box(1, -kPendMaxTorque, kPendMaxTorque);
    desc_.max_episode_len = max_episode_len;
  }

  const rollout::EnvDescriptor& descriptor() const override { return desc_; }

  Eigen::VectorXd reset(std::uint64_t seed) override {
    gen_ = rng::Rng(seed);
    theta_ = gen_.uniform(-M_PI, M_PI);
    theta_dot_ = gen_.uniform(-1.0, 1.0);
    return observation();
  }

  rollout::StepResult step(const rollout::Action& action) override {
    const double torque =
        std::clamp(action.box[0], -kPendMaxTorque, kPendMaxTorque);
    const double angle = wrap_angle(theta_);
    rollout::StepResult out;
    out.reward = -(angle * angle + 0.1 * theta_dot_ * theta_dot_ +
                   0.001 * torque * torque);
    pendulum_dynamics_step(theta_, theta_dot_, torque);
    out.obs = observation();
    out.terminated = false;
    return out;
  }

 private:
  Eigen::VectorXd observation() const {
    Eigen::VectorXd obs(3);
    obs << std::cos(theta_), std::sin(theta_), theta_dot_;
    return obs;
  }

  rollout::EnvDescriptor desc_;
  rng::Rng gen_{0};
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
};

}  // namespace

Eigen::Vector4d cartpole_dynamics_step(const Eigen::Vector4d& state, double force) {
  const double x = state[0], x_dot = state[1], theta = state[2], theta_dot = state[3];
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double total_mass = kMassCart + kMassPole;
  const double temp =
      (force + kMassPole * kPoleHalfLen * theta_dot * theta_dot * sin_t) /
      total_mass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) /
      (kPoleHalfLen * (4.0 / 3.0 - kMassPole * cos_t * cos_t / total_mass));
  const double x_acc = temp - kMassPole * kPoleHalfLen * theta_acc * cos_t / total_mass;
  Eigen::Vector4d next;
  next[0] = x + kCartDt * x_dot;
  next[1] = x_dot + kCartDt * x_acc;
  next[2] = theta + kCartDt * theta_dot;
  next[3] = theta_dot + kCartDt * theta_acc;
  return next;
}

void pendulum_dynamics_step(double& theta, double& theta_dot, double torque) {
  const double acc = 3.0 * kPendG / (2.0 * kPendL) * std::sin(theta) +
                     3.0 / (kPendM * kPendL * kPendL) * torque;
  theta_dot = std::clamp(theta_dot + kPendDt * acc, -kPendMaxSpeed, kPendMaxSpeed);
  theta += kPendDt * theta_dot;
}

double pendulum_energy(double theta, double theta_dot) {
  // Rod about its end: I = m l^2 / 3, potential mg(l/2) cos(theta) with
  // theta = 0 upright.
  const double inertia = kPendM * kPendL * kPendL / 3.0;
  return 0.5 * inertia * theta_dot * theta_dot +
         kPendM * kPendG * (kPendL / 2.0) * std::cos(theta);
}

double pendulum_energy_step_bound() {
  // dE per semi-implicit Euler step is O(dt^2); the constant below is
  // 0.5 I a_max^2 + |U'|_max a_max + 0.5 |U''|_max w_max^2 for the clamped
  // speed range.
  const double inertia = kPendM * kPendL * kPendL / 3.0;
  const double a_max = 3.0 * kPendG / (2.0 * kPendL);
  const double u_prime_max = kPendM * kPendG * kPendL / 2.0;
  const double c = 0.5 * inertia * a_max * a_max + u_prime_max * a_max +
                   0.5 * u_prime_max * kPendMaxSpeed * kPendMaxSpeed;
  return c * kPendDt * kPendDt;
}

std::unique_ptr<rollout::Env> make_cartpole(int max_episode_len) {
  return std::make_unique<CartPoleEnv>(max_episode_len);
}

std::unique_ptr<rollout::Env> make_pendulum(int max_episode_len) {
  return std::make_unique<PendulumEnv>(max_episode_len);
}

}  // namespace apo::envs
