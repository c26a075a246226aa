#include <cmath>
#include <memory>

#include "apo/common/rng.hpp"
#include "apo/envs/envs.hpp"

namespace apo::envs {

namespace {

// Desk-scale goal navigation: a 2-D point mass accelerates inside a square
// arena toward a goal; reaching it pays the indicator bonus and moves the
// goal somewhere new.  Constants documented here are this artifact's
// choices.
constexpr double kDt = 0.02;
constexpr double kArena = 2.0;        // positions clamp to [-kArena, kArena]^2
constexpr double kGoalRadius = 0.3;
constexpr double kMaxSpeed = 1.0;     // per-axis velocity clamp
constexpr double kMinGoalDist = 0.5;  // fresh goals spawn at least this far

class PointGoalEnv final : public rollout::Env {
 public:
  explicit PointGoalEnv(int max_episode_len) {
    desc_.obs_dim = 4;  // goal-relative position, then velocity
    desc_.action_space = rollout::ActionSpace::box(2, -1.0, 1.0);
    desc_.max_episode_len = max_episode_len;
  }

  const rollout::EnvDescriptor& descriptor() const override { return desc_; }

  Eigen::VectorXd reset(std::uint64_t seed) override {
    gen_ = rng::Rng(seed);
    pos_ = Eigen::Vector2d(gen_.uniform(-1.0, 1.0), gen_.uniform(-1.0, 1.0));
    vel_.setZero();
    spawn_goal();
    last_dist_ = (goal_ - pos_).norm();
    return observation();
  }

  rollout::StepResult step(const rollout::Action& action) override {
    Eigen::Vector2d accel = action.box.cwiseMax(-1.0).cwiseMin(1.0);
    vel_ = (vel_ + kDt * accel).cwiseMax(-kMaxSpeed).cwiseMin(kMaxSpeed);
    pos_ += kDt * vel_;
    for (int d = 0; d < 2; ++d) {
      if (pos_[d] > kArena) {
        pos_[d] = kArena;
        vel_[d] = 0.0;
      } else if (pos_[d] < -kArena) {
        pos_[d] = -kArena;
        vel_[d] = 0.0;
      }
    }
    const double dist = (goal_ - pos_).norm();
    const bool reached = dist < kGoalRadius;
    rollout::StepResult out;
    out.reward = last_dist_ - dist + (reached ? 1.0 : 0.0);
    if (reached) {
      spawn_goal();
      last_dist_ = (goal_ - pos_).norm();
    } else {
      last_dist_ = dist;
    }
    out.obs = observation();
    out.terminated = false;
    return out;
  }

 private:
  Eigen::VectorXd observation() const {
    Eigen::VectorXd obs(4);
    obs.head<2>() = goal_ - pos_;
    obs.tail<2>() = vel_;
    return obs;
  }

  void spawn_goal() {
    do {
      goal_ = Eigen::Vector2d(gen_.uniform(-kArena, kArena),
                              gen_.uniform(-kArena, kArena));
    } while ((goal_ - pos_).norm() < kMinGoalDist);
  }

  rollout::EnvDescriptor desc_;
  rng::Rng gen_{0};
  Eigen::Vector2d pos_{0.0, 0.0};
  Eigen::Vector2d vel_{0.0, 0.0};
  Eigen::Vector2d goal_{1.0, 1.0};
  double last_dist_ = 0.0;
};

}  // namespace

std::unique_ptr<rollout::Env> make_point_goal(int max_episode_len) {
  return std::make_unique<PointGoalEnv>(max_episode_len);
}

}  // namespace apo::envs
