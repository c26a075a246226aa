#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>

namespace apo::rollout {

struct ActionSpace {
  enum class Kind { Discrete, Box };
  Kind kind = Kind::Discrete;
  int dim = 0;  // action count (Discrete) or dimension (Box)
  Eigen::VectorXd low, high;

  static ActionSpace discrete(int n);
  static ActionSpace box(int dim, double low, double high);
};

struct EnvDescriptor {
  int obs_dim = 0;
  ActionSpace action_space;
  int max_episode_len = 1000;
};

/// One action, either branch populated per the env's action space.
struct Action {
  int discrete = 0;
  Eigen::VectorXd box;
};

struct StepResult {
  Eigen::VectorXd obs;
  double reward = 0.0;
  bool terminated = false;
};

/// Single-threaded environment; episode-length truncation is the collector's
/// job, termination is the env's.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvDescriptor& descriptor() const = 0;
  virtual Eigen::VectorXd reset(std::uint64_t seed) = 0;
  virtual StepResult step(const Action& action) = 0;
};

using EnvFactory = std::function<std::unique_ptr<Env>()>;

inline ActionSpace ActionSpace::discrete(int n) {
  ActionSpace s;
  s.kind = Kind::Discrete;
  s.dim = n;
  return s;
}

inline ActionSpace ActionSpace::box(int dim, double low, double high) {
  ActionSpace s;
  s.kind = Kind::Box;
  s.dim = dim;
  s.low = Eigen::VectorXd::Constant(dim, low);
  s.high = Eigen::VectorXd::Constant(dim, high);
  return s;
}

}  // namespace apo::rollout
