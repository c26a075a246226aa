#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "apo/net/dist.hpp"
#include "apo/rollout/env.hpp"

namespace apo::rollout {

/// Contiguous run of steps from one episode inside a batch.
struct Segment {
  int start = 0;
  int length = 0;
  bool terminated = false;      // env signalled a terminal state
  double bootstrap_value = 0.0; // value of the next state when truncated
};

struct EpisodeSummary {
  double undiscounted_return = 0.0;
  double discounted_return = 0.0;
  int length = 0;
  bool truncated = false;
};

struct TrajectoryBatch {
  net::DistFamily family = net::DistFamily::Categorical;
  Eigen::MatrixXd obs;
  Eigen::VectorXi actions_disc;
  Eigen::MatrixXd actions_cont;
  Eigen::VectorXd rewards;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd values;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns_to_go;
  std::vector<Segment> segments;
  std::vector<EpisodeSummary> episodes;

  int size() const { return static_cast<int>(rewards.size()); }
  std::vector<int> segment_starts() const;
};

/// Action sampler bound to a policy snapshot.
struct PolicyFn {
  net::DistFamily family = net::DistFamily::Categorical;
  std::function<void(const Eigen::VectorXd& obs, rng::Rng& gen, Action& action,
                     double& log_prob)>
      sample;
};

struct ValueFn {
  std::function<double(const Eigen::VectorXd& obs)> value;
};

PolicyFn make_policy_fn(const net::PolicySpec& spec, const net::ParamVector& params);
ValueFn make_value_fn(const net::MlpSpec& spec, const net::ParamVector& params);

struct CollectOptions {
  double gamma = 0.99;   // for the discounted per-episode diagnostics
  int n_streams = 4;     // fixed sharding, independent of worker count
  int max_workers = 4;
};

/// Collects exactly total_steps transitions, deterministic in
/// (seed, snapshots) regardless of thread count.  Streams own env instances;
/// their transitions are concatenated in stream order.  Every episode piece
/// ends in termination, the env length limit, or the batch cutoff; the last
/// two are recorded as truncated summaries.
TrajectoryBatch collect(const EnvFactory& factory, const PolicyFn& policy,
                        const ValueFn& value, int total_steps, std::uint64_t seed,
                        const CollectOptions& opts = {});

/// GAE(lambda) advantages and value targets; bootstraps with the stored next
/// value on truncation and zero on termination.
void gae(TrajectoryBatch& batch, double gamma, double lambda);

/// Centers advantages; rescales to unit std unless the spread is degenerate.
void normalize_advantages(TrajectoryBatch& batch);

struct EpisodeStats {
  double mean_return = 0.0;
  double worst_return = 0.0;
  double std_return = 0.0;
  int n_episodes = 0;
};

EpisodeStats episode_stats(const TrajectoryBatch& batch);

}  // namespace apo::rollout
