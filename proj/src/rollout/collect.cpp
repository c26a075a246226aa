#include "apo/rollout/collect.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "apo/common/errors.hpp"

namespace apo::rollout {

std::vector<int> TrajectoryBatch::segment_starts() const {
  std::vector<int> starts;
  starts.reserve(segments.size());
  for (const auto& seg : segments) starts.push_back(seg.start);
  return starts;
}

PolicyFn make_policy_fn(const net::PolicySpec& spec, const net::ParamVector& params) {
  PolicyFn fn;
  fn.family = spec.family;
  fn.sample = [spec, params](const Eigen::VectorXd& obs, rng::Rng& gen,
                             Action& action, double& log_prob) {
    const net::DistBatch dist =
        net::policy_forward(spec, params, obs.transpose());
    if (spec.family == net::DistFamily::Categorical) {
      action.discrete = dist.sample_discrete(0, gen);
      Eigen::VectorXi a(1);
      a[0] = action.discrete;
      log_prob = dist.log_prob_discrete(a)[0];
    } else {
      action.box = dist.sample_continuous(0, gen);
      log_prob = dist.log_prob_continuous(action.box.transpose())[0];
    }
  };
  return fn;
}

ValueFn make_value_fn(const net::MlpSpec& spec, const net::ParamVector& params) {
  ValueFn fn;
  fn.value = [spec, params](const Eigen::VectorXd& obs) {
    return net::value_forward(spec, params, obs.transpose())[0];
  };
  return fn;
}

namespace {

struct StreamData {
  std::vector<Eigen::VectorXd> obs;
  std::vector<int> actions_disc;
  std::vector<Eigen::VectorXd> actions_cont;
  std::vector<double> rewards, log_probs, values;
  std::vector<Segment> segments;
  std::vector<EpisodeSummary> episodes;
};

void run_stream(const EnvFactory& factory, const PolicyFn& policy,
                const ValueFn& value, int steps, std::uint64_t env_seed,
                std::uint64_t action_seed, double gamma, StreamData& out) {
  if (steps <= 0) return;
  auto env = factory();
  const EnvDescriptor& desc = env->descriptor();
  rng::Rng action_gen(action_seed);
  std::uint64_t reset_counter = 0;

  Eigen::VectorXd obs = env->reset(rng::derive_seed(env_seed, reset_counter++));
  Segment seg;
  EpisodeSummary ep;
  double ep_disc = 1.0;
  seg.start = 0;

  for (int t = 0; t < steps; ++t) {
    if (!obs.allFinite()) throw EnvFault("environment produced non-finite observation");
    Action action;
    double log_prob = 0.0;
    policy.sample(obs, action_gen, action, log_prob);
    const double v = value.value(obs);
    const StepResult step = env->step(action);
    if (!std::isfinite(step.reward))
      throw EnvFault("environment produced non-finite reward");

    out.obs.push_back(obs);
    if (policy.family == net::DistFamily::Categorical)
      out.actions_disc.push_back(action.discrete);
    else
      out.actions_cont.push_back(action.box);
    out.rewards.push_back(step.reward);
    out.log_probs.push_back(log_prob);
    out.values.push_back(v);

    ep.undiscounted_return += step.reward;
    ep.discounted_return += ep_disc * step.reward;
    ep_disc *= gamma;
    ep.length += 1;
    seg.length += 1;

    obs = step.obs;
    const bool hit_limit = ep.length >= desc.max_episode_len;
    const bool cutoff = t + 1 >= steps;
    if (step.terminated || hit_limit || cutoff) {
      seg.terminated = step.terminated;
      seg.bootstrap_value = step.terminated ? 0.0 : value.value(obs);
      ep.truncated = !step.terminated;
      out.segments.push_back(seg);
      out.episodes.push_back(ep);
      seg = Segment{};
      seg.start = t + 1;
      ep = EpisodeSummary{};
      ep_disc = 1.0;
      if (!cutoff) obs = env->reset(rng::derive_seed(env_seed, reset_counter++));
    }
  }
}

}  // namespace

TrajectoryBatch collect(const EnvFactory& factory, const PolicyFn& policy,
                        const ValueFn& value, int total_steps, std::uint64_t seed,
                        const CollectOptions& opts) {
  if (total_steps < 1) throw BadParam("collect: total_steps must be positive");
  const int n_streams = std::max(opts.n_streams, 1);
  std::vector<int> steps_per(n_streams, total_steps / n_streams);
  for (int v = 0; v < total_steps % n_streams; ++v) steps_per[v] += 1;

  std::vector<StreamData> streams(n_streams);
  auto job = [&](int v) {
    run_stream(factory, policy, value, steps_per[v], rng::derive_seed(seed, 2 * v),
               rng::derive_seed(seed, 2 * v + 1), opts.gamma, streams[v]);
  };
  const int workers = rng::worker_count(std::min(opts.max_workers, n_streams));
  if (workers <= 1) {
    for (int v = 0; v < n_streams; ++v) job(v);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int v = next.fetch_add(1); v < n_streams; v = next.fetch_add(1)) job(v);
      });
    for (auto& t : pool) t.join();
  }

  TrajectoryBatch batch;
  batch.family = policy.family;
  int obs_dim = 0, act_dim = 0;
  for (const auto& s : streams)
    if (!s.obs.empty()) {
      obs_dim = static_cast<int>(s.obs[0].size());
      if (!s.actions_cont.empty())
        act_dim = static_cast<int>(s.actions_cont[0].size());
      break;
    }
  batch.obs.resize(total_steps, obs_dim);
  batch.rewards.resize(total_steps);
  batch.old_log_probs.resize(total_steps);
  batch.values.resize(total_steps);
  if (policy.family == net::DistFamily::Categorical)
    batch.actions_disc.resize(total_steps);
  else
    batch.actions_cont.resize(total_steps, act_dim);

  int row = 0;
  for (const auto& s : streams) {
    const int base = row;
    for (std::size_t i = 0; i < s.obs.size(); ++i, ++row) {
      batch.obs.row(row) = s.obs[i].transpose();
      batch.rewards[row] = s.rewards[i];
      batch.old_log_probs[row] = s.log_probs[i];
      batch.values[row] = s.values[i];
      if (policy.family == net::DistFamily::Categorical)
        batch.actions_disc[row] = s.actions_disc[i];
      else
        batch.actions_cont.row(row) = s.actions_cont[i].transpose();
    }
    for (Segment seg : s.segments) {
      seg.start += base;
      batch.segments.push_back(seg);
    }
    batch.episodes.insert(batch.episodes.end(), s.episodes.begin(),
                          s.episodes.end());
  }
  return batch;
}

void gae(TrajectoryBatch& batch, double gamma, double lambda) {
  const int n = batch.size();
  batch.advantages.resize(n);
  batch.returns_to_go.resize(n);
  for (const Segment& seg : batch.segments) {
    double running = 0.0;
    for (int i = seg.start + seg.length - 1; i >= seg.start; --i) {
      const double next_v = i == seg.start + seg.length - 1
                                ? (seg.terminated ? 0.0 : seg.bootstrap_value)
                                : batch.values[i + 1];
      const double delta = batch.rewards[i] + gamma * next_v - batch.values[i];
      running = delta + gamma * lambda * running;
      batch.advantages[i] = running;
    }
  }
  if (!batch.advantages.allFinite())
    throw NonFiniteAdvantage("gae produced non-finite advantages");
  batch.returns_to_go = batch.advantages + batch.values;
}

void normalize_advantages(TrajectoryBatch& batch) {
  const int n = batch.size();
  if (n == 0 || batch.advantages.size() != n) return;
  const double mean = batch.advantages.mean();
  batch.advantages.array() -= mean;
  const double std =
      std::sqrt(batch.advantages.squaredNorm() / std::max(n - 1, 1));
  if (std >= 1e-8) batch.advantages /= std;
}

EpisodeStats episode_stats(const TrajectoryBatch& batch) {
  if (batch.episodes.empty())
    throw NoCompletedEpisodes("batch holds no completed episodes");
  EpisodeStats stats;
  stats.n_episodes = static_cast<int>(batch.episodes.size());
  double sum = 0.0;
  double worst = batch.episodes[0].undiscounted_return;
  for (const auto& ep : batch.episodes) {
    sum += ep.undiscounted_return;
    worst = std::min(worst, ep.undiscounted_return);
  }
  stats.mean_return = sum / stats.n_episodes;
  stats.worst_return = worst;
  double sq = 0.0;
  for (const auto& ep : batch.episodes) {
    const double d = ep.undiscounted_return - stats.mean_return;
    sq += d * d;
  }
  stats.std_return =
      stats.n_episodes > 1 ? std::sqrt(sq / (stats.n_episodes - 1)) : 0.0;
  return stats;
}

}  // namespace apo::rollout
