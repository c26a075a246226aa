#include "apo/tabular/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "apo/common/errors.hpp"
#include "apo/common/rng.hpp"

namespace apo::tabular {

namespace {

// Trajectories are always split over this many virtual shards so the merged
// statistics do not depend on the physical thread count.
constexpr int kShards = 16;

int sample_cdf(const double* cdf, int n, double u) {
  for (int i = 0; i < n - 1; ++i)
    if (u < cdf[i]) return i;
  return n - 1;
}

}  // namespace

int truncation_horizon(const TabularMdp& mdp, double tol) {
  const double rmax = mdp.max_abs_reward();
  if (rmax == 0.0 || mdp.gamma == 0.0) return 1;
  const double tail0 = rmax / (1.0 - mdp.gamma);
  if (tail0 < tol) return 1;
  const int t = static_cast<int>(
      std::ceil(std::log(tol / tail0) / std::log(mdp.gamma))) + 1;
  return std::max(t, 1);
}

double ReturnStats::tail_fraction(double threshold) const {
  const auto it = std::lower_bound(sorted_returns.begin(), sorted_returns.end(),
                                   threshold);
  return static_cast<double>(sorted_returns.end() - it) /
         static_cast<double>(sorted_returns.size());
}

static ReturnStats run_mc(const TabularMdp& mdp, const TabularPolicy& pi,
                          int start_state, std::int64_t n_traj,
                          std::uint64_t seed, const McOptions& opts) {
  mdp.validate();
  pi.validate();
  if (n_traj < 1) throw BadParam("n_traj must be positive");
  const int horizon =
      opts.horizon > 0 ? opts.horizon : truncation_horizon(mdp, opts.truncation_tol);

  // Eigen matrices are column-major; transpose once so the per-step cdf scans
  // walk contiguous memory.
  const int n = mdp.n_states;
  const int na = mdp.n_actions;
  Eigen::MatrixXd pol_cdf = pi.probs.transpose();  // (a, s)
  for (int s = 0; s < n; ++s)
    for (int a = 1; a < na; ++a) pol_cdf(a, s) += pol_cdf(a - 1, s);
  std::vector<Eigen::MatrixXd> trans_cdf(na), reward_t(na);
  for (int a = 0; a < na; ++a) {
    trans_cdf[a] = mdp.trans[a].transpose();  // (s', s)
    for (int s = 0; s < n; ++s)
      for (int sp = 1; sp < n; ++sp) trans_cdf[a](sp, s) += trans_cdf[a](sp - 1, s);
    reward_t[a] = mdp.reward[a].transpose();
  }
  Eigen::VectorXd init_cdf = mdp.init_dist;
  for (int s = 1; s < n; ++s) init_cdf[s] += init_cdf[s - 1];

  std::vector<std::vector<double>> shard_returns(kShards);
  auto run_shard = [&](int shard) {
    const std::int64_t count =
        n_traj / kShards + (shard < n_traj % kShards ? 1 : 0);
    rng::Rng gen(rng::derive_seed(seed, static_cast<std::uint64_t>(shard)));
    auto& out = shard_returns[shard];
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
      int s = start_state >= 0 ? start_state
                               : sample_cdf(init_cdf.data(), n, gen.uniform());
      double ret = 0.0;
      double disc = 1.0;
      for (int t = 0; t < horizon; ++t) {
        const int a = sample_cdf(pol_cdf.col(s).data(), na, gen.uniform());
        const int sp = sample_cdf(trans_cdf[a].col(s).data(), n, gen.uniform());
        ret += disc * reward_t[a](sp, s);
        disc *= mdp.gamma;
        s = sp;
      }
      out.push_back(ret);
    }
  };

  const int workers = rng::worker_count(std::min(opts.max_workers, kShards));
  if (workers <= 1) {
    for (int shard = 0; shard < kShards; ++shard) run_shard(shard);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int shard = next.fetch_add(1); shard < kShards;
             shard = next.fetch_add(1))
          run_shard(shard);
      });
    for (auto& t : pool) t.join();
  }

  ReturnStats stats;
  stats.n = n_traj;
  stats.sorted_returns.reserve(static_cast<std::size_t>(n_traj));
  for (int shard = 0; shard < kShards; ++shard)
    stats.sorted_returns.insert(stats.sorted_returns.end(),
                                shard_returns[shard].begin(),
                                shard_returns[shard].end());

  double sum = 0.0;
  for (double x : stats.sorted_returns) sum += x;
  stats.mean = sum / static_cast<double>(n_traj);
  double m2 = 0.0, m4 = 0.0;
  for (double x : stats.sorted_returns) {
    const double d = x - stats.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double nn = static_cast<double>(n_traj);
  stats.variance = n_traj > 1 ? m2 / (nn - 1.0) : 0.0;
  m2 /= nn;
  m4 /= nn;
  stats.mean_std_error = n_traj > 1 ? std::sqrt(stats.variance / nn) : 0.0;
  if (n_traj > 3) {
    const double var_of_var =
        m4 / nn - stats.variance * stats.variance * (nn - 3.0) / (nn * (nn - 1.0));
    stats.variance_std_error = std::sqrt(std::max(var_of_var, 0.0));
  }
  std::sort(stats.sorted_returns.begin(), stats.sorted_returns.end());
  return stats;
}

ReturnStats mc_return_stats(const TabularMdp& mdp, const TabularPolicy& pi,
                            std::int64_t n_traj, std::uint64_t seed,
                            const McOptions& opts) {
  return run_mc(mdp, pi, -1, n_traj, seed, opts);
}

ReturnStats mc_return_stats_from_state(const TabularMdp& mdp, const TabularPolicy& pi,
                                       int start_state, std::int64_t n_traj,
                                       std::uint64_t seed, const McOptions& opts) {
  if (start_state < 0 || start_state >= mdp.n_states)
    throw BadParam("start state out of range");
  return run_mc(mdp, pi, start_state, n_traj, seed, opts);
}

}  // namespace apo::tabular
