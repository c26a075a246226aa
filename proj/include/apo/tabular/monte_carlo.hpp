#pragma once

#include <cstdint>
#include <vector>

#include "apo/tabular/mdp.hpp"

namespace apo::tabular {

/// Seeded statistics of truncated discounted returns.
struct ReturnStats {
  std::int64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n-1 denominator)
  double mean_std_error = 0.0;
  double variance_std_error = 0.0;  // from the fourth central moment
  std::vector<double> sorted_returns;

  /// Empirical fraction of returns >= threshold.
  double tail_fraction(double threshold) const;
};

struct McOptions {
  int horizon = 0;             // 0: derive from truncation_tol
  double truncation_tol = 1e-6;
  int max_workers = 16;
};

/// Smallest T with gamma^T * Rmax / (1 - gamma) < tol.
int truncation_horizon(const TabularMdp& mdp, double tol);

/// Returns sampled from the initial distribution.
ReturnStats mc_return_stats(const TabularMdp& mdp, const TabularPolicy& pi,
                            std::int64_t n_traj, std::uint64_t seed,
                            const McOptions& opts = {});

/// Returns sampled from a fixed start state.
ReturnStats mc_return_stats_from_state(const TabularMdp& mdp, const TabularPolicy& pi,
                                       int start_state, std::int64_t n_traj,
                                       std::uint64_t seed, const McOptions& opts = {});

}  // namespace apo::tabular
