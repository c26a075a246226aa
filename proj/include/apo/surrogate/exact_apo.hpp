#pragma once

#include <cstdint>
#include <vector>

#include "apo/surrogate/config.hpp"
#include "apo/tabular/mdp.hpp"

namespace apo::surrogate {

struct ExactApoOptions {
  int iterations = 50;
  double target_kl = 0.02;
  double fd_step = 1e-6;
  double init_logit_scale = 0.5;
  int backtrack_steps = 100;
  double backtrack_coef = 0.8;
  double initial_step = 2.0;  // logit-space norm of the untouched ascent step
};

struct ExactApoRecord {
  double m_k = 0.0;       // surrogate value of the accepted policy
  double b_k = 0.0;       // exact lower probability bound, evaluated fresh
  double kl_mean = 0.0;   // d-weighted mean KL of the accepted step
  bool accepted = false;
};

struct ExactApoTrace {
  std::vector<ExactApoRecord> records;  // records[0] is the initial policy
  tabular::TabularPolicy final_policy;
};

/// Exact-arithmetic APO on a softmax-parameterized tabular policy: each
/// iteration ascends the surrogate objective via a finite-difference gradient
/// of m_k and backtracking, accepting a step only when the trust region holds
/// and the surrogate did not decrease.  The returned b_k trace is evaluated
/// independently by policy evaluation, so a non-decreasing trace certifies
/// the monotonic-improvement guarantee numerically.
ExactApoTrace run_exact_apo(const tabular::TabularMdp& mdp, const SurrogateConfig& cfg,
                            std::uint64_t seed, const ExactApoOptions& opts = {});

}  // namespace apo::surrogate
