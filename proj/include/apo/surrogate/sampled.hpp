#pragma once

#include "apo/net/dist.hpp"
#include "apo/rollout/collect.hpp"
#include "apo/surrogate/config.hpp"

namespace apo::surrogate {

struct SampledOptions {
  bool clip_advantage = false;  // proximal variants clip only this term
  double clip_ratio = 0.2;
  bool want_gradient = false;
};

struct SampledObjective {
  double value = 0.0;
  net::ParamVector gradient;  // empty unless requested
  double kl_mean = 0.0;       // batch-mean KL(new || old)
  double adv_term = 0.0;
  double mv_est = 0.0;
  double vm_est = 0.0;
  double h_max = 0.0;
  int ratio_cap_hits = 0;
};

/// Penalized surrogate evaluated at params_new against the batch collected
/// under params_old:
///
///   O = mean[ratio * adv] / (1 - gamma)  -  k (MV_est + VM_est)
///
/// MV_est and VM_est are the barred bound terms with per-sample stand-ins
/// for the per-state expectations: importance ratios (capped at 10) replace
/// the new-policy expectations, the reverse-discounted sum of
/// (ratio*adv - adv) stands in for the advantage-gap resolvent, and the
/// max-KL slacks use the batch-mean KL.  With k = 0 the penalty branch is
/// skipped entirely and O reduces to the plain (optionally clipped)
/// surrogate, bit for bit.
SampledObjective sampled_objective(const rollout::TrajectoryBatch& batch,
                                   const net::PolicySpec& spec,
                                   const net::ParamVector& params_new,
                                   const net::ParamVector& params_old,
                                   const SurrogateConfig& cfg,
                                   const SampledOptions& opts = {});

}  // namespace apo::surrogate
