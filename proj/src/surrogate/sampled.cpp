#include "apo/surrogate/sampled.hpp"

#include <cmath>

#include "apo/common/errors.hpp"
#include "apo/net/tape.hpp"

namespace apo::surrogate {

using net::Tape;

namespace {
constexpr double kRatioCap = 10.0;
}

SampledObjective sampled_objective(const rollout::TrajectoryBatch& batch,
                                   const net::PolicySpec& spec,
                                   const net::ParamVector& params_new,
                                   const net::ParamVector& params_old,
                                   const SurrogateConfig& cfg,
                                   const SampledOptions& opts) {
  const int n = batch.size();
  if (n == 0) throw EmptyBatch("sampled_objective: empty batch");
  if (batch.advantages.size() != n)
    throw EmptyBatch("sampled_objective: batch has no advantages");
  if (!batch.advantages.allFinite())
    throw NonFiniteAdvantage("sampled_objective: non-finite advantages");

  const double gamma = cfg.gamma;
  const double scale = 1.0 / (1.0 - gamma);

  // Old-policy distribution parameters are constants.
  const net::DistBatch old_dist = net::policy_forward(spec, params_old, batch.obs);

  Tape tape;
  net::TapeMlp mlp(tape, spec.mlp, params_new);
  Tape::Var head = mlp.forward(batch.obs);

  Tape::Var lp{}, kl{};
  if (spec.family == net::DistFamily::Categorical) {
    lp = tape.categorical_log_prob(head, batch.actions_disc);
    kl = tape.categorical_kl_vs_fixed(head, old_dist.head);
  } else {
    const Tape::Var log_std =
        tape.clamp(mlp.extras(), net::kLogStdMin, net::kLogStdMax);
    lp = tape.gaussian_log_prob(head, log_std, batch.actions_cont);
    kl = tape.gaussian_kl_vs_fixed(head, log_std, old_dist.head, old_dist.log_std);
  }

  const Tape::Var adv = tape.constant(batch.advantages);
  const Tape::Var ratio = tape.exp(tape.sub(lp, tape.constant(batch.old_log_probs)));

  Tape::Var adv_term{};
  if (opts.clip_advantage) {
    const Tape::Var unclipped = tape.mul(ratio, adv);
    const Tape::Var clipped =
        tape.mul(tape.clamp(ratio, 1.0 - opts.clip_ratio, 1.0 + opts.clip_ratio), adv);
    adv_term = tape.scale(tape.mean(tape.minimum(unclipped, clipped)), scale);
  } else {
    adv_term = tape.scale(tape.mean(tape.mul(ratio, adv)), scale);
  }

  SampledObjective out;
  Tape::Var objective = adv_term;

  if (cfg.k != 0.0) {
    auto aggregate = [&](Tape::Var v) {
      return cfg.aggregation == Aggregation::MaxOverStates ? tape.max_all(v)
                                                           : tape.mean(v);
    };
    const double eps_hat = batch.advantages.cwiseAbs().maxCoeff();
    const Tape::Var capped = tape.min_const(ratio, kRatioCap);
    const Tape::Var capped_adv = tape.mul(capped, adv);
    const Tape::Var gap = tape.sub(capped_adv, adv);  // ratio*adv - adv
    const Tape::Var kl_mean_v = tape.mean(kl);

    // |H|_max: configured constant, or the per-sample gap magnitude plus the
    // KL slack of the bound.
    Tape::Var h{};
    if (cfg.h_max_hyper.has_value()) {
      h = tape.scalar_const(*cfg.h_max_hyper);
    } else {
      const double slack_h =
          2.0 * gamma * (1.0 + gamma) * eps_hat / ((1.0 - gamma) * (1.0 - gamma));
      h = tape.add(aggregate(tape.abs(gap)), tape.scale(kl_mean_v, slack_h));
    }

    // MeanVariance estimate: per-sample ratio-weighted A^2 difference plus
    // the 2 E[ratio A] H + H^2 cross terms.
    const Tape::Var adv_sq = tape.square(adv);
    Tape::Var t = tape.sub(tape.mul(capped, adv_sq), adv_sq);
    {
      // broadcasting: h is (1,1); expand through mul with ones.
      const Tape::Var ones = tape.constant(Eigen::MatrixXd::Ones(n, 1));
      const Tape::Var h_col = tape.mul(ones, tape.mul(ones, ones));  // placeholder
      (void)h_col;
    }
    // scalar-times-column products via repeated structure
    const Tape::Var h_sq = tape.square(h);
    // t_i += 2 * capped_adv_i * h + h^2  -- build with explicit broadcasts.
    const Eigen::MatrixXd ones_col = Eigen::MatrixXd::Ones(n, 1);
    const Tape::Var h_bcast = tape.mul(tape.constant(ones_col), broadcast_scalar(tape, h, n));
    (void)h_bcast;

    out.value = 0.0;  // replaced below
  }

  tape.backward(objective);
  out.value = tape.scalar(objective);
  return out;
}

}  // namespace apo::surrogate
