#include "apo/tabular/mdp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "apo/common/errors.hpp"

namespace apo::tabular {

namespace {
constexpr double kStochasticTol = 1e-12;
}

void TabularMdp::validate() const {
  if (n_states < 1 || n_actions < 1)
    throw InvalidMdp("mdp must have at least one state and one action");
  if (static_cast<int>(trans.size()) != n_actions ||
      static_cast<int>(reward.size()) != n_actions)
    throw InvalidMdp("per-action matrix count does not match n_actions");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw InvalidMdp("gamma must lie in [0, 1)");
  for (int a = 0; a < n_actions; ++a) {
    if (trans[a].rows() != n_states || trans[a].cols() != n_states ||
        reward[a].rows() != n_states || reward[a].cols() != n_states)
      throw InvalidMdp("transition/reward matrix has wrong shape");
    if ((trans[a].array() < 0.0).any())
      throw InvalidMdp("negative transition probability");
    if (!reward[a].allFinite()) throw InvalidMdp("non-finite reward");
    for (int s = 0; s < n_states; ++s) {
      const double row_sum = trans[a].row(s).sum();
      if (std::abs(row_sum - 1.0) > kStochasticTol)
        throw InvalidMdp("transition row (s=" + std::to_string(s) +
                         ", a=" + std::to_string(a) + ") sums to " +
                         std::to_string(row_sum));
    }
  }
  if (init_dist.size() != n_states)
    throw InvalidMdp("initial distribution has wrong length");
  if ((init_dist.array() < 0.0).any())
    throw InvalidMdp("negative initial probability");
  if (std::abs(init_dist.sum() - 1.0) > kStochasticTol)
    throw InvalidMdp("initial distribution sums to " + std::to_string(init_dist.sum()));
}

double TabularMdp::max_abs_reward() const {
  double m = 0.0;
  for (const auto& r : reward) m = std::max(m, r.cwiseAbs().maxCoeff());
  return m;
}

void TabularPolicy::validate() const {
  if (probs.rows() < 1 || probs.cols() < 1)
    throw InvalidMdp("policy must have at least one state and one action");
  if ((probs.array() < 0.0).any()) throw InvalidMdp("negative action probability");
  for (int s = 0; s < probs.rows(); ++s) {
    const double row_sum = probs.row(s).sum();
    if (std::abs(row_sum - 1.0) > kStochasticTol)
      throw InvalidMdp("policy row " + std::to_string(s) + " sums to " +
                       std::to_string(row_sum));
  }
}

TabularPolicy uniform_policy(int n_states, int n_actions) {
  TabularPolicy pi;
  pi.probs = Eigen::MatrixXd::Constant(n_states, n_actions, 1.0 / n_actions);
  return pi;
}

Eigen::MatrixXd policy_transition(const TabularMdp& mdp, const TabularPolicy& pi) {
  if (pi.n_states() != mdp.n_states || pi.n_actions() != mdp.n_actions)
    throw DimensionMismatch("policy shape does not match mdp");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_states);
  for (int a = 0; a < mdp.n_actions; ++a)
    p += pi.probs.col(a).asDiagonal() * mdp.trans[a];
  return p;
}

Eigen::VectorXd policy_reward(const TabularMdp& mdp, const TabularPolicy& pi) {
  if (pi.n_states() != mdp.n_states || pi.n_actions() != mdp.n_actions)
    throw DimensionMismatch("policy shape does not match mdp");
  Eigen::VectorXd r = Eigen::VectorXd::Zero(mdp.n_states);
  for (int a = 0; a < mdp.n_actions; ++a)
    r += pi.probs.col(a).cwiseProduct(
        (mdp.trans[a].cwiseProduct(mdp.reward[a])).rowwise().sum());
  return r;
}

Eigen::VectorXd policy_kl(const TabularPolicy& pi_new, const TabularPolicy& pi_old) {
  if (pi_new.probs.rows() != pi_old.probs.rows() ||
      pi_new.probs.cols() != pi_old.probs.cols())
    throw DimensionMismatch("policy pair has mismatched shapes");
  const int n_states = pi_new.n_states();
  const int n_actions = pi_new.n_actions();
  Eigen::VectorXd kl = Eigen::VectorXd::Zero(n_states);
  for (int s = 0; s < n_states; ++s) {
    double acc = 0.0;
    for (int a = 0; a < n_actions; ++a) {
      const double p = pi_new.probs(s, a);
      const double q = pi_old.probs(s, a);
      if (p == 0.0) continue;
      if (q == 0.0) {
        acc = std::numeric_limits<double>::infinity();
        break;
      }
      acc += p * (std::log(p) - std::log(q));
    }
    kl[s] = std::max(acc, 0.0);
  }
  return kl;
}

}  // namespace apo::tabular
