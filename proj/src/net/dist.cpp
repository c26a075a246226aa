#include "apo/net/dist.hpp"

#include <cmath>

#include "apo/common/errors.hpp"

namespace apo::net {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;
}

PolicySpec PolicySpec::categorical(int obs_dim, int n_actions,
                                   std::vector<int> hidden) {
  PolicySpec spec;
  spec.mlp = MlpSpec{obs_dim, n_actions, std::move(hidden), 0};
  spec.family = DistFamily::Categorical;
  spec.action_dim = n_actions;
  return spec;
}

PolicySpec PolicySpec::gaussian(int obs_dim, int act_dim, std::vector<int> hidden) {
  PolicySpec spec;
  spec.mlp = MlpSpec{obs_dim, act_dim, std::move(hidden), act_dim};
  spec.family = DistFamily::DiagGaussian;
  spec.action_dim = act_dim;
  return spec;
}

MlpSpec value_spec(int obs_dim, std::vector<int> hidden) {
  return MlpSpec{obs_dim, 1, std::move(hidden), 0};
}

DistBatch policy_forward(const PolicySpec& spec, const ParamVector& params,
                         const Eigen::MatrixXd& obs, MlpWorkspace* ws) {
  DistBatch out;
  out.family = spec.family;
  out.head = mlp_forward(spec.mlp, params, obs, ws);
  if (spec.family == DistFamily::DiagGaussian) {
    out.log_std = params.tail(spec.mlp.extras)
                      .transpose()
                      .cwiseMax(kLogStdMin)
                      .cwiseMin(kLogStdMax);
  }
  return out;
}

Eigen::VectorXd value_forward(const MlpSpec& spec, const ParamVector& params,
                              const Eigen::MatrixXd& obs) {
  return mlp_forward(spec, params, obs).col(0);
}

Eigen::VectorXd DistBatch::log_prob_discrete(const Eigen::VectorXi& actions) const {
  if (family != DistFamily::Categorical)
    throw FamilyMismatch("log_prob_discrete on a non-categorical batch");
  if (actions.size() != head.rows())
    throw ShapeMismatch("action count does not match batch");
  Eigen::VectorXd out(head.rows());
  for (int i = 0; i < head.rows(); ++i) {
    const int a = actions[i];
    if (a < 0 || a >= head.cols())
      throw OutOfSupport("categorical action out of range");
    const double m = head.row(i).maxCoeff();
    const double lse = m + std::log((head.row(i).array() - m).exp().sum());
    out[i] = head(i, a) - lse;
  }
  return out;
}

Eigen::VectorXd DistBatch::log_prob_continuous(const Eigen::MatrixXd& actions) const {
  if (family != DistFamily::DiagGaussian)
    throw FamilyMismatch("log_prob_continuous on a non-gaussian batch");
  if (actions.rows() != head.rows() || actions.cols() != head.cols())
    throw ShapeMismatch("action shape does not match batch");
  const Eigen::RowVectorXd inv_var = (-2.0 * log_std.array()).exp();
  Eigen::VectorXd out(head.rows());
  for (int i = 0; i < head.rows(); ++i) {
    const Eigen::RowVectorXd diff = actions.row(i) - head.row(i);
    out[i] = -0.5 * (diff.array().square() * inv_var.array()).sum() -
             log_std.sum() - 0.5 * head.cols() * kLog2Pi;
  }
  return out;
}

Eigen::VectorXd DistBatch::entropy() const {
  Eigen::VectorXd out(head.rows());
  if (family == DistFamily::Categorical) {
    for (int i = 0; i < head.rows(); ++i) {
      const double m = head.row(i).maxCoeff();
      const double lse = m + std::log((head.row(i).array() - m).exp().sum());
      const Eigen::ArrayXd ls = head.row(i).transpose().array() - lse;
      out[i] = -(ls.exp() * ls).sum();
    }
  } else {
    out.setConstant(log_std.sum() + 0.5 * head.cols() * (kLog2Pi + 1.0));
  }
  return out;
}

Eigen::VectorXd DistBatch::kl(const DistBatch& other) const {
  if (family != other.family)
    throw FamilyMismatch("kl between different distribution families");
  if (head.rows() != other.head.rows() || head.cols() != other.head.cols())
    throw ShapeMismatch("kl between different batch shapes");
  Eigen::VectorXd out(head.rows());
  if (family == DistFamily::Categorical) {
    for (int i = 0; i < head.rows(); ++i) {
      const double mp = head.row(i).maxCoeff();
      const double lp = mp + std::log((head.row(i).array() - mp).exp().sum());
      const double mq = other.head.row(i).maxCoeff();
      const double lq = mq + std::log((other.head.row(i).array() - mq).exp().sum());
      const Eigen::ArrayXd ls_p = head.row(i).transpose().array() - lp;
      const Eigen::ArrayXd ls_q = other.head.row(i).transpose().array() - lq;
      out[i] = std::max((ls_p.exp() * (ls_p - ls_q)).sum(), 0.0);
    }
  } else {
    const Eigen::ArrayXd s_p = log_std.transpose().array();
    const Eigen::ArrayXd s_q = other.log_std.transpose().array();
    const Eigen::ArrayXd var_ratio = (2.0 * (s_p - s_q)).exp();
    const Eigen::ArrayXd inv_var_q = (-2.0 * s_q).exp();
    for (int i = 0; i < head.rows(); ++i) {
      const Eigen::ArrayXd diff =
          (head.row(i) - other.head.row(i)).transpose().array();
      out[i] = std::max(
          (s_q - s_p + 0.5 * var_ratio + 0.5 * diff.square() * inv_var_q - 0.5)
              .sum(),
          0.0);
    }
  }
  return out;
}

int DistBatch::sample_discrete(int row, rng::Rng& gen) const {
  const double m = head.row(row).maxCoeff();
  Eigen::ArrayXd p = (head.row(row).transpose().array() - m).exp();
  p /= p.sum();
  const double u = gen.uniform();
  double acc = 0.0;
  for (int a = 0; a < p.size() - 1; ++a) {
    acc += p[a];
    if (u < acc) return a;
  }
  return static_cast<int>(p.size()) - 1;
}

Eigen::VectorXd DistBatch::sample_continuous(int row, rng::Rng& gen) const {
  Eigen::VectorXd a(head.cols());
  for (int d = 0; d < head.cols(); ++d)
    a[d] = head(row, d) + std::exp(log_std[d]) * gen.normal();
  return a;
}

}  // namespace apo::net
