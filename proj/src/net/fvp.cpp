#include "apo/net/fvp.hpp"

#include <cmath>

#include "apo/common/errors.hpp"

namespace apo::net {

Eigen::VectorXd fisher_vector_product(const PolicySpec& spec,
                                      const ParamVector& params,
                                      const Eigen::MatrixXd& obs,
                                      const ParamVector& v, double damping) {
  if (v.size() != params.size())
    throw ShapeMismatch("fvp: vector length does not match parameters");
  MlpWorkspace ws;
  const Eigen::MatrixXd head = mlp_forward(spec.mlp, params, obs, &ws);
  const double n = static_cast<double>(obs.rows());

  const Eigen::MatrixXd dhead = mlp_jvp(spec.mlp, params, ws, v);

  Eigen::MatrixXd seed(head.rows(), head.cols());
  ParamVector out;
  if (spec.family == DistFamily::Categorical) {
    for (int i = 0; i < head.rows(); ++i) {
      const double m = head.row(i).maxCoeff();
      Eigen::RowVectorXd p = (head.row(i).array() - m).exp();
      p /= p.sum();
      const double inner = p.dot(dhead.row(i));
      seed.row(i) = (p.array() * (dhead.row(i).array() - inner)) / n;
    }
    out = mlp_vjp(spec.mlp, params, ws, seed);
  } else {
    const Eigen::RowVectorXd log_std_raw = params.tail(spec.mlp.extras).transpose();
    const Eigen::RowVectorXd inv_var =
        (-2.0 * log_std_raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax).array())
            .exp();
    for (int i = 0; i < head.rows(); ++i)
      seed.row(i) = dhead.row(i).cwiseProduct(inv_var) / n;
    out = mlp_vjp(spec.mlp, params, ws, seed);
    // log_std block: per-sample KL Hessian is 2 per dimension, zero where the
    // clamp is active.
    const int extras = spec.mlp.extras;
    for (int d = 0; d < extras; ++d) {
      const double raw = log_std_raw[d];
      const bool active = raw >= kLogStdMin && raw <= kLogStdMax;
      out[out.size() - extras + d] =
          active ? 2.0 * v[v.size() - extras + d] : 0.0;
    }
  }
  out += damping * v;
  if (!out.allFinite()) throw NonFiniteValue("fvp: non-finite product");
  return out;
}

CgResult conjugate_gradient(const PolicySpec& spec, const ParamVector& params,
                            const Eigen::MatrixXd& obs, const ParamVector& b,
                            int max_iters, double damping, double tol_rel) {
  CgResult res;
  res.x = ParamVector::Zero(b.size());
  ParamVector r = b;
  ParamVector p = b;
  double rs_old = r.squaredNorm();
  const double b_norm = std::sqrt(rs_old);
  if (b_norm == 0.0) return res;
  for (int it = 0; it < max_iters; ++it) {
    const ParamVector ap = fisher_vector_product(spec, params, obs, p, damping);
    const double curv = p.dot(ap);
    if (curv <= 0.0) {
      res.breakdown = true;
      break;
    }
    const double alpha = rs_old / curv;
    res.x += alpha * p;
    r -= alpha * ap;
    res.iterations = it + 1;
    const double rs_new = r.squaredNorm();
    if (std::sqrt(rs_new) <= tol_rel * b_norm) {
      rs_old = rs_new;
      break;
    }
    p = r + (rs_new / rs_old) * p;
    rs_old = rs_new;
  }
  res.residual_norm = r.norm();
  return res;
}

}  // namespace apo::net
