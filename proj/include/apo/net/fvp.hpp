#pragma once

#include <Eigen/Dense>

#include "apo/net/dist.hpp"

namespace apo::net {

/// (H + damping I) v where H is the Hessian, at the given parameters, of the
/// batch-mean KL(pi_theta || pi_params).  Computed in Gauss-Newton form:
/// forward to distribution parameters, Jacobian-vector product, the analytic
/// KL Hessian in distribution space, then the transposed-Jacobian product.
/// At theta = params the KL Hessian equals the Fisher, so this is exact.
Eigen::VectorXd fisher_vector_product(const PolicySpec& spec,
                                      const ParamVector& params,
                                      const Eigen::MatrixXd& obs,
                                      const ParamVector& v, double damping);

struct CgResult {
  ParamVector x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool breakdown = false;  // nonpositive curvature encountered
};

/// Conjugate gradient on A x = b for the implicit damped Fisher.
CgResult conjugate_gradient(const PolicySpec& spec, const ParamVector& params,
                            const Eigen::MatrixXd& obs, const ParamVector& b,
                            int max_iters, double damping, double tol_rel = 1e-6);

}  // namespace apo::net
