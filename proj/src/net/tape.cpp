#include "apo/net/tape.hpp"

#include <cmath>

#include "apo/common/errors.hpp"

namespace apo::net {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

Eigen::MatrixXd log_softmax_rows(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out(z.rows(), z.cols());
  for (int i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    const double lse = m + std::log((z.row(i).array() - m).exp().sum());
    out.row(i) = z.row(i).array() - lse;
  }
  return out;
}

}  // namespace

Tape::Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  grads_.emplace_back();
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Var Tape::input(Mat value) {
  Node n;
  n.op = Op::Leaf;
  n.requires_grad = true;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::Var Tape::constant(Mat value) {
  Node n;
  n.op = Op::Leaf;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::Var Tape::scalar_const(double value) {
  return constant(Mat::Constant(1, 1, value));
}

const Tape::Mat& Tape::val(Var v) const { return nodes_.at(v.id).value; }

double Tape::scalar(Var v) const {
  const Mat& m = val(v);
  if (m.rows() != 1 || m.cols() != 1)
    throw ShapeMismatch("tape: scalar() on non-scalar value");
  return m(0, 0);
}

#define APO_BINOP(name, OPTAG, VAL)                                       \
  Tape::Var Tape::name(Var a, Var b) {                                    \
    const Mat& x = val(a);                                                \
    const Mat& y = val(b);                                                \
    if (x.rows() != y.rows() || x.cols() != y.cols())                     \
      throw ShapeMismatch("tape: shape mismatch in " #name);              \
    Node n;                                                               \
    n.op = Op::OPTAG;                                                     \
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad; \
    n.a = a.id;                                                           \
    n.b = b.id;                                                           \
    n.value = (VAL);                                                      \
    return push(std::move(n));                                            \
  }

APO_BINOP(add, Add, x + y)
APO_BINOP(sub, Sub, x - y)
APO_BINOP(mul, Mul, x.cwiseProduct(y))
APO_BINOP(minimum, Minimum, x.cwiseMin(y))
#undef APO_BINOP

#define APO_UNOP(name, OPTAG, VAL)                \
  Tape::Var Tape::name(Var a) {                   \
    const Mat& x = val(a);                        \
    Node n;                                       \
    n.op = Op::OPTAG;                             \
    n.requires_grad = nodes_[a.id].requires_grad; \
    n.a = a.id;                                   \
    n.value = (VAL);                              \
    return push(std::move(n));                    \
  }

APO_UNOP(exp, Exp, x.array().exp().matrix())
APO_UNOP(log, Log, x.array().log().matrix())
APO_UNOP(sqrt, Sqrt, x.cwiseSqrt())
APO_UNOP(abs, Abs, x.cwiseAbs())
APO_UNOP(square, Square, x.cwiseProduct(x))
APO_UNOP(tanh, Tanh, x.array().tanh().matrix())
#undef APO_UNOP

Tape::Var Tape::scale(Var a, double c) {
  Node n;
  n.op = Op::Scale;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.a = a.id;
  n.c0 = c;
  n.value = c * val(a);
  return push(std::move(n));
}

Tape::Var Tape::add_const(Var a, double c) {
  Node n;
  n.op = Op::AddConst;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.a = a.id;
  n.value = val(a).array() + c;
  return push(std::move(n));
}

Tape::Var Tape::clamp(Var a, double lo, double hi) {
  Node n;
  n.op = Op::Clamp;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.a = a.id;
  n.c0 = lo;
  n.c1 = hi;
  n.value = val(a).cwiseMax(lo).cwiseMin(hi);
  return push(std::move(n));
}

Tape::Var Tape::min_const(Var a, double c) {
  Node n;
  n.op = Op::MinConst;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.a = a.id;
  n.c0 = c;
  n.value = val(a).cwiseMin(c);
  return push(std::move(n));
}

Tape::Var Tape::max_const(Var a, double c) {
  Node n;
  n.op = Op::MaxConst;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.a = a.id;
  n.c0 = c;
  n.value = val(a).cwiseMax(c);
  return push(std::move(n));
}

Tape::Var Tape::affine(Var x, Var w, Var b) {
  const Mat& xv = val(x);
  const Mat& wv = val(w);
  const Mat& bv = val(b);
  if (xv.cols() != wv.cols() || bv.rows() != wv.rows() || bv.cols() != 1)
    throw ShapeMismatch("tape: affine shapes");
  Node n;
  n.op = Op::Affine;
  n.requires_grad = nodes_[x.id].requires_grad || nodes_[w.id].requires_grad ||
                    nodes_[b.id].requires_grad;
  n.a = x.id;
  n.b = w.id;
  n.c = b.id;
  n.value = (xv * wv.transpose()).rowwise() + bv.col(0).transpose();
  return push(std::move(n));
}

Tape::Var Tape::sum(Var a) {
  Node n;
  n.op = Op::Sum;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.a = a.id;
  n.value = Mat::Constant(1, 1, val(a).sum());
  return push(std::move(n));
}

Tape::Var Tape::mean(Var a) {
  Node n;
  n.op = Op::Mean;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.a = a.id;
  n.value = Mat::Constant(1, 1, val(a).mean());
  return push(std::move(n));
}

Tape::Var Tape::max_all(Var a) {
  Node n;
  n.op = Op::MaxAll;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.a = a.id;
  n.value = Mat::Constant(1, 1, val(a).maxCoeff());
  return push(std::move(n));
}

Tape::Var Tape::reverse_discounted_cumsum(Var x, const std::vector<int>& segment_starts,
                                          double gamma) {
  const Mat& xv = val(x);
  if (xv.cols() != 1) throw ShapeMismatch("tape: cumsum expects a column");
  const int n = static_cast<int>(xv.rows());
  Node node;
  node.op = Op::RevCumsum;
  node.requires_grad = nodes_[x.id].requires_grad;
  node.a = x.id;
  node.c0 = gamma;
  node.segments = segment_starts;
  node.value.resize(n, 1);
  for (std::size_t seg = 0; seg < segment_starts.size(); ++seg) {
    const int start = segment_starts[seg];
    const int end = seg + 1 < segment_starts.size()
                        ? segment_starts[seg + 1]
                        : n;
    double acc = 0.0;
    for (int i = end - 1; i >= start; --i) {
      acc = xv(i, 0) + gamma * acc;
      node.value(i, 0) = acc;
    }
  }
  return push(std::move(node));
}

Tape::Var Tape::categorical_log_prob(Var logits, const Eigen::VectorXi& actions) {
  const Mat& z = val(logits);
  if (actions.size() != z.rows())
    throw ShapeMismatch("tape: action count does not match batch");
  Node n;
  n.op = Op::CatLogProb;
  n.requires_grad = nodes_[logits.id].requires_grad;
  n.a = logits.id;
  n.idx = actions;
  n.aux = log_softmax_rows(z);
  n.value.resize(z.rows(), 1);
  for (int i = 0; i < z.rows(); ++i) {
    const int a = actions[i];
    if (a < 0 || a >= z.cols()) throw OutOfSupport("categorical action out of range");
    n.value(i, 0) = n.aux(i, a);
  }
  return push(std::move(n));
}

Tape::Var Tape::categorical_kl_vs_fixed(Var logits, const Mat& old_logits) {
  const Mat& z = val(logits);
  if (z.rows() != old_logits.rows() || z.cols() != old_logits.cols())
    throw ShapeMismatch("tape: kl logits shapes");
  Node n;
  n.op = Op::CatKl;
  n.requires_grad = nodes_[logits.id].requires_grad;
  n.a = logits.id;
  const Mat ls_new = log_softmax_rows(z);
  const Mat ls_old = log_softmax_rows(old_logits);
  n.aux.resize(z.rows(), 2 * z.cols());
  n.aux.leftCols(z.cols()) = ls_new;
  n.aux.rightCols(z.cols()) = ls_new - ls_old;
  n.value.resize(z.rows(), 1);
  for (int i = 0; i < z.rows(); ++i)
    n.value(i, 0) =
        (ls_new.row(i).array().exp() * (ls_new.row(i) - ls_old.row(i)).array())
            .sum();
  return push(std::move(n));
}

Tape::Var Tape::categorical_entropy(Var logits) {
  const Mat& z = val(logits);
  Node n;
  n.op = Op::CatEntropy;
  n.requires_grad = nodes_[logits.id].requires_grad;
  n.a = logits.id;
  n.aux = log_softmax_rows(z);
  n.value.resize(z.rows(), 1);
  for (int i = 0; i < z.rows(); ++i)
    n.value(i, 0) = -(n.aux.row(i).array().exp() * n.aux.row(i).array()).sum();
  return push(std::move(n));
}

Tape::Var Tape::gaussian_log_prob(Var mean, Var log_std, const Mat& actions) {
  const Mat& m = val(mean);
  const Mat& s = val(log_std);
  if (s.rows() != 1 || s.cols() != m.cols() || actions.rows() != m.rows() ||
      actions.cols() != m.cols())
    throw ShapeMismatch("tape: gaussian log_prob shapes");
  Node n;
  n.op = Op::GaussLogProb;
  n.requires_grad = nodes_[mean.id].requires_grad || nodes_[log_std.id].requires_grad;
  n.a = mean.id;
  n.b = log_std.id;
  n.aux = actions;
  const Eigen::RowVectorXd inv_var = (-2.0 * s.row(0).array()).exp();
  n.value.resize(m.rows(), 1);
  for (int i = 0; i < m.rows(); ++i) {
    const Eigen::RowVectorXd diff = actions.row(i) - m.row(i);
    n.value(i, 0) = -0.5 * (diff.array().square() * inv_var.array()).sum() -
                    s.row(0).sum() - 0.5 * m.cols() * kLog2Pi;
  }
  return push(std::move(n));
}

Tape::Var Tape::gaussian_kl_vs_fixed(Var mean, Var log_std, const Mat& old_mean,
                                     const Eigen::RowVectorXd& old_log_std) {
  const Mat& m = val(mean);
  const Mat& s = val(log_std);
  if (old_mean.rows() != m.rows() || old_mean.cols() != m.cols() ||
      old_log_std.size() != m.cols() || s.rows() != 1 || s.cols() != m.cols())
    throw ShapeMismatch("tape: gaussian kl shapes");
  Node n;
  n.op = Op::GaussKl;
  n.requires_grad = nodes_[mean.id].requires_grad || nodes_[log_std.id].requires_grad;
  n.a = mean.id;
  n.b = log_std.id;
  n.aux.resize(old_mean.rows() + 1, m.cols());
  n.aux.topRows(old_mean.rows()) = old_mean;
  n.aux.bottomRows(1) = old_log_std;
  const Eigen::ArrayXd s_new = s.row(0).transpose().array();
  const Eigen::ArrayXd s_old = old_log_std.transpose().array();
  const Eigen::ArrayXd var_ratio = (2.0 * (s_new - s_old)).exp();
  const Eigen::ArrayXd inv_var_old = (-2.0 * s_old).exp();
  n.value.resize(m.rows(), 1);
  for (int i = 0; i < m.rows(); ++i) {
    const Eigen::ArrayXd diff = (m.row(i) - old_mean.row(i)).transpose().array();
    n.value(i, 0) =
        (s_old - s_new + 0.5 * var_ratio + 0.5 * diff.square() * inv_var_old - 0.5)
            .sum();
  }
  return push(std::move(n));
}

Tape::Var Tape::gaussian_entropy(Var log_std, int rows) {
  const Mat& s = val(log_std);
  Node n;
  n.op = Op::GaussEntropy;
  n.requires_grad = nodes_[log_std.id].requires_grad;
  n.a = log_std.id;
  const double h = s.sum() + 0.5 * s.cols() * (kLog2Pi + 1.0);
  n.value = Mat::Constant(rows, 1, h);
  return push(std::move(n));
}

Tape::Mat& Tape::grad_buf(int id, const Mat& like) {
  if (grads_[id].size() == 0) grads_[id] = Mat::Zero(like.rows(), like.cols());
  return grads_[id];
}

Tape::Mat Tape::grad(Var v) const {
  if (grads_[v.id].size() == 0)
    return Mat::Zero(nodes_[v.id].value.rows(), nodes_[v.id].value.cols());
  return grads_[v.id];
}

void Tape::backward(Var out) {
  const Node& top = nodes_.at(out.id);
  if (top.value.rows() != 1 || top.value.cols() != 1)
    throw ShapeMismatch("tape: backward needs a scalar output");
  for (auto& g : grads_) g.resize(0, 0);
  grad_buf(out.id, top.value)(0, 0) = 1.0;

  for (int id = out.id; id >= 0; --id) {
    const Node& n = nodes_[id];
    if (!n.requires_grad || grads_[id].size() == 0) continue;
    const Mat& g = grads_[id];
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::Add:
        if (nodes_[n.a].requires_grad) grad_buf(n.a, nodes_[n.a].value) += g;
        if (nodes_[n.b].requires_grad) grad_buf(n.b, nodes_[n.b].value) += g;
        break;
      case Op::Sub:
        if (nodes_[n.a].requires_grad) grad_buf(n.a, nodes_[n.a].value) += g;
        if (nodes_[n.b].requires_grad) grad_buf(n.b, nodes_[n.b].value) -= g;
        break;
      case Op::Mul:
        if (nodes_[n.a].requires_grad)
          grad_buf(n.a, nodes_[n.a].value) += g.cwiseProduct(nodes_[n.b].value);
        if (nodes_[n.b].requires_grad)
          grad_buf(n.b, nodes_[n.b].value) += g.cwiseProduct(nodes_[n.a].value);
        break;
      case Op::Scale:
        grad_buf(n.a, nodes_[n.a].value) += n.c0 * g;
        break;
      case Op::AddConst:
        grad_buf(n.a, nodes_[n.a].value) += g;
        break;
      case Op::Exp:
        grad_buf(n.a, nodes_[n.a].value) += g.cwiseProduct(n.value);
        break;
      case Op::Log:
        grad_buf(n.a, nodes_[n.a].value) += g.cwiseQuotient(nodes_[n.a].value);
        break;
      case Op::Sqrt:
        grad_buf(n.a, nodes_[n.a].value) +=
            0.5 * g.cwiseQuotient(n.value);
        break;
      case Op::Abs:
        grad_buf(n.a, nodes_[n.a].value) +=
            g.cwiseProduct(nodes_[n.a].value.unaryExpr(
                [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }));
        break;
      case Op::Square:
        grad_buf(n.a, nodes_[n.a].value) +=
            2.0 * g.cwiseProduct(nodes_[n.a].value);
        break;
      case Op::Tanh:
        grad_buf(n.a, nodes_[n.a].value) +=
            g.cwiseProduct((1.0 - n.value.array().square()).matrix());
        break;
      case Op::Clamp: {
        const Mat& x = nodes_[n.a].value;
        grad_buf(n.a, x) += g.cwiseProduct(x.unaryExpr([&](double v) {
          return (v >= n.c0 && v <= n.c1) ? 1.0 : 0.0;
        }));
        break;
      }
      case Op::MinConst: {
        const Mat& x = nodes_[n.a].value;
        grad_buf(n.a, x) += g.cwiseProduct(
            x.unaryExpr([&](double v) { return v <= n.c0 ? 1.0 : 0.0; }));
        break;
      }
      case Op::MaxConst: {
        const Mat& x = nodes_[n.a].value;
        grad_buf(n.a, x) += g.cwiseProduct(
            x.unaryExpr([&](double v) { return v >= n.c0 ? 1.0 : 0.0; }));
        break;
      }
      case Op::Minimum: {
        const Mat& x = nodes_[n.a].value;
        const Mat& y = nodes_[n.b].value;
        if (nodes_[n.a].requires_grad) {
          Mat mask = (x.array() <= y.array()).cast<double>();
          grad_buf(n.a, x) += g.cwiseProduct(mask);
        }
        if (nodes_[n.b].requires_grad) {
          Mat mask = (x.array() > y.array()).cast<double>();
          grad_buf(n.b, y) += g.cwiseProduct(mask);
        }
        break;
      }
      case Op::Affine: {
        const Mat& x = nodes_[n.a].value;
        const Mat& w = nodes_[n.b].value;
        if (nodes_[n.a].requires_grad) grad_buf(n.a, x) += g * w;
        if (nodes_[n.b].requires_grad) grad_buf(n.b, w) += g.transpose() * x;
        if (nodes_[n.c].requires_grad)
          grad_buf(n.c, nodes_[n.c].value) += g.colwise().sum().transpose();
        break;
      }
      case Op::Sum:
        grad_buf(n.a, nodes_[n.a].value).array() += g(0, 0);
        break;
      case Op::Mean:
        grad_buf(n.a, nodes_[n.a].value).array() +=
            g(0, 0) / static_cast<double>(nodes_[n.a].value.size());
        break;
      case Op::MaxAll: {
        const Mat& x = nodes_[n.a].value;
        Mat& gx = grad_buf(n.a, x);
        int ri = 0, ci = 0;
        x.maxCoeff(&ri, &ci);
        gx(ri, ci) += g(0, 0);
        break;
      }
      case Op::RevCumsum: {
        const Mat& x = nodes_[n.a].value;
        Mat& gx = grad_buf(n.a, x);
        const int total = static_cast<int>(x.rows());
        for (std::size_t seg = 0; seg < n.segments.size(); ++seg) {
          const int start = n.segments[seg];
          const int end = seg + 1 < n.segments.size() ? n.segments[seg + 1] : total;
          double acc = 0.0;
          for (int i = start; i < end; ++i) {
            acc = g(i, 0) + n.c0 * acc;
            gx(i, 0) += acc;
          }
        }
        break;
      }
      case Op::CatLogProb: {
        const Mat& ls = n.aux;
        Mat& gz = grad_buf(n.a, nodes_[n.a].value);
        for (int i = 0; i < ls.rows(); ++i) {
          const double gi = g(i, 0);
          if (gi == 0.0) continue;
          gz.row(i) -= gi * ls.row(i).array().exp().matrix();
          gz(i, n.idx[i]) += gi;
        }
        break;
      }
      case Op::CatKl: {
        const int k = static_cast<int>(n.aux.cols()) / 2;
        const auto ls_new = n.aux.leftCols(k);
        const auto diff = n.aux.rightCols(k);
        Mat& gz = grad_buf(n.a, nodes_[n.a].value);
        for (int i = 0; i < n.aux.rows(); ++i) {
          const double gi = g(i, 0);
          if (gi == 0.0) continue;
          gz.row(i) += gi * (ls_new.row(i).array().exp() *
                             (diff.row(i).array() - n.value(i, 0)))
                               .matrix();
        }
        break;
      }
      case Op::CatEntropy: {
        const Mat& ls = n.aux;
        Mat& gz = grad_buf(n.a, nodes_[n.a].value);
        for (int i = 0; i < ls.rows(); ++i) {
          const double gi = g(i, 0);
          if (gi == 0.0) continue;
          gz.row(i) -= gi * (ls.row(i).array().exp() *
                             (ls.row(i).array() + n.value(i, 0)))
                               .matrix();
        }
        break;
      }
      case Op::GaussLogProb: {
        const Mat& m = nodes_[n.a].value;
        const Mat& s = nodes_[n.b].value;
        const Eigen::RowVectorXd inv_var = (-2.0 * s.row(0).array()).exp();
        const bool want_m = nodes_[n.a].requires_grad;
        const bool want_s = nodes_[n.b].requires_grad;
        Mat* gm = want_m ? &grad_buf(n.a, m) : nullptr;
        Mat* gs = want_s ? &grad_buf(n.b, s) : nullptr;
        for (int i = 0; i < m.rows(); ++i) {
          const double gi = g(i, 0);
          if (gi == 0.0) continue;
          const Eigen::RowVectorXd diff = n.aux.row(i) - m.row(i);
          if (gm) gm->row(i) += gi * diff.cwiseProduct(inv_var);
          if (gs)
            gs->row(0) +=
                gi * (diff.array().square() * inv_var.array() - 1.0).matrix();
        }
        break;
      }
      case Op::GaussKl: {
        const Mat& m = nodes_[n.a].value;
        const Mat& s = nodes_[n.b].value;
        const int rows = static_cast<int>(m.rows());
        const auto old_mean = n.aux.topRows(rows);
        const Eigen::RowVectorXd old_log_std = n.aux.bottomRows(1).row(0);
        const Eigen::RowVectorXd inv_var_old = (-2.0 * old_log_std.array()).exp();
        const Eigen::RowVectorXd var_ratio =
            (2.0 * (s.row(0) - old_log_std).array()).exp();
        const bool want_m = nodes_[n.a].requires_grad;
        const bool want_s = nodes_[n.b].requires_grad;
        Mat* gm = want_m ? &grad_buf(n.a, m) : nullptr;
        Mat* gs = want_s ? &grad_buf(n.b, s) : nullptr;
        for (int i = 0; i < rows; ++i) {
          const double gi = g(i, 0);
          if (gi == 0.0) continue;
          const Eigen::RowVectorXd diff = m.row(i) - old_mean.row(i);
          if (gm) gm->row(i) += gi * diff.cwiseProduct(inv_var_old);
          if (gs) gs->row(0) += gi * (var_ratio.array() - 1.0).matrix();
        }
        break;
      }
      case Op::GaussEntropy: {
        Mat& gs = grad_buf(n.a, nodes_[n.a].value);
        gs.array() += g.sum();
        break;
      }
    }
  }
}

}  // namespace apo::net
