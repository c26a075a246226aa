#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace apo::net {

/// Reverse-mode tape over dense double matrices, covering exactly the ops the
/// policy/value losses need.  Per-sample vectors are (n, 1) matrices and
/// scalars are (1, 1); reductions return scalars.  backward() seeds the
/// requested scalar with 1 and accumulates gradients into every
/// differentiable leaf.
class Tape {
 public:
  using Mat = Eigen::MatrixXd;

  struct Var {
    int id = -1;
  };

  Var input(Mat value);           // differentiable leaf
  Var constant(Mat value);        // fixed data
  Var scalar_const(double value);

  // arithmetic
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double c);
  Var add_const(Var a, double c);

  // elementwise functions
  Var exp(Var a);
  Var log(Var a);
  Var sqrt(Var a);
  Var abs(Var a);
  Var square(Var a);
  Var tanh(Var a);
  Var clamp(Var a, double lo, double hi);
  Var min_const(Var a, double c);
  Var max_const(Var a, double c);
  Var minimum(Var a, Var b);

  // structure
  Var affine(Var x, Var w, Var b);  // x (n,i), w (o,i), b (o,1) -> (n,o)

  // reductions
  Var sum(Var a);
  Var mean(Var a);
  Var max_all(Var a);  // subgradient to the first maximal element

  /// Replicates a (1,1) scalar into an (rows, 1) column.
  Var broadcast_col(Var a, int rows);

  /// y_i = x_i + gamma * y_{i+1} within each segment; segment_starts holds the
  /// first index of every segment in increasing order.
  Var reverse_discounted_cumsum(Var x, const std::vector<int>& segment_starts,
                                double gamma);

  // distribution composites, one row per sample
  Var categorical_log_prob(Var logits, const Eigen::VectorXi& actions);
  Var categorical_kl_vs_fixed(Var logits, const Mat& old_logits);  // KL(new||old)
  Var categorical_entropy(Var logits);
  Var gaussian_log_prob(Var mean, Var log_std, const Mat& actions);
  Var gaussian_kl_vs_fixed(Var mean, Var log_std, const Mat& old_mean,
                           const Eigen::RowVectorXd& old_log_std);
  Var gaussian_entropy(Var log_std, int rows);

  const Mat& val(Var v) const;
  double scalar(Var v) const;

  /// Runs the reverse sweep from a (1,1) output.
  void backward(Var out);

  /// Gradient of the last backward() with respect to a leaf (zeros if the
  /// leaf was never reached).
  Mat grad(Var v) const;

 private:
  enum class Op : std::uint8_t {
    Leaf, Add, Sub, Mul, Scale, AddConst, Exp, Log, Sqrt, Abs, Square, Tanh,
    Clamp, MinConst, MaxConst, Minimum, Affine, Sum, Mean, MaxAll, RevCumsum,
    CatLogProb, CatKl, CatEntropy, GaussLogProb, GaussKl, GaussEntropy,
  };

  struct Node {
    Op op = Op::Leaf;
    bool requires_grad = false;
    int a = -1, b = -1, c = -1;
    double c0 = 0.0, c1 = 0.0;
    Mat value;
    Mat aux;             // op-specific cached data (e.g. softmax probs)
    Eigen::VectorXi idx;
    std::vector<int> segments;
  };

  Var push(Node node);
  Mat& grad_buf(int id, const Mat& like);

  std::vector<Node> nodes_;
  std::vector<Mat> grads_;
};

}  // namespace apo::net
