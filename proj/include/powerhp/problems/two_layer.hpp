#pragma once

#include <cmath>
#include <optional>

#include <Eigen/QR>

#include "powerhp/problems/problem.hpp"

namespace powerhp {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Teacher-student two-layer ReLU network without biases:
///   L(W) = E_{x ~ N(0, I_k)} 1/2 (sum_j [w_j'x]_+ - sum_i [v_i'x]_+)^2.
/// Columns of `teacher` are the orthonormal v_i. Test and validation inputs are
/// stored one per row.
struct TwoLayerInstance {
  Matrix teacher;
  int width = 0;
  Matrix test_set;
  Matrix validation_set;

  int input_dim() const { return static_cast<int>(teacher.rows()); }
  // Number of student parameters n * k.
  Eigen::Index param_dim() const { return static_cast<Eigen::Index>(width) * teacher.rows(); }
};

// Student weights stored flat, row j holding w_j.
inline Eigen::Map<const RowMatrix> student_weights(const Vector& w, int n, int k) {
  if (w.size() != static_cast<Eigen::Index>(n) * k) {
    throw ConfigError("student weights: expected " + std::to_string(n * k) + " entries, got " +
                      std::to_string(w.size()));
  }
  return {w.data(), n, k};
}

inline double relu(double z) { return z > 0.0 ? z : 0.0; }

// r(x) = sum_j [w_j'x]_+ - sum_i [v_i'x]_+.
inline double tl_residual(const TwoLayerInstance& inst, const Eigen::Map<const RowMatrix>& W,
                          const Eigen::Ref<const Vector>& x) {
  return (W * x).unaryExpr(&relu).sum() - (inst.teacher.transpose() * x).unaryExpr(&relu).sum();
}

/// Mean over the rows of `batch` of 1/2 r(x)^2.
inline double tl_loss(const TwoLayerInstance& inst, const Vector& w, const Matrix& batch) {
  if (batch.rows() == 0) throw ConfigError("tl_loss: empty batch");
  if (batch.cols() != inst.input_dim()) throw ConfigError("tl_loss: input dimension mismatch");
  const auto W = student_weights(w, inst.width, inst.input_dim());
  double total = 0.0;
  for (Eigen::Index l = 0; l < batch.rows(); ++l) {
    const double r = tl_residual(inst, W, batch.row(l).transpose());
    total += 0.5 * r * r;
  }
  return total / static_cast<double>(batch.rows());
}

/// Loss gradient at one input: d/dw_j = r(x) 1[w_j'x > 0] x, flattened like w.
inline Vector tl_loss_grad(const TwoLayerInstance& inst, const Vector& w, const Vector& x) {
  const int k = inst.input_dim();
  const auto W = student_weights(w, inst.width, k);
  if (x.size() != k) throw ConfigError("tl_loss_grad: input dimension mismatch");
  const Vector pre = W * x;
  const double r = pre.unaryExpr(&relu).sum() - (inst.teacher.transpose() * x).unaryExpr(&relu).sum();
  Vector g(w.size());
  Eigen::Map<RowMatrix> G(g.data(), inst.width, k);
  for (int j = 0; j < inst.width; ++j) {
    if (pre[j] > 0.0) {
      G.row(j) = r * x.transpose();
    } else {
      G.row(j).setZero();
    }
  }
  return g;
}

// Vectorized 1/2 mean r(x)^2 over the rows of X; teacher_out holds sum_i [v_i'x]_+ per row.
inline double tl_mean_half_sq_residual(const Vector& w, int n, const Matrix& X,
                                       const Vector& teacher_out) {
  const auto W = student_weights(w, n, static_cast<int>(X.cols()));
  const Vector student_out = (X * W.transpose()).cwiseMax(0.0).rowwise().sum();
  return 0.5 * (student_out - teacher_out).squaredNorm() / static_cast<double>(X.rows());
}

inline Vector tl_teacher_outputs(const TwoLayerInstance& inst, const Matrix& X) {
  return (X * inst.teacher).cwiseMax(0.0).rowwise().sum();
}

/// Test error: 1/2 mean r(x)^2 over the frozen 5000-sample test set.
inline double tl_test_error(const TwoLayerInstance& inst, const Vector& w) {
  if (inst.test_set.rows() != 5000) {
    throw ConfigError("tl_test_error: test set must hold exactly 5000 samples, has " +
                      std::to_string(inst.test_set.rows()));
  }
  return tl_mean_half_sq_residual(w, inst.width, inst.test_set, tl_teacher_outputs(inst, inst.test_set));
}

struct TwoLayerDraw {
  TwoLayerInstance instance;
  Vector initial;
};

/// Teacher from the Q factor of a k x k standard-normal matrix, 5000 test inputs,
/// `validation_size` validation inputs, and a student initialization
/// w_j ~ N(0, I_k / k), drawn in that order from `rng`.
inline TwoLayerDraw tl_generate(int k, int n, RngStream& rng, int validation_size = 512,
                                int test_size = 5000) {
  if (k < 1) throw ConfigError("tl_generate: k must be >= 1");
  if (n < 1) throw ConfigError("tl_generate: n must be >= 1");
  auto draw = [&](int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int c = 0; c < cols; ++c) m(i, c) = rng.normal();
    return m;
  };
  TwoLayerDraw out;
  auto& inst = out.instance;
  const Matrix gaussian = draw(k, k);
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  inst.teacher = qr.householderQ() * Matrix::Identity(k, k);
  inst.width = n;
  inst.test_set = draw(test_size, k);
  inst.validation_set = draw(validation_size, k);
  out.initial = rng.normal_vector(static_cast<Eigen::Index>(n) * k, 1.0 / std::sqrt(static_cast<double>(k)));
  return out;
}

/// StochasticProblem view of the teacher-student task: f = -1/2 r(x)^2, fresh
/// Gaussian inputs per batch (one per row).
class TwoLayer {
 public:
  struct Batch {
    Matrix x;
    std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
  };

  explicit TwoLayer(TwoLayerInstance inst) : inst_(std::move(inst)) {
    if (inst_.teacher.rows() != inst_.teacher.cols() || inst_.width < 1) {
      throw ConfigError("TwoLayer: inconsistent instance shapes");
    }
    validation_teacher_ = tl_teacher_outputs(inst_, inst_.validation_set);
    if (inst_.test_set.rows() > 0) test_teacher_ = tl_teacher_outputs(inst_, inst_.test_set);
  }

  const TwoLayerInstance& instance() const { return inst_; }
  Eigen::Index dim() const { return inst_.param_dim(); }

  Batch sample_batch(RngStream& rng, std::size_t count) const {
    const int k = inst_.input_dim();
    Batch b{Matrix(static_cast<Eigen::Index>(count), k)};
    for (Eigen::Index i = 0; i < b.x.rows(); ++i)
      for (int c = 0; c < k; ++c) b.x(i, c) = rng.normal();
    return b;
  }

  double fitness(const Vector& w, const Batch& batch) const { return -tl_loss(inst_, w, batch.x); }

  double fitness_grad(const Vector& w, const Batch& batch, std::size_t j, Vector& grad) const {
    const int k = inst_.input_dim();
    const auto W = student_weights(w, inst_.width, k);
    const auto x = batch.x.row(static_cast<Eigen::Index>(j));
    const Vector pre = W * x.transpose();
    const double student = pre.unaryExpr(&relu).sum();
    const double teacher = (x * inst_.teacher).unaryExpr(&relu).sum();
    const double r = student - teacher;
    grad.resize(w.size());
    Eigen::Map<RowMatrix> G(grad.data(), inst_.width, k);
    for (int l = 0; l < inst_.width; ++l) {
      if (pre[l] > 0.0) {
        G.row(l) = -r * x;
      } else {
        G.row(l).setZero();
      }
    }
    return -0.5 * r * r;
  }

  double validation_score(const Vector& w) const {
    return -tl_mean_half_sq_residual(w, inst_.width, inst_.validation_set, validation_teacher_);
  }

  std::optional<BoundsHint> bounds_hint() const { return std::nullopt; }

  double metric(const Vector& w) const {
    if (inst_.test_set.rows() != 5000) return tl_test_error(inst_, w);  // throws with context
    return tl_mean_half_sq_residual(w, inst_.width, inst_.test_set, test_teacher_);
  }

 private:
  TwoLayerInstance inst_;
  Vector validation_teacher_;
  Vector test_teacher_;
};

}  // namespace powerhp
