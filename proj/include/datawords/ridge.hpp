#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "datawords/errors.hpp"

namespace datawords {

struct RidgeOptions {
  double lambda = 1.0;
  bool fit_intercept = true;
  /// Stop when ||r|| <= tolerance * ||rhs||.
  double tolerance = 1e-10;
  /// Iteration cap is iteration_factor * dimension.
  int iteration_factor = 10;
};

template <typename Scalar>
struct RidgeSolution {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
  Scalar bias = Scalar(0);
  Eigen::Index iterations = 0;
  Scalar relative_residual = Scalar(0);
};

/// Minimizes sum_i (w.x_i + b - y_i)^2 + lambda * ||w||^2 with b unpenalized.
///
/// Conjugate gradient on the normal equations of the column-centered design, applied
/// matrix-free so sparse designs stay sparse. Starts from zero; deterministic.
/// Works for any dense or sparse Eigen matrix type.
template <typename MatrixType, typename VectorType>
RidgeSolution<typename MatrixType::Scalar> solve_ridge(const MatrixType& X,
                                                       const Eigen::MatrixBase<VectorType>& y,
                                                       const RidgeOptions& options = {}) {
  using Scalar = typename MatrixType::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (n == 0) throw InputError("ridge: no samples");
  if (y.size() != n) throw InputError("ridge: design has " + std::to_string(n) +
                                      " rows but target has " + std::to_string(y.size()));
  if (!(options.lambda > 0.0) || !std::isfinite(options.lambda))
    throw InputError("ridge: lambda must be positive and finite");

  const Scalar lambda = Scalar(options.lambda);
  const bool center = options.fit_intercept;

  Vec mean_x = Vec::Zero(d);
  Scalar mean_y = Scalar(0);
  if (center) {
    mean_x = (X.transpose() * Vec::Ones(n)) / Scalar(n);
    mean_y = y.sum() / Scalar(n);
  }

  // (Xc^T Xc + lambda I) v, where Xc = X - 1 mean_x^T.
  auto apply = [&](const Vec& v) -> Vec {
    Vec xv = X * v;
    if (center) xv.array() -= mean_x.dot(v);
    Vec out = X.transpose() * xv;
    if (center) out -= mean_x * xv.sum();
    out += lambda * v;
    return out;
  };

  Vec target = y;
  if (center) target.array() -= mean_y;
  Vec rhs = X.transpose() * target;
  if (center) rhs -= mean_x * target.sum();

  RidgeSolution<Scalar> solution;
  solution.weights = Vec::Zero(d);

  const Scalar rhs_norm2 = rhs.squaredNorm();
  const Scalar stop2 = Scalar(options.tolerance * options.tolerance) * rhs_norm2;
  if (d > 0 && rhs_norm2 > Scalar(0)) {
    Vec& w = solution.weights;
    Vec r = rhs;
    Vec p = r;
    Scalar rs = r.squaredNorm();
    const Eigen::Index cap = std::max<Eigen::Index>(1, Eigen::Index(options.iteration_factor) * d);
    Eigen::Index it = 0;
    while (it < cap && rs > stop2) {
      const Vec ap = apply(p);
      const Scalar curvature = p.dot(ap);
      if (!(curvature > Scalar(0))) break;
      const Scalar alpha = rs / curvature;
      w += alpha * p;
      r -= alpha * ap;
      const Scalar rs_next = r.squaredNorm();
      p = r + (rs_next / rs) * p;
      rs = rs_next;
      ++it;
    }
    solution.iterations = it;
    solution.relative_residual = (rhs - apply(w)).norm() / std::sqrt(rhs_norm2);
  }

  solution.bias = center ? mean_y - mean_x.dot(solution.weights) : Scalar(0);
  return solution;
}

}  // namespace datawords
