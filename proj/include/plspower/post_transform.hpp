#pragma once

#include <string>
#include <utility>

#include "plspower/linalg.hpp"
#include "plspower/pls.hpp"

namespace plspower {

/// Post-transformed view of a PLS model: the score space rotated into a
/// predictive block T_P (one column per rank(Y) direction) and a
/// Y-orthogonal block T_O. Coefficients and residuals match the base model.
struct PtModel {
  PlsModel base;
  Matrix rotation;               // G, A x A orthogonal
  Matrix predictive_scores;      // T_P, N x r
  Matrix orthogonal_scores;      // T_O, N x (A - r)
  Matrix predictive_x_loadings;  // P_P, P x r
  Matrix orthogonal_x_loadings;  // P_O, P x (A - r)
  Matrix predictive_y_loadings;  // Q_P, K x r
};

namespace detail {

struct GSplit {
  Matrix g;             // [G_o | G_p]
  int orthogonal = 0;   // M = number of Y-orthogonal columns
};

/// Rotation G from the weight-space geometry: the right singular vectors V
/// of Y^T X W span the weight directions correlated with Y; eigenvectors of
/// I - V V^T with positive eigenvalues give the orthogonal block G_o, and
/// eigenvectors of I - G_o G_o^T with positive eigenvalues complete the
/// predictive block.
inline GSplit compute_g_split(const Matrix& x, const Matrix& y, const Matrix& weights) {
  const Index a = weights.cols();
  Matrix yxw = y.transpose() * x * weights;  // K x A
  SvdResult dec = svd(yxw);
  const double smax = dec.s.size() > 0 ? dec.s(0) : 0.0;
  if (!(smax > 1e-12 * x.norm() * y.norm()))
    fail(errc::no_predictive_direction, "compute_g: Y^T X W is numerically zero");
  int rank = 0;
  for (Index i = 0; i < dec.s.size(); ++i)
    if (dec.s(i) > 1e-12 * smax) ++rank;

  Matrix v_r = dec.v.leftCols(rank);
  EigResult eig_o = sym_eig(Matrix::Identity(a, a) - v_r * v_r.transpose());
  int m = 0;
  for (Index i = 0; i < eig_o.values.size(); ++i)
    if (eig_o.values(i) > 1e-10) ++m;  // projector spectrum: 1s then 0s

  GSplit out;
  out.orthogonal = m;
  Matrix g_o = eig_o.vectors.leftCols(m);
  Matrix pred_proj = Matrix::Identity(a, a) - g_o * g_o.transpose();
  EigResult eig_p = sym_eig(pred_proj);
  int n_pred = 0;
  for (Index i = 0; i < eig_p.values.size(); ++i)
    if (eig_p.values(i) > 1e-10) ++n_pred;
  if (n_pred != static_cast<int>(a) - m)
    fail(errc::post_transform_inconsistent, "compute_g: inconsistent block dimensions");

  out.g.resize(a, a);
  out.g.leftCols(m) = g_o;
  out.g.rightCols(n_pred) = eig_p.vectors.leftCols(n_pred);
  if ((out.g.transpose() * out.g - Matrix::Identity(a, a)).cwiseAbs().maxCoeff() > 1e-8)
    fail(errc::post_transform_inconsistent, "compute_g: G is not orthogonal");
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace detail

inline Matrix compute_g(const Matrix& x, const Matrix& y, const Matrix& weights) {
  return detail::compute_g_split(x, y, weights).g;
}

/// Reruns the deflation loop with weights W G (orthogonal block first),
/// splits scores and loadings, fixes predictive signs so each T_P column
/// correlates non-negatively with the first Y column, and verifies that the
/// transformation preserved coefficients and residuals.
inline PtModel post_transform(const PlsModel& model) {
  const Matrix& x = model.x_train;
  const Matrix& y = model.y_train;
  const int a = model.components;

  detail::GSplit split = detail::compute_g_split(x, y, model.weights);
  const int m = split.orthogonal;
  const int r = a - m;

  PlsModel ida = fit_ida(x, y, model.weights * split.g);

  PtModel pt;
  pt.rotation = split.g;
  pt.orthogonal_scores = ida.scores.leftCols(m);
  pt.predictive_scores = ida.scores.rightCols(r);
  pt.orthogonal_x_loadings = ida.x_loadings.leftCols(m);
  pt.predictive_x_loadings = ida.x_loadings.rightCols(r);
  pt.predictive_y_loadings = y.transpose() * pt.predictive_scores *
                             (pt.predictive_scores.transpose() * pt.predictive_scores)
                                 .ldlt()
                                 .solve(Matrix::Identity(r, r));

  // Deterministic predictive signs: flip score, loading, and G columns
  // together so cov(t_p, y_1) >= 0.
  for (int j = 0; j < r; ++j) {
    if (pt.predictive_scores.col(j).dot(y.col(0)) < 0.0) {
      pt.predictive_scores.col(j) *= -1.0;
      pt.predictive_x_loadings.col(j) *= -1.0;
      pt.predictive_y_loadings.col(j) *= -1.0;
      pt.rotation.col(m + j) *= -1.0;
    }
  }

  const double x_scale = 1.0 + x.cwiseAbs().maxCoeff();
  const double y_scale = 1.0 + y.cwiseAbs().maxCoeff();
  const double b_scale = 1.0 + model.coefficients.cwiseAbs().maxCoeff();
  if (detail::max_abs_diff(ida.coefficients, model.coefficients) > 1e-10 * b_scale ||
      detail::max_abs_diff(ida.x_residual, model.x_residual) > 1e-10 * x_scale ||
      detail::max_abs_diff(ida.y_residual, model.y_residual) > 1e-10 * y_scale)
    fail(errc::post_transform_inconsistent,
         "post_transform: coefficients or residuals not preserved");
  if (m > 0 && (pt.orthogonal_scores.transpose() * y).cwiseAbs().maxCoeff() >
                   1e-8 * (1.0 + x.norm() * y.norm()))
    fail(errc::post_transform_inconsistent, "post_transform: T_O not orthogonal to Y");
  if (r != numeric_rank(y))
    fail(errc::post_transform_inconsistent,
         "post_transform: predictive block does not match rank(Y)");

  pt.base = model;
  return pt;
}

}  // namespace plspower
