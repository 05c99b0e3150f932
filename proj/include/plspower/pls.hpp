#pragma once

#include <algorithm>
#include <string>

#include "plspower/linalg.hpp"
#include "plspower/types.hpp"

namespace plspower {

/// Fitted PLS2 model. Scores have mutually orthogonal columns, weights are
/// orthonormal, and the bilinear factorizations
///   X = T P^T + E,   Y = T Q^T + F
/// hold to machine accuracy with T^T E = 0.
struct PlsModel {
  int components = 0;   // A
  Matrix weights;       // P x A, orthonormal columns
  Matrix scores;        // N x A
  Matrix x_loadings;    // P x A
  Matrix y_loadings;    // K x A
  Matrix x_residual;    // N x P
  Matrix y_residual;    // N x K
  Matrix coefficients;  // P x K
  Matrix x_train;       // training views retained for post-transformation
  Matrix y_train;       //   and for the alternative-hypothesis simulator
  Vector eigenvalues;   // lambda_a per component, non-increasing
};

namespace detail {

/// Shared deflation loop. When `supplied_weights` is null this is the
/// eigenvalue PLS2 algorithm: at step a the weight is the leading
/// eigenvector of E^T F F^T E, taken as the top right singular vector of
/// the K x P matrix F^T E (identical vector, much smaller problem; for
/// K = 1 it collapses to w = E^T f / |E^T f|). With supplied weights the
/// loop is the iterative deflation algorithm (IDA) used by
/// post-transformation. Either way each extracted score deflates both
/// blocks through the projector I - t (t^T t)^{-1} t^T.
inline PlsModel pls2_loop(const Matrix& x, const Matrix& y, int a_target,
                          const Matrix* supplied_weights) {
  const Index n = x.rows(), p = x.cols(), k = y.cols();
  if (y.rows() != n) fail(errc::shape_mismatch, "fit: X and Y row counts differ");
  if (a_target < 1 || a_target > static_cast<int>(std::min(n - 1, p)))
    fail(errc::rank_exceeded, "fit: component count outside [1, min(N-1, P)]");
  require_finite(x, "fit");
  require_finite(y, "fit");

  const double x_energy = x.squaredNorm();
  const double y_energy = y.squaredNorm();
  const double lambda_cap = x_energy * y_energy;  // upper bound for any lambda_a

  Matrix e = x, f = y;
  Matrix w(p, a_target), t(n, a_target);
  Vector lambda(a_target);

  for (int a = 0; a < a_target; ++a) {
    if (e.squaredNorm() <= 1e-24 * x_energy)
      fail(errc::rank_exceeded, "fit: X rank exhausted at component " + std::to_string(a + 1));

    Vector w_a(p);
    if (supplied_weights != nullptr) {
      w_a = supplied_weights->col(a);
    } else if (k == 1) {
      w_a = e.transpose() * f.col(0);
      double norm = w_a.norm();
      if (norm > 0.0) w_a /= norm;
      Index imax = 0;
      w_a.cwiseAbs().maxCoeff(&imax);
      if (w_a(imax) < 0.0) w_a = -w_a;
    } else {
      SvdResult dec = svd(f.transpose() * e);
      w_a = dec.v.col(0);
    }

    Vector t_a = e * w_a;
    double lam = (f.transpose() * t_a).squaredNorm();  // = w^T E^T F F^T E w
    if (supplied_weights == nullptr) {
      // Supplied (IDA) weights may legitimately have lambda = 0: the
      // Y-orthogonal directions of post-transformation do. The exhaustion
      // check only applies when the loop chose the weight itself.
      const double floor = (a == 0) ? 1e-12 * lambda_cap : 1e-12 * lambda(0);
      if (!(lam > floor))
        fail(errc::component_collapse,
             "fit: signal exhausted at component " + std::to_string(a + 1));
    }
    double tt = t_a.squaredNorm();
    if (tt <= 1e-28 * x_energy)
      fail(errc::component_collapse,
           "fit: degenerate score at component " + std::to_string(a + 1));

    e.noalias() -= t_a * ((t_a.transpose() * e) / tt);
    f.noalias() -= t_a * ((t_a.transpose() * f) / tt);
    w.col(a) = w_a;
    t.col(a) = t_a;
    lambda(a) = lam;
  }

  PlsModel model;
  model.components = a_target;
  model.weights = std::move(w);
  model.scores = std::move(t);
  model.eigenvalues = std::move(lambda);
  model.x_residual = std::move(e);
  model.y_residual = std::move(f);

  // Loadings regress each block on the scores: P = X^T T (T^T T)^{-1}.
  Matrix gram = model.scores.transpose() * model.scores;
  auto gram_solver = gram.ldlt();
  model.x_loadings = gram_solver.solve(model.scores.transpose() * x).transpose();
  model.y_loadings = gram_solver.solve(model.scores.transpose() * y).transpose();

  // B = W (W^T X^T X W)^{-1} W^T X^T Y, evaluated through XW to stay O(N P A).
  Matrix xw = x * model.weights;
  model.coefficients =
      model.weights * (xw.transpose() * xw).ldlt().solve(xw.transpose() * y);

  model.x_train = x;
  model.y_train = y;
  return model;
}

}  // namespace detail

/// Eigenvalue PLS2 with `components` extractions. X and Y are expected
/// column-centered.
inline PlsModel fit_pls2(const Matrix& x, const Matrix& y, int components) {
  return detail::pls2_loop(x, y, components, nullptr);
}

/// Iterative deflation algorithm: same loop with externally supplied weight
/// columns (used with W G by post-transformation). Eigenvalues are the
/// Rayleigh quotients of the supplied directions.
inline PlsModel fit_ida(const Matrix& x, const Matrix& y, const Matrix& weights) {
  if (weights.rows() != x.cols() || weights.cols() < 1)
    fail(errc::shape_mismatch, "fit_ida: weight matrix must be P x A");
  return detail::pls2_loop(x, y, static_cast<int>(weights.cols()), &weights);
}

/// Model restricted to its first `components` extractions. The loop is
/// greedy, so this equals a direct fit with the smaller component count.
inline PlsModel prefix_model(const PlsModel& model, int components) {
  if (components < 1 || components > model.components)
    fail(errc::invalid_input, "prefix_model: component count out of range");
  if (components == model.components) return model;
  PlsModel m = fit_ida(model.x_train, model.y_train, model.weights.leftCols(components));
  m.eigenvalues = model.eigenvalues.head(components);
  return m;
}

inline Matrix predict(const PlsModel& model, const Matrix& x_new) {
  if (x_new.cols() != model.coefficients.rows())
    fail(errc::shape_mismatch, "predict: column count does not match training data");
  require_finite(x_new, "predict");
  return x_new * model.coefficients;
}

/// (X^T X)^{-1} X^T Y through a rank-revealing QR solve; the reference
/// estimator PLS must reproduce when A = P on full-rank data.
inline Matrix ols_oracle(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows()) fail(errc::shape_mismatch, "ols_oracle: row counts differ");
  require_finite(x, "ols_oracle");
  require_finite(y, "ols_oracle");
  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  qr.setThreshold(1e-12);
  if (qr.rank() < x.cols()) fail(errc::singular, "ols_oracle: X^T X is singular");
  return qr.solve(y);
}

struct ExplainedVariance {
  Vector per_component;  // |t_a p_a^T|_F^2 / |X|_F^2
  double residual = 0.0;
};

inline ExplainedVariance explained_variance(const PlsModel& model) {
  const double total = model.x_train.squaredNorm();
  ExplainedVariance ev;
  ev.per_component.resize(model.components);
  for (int a = 0; a < model.components; ++a) {
    ev.per_component(a) = model.scores.col(a).squaredNorm() *
                          model.x_loadings.col(a).squaredNorm() / total;
  }
  ev.residual = model.x_residual.squaredNorm() / total;
  return ev;
}

}  // namespace plspower
