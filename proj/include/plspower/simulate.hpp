#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "plspower/linalg.hpp"
#include "plspower/plsc.hpp"
#include "plspower/rng.hpp"

namespace plspower {

/// Score structure used by the simulator: the fitted PLS scores, extended
/// with leading principal components of the X-residual whenever the PLS part
/// alone explains less than the configured share of |X|_F^2. The appended
/// scores are automatically orthogonal to the PLS scores because T^T E = 0.
struct AugmentedScoreModel {
  Matrix scores;    // T_aug, N x A'
  Matrix loadings;  // P_aug, P x A'
  Matrix residual;  // E_res, N x P (what the factorization leaves over)
  std::vector<int> labels;
  Matrix gram;  // S_target = T_aug^T T_aug
  int pls_components = 0;
  int pca_components = 0;
  double explained = 0.0;  // |T_aug P_aug^T|_F^2 / |X|_F^2
  bool threshold_reached = true;
};

inline AugmentedScoreModel augment_with_residual_pca(const PlscModel& model,
                                                     double variance_threshold) {
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0))
    fail(errc::invalid_input, "augment_with_residual_pca: threshold must lie in (0, 1]");

  const Matrix& x = model.pls.x_train;
  const double total = x.squaredNorm();
  AugmentedScoreModel aug;
  aug.labels = model.labels;
  aug.pls_components = model.pls.components;
  aug.explained = 1.0 - model.pls.x_residual.squaredNorm() / total;

  if (aug.explained >= variance_threshold) {
    aug.scores = model.pls.scores;
    aug.loadings = model.pls.x_loadings;
    aug.residual = model.pls.x_residual;
  } else {
    SvdResult dec = svd(model.pls.x_residual);
    int available = 0;
    for (Index i = 0; i < dec.s.size(); ++i)
      if (dec.s(i) > 1e-12 * dec.s(0)) ++available;
    int take = 0;
    double explained = aug.explained;
    while (take < available && explained < variance_threshold) {
      explained += dec.s(take) * dec.s(take) / total;
      ++take;
    }
    aug.pca_components = take;
    aug.explained = explained;
    aug.threshold_reached = explained >= variance_threshold;

    const int a = model.pls.components;
    aug.scores.resize(x.rows(), a + take);
    aug.scores.leftCols(a) = model.pls.scores;
    aug.scores.rightCols(take) = dec.u.leftCols(take) * dec.s.head(take).asDiagonal();
    aug.loadings.resize(x.cols(), a + take);
    aug.loadings.leftCols(a) = model.pls.x_loadings;
    aug.loadings.rightCols(take) = dec.v.leftCols(take);
    aug.residual =
        model.pls.x_residual - aug.scores.rightCols(take) * dec.v.leftCols(take).transpose();
  }
  aug.gram = aug.scores.transpose() * aug.scores;
  return aug;
}

/// Gaussian product-kernel density over the support rows; per-dimension
/// bandwidth h_d = sigma_d * n^(-1/(d+4)) (Scott's rule), floored for
/// constant dimensions.
struct KdeModel {
  Matrix support;
  Vector bandwidths;
};

inline KdeModel kde_fit(const Matrix& t) {
  if (t.rows() < 2) fail(errc::too_few_rows, "kde_fit: need at least 2 support rows");
  require_finite(t, "kde_fit");
  const double n = static_cast<double>(t.rows());
  const double d = static_cast<double>(t.cols());
  const double factor = std::pow(n, -1.0 / (d + 4.0));
  Vector sds = column_sds(t);
  Vector means = t.colwise().mean();
  KdeModel kde;
  kde.support = t;
  kde.bandwidths.resize(t.cols());
  for (Index j = 0; j < t.cols(); ++j) {
    double h = sds(j) * factor;
    if (!(h > 0.0)) h = 1e-8 * (1.0 + std::abs(means(j)));
    kde.bandwidths(j) = h;
  }
  return kde;
}

/// One draw = uniformly chosen support row + diagonal Gaussian noise.
inline Matrix kde_sample(const KdeModel& kde, int n, std::mt19937_64& rng) {
  if (n < 1) fail(errc::invalid_input, "kde_sample: need n >= 1");
  std::uniform_int_distribution<Index> pick(0, kde.support.rows() - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix out(n, kde.support.cols());
  for (Index i = 0; i < n; ++i) {
    Index row = pick(rng);
    for (Index j = 0; j < kde.support.cols(); ++j)
      out(i, j) = kde.support(row, j) + kde.bandwidths(j) * gauss(rng);
  }
  return out;
}

/// Rotates the raw draws onto the target Gram matrix: with the SVD
/// T_raw S = U D V^T, the result U V^T S^{1/2} satisfies T^T T = S exactly
/// up to round-off while staying row-aligned with the draws.
inline Matrix orthonormalize_scores(const Matrix& t_raw, const Matrix& gram_target) {
  if (t_raw.rows() < t_raw.cols())
    fail(errc::rank_deficient, "orthonormalize_scores: fewer rows than score dimensions");
  if (gram_target.rows() != t_raw.cols() || gram_target.cols() != t_raw.cols())
    fail(errc::shape_mismatch, "orthonormalize_scores: Gram target has wrong shape");
  SvdResult dec = svd(t_raw * gram_target);
  if (dec.s(dec.s.size() - 1) <= 1e-12 * dec.s(0))
    fail(errc::rank_deficient, "orthonormalize_scores: raw scores are rank-deficient");
  return dec.u * dec.v.transpose() * spd_sqrt(gram_target);
}

/// n rows drawn uniformly with replacement from the rows of e_hat.
inline Matrix bootstrap_residuals(const Matrix& e_hat, int n, std::mt19937_64& rng) {
  if (e_hat.rows() < 1) fail(errc::invalid_input, "bootstrap_residuals: empty residual matrix");
  if (n < 1) fail(errc::invalid_input, "bootstrap_residuals: need n >= 1");
  std::uniform_int_distribution<Index> pick(0, e_hat.rows() - 1);
  Matrix out(n, e_hat.cols());
  for (Index i = 0; i < n; ++i) out.row(i) = e_hat.row(pick(rng));
  return out;
}

/// Projects the bootstrap rows onto the complement of span(t_tilde), so the
/// simulated residual satisfies T~^T E~ = 0.
inline Matrix orthogonalize_residuals(const Matrix& e_raw, const Matrix& t_tilde) {
  if (e_raw.rows() != t_tilde.rows())
    fail(errc::shape_mismatch, "orthogonalize_residuals: row counts differ");
  SvdResult dec = svd(t_tilde);
  if (t_tilde.rows() < t_tilde.cols() || dec.s(dec.s.size() - 1) <= 1e-12 * dec.s(0))
    fail(errc::rank_deficient, "orthogonalize_residuals: rank-deficient score matrix");
  return e_raw - dec.u * (dec.u.transpose() * e_raw);
}

/// Similarity of two column-centered configurations. With equal row counts
/// the classic form trace(XX^T YY^T)-normalized is used; with different row
/// counts the P x P cross-product matrices are compared instead (the form
/// the simulator diagnostics always use, see rv_cross_product).
inline double rv_coefficient(const Matrix& x, const Matrix& y);
inline double rv_cross_product(const Matrix& x, const Matrix& y);
inline double procrustes_index(const Matrix& x, const Matrix& y);
inline double procrustes_cross_product(const Matrix& x, const Matrix& y);

namespace detail {

inline double rv_from_cross_products(const Matrix& sx, const Matrix& sy) {
  double num = (sx.cwiseProduct(sy)).sum();  // trace(Sx Sy) for symmetric inputs
  double den = sx.norm() * sy.norm();
  if (den <= 0.0) fail(errc::rv_undefined, "rv: zero matrix");
  return num / den;
}

/// Procrustes correlation of configurations a and b: nuclear norm of b^T a
/// over the geometric mean of the total variations.
inline double procrustes_from_configurations(const Matrix& a, const Matrix& b) {
  double den = std::sqrt(a.squaredNorm() * b.squaredNorm());
  if (den <= 0.0) fail(errc::rv_undefined, "procrustes: zero matrix");
  SvdResult dec = svd(b.transpose() * a);
  return dec.s.sum() / den;
}

}  // namespace detail

inline double rv_coefficient(const Matrix& x, const Matrix& y) {
  if (x.rows() == y.rows())
    return detail::rv_from_cross_products(x * x.transpose(), y * y.transpose());
  return rv_cross_product(x, y);
}

inline double rv_cross_product(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols())
    fail(errc::shape_mismatch, "rv_cross_product: column counts differ");
  return detail::rv_from_cross_products(x.transpose() * x, y.transpose() * y);
}

inline double procrustes_index(const Matrix& x, const Matrix& y) {
  if (x.rows() == y.rows() && x.cols() == y.cols())
    return detail::procrustes_from_configurations(x, y);
  return procrustes_cross_product(x, y);
}

inline double procrustes_cross_product(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols())
    fail(errc::shape_mismatch, "procrustes_cross_product: column counts differ");
  return detail::procrustes_from_configurations(x.transpose() * x, y.transpose() * y);
}

struct SimulationDiagnostics {
  double gram_error = 0.0;    // |T~^T T~ - S| / |S|
  double cross_error = 0.0;   // |T~^T E~|_F
  double rv = 0.0;            // cross-product-space RV against the pilot
  double procrustes = 0.0;    // cross-product-space Procrustes against the pilot
  double signal_ratio = 0.0;  // |T~ P^T|_F / |E~|_F
  double pilot_signal_ratio = 0.0;
};

struct SimulatedDataset {
  Matrix x;
  std::vector<int> labels;  // n1 rows of class 1 followed by n2 of class 2
  Matrix scores;            // T~
  Matrix residual;          // E~
  SimulationDiagnostics diagnostics;
};

/// Draws a dataset under the alternative: per-class KDE sampling of the
/// augmented pilot scores, rotation onto the pilot Gram matrix, residual
/// bootstrap projected orthogonal to the scores, then X~ = T~ P^T + E~.
/// Rank-deficient draws are resampled up to 10 times.
inline SimulatedDataset simulate_dataset(const PlscModel& model, const AugmentedScoreModel& aug,
                                         int n1, int n2, std::mt19937_64& rng) {
  if (n1 < 2 || n2 < 2)
    fail(errc::invalid_input, "simulate_dataset: need at least 2 simulated rows per class");

  std::vector<Index> rows1, rows2;
  for (std::size_t i = 0; i < aug.labels.size(); ++i)
    (aug.labels[i] == 1 ? rows1 : rows2).push_back(static_cast<Index>(i));
  if (rows1.size() < 2 || rows2.size() < 2)
    fail(errc::too_few_rows, "simulate_dataset: each pilot class needs >= 2 rows");

  Matrix support1(rows1.size(), aug.scores.cols()), support2(rows2.size(), aug.scores.cols());
  for (std::size_t i = 0; i < rows1.size(); ++i) support1.row(i) = aug.scores.row(rows1[i]);
  for (std::size_t i = 0; i < rows2.size(); ++i) support2.row(i) = aug.scores.row(rows2[i]);
  KdeModel kde1 = kde_fit(support1);
  KdeModel kde2 = kde_fit(support2);

  SimulatedDataset sim;
  bool ok = false;
  for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
    Matrix t_raw(n1 + n2, aug.scores.cols());
    t_raw.topRows(n1) = kde_sample(kde1, n1, rng);
    t_raw.bottomRows(n2) = kde_sample(kde2, n2, rng);
    try {
      sim.scores = orthonormalize_scores(t_raw, aug.gram);
      ok = true;
    } catch (const Error& e) {
      if (e.code() != errc::rank_deficient) throw;
    }
  }
  if (!ok)
    fail(errc::simulation_failed,
         "simulate_dataset: rank-deficient scores after 10 resampling attempts");

  Matrix e_raw = bootstrap_residuals(aug.residual, n1 + n2, rng);
  sim.residual = orthogonalize_residuals(e_raw, sim.scores);
  sim.x = sim.scores * aug.loadings.transpose() + sim.residual;
  sim.labels.assign(static_cast<std::size_t>(n1), 1);
  sim.labels.insert(sim.labels.end(), static_cast<std::size_t>(n2), 2);

  Matrix gram = sim.scores.transpose() * sim.scores;
  sim.diagnostics.gram_error = (gram - aug.gram).norm() / aug.gram.norm();
  sim.diagnostics.cross_error = (sim.scores.transpose() * sim.residual).norm();
  sim.diagnostics.rv = rv_cross_product(model.pls.x_train, sim.x);
  sim.diagnostics.procrustes = procrustes_cross_product(model.pls.x_train, sim.x);
  double sim_residual_norm = sim.residual.norm();
  double pilot_residual_norm = aug.residual.norm();
  sim.diagnostics.signal_ratio = sim_residual_norm > 0.0
                                     ? (sim.scores * aug.loadings.transpose()).norm() / sim_residual_norm
                                     : std::numeric_limits<double>::infinity();
  sim.diagnostics.pilot_signal_ratio =
      pilot_residual_norm > 0.0
          ? (aug.scores * aug.loadings.transpose()).norm() / pilot_residual_norm
          : std::numeric_limits<double>::infinity();
  return sim;
}

}  // namespace plspower
