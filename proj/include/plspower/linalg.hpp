#pragma once

#include <string>

#include "plspower/types.hpp"

namespace plspower {

struct SvdResult {
  Matrix u;  // left singular vectors, orthonormal columns
  Vector s;  // singular values, descending
  Matrix v;  // right singular vectors, orthonormal columns
};

struct EigResult {
  Vector values;   // descending
  Matrix vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

namespace detail {

/// Sign convention shared by svd and sym_eig: the largest-magnitude entry of
/// each v-column is made non-negative (u flipped in lockstep). Removes the
/// sign ambiguity so factorizations are bit-stable across identical calls.
inline void fix_signs(Matrix* u, Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index imax = 0;
    v.col(j).cwiseAbs().maxCoeff(&imax);
    if (v(imax, j) < 0.0) {
      v.col(j) = -v.col(j);
      if (u != nullptr && j < u->cols()) u->col(j) = -u->col(j);
    }
  }
}

}  // namespace detail

/// Thin SVD with deterministic signs.
inline SvdResult svd(const Matrix& m) {
  if (m.size() == 0) fail(errc::invalid_input, "svd: empty matrix");
  require_finite(m, "svd");
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult r{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  detail::fix_signs(&r.u, r.v);
  return r;
}

/// All eigenpairs of a symmetric matrix, values descending, svd sign
/// convention. Symmetrizes as (M + M^T)/2 before solving.
inline EigResult sym_eig(const Matrix& m) {
  if (m.size() == 0 || m.rows() != m.cols())
    fail(errc::invalid_input, "sym_eig: matrix must be square and non-empty");
  require_finite(m, "sym_eig");
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale))
    fail(errc::invalid_input, "sym_eig: matrix is not symmetric");
  Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> dec(sym);
  if (dec.info() != Eigen::Success) fail(errc::invalid_input, "sym_eig: solver failed");
  EigResult r;
  r.values = dec.eigenvalues().reverse();
  r.vectors = dec.eigenvectors().rowwise().reverse().eval();
  detail::fix_signs(nullptr, r.vectors);
  return r;
}

/// Q = I - T (T^T T)^{-1} T^T, the projector onto the orthogonal complement
/// of span(T). T must have full column rank.
inline Matrix orth_projector_complement(const Matrix& t) {
  if (t.size() == 0) fail(errc::invalid_input, "orth_projector_complement: empty matrix");
  SvdResult dec = svd(t);
  if (t.rows() < t.cols() || dec.s(dec.s.size() - 1) <= 1e-12 * dec.s(0))
    fail(errc::rank_deficient, "orth_projector_complement: rank-deficient input");
  const Index n = t.rows();
  return Matrix::Identity(n, n) - dec.u * dec.u.transpose();
}

/// Symmetric square root of a symmetric PSD matrix. Eigenvalues in
/// [-1e-10, 0) are treated as round-off and clamped to zero.
inline Matrix spd_sqrt(const Matrix& m) {
  EigResult eig = sym_eig(m);
  if (eig.values(eig.values.size() - 1) < -1e-10)
    fail(errc::not_psd, "spd_sqrt: matrix has a negative eigenvalue");
  Vector roots = eig.values.cwiseMax(0.0).cwiseSqrt();
  Matrix r = eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

/// Number of singular values above the relative rank cutoff.
inline int numeric_rank(const Matrix& m, double rel_tol = 1e-12) {
  SvdResult dec = svd(m);
  if (dec.s.size() == 0 || dec.s(0) <= 0.0) return 0;
  int r = 0;
  for (Index i = 0; i < dec.s.size(); ++i)
    if (dec.s(i) > rel_tol * dec.s(0)) ++r;
  return r;
}

}  // namespace plspower
