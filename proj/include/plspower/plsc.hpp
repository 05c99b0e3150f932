#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "plspower/post_transform.hpp"
#include "plspower/preprocess.hpp"

namespace plspower {

/// Compositional coding of 2-class labels. Each row of Z is a 2-part
/// composition, (1-eps, eps) for class 1 and (eps, 1-eps) for class 2; Z_bar
/// is the closed vector of column-wise geometric means, and f0 is the ilr
/// image of the simplex difference Z (-) Z_bar under the contrast
/// H = [1/sqrt(2), -1/sqrt(2)].
struct CompositionCoding {
  double epsilon = 0.0;
  Matrix z;                     // N x 2
  Eigen::RowVector2d z_bar;     // simplex mean
  Eigen::RowVector2d contrast;  // H
  Vector f0;                    // N
};

inline CompositionCoding build_coding(const std::vector<int>& labels, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    fail(errc::invalid_epsilon, "build_coding: epsilon must lie in (0, 1/2)");
  validate_labels(labels, static_cast<Index>(labels.size()));

  const Index n = static_cast<Index>(labels.size());
  CompositionCoding c;
  c.epsilon = epsilon;
  c.contrast << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  c.z.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    if (labels[i] == 1)
      c.z.row(i) << 1.0 - epsilon, epsilon;
    else
      c.z.row(i) << epsilon, 1.0 - epsilon;
  }

  // Closed geometric column means; closure cancels inside the log contrast
  // (H 1 = 0), so f0 row n is H (ln z_n - ln z_bar).
  Eigen::RowVector2d log_gm = c.z.array().log().colwise().mean();
  Eigen::RowVector2d gm = log_gm.array().exp();
  c.z_bar = gm / gm.sum();

  c.f0.resize(n);
  for (Index i = 0; i < n; ++i) {
    double d1 = std::log(c.z(i, 0)) - std::log(c.z_bar(0));
    double d2 = std::log(c.z(i, 1)) - std::log(c.z_bar(1));
    c.f0(i) = c.contrast(0) * d1 + c.contrast(1) * d2;
  }
  return c;
}

struct PlscModel {
  CompositionCoding coding;
  std::vector<int> labels;
  PlsModel pls;  // fitted on (X, f0), so K = 1
  PtModel pt;    // predictive score block has a single column
};

/// PLS classification: regress the ilr-coded response on a centered X and
/// post-transform. Deterministic given the solver sign conventions.
inline PlscModel fit_plsc(const Matrix& x, const std::vector<int>& labels, int components,
                          double epsilon) {
  validate_labels(labels, x.rows());
  PlscModel m;
  m.coding = build_coding(labels, epsilon);
  m.labels = labels;
  m.pls = fit_pls2(x, m.coding.f0, components);
  m.pt = post_transform(m.pls);
  return m;
}

/// Class with the larger back-transformed probability. Evaluated as the log
/// difference of the two simplex coordinates of ilr^{-1}(x^T B) (+) Z_bar,
/// which avoids exp overflow; ties go to class 1. The decision does not
/// depend on the epsilon the model was fitted with.
inline std::vector<int> predict_class(const PlscModel& model, const Matrix& x_new) {
  Matrix s = predict(model.pls, x_new);  // N x 1
  const double sqrt2 = std::sqrt(2.0);
  const double log_prior = std::log(model.coding.z_bar(0)) - std::log(model.coding.z_bar(1));
  std::vector<int> out(static_cast<std::size_t>(s.rows()));
  for (Index i = 0; i < s.rows(); ++i) {
    double log_odds = sqrt2 * s(i, 0) + log_prior;
    out[static_cast<std::size_t>(i)] = log_odds >= 0.0 ? 1 : 2;
  }
  return out;
}

/// Matthews correlation coefficient of a 2-class confusion table; 0 when any
/// marginal is empty.
inline double mcc(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) fail(errc::shape_mismatch, "mcc: length mismatch");
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    int t = truth[i], pr = predicted[i];
    if ((t != 1 && t != 2) || (pr != 1 && pr != 2))
      fail(errc::invalid_input, "mcc: labels must be 1 or 2");
    if (t == 1 && pr == 1) ++tp;
    if (t == 2 && pr == 2) ++tn;
    if (t == 2 && pr == 1) ++fp;
    if (t == 1 && pr == 2) ++fn;
  }
  double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom <= 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

}  // namespace plspower
