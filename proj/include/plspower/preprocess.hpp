#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "plspower/types.hpp"

namespace plspower {

enum class PreprocessMode { raw, centered, autoscaled };

/// Observation matrix plus optional 2-class labels and the preprocessing
/// parameters applied to it, so simulated data can be kept in the same space.
struct Dataset {
  Matrix x;
  std::vector<int> labels;  // empty when absent; values in {1, 2}
  std::vector<std::string> variable_names;
  std::vector<std::string> label_mapping;  // original label text per class, when mapped
  Vector column_means;
  Vector column_scales;
  PreprocessMode mode = PreprocessMode::raw;
};

inline void validate_labels(const std::vector<int>& labels, Index n_rows) {
  if (static_cast<Index>(labels.size()) != n_rows)
    fail(errc::shape_mismatch, "labels: length does not match row count");
  int n1 = 0, n2 = 0;
  for (int g : labels) {
    if (g == 1)
      ++n1;
    else if (g == 2)
      ++n2;
    else
      fail(errc::invalid_input, "labels: values must be 1 or 2");
  }
  if (n1 == 0 || n2 == 0) fail(errc::degenerate_classes, "labels: both classes must be present");
}

inline std::pair<int, int> class_counts(const std::vector<int>& labels) {
  int n1 = 0, n2 = 0;
  for (int g : labels) (g == 1 ? n1 : n2)++;
  return {n1, n2};
}

/// Column means and the centered matrix.
inline std::pair<Matrix, Vector> center(const Matrix& x) {
  if (x.rows() < 2) fail(errc::too_few_rows, "center: need at least 2 rows");
  require_finite(x, "center");
  Vector means = x.colwise().mean();
  Matrix out = x.rowwise() - means.transpose();
  return {std::move(out), std::move(means)};
}

/// Per-column sample standard deviations (N-1 denominator).
inline Vector column_sds(const Matrix& x) {
  Vector means = x.colwise().mean();
  Matrix centered = x.rowwise() - means.transpose();
  return (centered.colwise().squaredNorm() / double(x.rows() - 1)).cwiseSqrt();
}

inline bool is_zero_variance(double sd, double mean) { return sd <= 1e-12 * (1.0 + std::abs(mean)); }

inline std::vector<Index> zero_variance_columns(const Matrix& x) {
  Vector means = x.colwise().mean();
  Vector sds = column_sds(x);
  std::vector<Index> out;
  for (Index j = 0; j < x.cols(); ++j)
    if (is_zero_variance(sds(j), means(j))) out.push_back(j);
  return out;
}

struct AutoscaleResult {
  Matrix x;
  Vector means;
  Vector scales;
};

/// Center and divide each column by its sample standard deviation.
/// Zero-variance columns are an error here; the CLI drops them up front.
inline AutoscaleResult autoscale(const Matrix& x) {
  if (x.rows() < 2) fail(errc::too_few_rows, "autoscale: need at least 2 rows");
  require_finite(x, "autoscale");
  Vector means = x.colwise().mean();
  Vector sds = column_sds(x);
  for (Index j = 0; j < x.cols(); ++j)
    if (is_zero_variance(sds(j), means(j)))
      fail(errc::zero_variance, "autoscale: zero-variance column " + std::to_string(j));
  Matrix out = (x.rowwise() - means.transpose()).array().rowwise() / sds.transpose().array();
  return {std::move(out), std::move(means), std::move(sds)};
}

inline void center_dataset(Dataset& d) {
  auto [x, means] = center(d.x);
  d.x = std::move(x);
  d.column_means = std::move(means);
  d.column_scales = Vector::Ones(d.x.cols());
  d.mode = PreprocessMode::centered;
}

inline void autoscale_dataset(Dataset& d) {
  AutoscaleResult r = autoscale(d.x);
  d.x = std::move(r.x);
  d.column_means = std::move(r.means);
  d.column_scales = std::move(r.scales);
  d.mode = PreprocessMode::autoscaled;
}

}  // namespace plspower
