#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "plspower/parallel.hpp"
#include "plspower/plsc.hpp"
#include "plspower/rng.hpp"

namespace plspower {

enum class StatKind { mcc, score_t, r2 };

inline const char* stat_name(StatKind kind) {
  switch (kind) {
    case StatKind::mcc: return "mcc";
    case StatKind::score_t: return "score";
    case StatKind::r2: return "r2";
  }
  return "?";
}

struct TestStatistic {
  StatKind kind;
  double value;
};

/// Pooled-variance two-sample t on `values` split by class. Degenerate
/// pooled variance maps to +/-inf when the means differ and 0 otherwise.
inline double pooled_t(const Vector& values, const std::vector<int>& labels) {
  validate_labels(labels, values.size());
  double n1 = 0, n2 = 0, m1 = 0, m2 = 0;
  for (Index i = 0; i < values.size(); ++i) {
    if (labels[static_cast<std::size_t>(i)] == 1) {
      ++n1;
      m1 += values(i);
    } else {
      ++n2;
      m2 += values(i);
    }
  }
  if (n1 < 2 || n2 < 2) fail(errc::too_few_per_class, "pooled_t: each class needs >= 2 values");
  m1 /= n1;
  m2 /= n2;
  double ss = 0.0;
  for (Index i = 0; i < values.size(); ++i) {
    double m = labels[static_cast<std::size_t>(i)] == 1 ? m1 : m2;
    ss += (values(i) - m) * (values(i) - m);
  }
  double sp = std::sqrt(ss / (n1 + n2 - 2.0));
  double span = values.cwiseAbs().maxCoeff();
  if (sp <= 1e-13 * span || span == 0.0) {
    if (std::abs(m1 - m2) <= 1e-13 * span || span == 0.0) return 0.0;
    return m1 > m2 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
  }
  return (m1 - m2) / (sp * std::sqrt(1.0 / n1 + 1.0 / n2));
}

inline double squared_pearson(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) fail(errc::shape_mismatch, "squared_pearson: length mismatch");
  double ma = a.mean(), mb = b.mean();
  double cov = 0, va = 0, vb = 0;
  for (Index i = 0; i < a.size(); ++i) {
    double da = a(i) - ma, db = b(i) - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va <= 0.0 || vb <= 0.0) return 0.0;  // constant vector convention
  double r2 = (cov * cov) / (va * vb);
  return std::min(r2, 1.0);
}

namespace detail {

/// Full-data statistics from one fitted model; all three derive from the
/// same fit, which is what makes sharing them across a permutation cheap.
inline double statistic_from_model(const PlscModel& model, const Matrix& x,
                                   const std::vector<int>& labels, StatKind kind) {
  switch (kind) {
    case StatKind::mcc:
      return mcc(labels, predict_class(model, x));
    case StatKind::score_t:
      return std::abs(pooled_t(model.pt.predictive_scores.col(0), labels));
    case StatKind::r2:
      return squared_pearson(model.coding.f0, predict(model.pls, x).col(0));
  }
  return 0.0;
}

}  // namespace detail

inline TestStatistic stat_mcc(const Matrix& x, const std::vector<int>& labels, int components,
                              double epsilon) {
  PlscModel m = fit_plsc(x, labels, components, epsilon);
  return {StatKind::mcc, detail::statistic_from_model(m, x, labels, StatKind::mcc)};
}

inline TestStatistic stat_score_t(const Matrix& x, const std::vector<int>& labels, int components,
                                  double epsilon) {
  auto [n1, n2] = class_counts(labels);
  if (n1 < 2 || n2 < 2)
    fail(errc::too_few_per_class, "stat_score_t: each class needs >= 2 observations");
  PlscModel m = fit_plsc(x, labels, components, epsilon);
  return {StatKind::score_t, detail::statistic_from_model(m, x, labels, StatKind::score_t)};
}

inline TestStatistic stat_r2(const Matrix& x, const std::vector<int>& labels, int components,
                             double epsilon) {
  PlscModel m = fit_plsc(x, labels, components, epsilon);
  return {StatKind::r2, detail::statistic_from_model(m, x, labels, StatKind::r2)};
}

struct PermutationResult {
  TestStatistic observed;           // transformation 1 is the identity
  std::vector<double> null_values;  // J values, [0] = observed
  double p_value = 1.0;
  int permutations = 0;  // J
  std::uint64_t seed = 0;
};

/// Right-tailed permutation p-value with the identity transform included:
/// #{ S_j >= S_1 } / J, ties counted toward rejection. Comparisons treat
/// inf >= inf as a tie, matching the degenerate score-t convention.
inline double pvalue_from_null(const std::vector<double>& null_values) {
  if (null_values.empty()) fail(errc::invalid_input, "pvalue_from_null: empty null set");
  const double observed = null_values.front();
  std::size_t count = 0;
  for (double v : null_values)
    if (v >= observed) ++count;
  return static_cast<double>(count) / static_cast<double>(null_values.size());
}

/// Permutation tests for several statistics over a shared set of label
/// permutations and shared per-permutation fits. Permutation j > 1 shuffles
/// the labels with substream (seed, permutation, j); the full model is refit
/// per permutation. A fit collapsing on some permutation contributes
/// statistic 0 there.
inline std::vector<PermutationResult> permutation_pvalues(
    const Matrix& x, const std::vector<int>& labels, const std::vector<StatKind>& kinds,
    int components, double epsilon, int j_total, std::uint64_t seed, bool parallel = false) {
  if (j_total < 2) fail(errc::invalid_input, "permutation_pvalues: need J >= 2");
  if (kinds.empty()) fail(errc::invalid_input, "permutation_pvalues: no statistics requested");
  validate_labels(labels, x.rows());

  std::vector<std::vector<double>> values(kinds.size(),
                                          std::vector<double>(static_cast<std::size_t>(j_total)));
  auto run_one = [&](std::size_t j) {
    std::vector<int> labels_j = labels;
    if (j > 0) {
      auto rng = substream(seed, {stream_tag::permutation, static_cast<std::uint64_t>(j)});
      std::shuffle(labels_j.begin(), labels_j.end(), rng);
    }
    try {
      PlscModel model = fit_plsc(x, labels_j, components, epsilon);
      for (std::size_t k = 0; k < kinds.size(); ++k)
        values[k][j] = detail::statistic_from_model(model, x, labels_j, kinds[k]);
    } catch (const Error& e) {
      if (e.code() != errc::component_collapse) throw;
      for (std::size_t k = 0; k < kinds.size(); ++k) values[k][j] = 0.0;
    }
  };

  if (parallel)
    parallel_for(static_cast<std::size_t>(j_total), run_one);
  else
    for (std::size_t j = 0; j < static_cast<std::size_t>(j_total); ++j) run_one(j);

  std::vector<PermutationResult> out(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    out[k].observed = {kinds[k], values[k][0]};
    out[k].null_values = std::move(values[k]);
    out[k].p_value = pvalue_from_null(out[k].null_values);
    out[k].permutations = j_total;
    out[k].seed = seed;
  }
  return out;
}

inline PermutationResult permutation_pvalue(const Matrix& x, const std::vector<int>& labels,
                                            int components, StatKind kind, double epsilon,
                                            int j_total, std::uint64_t seed,
                                            bool parallel = false) {
  return permutation_pvalues(x, labels, {kind}, components, epsilon, j_total, seed, parallel)
      .front();
}

/// Bonferroni family-wise adjustment over the A tested components.
inline double adjust_bonferroni(double p, int components) {
  if (!(p >= 0.0 && p <= 1.0)) fail(errc::invalid_input, "adjust_bonferroni: p outside [0, 1]");
  if (components < 1) fail(errc::invalid_input, "adjust_bonferroni: need A >= 1");
  return std::min(p * static_cast<double>(components), 1.0);
}

}  // namespace plspower
