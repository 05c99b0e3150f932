#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace plspower {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Error categories surfaced by the library. Every throw site uses one of
/// these so callers (and the CLI exit-code mapping) can dispatch on kind.
enum class errc {
  invalid_input,
  shape_mismatch,
  rank_deficient,
  not_psd,
  too_few_rows,
  zero_variance,
  rank_exceeded,
  component_collapse,
  singular,
  degenerate_classes,
  invalid_epsilon,
  too_few_per_class,
  no_predictive_direction,
  post_transform_inconsistent,
  simulation_failed,
  rv_undefined,
  power_run_failed,
  malformed_csv,
  missing_label_column,
  more_than_two_classes,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require_finite(const Matrix& m, const char* where) {
  if (!m.allFinite()) fail(errc::invalid_input, std::string(where) + ": non-finite entries");
}

}  // namespace plspower
