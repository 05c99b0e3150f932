#pragma once

#include <random>
#include <string>
#include <vector>

#include "plspower/linalg.hpp"
#include "plspower/preprocess.hpp"
#include "plspower/rng.hpp"

namespace plspower {

/// Synthetic 2-class pilot: a latent block of `signal_vars` covariates tied
/// to class membership next to `noise_vars` pure-noise covariates. `mu`
/// separates the two class centers in the latent space; mu = 0 gives a null
/// dataset whose labels carry no information.
struct PilotSpec {
  int n_per_class = 5;
  int signal_vars = 5;
  int noise_vars = 25;
  int latent_components = 2;
  double mu = 5.0;
  std::uint64_t seed = 0;
};

inline Dataset gen_pilot(const PilotSpec& spec) {
  if (spec.n_per_class < 2) fail(errc::invalid_input, "gen_pilot: need >= 2 rows per class");
  if (spec.signal_vars < 1 || spec.noise_vars < 0 || spec.latent_components < 1)
    fail(errc::invalid_input, "gen_pilot: dimensions must be positive");
  if (spec.latent_components > spec.signal_vars)
    fail(errc::invalid_input, "gen_pilot: latent components exceed signal variables");
  if (spec.mu < 0.0) fail(errc::invalid_input, "gen_pilot: mu must be non-negative");

  auto rng = substream(spec.seed, {stream_tag::pilot});
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const int n = 2 * spec.n_per_class;

  // Latent class clouds: class 1 at the origin, class 2 at mu * 1.
  Matrix clouds(n, spec.latent_components);
  for (Index i = 0; i < clouds.rows(); ++i) {
    double shift = i < spec.n_per_class ? 0.0 : spec.mu;
    for (Index j = 0; j < clouds.cols(); ++j) clouds(i, j) = shift + gauss(rng);
  }
  auto [clouds_centered, cloud_means] = center(clouds);
  SvdResult cloud_pca = svd(clouds_centered);
  Matrix latent_scores =
      cloud_pca.u.leftCols(spec.latent_components) *
      cloud_pca.s.head(spec.latent_components).asDiagonal();

  // Loadings = principal directions of a uniform(0,1) seed matrix.
  Matrix seed_block(spec.latent_components, spec.signal_vars);
  for (Index i = 0; i < seed_block.rows(); ++i)
    for (Index j = 0; j < seed_block.cols(); ++j) seed_block(i, j) = uniform(rng);
  auto [seed_centered, seed_means] = center(seed_block);
  SvdResult seed_pca = svd(seed_centered);
  Matrix latent_loadings = seed_pca.v.leftCols(spec.latent_components);

  Dataset d;
  d.x.resize(n, spec.signal_vars + spec.noise_vars);
  d.x.leftCols(spec.signal_vars) = latent_scores * latent_loadings.transpose();
  for (Index i = 0; i < d.x.rows(); ++i)
    for (Index j = spec.signal_vars; j < d.x.cols(); ++j) d.x(i, j) = gauss(rng);

  d.labels.assign(static_cast<std::size_t>(spec.n_per_class), 1);
  d.labels.insert(d.labels.end(), static_cast<std::size_t>(spec.n_per_class), 2);
  d.variable_names.reserve(static_cast<std::size_t>(d.x.cols()));
  for (Index j = 0; j < d.x.cols(); ++j) d.variable_names.push_back("v" + std::to_string(j + 1));
  return d;
}

}  // namespace plspower
