#pragma once

// Seeded generators of random instances: complex blocks, PSD matrices,
// physical two-mode Gaussian states and valid channel moment sets.

#include <random>

#include "fading/channel.hpp"
#include "fading/gaussian_state.hpp"
#include "fading/types.hpp"

namespace fading::random {

using Rng = std::mt19937_64;

std::complex<double> complex_normal(Rng& rng);
/// Uniform on the closed unit disk.
std::complex<double> unit_disk(Rng& rng);
Matrix2c<double> complex_matrix(Rng& rng);
Vector2c<double> complex_vector(Rng& rng);
/// Hermitian 2x2 with independent normal entries.
Matrix2c<double> hermitian_matrix(Rng& rng);
/// M = R^dag R with R a random complex 4x4.
Matrix4c<double> psd_matrix(Rng& rng);
Matrix2c<double> unitary(Rng& rng);

struct StateOptions {
  double max_thermal{1.0};   // thermal occupation drawn in [0, max_thermal]
  double max_squeezing{1.2}; // single- and two-mode squeezing in [0, max]
  double max_mean{2.0};      // |<a>|, |<b>| in [0, max_mean]; 0 for none
};

/// A Gaussian state from a random Bogoliubov transformation (passive
/// unitaries, single-mode squeezers and a two-mode squeezer) applied to a
/// thermal product state.
GaussianState<double> gaussian_state(Rng& rng, const StateOptions& options = {});

/// Two-mode squeezed thermal state with local phase rotations: thermal
/// occupations in [0, max_thermal] on each mode, two-mode squeezing in
/// [0, max_squeezing], no local squeezing.
GaussianState<double> squeezed_thermal_state(Rng& rng, const StateOptions& options = {});

enum class ChannelKind {
  general,       // arbitrary joint distribution
  uncorrelated,  // T_a, T_b independent
  correlated,    // T_a = T_b
};

/// Moments of a random discrete distribution on [0, 1]^2 with `atoms`
/// support points, so every invariant holds by construction.
ChannelMoments<double> channel_moments(Rng& rng, ChannelKind kind,
                                       int atoms = 4);

}  // namespace fading::random
