#pragma once

#include <cstdint>
#include <random>
#include <tuple>

#include "cvlearn/gaussian.hpp"

namespace cvlearn {

/// Random symplectic matrix exp(Omega h) with a symmetric generator h whose
/// entries are uniform in [-scale, scale].
MatrixXd random_symplectic(int n_modes, std::mt19937_64& rng, double scale);

/// Random state that is valid by construction (Williamson form with
/// symplectic eigenvalues >= 1/2) and obeys |m| <= energy_bound and
/// tr V <= energy_bound.
GaussianState random_state(int n_modes, double energy_bound, std::mt19937_64& rng);

/// Random CPTP channel with X = kappa * (random symplectic) and Y built with
/// exactly enough isotropic noise for complete positivity plus a random
/// positive-semidefinite excess.
GaussianChannel random_channel(int n_modes, double energy_bound, std::mt19937_64& rng);

GeneralDyneEffect random_effect(int n_modes, double energy_bound, std::mt19937_64& rng);

struct PhysicalInstance {
  GaussianState state;
  GaussianChannel channel;
  GeneralDyneEffect effect;
};

/// Deterministic-per-seed valid (state, channel, effect) triple.
PhysicalInstance random_physical_instance(int n_modes, double energy_bound, std::uint64_t seed);

}  // namespace cvlearn
