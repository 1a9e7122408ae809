#pragma once

#include <vector>

#include "cvlearn/gaussian.hpp"
#include "cvlearn/ggstate.hpp"

namespace cvlearn {

/// Truncated Fock-space operator on n modes with per-mode dimension `cutoff`.
/// Mode index runs row-major: basis index = sum_i k_i * cutoff^(n-1-i).
struct FockOperator {
  int n = 0;
  int cutoff = 0;
  MatrixXcd mat;

  int dim() const { return static_cast<int>(mat.rows()); }
};

/// Williamson normal form V = S diag(nu_1, nu_1, ..., nu_n, nu_n) S^T with
/// S symplectic and nu_i >= 1/2 for physical covariances.
struct WilliamsonForm {
  MatrixXd s_mat;
  VectorXd nus;
};

WilliamsonForm williamson(const MatrixXd& cov);

/// Annihilation operator of mode `mode` on the truncated n-mode space.
MatrixXcd ladder_op(int n_modes, int cutoff, int mode);

/// Unitary matrix implementing the symplectic transform `s` on quadratures,
/// built from the polar split into an active and a passive exponential.
MatrixXcd symplectic_unitary(const MatrixXd& s, int n_modes, int cutoff);

/// Displacement unitary with quadrature displacement `m`.
MatrixXcd displacement_unitary(const VectorXd& m, int n_modes, int cutoff);

/// Density matrix of a Gaussian state, assembled as
/// displacement * symplectic unitary * thermal product * adjoints.
/// Throws CutoffError when the energy-based tail estimate needs more room;
/// callers that verify convergence themselves may disable the gate.
FockOperator fock_from_gaussian(const GaussianState& state, int cutoff, bool check_tail = true);

/// Operator whose Wigner function is the component sum of a GG state,
/// assembled from per-component holomorphic Fock amplitudes and then
/// symmetrized (deviation from Hermiticity is asserted small).
FockOperator fock_from_gg(const GGState& state, int cutoff);
FockOperator fock_from_gg_effect(const GGEffect& eff, int cutoff);

/// Born-rule probability tr(eff * rho), asserted real.
double fock_probability(const FockOperator& rho, const FockOperator& eff);

/// Gaussian channel action at truncation. Supported forms: Gaussian
/// unitaries (Y ~ 0, X symplectic) on any mode count, and single-mode
/// channels with X = kappa * rotation and isotropic Y, realized as
/// rotation + beamsplitter / two-mode-squeezer dilations with traced-out
/// vacuum ancillas. Anything else raises InvalidObjectError.
FockOperator fock_apply_gaussian_channel(const FockOperator& rho, const GaussianChannel& ch,
                                         int cutoff);

/// Moments of a Fock operator, for cross-checks against (m, V).
VectorXd fock_mean(const FockOperator& rho);
MatrixXd fock_covariance(const FockOperator& rho);
double fock_mean_photons(const FockOperator& rho);

/// Fock projector |k><k| as an effect.
FockOperator fock_number_projector(const std::vector<int>& k, int cutoff);

}  // namespace cvlearn
