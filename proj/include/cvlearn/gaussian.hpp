#pragma once

#include <Eigen/Dense>
#include <complex>

#include "cvlearn/errors.hpp"

namespace cvlearn {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Quadrature convention used throughout: hbar = 1, quadrature ordering
// (x_1, p_1, ..., x_n, p_n), vacuum covariance I/2, coherent amplitude
// alpha has mean sqrt(2) * (Re alpha, Im alpha).

/// Symplectic form: block-diagonal 2n x 2n with 2x2 blocks [[0,1],[-1,0]].
MatrixXd symplectic_form(int n_modes);

/// Default absolute tolerance for positivity checks.
inline constexpr double kPsdTol = 1e-9;

/// Condition-number ceiling beyond which covariance inversion is refused.
inline constexpr double kMaxCondition = 1e12;

struct Diagnostic {
  bool ok = false;
  double min_eigenvalue = 0.0;
};

/// n-mode Gaussian state: mean vector and symmetric covariance matrix.
struct GaussianState {
  VectorXd mean;
  MatrixXd cov;

  int modes() const { return static_cast<int>(mean.size()) / 2; }
};

/// Gaussian channel (d, X, Y): mean -> X m + d, cov -> X V X^T + Y.
struct GaussianChannel {
  VectorXd disp;
  MatrixXd x_mat;
  MatrixXd y_mat;

  int modes() const { return static_cast<int>(disp.size()) / 2; }
};

/// General-dyne effect: outcome vector m' and measurement covariance V'.
/// Normalized so that it acts as a trace-one operator; homodyne-like
/// effects are the small-V' limit, heterodyne is V' = I/2.
struct GeneralDyneEffect {
  VectorXd outcome;
  MatrixXd cov;

  int modes() const { return static_cast<int>(outcome.size()) / 2; }
};

/// Smallest eigenvalue of the Hermitian matrix M + (i/2) Omega.
/// The uncertainty relation in this convention reads V + (i/2) Omega >= 0
/// (vacuum saturates it with eigenvalue exactly 0).
double uncertainty_min_eigenvalue(const MatrixXd& m);

Diagnostic validate_state(const GaussianState& state, double tol = kPsdTol);
Diagnostic validate_channel(const GaussianChannel& ch, double tol = kPsdTol);
Diagnostic validate_effect(const GeneralDyneEffect& eff, double tol = kPsdTol);

GaussianState apply_gaussian_channel(const GaussianState& state, const GaussianChannel& ch);

/// Channel equal to applying `first` and then `second`.
GaussianChannel compose_channels(const GaussianChannel& second, const GaussianChannel& first);

GaussianChannel identity_channel(int n_modes);
GaussianState vacuum_state(int n_modes);
GaussianState coherent_state(std::complex<double> alpha);
GeneralDyneEffect heterodyne_effect(const VectorXd& outcome);

/// Normalized Gaussian density exp(-(r-m)^T V^-1 (r-m)/2) / sqrt(det(2 pi V)).
double gaussian_density(const VectorXd& mean, const MatrixXd& cov, const VectorXd& point);

/// Outcome density of a general-dyne measurement after a channel,
/// i.e. the value of the output Gaussian with covariance V_out + V'
/// evaluated at the recorded outcome. Integrates to one over outcomes.
double gaussian_outcome_density(const GaussianState& state, const GaussianChannel& ch,
                                const GeneralDyneEffect& eff);

/// Born-rule acceptance probability of the binary effect: (2 pi)^n times
/// the outcome density. Always in [0, 1] for valid inputs.
double gaussian_effect_probability(const GaussianState& state, const GaussianChannel& ch,
                                   const GeneralDyneEffect& eff);

/// Mean photon number summed over modes: (tr V + |m|^2 - n) / 2.
double mean_photon_number(const GaussianState& state);

}  // namespace cvlearn
