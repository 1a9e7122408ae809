#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "cvlearn/gaussian.hpp"

namespace cvlearn {

using Complex = std::complex<double>;

/// Hard ceiling on component-list sizes unless a caller overrides it.
inline constexpr int kDefaultComponentLimit = 4096;

/// One complex-weighted complex Gaussian in a phase-space expansion.
struct GGComponent {
  Complex coeff;
  VectorXcd mean;
  MatrixXcd cov;
};

/// State whose Wigner function is a complex combination of complex
/// Gaussians. Coefficients sum to one; conjugate-symmetric component sets
/// keep the total Wigner function real.
struct GGState {
  int n = 0;
  std::vector<GGComponent> components;
};

/// Same shape as GGState but sub-normalized (coefficient sum <= 1).
struct GGEffect {
  int n = 0;
  std::vector<GGComponent> components;
};

struct GGBranch {
  Complex coeff;
  VectorXcd disp;
  MatrixXcd x_mat;
  MatrixXcd y_mat;
};

/// Branching channel: component (c_i, m_i, V_i) and branch (c_k, d_k, X_k, Y_k)
/// combine into (c_i c_k, X_k m_i + d_k, X_k V_i X_k^T + Y_k).
struct GGChannel {
  int n = 0;
  std::vector<GGBranch> branches;
};

struct GGDiagnostic {
  bool ok = false;
  double coeff_sum_error = 0.0;     // |sum c - 1| (or max(sum-1, 0) for effects)
  double min_re_cov_eigenvalue = 0.0;
  double uncertainty_min_eigenvalue = 0.0;
};

GGDiagnostic validate_gg_state(const GGState& state, double tol = 1e-7);
GGDiagnostic validate_gg_effect(const GGEffect& eff, double tol = 1e-7);
bool validate_gg_channel(const GGChannel& ch, double tol = 1e-7);

/// Evaluate the Wigner function at a phase-space point; throws if the
/// imaginary part of the component sum exceeds 1e-9 (relative to scale).
double gg_wigner_eval(const GGState& state, const VectorXd& point);

GGState gg_apply_channel(const GGState& state, const GGChannel& ch,
                         int max_components = kDefaultComponentLimit);

/// Acceptance probability of a GG effect after a GG channel:
/// (2 pi)^n sum_{ijk} c_i c'_j c''_k G_{m_out, V_out + V'_j}(m'_j).
double gg_outcome_probability(const GGState& state, const GGChannel& ch, const GGEffect& eff);

/// Per-term split of the probability sum into radial/angular pieces:
/// term_ijk = B2 * p e^{-R} / M * cos(I + A - theta), so that
/// B2 sum_ijk p e^{-R}/M cos(I + A - theta) reproduces the raw
/// (density-normalized) sum exactly.
struct GGTermDecomposition {
  struct Term {
    int i, j, k;
    double r_part;   // Re of half the exponent quadratic form
    double i_part;   // Im of half the exponent quadratic form
    double m_norm;   // |det 2 pi (V_out + V')|^{1/2}
    double a_angle;  // half the determinant phase (signed)
    double p_mass;   // |c c' c''| / B2
    double theta;    // phase of c c' c'' in [0, 2 pi)
  };
  std::vector<Term> terms;
  double b2 = 0.0;

  double recompose() const;
};

GGTermDecomposition gg_decompose_terms(const GGState& state, const GGChannel& ch,
                                       const GGEffect& eff);

/// Extremal constants of the term list: the largest |exponent quadratic
/// form|, the total coefficient mass, and the smallest normalization.
struct GGConstraintConstants {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
};

GGConstraintConstants gg_b_constants(const GGState& state, const GGChannel& ch,
                                     const GGEffect& eff);

// Embeddings of plain Gaussian objects as single-component GG objects.
GGState gg_from_gaussian(const GaussianState& state);
GGEffect gg_from_effect(const GeneralDyneEffect& eff);
GGChannel gg_from_channel(const GaussianChannel& ch);
GGEffect gg_effect_from_state(const GGState& state);

enum class CatSign { plus, minus };

/// Four-component even/odd coherent-superposition state.
GGState make_cat_state(Complex alpha, CatSign sign);

/// Square-lattice grid state: O(L^2) alternating bumps of width ~sqrt(eps),
/// peak radii up to 2L(1-2 eps), with cross-term components whose imaginary
/// mean parts nearly cancel the exponent quadratic form.
GGState make_gkp_state(double epsilon, int lattice, int max_components = kDefaultComponentLimit);

/// Photon-number state approximant built from a phase-averaged ring of
/// coherent components; exact up to aliasing at photon number 3K+1.
GGState make_fock_approx(int photons, double r, int max_components = kDefaultComponentLimit);

}  // namespace cvlearn
