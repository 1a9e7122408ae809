#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "cvlearn/gaussian.hpp"

namespace cvlearn {

/// Per-mode photon numbers of a photodetection outcome.
struct HermiteIndex {
  std::vector<int> k;

  int modes() const { return static_cast<int>(k.size()); }
  int total() const;
};

/// Coarse-grained photodetection effect: sum_k q_k |k><k| with q_k >= 0 and
/// sum q_k <= 1.
struct PhotoCountEffect {
  int cutoff = 0;
  std::map<std::vector<int>, double> weights;
};

bool validate_photocount_effect(const PhotoCountEffect& eff, double tol = 1e-9);

namespace hermite {

/// Values H_nu of the polynomial family with generating function
/// exp(t.b - t.A t / 2) = sum_nu t^nu / nu! H_nu(A, b), filled over the
/// lattice nu <= cap by the index recurrence
///   H_{nu+e_j} = b_j H_nu - sum_l A_{jl} nu_l H_{nu-e_l}.
class Table {
 public:
  Table(const MatrixXcd& a_mat, const VectorXcd& b_vec, const std::vector<int>& cap);

  std::complex<double> value(const std::vector<int>& nu) const;

 private:
  std::size_t offset(const std::vector<int>& nu) const;

  std::vector<int> cap_;
  std::vector<std::size_t> stride_;
  std::vector<std::complex<double>> values_;
};

}  // namespace hermite

/// Derivative-of-Gaussian polynomial
///   G_{0,V}(m)^{-1} prod_i (-d/dm_{2i-1})^{k_i} (-d/dm_{2i})^{k_i} G_{0,V}(m)
/// evaluated by the index recurrence with A = V^{-1}, b = V^{-1} m.
double hermite_multi(const MatrixXd& v_mat, const VectorXd& m, const HermiteIndex& k);

/// Complex continuation of hermite_multi used by the photon-number and
/// Fock-amplitude machinery.
std::complex<double> hermite_multi_complex(const MatrixXcd& v_mat, const VectorXcd& m,
                                           const HermiteIndex& k);

/// Probability of counting exactly k = (k_1, ..., k_n) photons on the output
/// of a Gaussian circuit. Negative round-off values are clamped to zero and
/// counted (see gp_clamp_count).
double gp_outcome_probability(const GaussianState& state, const GaussianChannel& ch,
                              const HermiteIndex& k);

/// Full table of photon-number probabilities for all outcomes with at most
/// `max_per_mode` photons in each mode, in lexicographic outcome order.
std::vector<std::pair<std::vector<int>, double>> gp_distribution(const GaussianState& state,
                                                                 const GaussianChannel& ch,
                                                                 int max_per_mode);

/// Weighted coarse-grained probability sum_k q_k P(k).
double gp_coarse_probability(const GaussianState& state, const GaussianChannel& ch,
                             const PhotoCountEffect& eff);

/// Upper bound on the probability that any mode of the circuit output holds
/// more than `max_per_mode` photons, from the per-mode factorial-moment
/// generating function (Chernoff over a small grid of tilt points).
double gp_tail_bound(const GaussianState& state, const GaussianChannel& ch, int max_per_mode);

/// Cutoff heuristic: per-mode mean photons + 8 standard deviations + 10.
int suggested_photon_cutoff(const GaussianState& state);

std::int64_t gp_clamp_count();
void gp_reset_clamp_count();

}  // namespace cvlearn
