#include "cvlearn/photocount.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace cvlearn {

namespace {

std::atomic<std::int64_t> g_clamp_count{0};

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// Per-mode 2x2 blocks of the map from (alpha, alpha-bar) pairs to
/// quadrature coordinates: S2 = [[1, 1], [-i, i]] / sqrt(2).
MatrixXcd pairing_transform(int n_modes) {
  MatrixXcd s = MatrixXcd::Zero(2 * n_modes, 2 * n_modes);
  const double r = 1.0 / std::numbers::sqrt2;
  const std::complex<double> i(0.0, 1.0);
  for (int m = 0; m < n_modes; ++m) {
    s(2 * m, 2 * m) = r;
    s(2 * m, 2 * m + 1) = r;
    s(2 * m + 1, 2 * m) = -i * r;
    s(2 * m + 1, 2 * m + 1) = i * r;
  }
  return s;
}

struct CountingKernel {
  MatrixXd g_mat;   // I - W^{-1}
  VectorXd h_vec;   // W^{-1} m_out
  double p_zero;    // probability of the all-zero outcome
  int n_modes;
};

CountingKernel counting_kernel(const GaussianState& state, const GaussianChannel& ch) {
  const Diagnostic ds = validate_state(state);
  if (!ds.ok) throw InvalidObjectError("photon counting requires a valid input state");
  const Diagnostic dc = validate_channel(ch);
  if (!dc.ok) throw InvalidObjectError("photon counting requires a valid channel");

  const GaussianState out = apply_gaussian_channel(state, ch);
  const int dim = static_cast<int>(out.mean.size());
  CountingKernel k;
  k.n_modes = dim / 2;
  const MatrixXd w = out.cov + 0.5 * MatrixXd::Identity(dim, dim);
  const MatrixXd w_inv = w.ldlt().solve(MatrixXd::Identity(dim, dim));
  k.g_mat = MatrixXd::Identity(dim, dim) - w_inv;
  k.h_vec = w_inv * out.mean;
  k.p_zero = std::pow(2.0 * std::numbers::pi, k.n_modes) * gaussian_density(out.mean, w, VectorXd::Zero(dim));
  return k;
}

}  // namespace

int HermiteIndex::total() const { return std::accumulate(k.begin(), k.end(), 0); }

bool validate_photocount_effect(const PhotoCountEffect& eff, double tol) {
  if (eff.cutoff < 0) return false;
  double total = 0.0;
  for (const auto& [outcome, q] : eff.weights) {
    if (q < 0.0) return false;
    for (int ki : outcome) {
      if (ki < 0 || ki > eff.cutoff) return false;
    }
    total += q;
  }
  return total <= 1.0 + tol;
}

namespace hermite {

Table::Table(const MatrixXcd& a_mat, const VectorXcd& b_vec, const std::vector<int>& cap)
    : cap_(cap) {
  const int dim = static_cast<int>(cap.size());
  if (a_mat.rows() != dim || a_mat.cols() != dim || b_vec.size() != dim) {
    throw ShapeError("hermite table: parameter dimensions do not match index cap");
  }
  stride_.resize(dim);
  std::size_t total = 1;
  for (int j = dim - 1; j >= 0; --j) {
    stride_[j] = total;
    total *= static_cast<std::size_t>(cap[j] + 1);
  }
  values_.assign(total, std::complex<double>(0.0, 0.0));
  values_[0] = 1.0;

  std::vector<int> nu(dim, 0);
  for (std::size_t idx = 1; idx < total; ++idx) {
    // Advance the mixed-radix counter.
    for (int j = dim - 1; j >= 0; --j) {
      if (++nu[j] <= cap[j]) break;
      nu[j] = 0;
    }
    int lead = 0;
    while (nu[lead] == 0) ++lead;
    // H_{nu} with nu = prev + e_lead.
    const std::size_t prev = idx - stride_[lead];
    std::complex<double> acc = b_vec(lead) * values_[prev];
    for (int l = 0; l < dim; ++l) {
      const int nl = nu[l] - (l == lead ? 1 : 0);
      if (nl > 0) {
        acc -= a_mat(lead, l) * static_cast<double>(nl) * values_[prev - stride_[l]];
      }
    }
    values_[idx] = acc;
  }
}

std::size_t Table::offset(const std::vector<int>& nu) const {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    idx += stride_[j] * static_cast<std::size_t>(nu[j]);
  }
  return idx;
}

std::complex<double> Table::value(const std::vector<int>& nu) const {
  if (nu.size() != cap_.size()) throw ShapeError("hermite table: wrong index arity");
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (nu[j] < 0 || nu[j] > cap_[j]) throw ShapeError("hermite table: index out of range");
  }
  return values_[offset(nu)];
}

}  // namespace hermite

std::complex<double> hermite_multi_complex(const MatrixXcd& v_mat, const VectorXcd& m,
                                           const HermiteIndex& k) {
  const int dim = static_cast<int>(m.size());
  if (v_mat.rows() != dim || v_mat.cols() != dim || dim != 2 * k.modes()) {
    throw ShapeError("hermite_multi: inconsistent dimensions");
  }
  Eigen::FullPivLU<MatrixXcd> lu(v_mat);
  if (!lu.isInvertible()) {
    throw SingularMatrixError("hermite_multi: singular matrix parameter",
                              std::numeric_limits<double>::infinity());
  }
  const MatrixXcd a = lu.inverse();
  const VectorXcd b = a * m;
  std::vector<int> cap(dim);
  for (int i = 0; i < k.modes(); ++i) {
    if (k.k[i] < 0) throw ShapeError("hermite_multi: negative index");
    cap[2 * i] = k.k[i];
    cap[2 * i + 1] = k.k[i];
  }
  hermite::Table table(a, b, cap);
  return table.value(cap);
}

double hermite_multi(const MatrixXd& v_mat, const VectorXd& m, const HermiteIndex& k) {
  return hermite_multi_complex(v_mat.cast<std::complex<double>>(), m.cast<std::complex<double>>(), k)
      .real();
}

double gp_outcome_probability(const GaussianState& state, const GaussianChannel& ch,
                              const HermiteIndex& k) {
  if (k.modes() != state.modes()) throw ShapeError("photon index has wrong mode count");
  for (int ki : k.k) {
    if (ki < 0) throw ShapeError("negative photon number");
  }
  const CountingKernel kern = counting_kernel(state, ch);
  const MatrixXcd s = pairing_transform(kern.n_modes);
  const MatrixXcd a = -(s.transpose() * kern.g_mat.cast<std::complex<double>>() * s);
  const VectorXcd b = s.transpose() * kern.h_vec.cast<std::complex<double>>();

  std::vector<int> cap(2 * kern.n_modes);
  double fact = 1.0;
  for (int i = 0; i < kern.n_modes; ++i) {
    cap[2 * i] = k.k[i];
    cap[2 * i + 1] = k.k[i];
    fact *= factorial(k.k[i]);
  }
  hermite::Table table(a, b, cap);
  double p = kern.p_zero * table.value(cap).real() / fact;
  if (p < 0.0) {
    ++g_clamp_count;
    p = 0.0;
  }
  return p;
}

std::vector<std::pair<std::vector<int>, double>> gp_distribution(const GaussianState& state,
                                                                 const GaussianChannel& ch,
                                                                 int max_per_mode) {
  const CountingKernel kern = counting_kernel(state, ch);
  const int n = kern.n_modes;
  const MatrixXcd s = pairing_transform(n);
  const MatrixXcd a = -(s.transpose() * kern.g_mat.cast<std::complex<double>>() * s);
  const VectorXcd b = s.transpose() * kern.h_vec.cast<std::complex<double>>();

  std::vector<int> cap(2 * n, max_per_mode);
  hermite::Table table(a, b, cap);

  std::vector<std::pair<std::vector<int>, double>> dist;
  std::vector<int> k(n, 0);
  std::vector<int> nu(2 * n, 0);
  while (true) {
    double fact = 1.0;
    for (int i = 0; i < n; ++i) {
      nu[2 * i] = k[i];
      nu[2 * i + 1] = k[i];
      fact *= factorial(k[i]);
    }
    double p = kern.p_zero * table.value(nu).real() / fact;
    if (p < 0.0) {
      ++g_clamp_count;
      p = 0.0;
    }
    dist.emplace_back(k, p);
    int j = n - 1;
    while (j >= 0 && k[j] == max_per_mode) {
      k[j] = 0;
      --j;
    }
    if (j < 0) break;
    ++k[j];
  }
  return dist;
}

double gp_coarse_probability(const GaussianState& state, const GaussianChannel& ch,
                             const PhotoCountEffect& eff) {
  if (!validate_photocount_effect(eff)) {
    throw InvalidObjectError("coarse photodetection effect has invalid weights");
  }
  double p = 0.0;
  for (const auto& [outcome, q] : eff.weights) {
    if (q == 0.0) continue;
    p += q * gp_outcome_probability(state, ch, HermiteIndex{outcome});
  }
  return p;
}

double gp_tail_bound(const GaussianState& state, const GaussianChannel& ch, int max_per_mode) {
  const CountingKernel kern = counting_kernel(state, ch);
  const int n = kern.n_modes;
  const int dim = 2 * n;
  static const double kTilts[] = {1.05, 1.1, 1.25, 1.5, 2.0, 3.0, 5.0, 9.0};

  double total = 0.0;
  for (int mode = 0; mode < n; ++mode) {
    double best = std::numeric_limits<double>::infinity();
    for (double u : kTilts) {
      VectorXd e_diag = VectorXd::Ones(dim);
      e_diag(2 * mode) = u;
      e_diag(2 * mode + 1) = u;
      const VectorXd e_sqrt = e_diag.cwiseSqrt();
      const MatrixXd b_mat = e_sqrt.asDiagonal() * kern.g_mat * e_sqrt.asDiagonal();
      Eigen::SelfAdjointEigenSolver<MatrixXd> solver(b_mat);
      if (solver.eigenvalues().maxCoeff() >= 1.0 - 1e-9) continue;
      const MatrixXd inv = (MatrixXd::Identity(dim, dim) - b_mat)
                               .ldlt()
                               .solve(MatrixXd::Identity(dim, dim));
      const VectorXd hh = e_sqrt.asDiagonal() * kern.h_vec;
      double logdet = 0.0;
      for (double lam : solver.eigenvalues()) logdet += std::log(1.0 - lam);
      const double mgf = kern.p_zero * std::exp(-0.5 * logdet + 0.5 * hh.dot(inv * hh));
      best = std::min(best, mgf / std::pow(u, max_per_mode + 1));
    }
    total += best;
  }
  return total;
}

int suggested_photon_cutoff(const GaussianState& state) {
  const int n = state.modes();
  int best = 0;
  for (int i = 0; i < n; ++i) {
    const double nbar = 0.5 * (state.cov(2 * i, 2 * i) + state.cov(2 * i + 1, 2 * i + 1) +
                               state.mean(2 * i) * state.mean(2 * i) +
                               state.mean(2 * i + 1) * state.mean(2 * i + 1)) -
                        0.5;
    const double sigma = std::sqrt(std::max(nbar * nbar + 2.0 * nbar + 1.0, 1.0));
    best = std::max(best, static_cast<int>(std::ceil(nbar + 8.0 * sigma + 10.0)));
  }
  return best;
}

std::int64_t gp_clamp_count() { return g_clamp_count.load(); }

void gp_reset_clamp_count() { g_clamp_count.store(0); }

}  // namespace cvlearn
