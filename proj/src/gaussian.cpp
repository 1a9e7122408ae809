#include "cvlearn/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cvlearn {

namespace {

void require_square(const MatrixXd& m, int dim, const char* name) {
  if (m.rows() != dim || m.cols() != dim) {
    std::ostringstream os;
    os << name << " must be " << dim << "x" << dim << ", got " << m.rows() << "x" << m.cols();
    throw ShapeError(os.str());
  }
}

void require_even(Eigen::Index size, const char* name) {
  if (size <= 0 || size % 2 != 0) {
    std::ostringstream os;
    os << name << " must have positive even length, got " << size;
    throw ShapeError(os.str());
  }
}

}  // namespace

MatrixXd symplectic_form(int n_modes) {
  MatrixXd omega = MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    omega(2 * i, 2 * i + 1) = 1.0;
    omega(2 * i + 1, 2 * i) = -1.0;
  }
  return omega;
}

double uncertainty_min_eigenvalue(const MatrixXd& m) {
  require_even(m.rows(), "matrix");
  const int n = static_cast<int>(m.rows()) / 2;
  MatrixXcd herm = m.cast<std::complex<double>>();
  herm += std::complex<double>(0.0, 0.5) * symplectic_form(n).cast<std::complex<double>>();
  // Symmetrize away round-off so the solver sees an exactly Hermitian matrix.
  herm = 0.5 * (herm + herm.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Diagnostic validate_state(const GaussianState& state, double tol) {
  require_even(state.mean.size(), "mean");
  require_square(state.cov, static_cast<int>(state.mean.size()), "cov");
  if ((state.cov - state.cov.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
    return {false, -std::numeric_limits<double>::infinity()};
  }
  const double lam = uncertainty_min_eigenvalue(state.cov);
  return {lam >= -tol, lam};
}

Diagnostic validate_channel(const GaussianChannel& ch, double tol) {
  require_even(ch.disp.size(), "disp");
  const int dim = static_cast<int>(ch.disp.size());
  require_square(ch.x_mat, dim, "x_mat");
  require_square(ch.y_mat, dim, "y_mat");
  if ((ch.y_mat - ch.y_mat.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
    return {false, -std::numeric_limits<double>::infinity()};
  }
  // Complete positivity: Y + (i/2)(Omega - X Omega X^T) >= 0.
  const MatrixXd omega = symplectic_form(dim / 2);
  MatrixXcd herm = ch.y_mat.cast<std::complex<double>>();
  MatrixXd defect = omega - ch.x_mat * omega * ch.x_mat.transpose();
  herm += std::complex<double>(0.0, 0.5) * defect.cast<std::complex<double>>();
  herm = 0.5 * (herm + herm.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  const double lam = solver.eigenvalues().minCoeff();
  return {lam >= -tol, lam};
}

Diagnostic validate_effect(const GeneralDyneEffect& eff, double tol) {
  return validate_state(GaussianState{eff.outcome, eff.cov}, tol);
}

GaussianState apply_gaussian_channel(const GaussianState& state, const GaussianChannel& ch) {
  if (state.mean.size() != ch.disp.size()) {
    throw ShapeError("state and channel act on different mode counts");
  }
  GaussianState out;
  out.mean = ch.x_mat * state.mean + ch.disp;
  out.cov = ch.x_mat * state.cov * ch.x_mat.transpose() + ch.y_mat;
  return out;
}

GaussianChannel compose_channels(const GaussianChannel& second, const GaussianChannel& first) {
  if (second.disp.size() != first.disp.size()) {
    throw ShapeError("channel composition requires equal mode counts");
  }
  GaussianChannel out;
  out.x_mat = second.x_mat * first.x_mat;
  out.y_mat = second.x_mat * first.y_mat * second.x_mat.transpose() + second.y_mat;
  out.disp = second.x_mat * first.disp + second.disp;
  return out;
}

GaussianChannel identity_channel(int n_modes) {
  GaussianChannel ch;
  ch.disp = VectorXd::Zero(2 * n_modes);
  ch.x_mat = MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  ch.y_mat = MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  return ch;
}

GaussianState vacuum_state(int n_modes) {
  GaussianState st;
  st.mean = VectorXd::Zero(2 * n_modes);
  st.cov = 0.5 * MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  return st;
}

GaussianState coherent_state(std::complex<double> alpha) {
  GaussianState st = vacuum_state(1);
  st.mean(0) = std::numbers::sqrt2 * alpha.real();
  st.mean(1) = std::numbers::sqrt2 * alpha.imag();
  return st;
}

GeneralDyneEffect heterodyne_effect(const VectorXd& outcome) {
  require_even(outcome.size(), "outcome");
  GeneralDyneEffect eff;
  eff.outcome = outcome;
  eff.cov = 0.5 * MatrixXd::Identity(outcome.size(), outcome.size());
  return eff;
}

double gaussian_density(const VectorXd& mean, const MatrixXd& cov, const VectorXd& point) {
  require_even(mean.size(), "mean");
  require_square(cov, static_cast<int>(mean.size()), "cov");
  if (point.size() != mean.size()) {
    throw ShapeError("evaluation point has wrong dimension");
  }
  Eigen::LDLT<MatrixXd> ldlt(cov);
  const VectorXd d = ldlt.vectorD();
  const double lo = d.minCoeff();
  const double hi = d.maxCoeff();
  if (ldlt.info() != Eigen::Success || lo <= 0.0 || hi / lo > kMaxCondition) {
    throw SingularMatrixError("covariance is singular or too ill-conditioned for inversion",
                              lo <= 0.0 ? std::numeric_limits<double>::infinity() : hi / lo);
  }
  const VectorXd delta = point - mean;
  const double quad = delta.dot(ldlt.solve(delta));
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    logdet += std::log(2.0 * std::numbers::pi * d(i));
  }
  return std::exp(-0.5 * quad - 0.5 * logdet);
}

double gaussian_outcome_density(const GaussianState& state, const GaussianChannel& ch,
                                const GeneralDyneEffect& eff) {
  const GaussianState out = apply_gaussian_channel(state, ch);
  if (eff.outcome.size() != out.mean.size()) {
    throw ShapeError("effect has wrong mode count");
  }
  return gaussian_density(out.mean, out.cov + eff.cov, eff.outcome);
}

double gaussian_effect_probability(const GaussianState& state, const GaussianChannel& ch,
                                   const GeneralDyneEffect& eff) {
  const int n = state.modes();
  return std::pow(2.0 * std::numbers::pi, n) * gaussian_outcome_density(state, ch, eff);
}

double mean_photon_number(const GaussianState& state) {
  const int n = state.modes();
  return 0.5 * (state.cov.trace() + state.mean.squaredNorm()) - 0.5 * n;
}

}  // namespace cvlearn
