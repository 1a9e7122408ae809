#include "cvlearn/random_instances.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace cvlearn {

namespace {

MatrixXd random_symmetric(int dim, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  MatrixXd h(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      h(i, j) = u(rng);
      h(j, i) = h(i, j);
    }
  }
  return h;
}

}  // namespace

MatrixXd random_symplectic(int n_modes, std::mt19937_64& rng, double scale) {
  const int dim = 2 * n_modes;
  const MatrixXd h = random_symmetric(dim, rng, scale);
  const MatrixXd gen = symplectic_form(n_modes) * h;
  return gen.exp();
}

GaussianState random_state(int n_modes, double energy_bound, std::mt19937_64& rng) {
  const int dim = 2 * n_modes;
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  // Keep the squeezing scale modest so tr V stays well under the bound.
  const double squeeze_scale = std::min(0.3, 0.1 * energy_bound);
  const MatrixXd s = random_symplectic(n_modes, rng, squeeze_scale);

  MatrixXd d = MatrixXd::Zero(dim, dim);
  const double max_thermal = std::max(0.0, energy_bound / (2.0 * dim) - 0.5);
  for (int i = 0; i < n_modes; ++i) {
    const double nu = 0.5 + max_thermal * u01(rng);
    d(2 * i, 2 * i) = nu;
    d(2 * i + 1, 2 * i + 1) = nu;
  }

  GaussianState st;
  st.cov = s * d * s.transpose();
  if (st.cov.trace() > energy_bound) {
    // Fall back to the vacuum-scaled diagonal if the symplectic stretch
    // pushed the trace past the bound.
    st.cov = 0.5 * MatrixXd::Identity(dim, dim);
  }
  st.cov = 0.5 * (st.cov + st.cov.transpose().eval());

  std::normal_distribution<double> g(0.0, 1.0);
  VectorXd m(dim);
  for (int i = 0; i < dim; ++i) m(i) = g(rng);
  const double max_norm = 0.7 * energy_bound;
  if (m.norm() > max_norm) m *= max_norm / m.norm();
  st.mean = m;
  return st;
}

GaussianChannel random_channel(int n_modes, double energy_bound, std::mt19937_64& rng) {
  const int dim = 2 * n_modes;
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  GaussianChannel ch;
  const double kappa = 0.4 + 0.8 * u01(rng);
  ch.x_mat = kappa * random_symplectic(n_modes, rng, 0.2);

  // Minimal noise for complete positivity, then a random PSD excess.
  const MatrixXd omega = symplectic_form(n_modes);
  MatrixXcd defect = std::complex<double>(0.0, 0.5) *
                     (omega - ch.x_mat * omega * ch.x_mat.transpose()).cast<std::complex<double>>();
  defect = 0.5 * (defect + defect.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(defect, Eigen::EigenvaluesOnly);
  const double needed = std::max(0.0, -solver.eigenvalues().minCoeff());

  MatrixXd l = MatrixXd::Zero(dim, dim);
  std::normal_distribution<double> g(0.0, 0.15);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) l(i, j) = g(rng);
  }
  ch.y_mat = l * l.transpose() + (needed + 1e-6) * MatrixXd::Identity(dim, dim);
  ch.y_mat = 0.5 * (ch.y_mat + ch.y_mat.transpose().eval());

  VectorXd d(dim);
  for (int i = 0; i < dim; ++i) d(i) = g(rng) * 2.0;
  const double max_norm = 0.3 * energy_bound;
  if (d.norm() > max_norm) d *= max_norm / d.norm();
  ch.disp = d;
  return ch;
}

GeneralDyneEffect random_effect(int n_modes, double energy_bound, std::mt19937_64& rng) {
  const GaussianState st = random_state(n_modes, energy_bound, rng);
  return GeneralDyneEffect{st.mean, st.cov};
}

PhysicalInstance random_physical_instance(int n_modes, double energy_bound, std::uint64_t seed) {
  if (n_modes < 1) throw ShapeError("mode count must be >= 1");
  if (!(energy_bound > 0.0)) throw std::invalid_argument("energy bound must be positive");
  std::mt19937_64 rng(seed);
  PhysicalInstance inst;
  inst.state = random_state(n_modes, energy_bound, rng);
  inst.channel = random_channel(n_modes, energy_bound, rng);
  inst.effect = random_effect(n_modes, energy_bound, rng);
  return inst;
}

}  // namespace cvlearn
