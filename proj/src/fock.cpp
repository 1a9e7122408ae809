#include "cvlearn/fock.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cvlearn/photocount.hpp"

namespace cvlearn {

namespace {

int pow_int(int base, int e) {
  int out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

MatrixXcd single_mode_ladder(int cutoff) {
  MatrixXcd a = MatrixXcd::Zero(cutoff, cutoff);
  for (int k = 1; k < cutoff; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

/// exp(G) for anti-Hermitian G via the eigendecomposition of iG; exactly
/// unitary, unlike a truncated Pade evaluation.
MatrixXcd unitary_exp(const MatrixXcd& gen) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(std::complex<double>(0.0, 1.0) * gen);
  MatrixXcd u = MatrixXcd::Zero(gen.rows(), gen.cols());
  for (Eigen::Index k = 0; k < gen.rows(); ++k) {
    u += std::exp(std::complex<double>(0.0, -es.eigenvalues()(k))) * es.eigenvectors().col(k) *
         es.eigenvectors().col(k).adjoint();
  }
  return u;
}

/// Quadrature operators (x_1, p_1, ..., x_n, p_n) on the truncated space.
std::vector<MatrixXcd> quadrature_ops(int n_modes, int cutoff) {
  std::vector<MatrixXcd> xi(2 * n_modes);
  const double r = 1.0 / std::numbers::sqrt2;
  const std::complex<double> i(0.0, 1.0);
  for (int m = 0; m < n_modes; ++m) {
    const MatrixXcd a = ladder_op(n_modes, cutoff, m);
    xi[2 * m] = r * (a + a.adjoint());
    xi[2 * m + 1] = -i * r * (a - a.adjoint());
  }
  return xi;
}

MatrixXcd thermal_product(const VectorXd& nus, int cutoff) {
  const int n = static_cast<int>(nus.size());
  MatrixXcd rho = MatrixXcd::Identity(1, 1);
  for (int m = 0; m < n; ++m) {
    const double nbar = std::max(nus(m) - 0.5, 0.0);
    Eigen::VectorXcd diag(cutoff);
    const double ratio = nbar / (nbar + 1.0);
    double w = 1.0 / (nbar + 1.0);
    for (int k = 0; k < cutoff; ++k) {
      diag(k) = w;
      w *= ratio;
    }
    rho = Eigen::kroneckerProduct(rho, MatrixXcd(diag.asDiagonal())).eval();
  }
  return rho;
}

/// Passive n x n unitary described by `u` lifted to the Fock space so that
/// U^dag a_j U = sum_k u_{jk} a_k.
MatrixXcd passive_unitary(const MatrixXcd& u, int n_modes, int cutoff) {
  Eigen::ComplexEigenSolver<MatrixXcd> es(u);
  MatrixXcd log_u = MatrixXcd::Zero(u.rows(), u.cols());
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    const double theta = std::arg(es.eigenvalues()(k));
    log_u += std::complex<double>(0.0, theta) * es.eigenvectors().col(k) *
             es.eigenvectors().col(k).adjoint();
  }
  const MatrixXcd h = std::complex<double>(0.0, 1.0) * log_u;  // u = exp(-i h)
  const int dim = pow_int(cutoff, n_modes);
  MatrixXcd ham = MatrixXcd::Zero(dim, dim);
  std::vector<MatrixXcd> a(n_modes);
  for (int m = 0; m < n_modes; ++m) a[m] = ladder_op(n_modes, cutoff, m);
  for (int j = 0; j < n_modes; ++j) {
    for (int k = 0; k < n_modes; ++k) {
      if (std::abs(h(j, k)) > 0.0) ham += h(j, k) * a[j].adjoint() * a[k];
    }
  }
  return unitary_exp(std::complex<double>(0.0, -1.0) * ham);
}

/// Splits an orthogonal symplectic matrix (xpxp ordering) into the n x n
/// unitary it represents on mode operators.
MatrixXcd passive_to_unitary(const MatrixXd& o, int n_modes) {
  MatrixXcd u(n_modes, n_modes);
  for (int i = 0; i < n_modes; ++i) {
    for (int j = 0; j < n_modes; ++j) {
      u(i, j) = std::complex<double>(o(2 * i, 2 * j), o(2 * i + 1, 2 * j));
    }
  }
  return u;
}

MatrixXcd quadratic_unitary(const MatrixXd& h_quad, int n_modes, int cutoff) {
  const auto xi = quadrature_ops(n_modes, cutoff);
  const int dim = pow_int(cutoff, n_modes);
  MatrixXcd ham = MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < 2 * n_modes; ++j) {
    for (int k = 0; k < 2 * n_modes; ++k) {
      if (h_quad(j, k) != 0.0) ham += 0.5 * h_quad(j, k) * xi[j] * xi[k];
    }
  }
  ham = 0.5 * (ham + ham.adjoint().eval());
  return unitary_exp(std::complex<double>(0.0, -1.0) * ham);
}

void require_same_shape(const FockOperator& a, const FockOperator& b) {
  if (a.n != b.n || a.cutoff != b.cutoff) {
    throw ShapeError("fock operators have mismatched mode counts or cutoffs");
  }
}

MatrixXcd trace_out_last(const MatrixXcd& joint, int sys_dim, int anc_dim) {
  MatrixXcd out = MatrixXcd::Zero(sys_dim, sys_dim);
  for (int i = 0; i < sys_dim; ++i) {
    for (int j = 0; j < sys_dim; ++j) {
      std::complex<double> acc(0.0, 0.0);
      for (int k = 0; k < anc_dim; ++k) {
        acc += joint(i * anc_dim + k, j * anc_dim + k);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

/// Beamsplitter-with-vacuum dilation of single-mode loss kappa^2 <= 1.
MatrixXcd apply_loss(const MatrixXcd& rho, double kappa, int cutoff) {
  const int anc = std::max(8, cutoff / 2 + 4);
  const MatrixXcd a1 = Eigen::kroneckerProduct(single_mode_ladder(cutoff),
                                               MatrixXcd::Identity(anc, anc));
  const MatrixXcd a2 = Eigen::kroneckerProduct(MatrixXcd::Identity(cutoff, cutoff),
                                               single_mode_ladder(anc));
  const double theta = std::acos(std::clamp(kappa, 0.0, 1.0));
  const MatrixXcd gen = theta * (a1.adjoint() * a2 - a1 * a2.adjoint());
  const MatrixXcd u = unitary_exp(gen);
  MatrixXcd joint = MatrixXcd::Zero(cutoff * anc, cutoff * anc);
  MatrixXcd vac = MatrixXcd::Zero(anc, anc);
  vac(0, 0) = 1.0;
  joint = Eigen::kroneckerProduct(rho, vac);
  joint = u * joint * u.adjoint();
  return trace_out_last(joint, cutoff, anc);
}

/// Two-mode-squeezer-with-vacuum dilation of gain kappa^2 >= 1.
MatrixXcd apply_gain(const MatrixXcd& rho, double kappa, int cutoff) {
  const int anc = std::max(8, cutoff / 2 + 4);
  const MatrixXcd a1 = Eigen::kroneckerProduct(single_mode_ladder(cutoff),
                                               MatrixXcd::Identity(anc, anc));
  const MatrixXcd a2 = Eigen::kroneckerProduct(MatrixXcd::Identity(cutoff, cutoff),
                                               single_mode_ladder(anc));
  const double r = std::acosh(std::max(kappa, 1.0));
  const MatrixXcd gen = r * (a1.adjoint() * a2.adjoint() - a1 * a2);
  const MatrixXcd u = unitary_exp(gen);
  MatrixXcd vac = MatrixXcd::Zero(anc, anc);
  vac(0, 0) = 1.0;
  MatrixXcd joint = Eigen::kroneckerProduct(rho, vac);
  joint = u * joint * u.adjoint();
  return trace_out_last(joint, cutoff, anc);
}

}  // namespace

MatrixXcd ladder_op(int n_modes, int cutoff, int mode) {
  MatrixXcd op = MatrixXcd::Identity(1, 1);
  for (int m = 0; m < n_modes; ++m) {
    const MatrixXcd next = (m == mode) ? single_mode_ladder(cutoff)
                                       : MatrixXcd::Identity(cutoff, cutoff);
    op = Eigen::kroneckerProduct(op, next).eval();
  }
  return op;
}

WilliamsonForm williamson(const MatrixXd& cov) {
  const int dim = static_cast<int>(cov.rows());
  const int n = dim / 2;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw InvalidObjectError("covariance must be positive definite for the normal form");
  }
  const MatrixXd sqrt_v = es.operatorSqrt();
  const MatrixXd k = sqrt_v * symplectic_form(n) * sqrt_v;

  Eigen::RealSchur<MatrixXd> schur(k);
  MatrixXd u = schur.matrixU();
  const MatrixXd t = schur.matrixT();

  WilliamsonForm form;
  form.nus.resize(n);
  for (int m = 0; m < n; ++m) {
    double val = t(2 * m, 2 * m + 1);
    if (val < 0.0) {
      u.col(2 * m).swap(u.col(2 * m + 1));
      val = -val;
    }
    form.nus(m) = val;
  }
  VectorXd d_inv_sqrt(dim);
  for (int m = 0; m < n; ++m) {
    d_inv_sqrt(2 * m) = 1.0 / std::sqrt(form.nus(m));
    d_inv_sqrt(2 * m + 1) = d_inv_sqrt(2 * m);
  }
  form.s_mat = sqrt_v * u * d_inv_sqrt.asDiagonal();
  return form;
}

MatrixXcd symplectic_unitary(const MatrixXd& s, int n_modes, int cutoff) {
  // Polar split S = P O with P symmetric positive definite and O orthogonal;
  // both factors are symplectic when S is.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s * s.transpose());
  MatrixXd p_sqrt = es.operatorSqrt();
  MatrixXd p_inv = es.operatorInverseSqrt();
  MatrixXd o = p_inv * s;

  const MatrixXd omega = symplectic_form(n_modes);

  // Active part: P = exp(A) with A in the symplectic algebra; the quadratic
  // Hamiltonian generating the flow is h = -Omega A.
  MatrixXd log_p = MatrixXd::Zero(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    log_p += 0.5 * std::log(es.eigenvalues()(i)) * es.eigenvectors().col(i) *
             es.eigenvectors().col(i).transpose();
  }
  const MatrixXd h_active = -omega * log_p;
  const MatrixXcd u_active = quadratic_unitary(0.5 * (h_active + h_active.transpose()),
                                               n_modes, cutoff);
  const MatrixXcd u_passive = passive_unitary(passive_to_unitary(o, n_modes), n_modes, cutoff);
  return u_active * u_passive;
}

MatrixXcd displacement_unitary(const VectorXd& m, int n_modes, int cutoff) {
  const auto xi = quadrature_ops(n_modes, cutoff);
  const VectorXd c = symplectic_form(n_modes) * m;
  const int dim = pow_int(cutoff, n_modes);
  MatrixXcd gen = MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < 2 * n_modes; ++j) gen += c(j) * xi[j];
  return unitary_exp(std::complex<double>(0.0, 1.0) * gen);
}

FockOperator fock_from_gaussian(const GaussianState& state, int cutoff, bool check_tail) {
  const Diagnostic d = validate_state(state);
  if (!d.ok) throw InvalidObjectError("cannot build the ladder representation of an invalid state");
  const int needed = suggested_photon_cutoff(state);
  if (check_tail && cutoff < needed) {
    std::ostringstream os;
    os << "cutoff " << cutoff << " too small for the requested tail; need >= " << needed;
    throw CutoffError(os.str(), needed);
  }
  const int n = state.modes();
  const WilliamsonForm form = williamson(state.cov);
  const MatrixXcd u_s = symplectic_unitary(form.s_mat, n, cutoff);
  const MatrixXcd u_d = displacement_unitary(state.mean, n, cutoff);
  const MatrixXcd rho_th = thermal_product(form.nus, cutoff);
  FockOperator out;
  out.n = n;
  out.cutoff = cutoff;
  const MatrixXcd u = u_d * u_s;
  out.mat = u * rho_th * u.adjoint();
  return out;
}

namespace {

FockOperator fock_from_components(int n, const std::vector<GGComponent>& comps, int cutoff,
                                  bool symmetrize) {
  const int dim = pow_int(cutoff, n);
  MatrixXcd acc = MatrixXcd::Zero(dim, dim);

  // Holomorphic pairing: per mode the generating variables are (alpha_i,
  // conj(beta)_i); quadratures of the cross-Wigner mean are S2 (alpha, cbeta).
  const std::complex<double> i_unit(0.0, 1.0);
  MatrixXcd s2 = MatrixXcd::Zero(2 * n, 2 * n);
  MatrixXcd j_pair = MatrixXcd::Zero(2 * n, 2 * n);
  const double r = 1.0 / std::numbers::sqrt2;
  for (int m = 0; m < n; ++m) {
    s2(2 * m, 2 * m) = r;
    s2(2 * m, 2 * m + 1) = r;
    s2(2 * m + 1, 2 * m) = -i_unit * r;
    s2(2 * m + 1, 2 * m + 1) = i_unit * r;
    j_pair(2 * m, 2 * m + 1) = 1.0;
    j_pair(2 * m + 1, 2 * m) = 1.0;
  }

  std::vector<double> sqrt_fact(cutoff);
  for (int k = 0; k < cutoff; ++k) {
    sqrt_fact[k] = std::sqrt(std::tgamma(static_cast<double>(k) + 1.0));
  }

  for (const auto& comp : comps) {
    const MatrixXcd w = comp.cov + 0.5 * MatrixXcd::Identity(2 * n, 2 * n);
    Eigen::PartialPivLU<MatrixXcd> lu(w);
    const MatrixXcd w_inv = lu.solve(MatrixXcd::Identity(2 * n, 2 * n));
    const std::complex<double> det_2pi =
        Eigen::PartialPivLU<MatrixXcd>(2.0 * std::numbers::pi * w).determinant();
    const std::complex<double> quad = (comp.mean.transpose() * (w_inv * comp.mean))(0, 0);
    const std::complex<double> k0 = std::pow(2.0 * std::numbers::pi, n) *
                                    std::exp(-0.5 * quad) / std::sqrt(det_2pi);

    const MatrixXcd a_tilde = j_pair - s2.transpose() * w_inv * s2;
    const VectorXcd b_tilde = s2.transpose() * (w_inv * comp.mean);

    std::vector<int> cap(2 * n, cutoff - 1);
    hermite::Table table(-a_tilde, b_tilde, cap);

    // Entry (row j, column l) uses exponents alpha^l cbeta^j.
    std::vector<int> row(n, 0), col(n, 0), nu(2 * n, 0);
    for (int rr = 0; rr < dim; ++rr) {
      int rem = rr;
      for (int m = n - 1; m >= 0; --m) {
        row[m] = rem % cutoff;
        rem /= cutoff;
      }
      for (int cc = 0; cc < dim; ++cc) {
        int crem = cc;
        for (int m = n - 1; m >= 0; --m) {
          col[m] = crem % cutoff;
          crem /= cutoff;
        }
        double denom = 1.0;
        for (int m = 0; m < n; ++m) {
          nu[2 * m] = col[m];
          nu[2 * m + 1] = row[m];
          denom *= sqrt_fact[row[m]] * sqrt_fact[col[m]];
        }
        acc(rr, cc) += comp.coeff * k0 * table.value(nu) / denom;
      }
    }
  }

  if (symmetrize) {
    const double dev = (acc - acc.adjoint().eval()).cwiseAbs().maxCoeff();
    if (dev > 1e-8) {
      std::ostringstream os;
      os << "component sum deviates from Hermiticity by " << dev;
      throw InvalidObjectError(os.str());
    }
    acc = 0.5 * (acc + acc.adjoint().eval());
  }

  FockOperator out;
  out.n = n;
  out.cutoff = cutoff;
  out.mat = std::move(acc);
  return out;
}

}  // namespace

FockOperator fock_from_gg(const GGState& state, int cutoff) {
  return fock_from_components(state.n, state.components, cutoff, true);
}

FockOperator fock_from_gg_effect(const GGEffect& eff, int cutoff) {
  return fock_from_components(eff.n, eff.components, cutoff, true);
}

double fock_probability(const FockOperator& rho, const FockOperator& eff) {
  require_same_shape(rho, eff);
  const std::complex<double> tr = (eff.mat * rho.mat).trace();
  return tr.real();
}

FockOperator fock_apply_gaussian_channel(const FockOperator& rho, const GaussianChannel& ch,
                                         int cutoff) {
  if (ch.modes() != rho.n) throw ShapeError("channel mode count mismatch");
  const Diagnostic d = validate_channel(ch);
  if (!d.ok) throw InvalidObjectError("channel is not completely positive");
  if (cutoff != rho.cutoff) throw ShapeError("cutoff change inside channel action is unsupported");
  const int n = rho.n;
  const MatrixXd omega = symplectic_form(n);
  const double y_norm = ch.y_mat.cwiseAbs().maxCoeff();
  const double sympl_defect =
      (ch.x_mat * omega * ch.x_mat.transpose() - omega).cwiseAbs().maxCoeff();

  FockOperator out;
  out.n = n;
  out.cutoff = cutoff;

  if (y_norm < 1e-12 && sympl_defect < 1e-10) {
    // Gaussian unitary channel.
    const MatrixXcd u = displacement_unitary(ch.disp, n, cutoff) *
                        symplectic_unitary(ch.x_mat, n, cutoff);
    out.mat = u * rho.mat * u.adjoint();
    return out;
  }

  if (n != 1) {
    throw InvalidObjectError("only unitary channels are supported beyond one mode");
  }
  // Single mode: require X = kappa * rotation and isotropic Y.
  const MatrixXd xtx = ch.x_mat.transpose() * ch.x_mat;
  const double kappa2 = 0.5 * (xtx(0, 0) + xtx(1, 1));
  if (std::abs(xtx(0, 1)) > 1e-9 || std::abs(xtx(0, 0) - xtx(1, 1)) > 1e-9 ||
      ch.x_mat.determinant() < 0.0) {
    throw InvalidObjectError("unsupported channel: X is not a scaled rotation");
  }
  if (std::abs(ch.y_mat(0, 1)) > 1e-9 || std::abs(ch.y_mat(0, 0) - ch.y_mat(1, 1)) > 1e-9) {
    throw InvalidObjectError("unsupported channel: Y is not isotropic");
  }
  const double kappa = std::sqrt(kappa2);
  const double y_val = ch.y_mat(0, 0);
  const double y_min = std::abs(1.0 - kappa2) / 2.0;
  const double excess = y_val - y_min;
  if (excess < -1e-9) throw InvalidObjectError("channel noise below the physical minimum");

  MatrixXcd work = rho.mat;
  // Rotation part first.
  const MatrixXd rot = ch.x_mat / std::max(kappa, 1e-12);
  if ((rot - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-12) {
    const MatrixXcd u = symplectic_unitary(rot, 1, cutoff);
    work = u * work * u.adjoint();
  }
  if (kappa < 1.0 - 1e-12) {
    work = apply_loss(work, kappa, cutoff);
  } else if (kappa > 1.0 + 1e-12) {
    work = apply_gain(work, kappa, cutoff);
  }
  if (excess > 1e-12) {
    // Unit-gain classical noise of variance `excess` from a gain/loss pair.
    const double g = 1.0 + excess;
    work = apply_loss(work, std::sqrt(1.0 / g), cutoff);
    work = apply_gain(work, std::sqrt(g), cutoff);
  }
  if (ch.disp.cwiseAbs().maxCoeff() > 1e-14) {
    const MatrixXcd u = displacement_unitary(ch.disp, 1, cutoff);
    work = u * work * u.adjoint();
  }
  out.mat = std::move(work);
  return out;
}

VectorXd fock_mean(const FockOperator& rho) {
  const auto xi = quadrature_ops(rho.n, rho.cutoff);
  VectorXd m(2 * rho.n);
  for (int j = 0; j < 2 * rho.n; ++j) m(j) = (xi[j] * rho.mat).trace().real();
  return m;
}

MatrixXd fock_covariance(const FockOperator& rho) {
  const auto xi = quadrature_ops(rho.n, rho.cutoff);
  const VectorXd m = fock_mean(rho);
  MatrixXd v(2 * rho.n, 2 * rho.n);
  for (int j = 0; j < 2 * rho.n; ++j) {
    for (int k = 0; k < 2 * rho.n; ++k) {
      const MatrixXcd sym = 0.5 * (xi[j] * xi[k] + xi[k] * xi[j]);
      v(j, k) = (sym * rho.mat).trace().real() - m(j) * m(k);
    }
  }
  return v;
}

double fock_mean_photons(const FockOperator& rho) {
  double total = 0.0;
  for (int m = 0; m < rho.n; ++m) {
    const MatrixXcd a = ladder_op(rho.n, rho.cutoff, m);
    total += (a.adjoint() * a * rho.mat).trace().real();
  }
  return total;
}

FockOperator fock_number_projector(const std::vector<int>& k, int cutoff) {
  const int n = static_cast<int>(k.size());
  int idx = 0;
  for (int m = 0; m < n; ++m) {
    if (k[m] < 0 || k[m] >= cutoff) throw ShapeError("photon index outside the cutoff");
    idx = idx * cutoff + k[m];
  }
  FockOperator out;
  out.n = n;
  out.cutoff = cutoff;
  out.mat = MatrixXcd::Zero(pow_int(cutoff, n), pow_int(cutoff, n));
  out.mat(idx, idx) = 1.0;
  return out;
}

}  // namespace cvlearn
