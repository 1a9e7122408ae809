#include "cvlearn/ggstate.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace cvlearn {

namespace {

constexpr double kRealityTol = 1e-9;

struct ComplexGaussianValue {
  Complex quad;     // (r - m)^T V^{-1} (r - m)
  Complex det_2pi;  // det(2 pi V)
  Complex value;    // exp(-quad/2) / sqrt(det_2pi), principal branch
};

ComplexGaussianValue complex_gaussian(const VectorXcd& mean, const MatrixXcd& cov,
                                      const VectorXcd& point, const char* term_name) {
  const Eigen::Index dim = mean.size();
  Eigen::PartialPivLU<MatrixXcd> lu(2.0 * std::numbers::pi * cov);
  ComplexGaussianValue out;
  out.det_2pi = lu.determinant();
  if (std::abs(out.det_2pi) < 1e-300) {
    throw SingularMatrixError(std::string("singular covariance in term ") + term_name,
                              std::numeric_limits<double>::infinity());
  }
  const VectorXcd delta = point - mean;
  const VectorXcd solved = lu.solve(delta) * (2.0 * std::numbers::pi);
  out.quad = delta.transpose() * solved;
  out.value = std::exp(-0.5 * out.quad) / std::sqrt(out.det_2pi);
  return out;
}

double coeff_sum_error_state(const std::vector<GGComponent>& comps) {
  Complex sum(0.0, 0.0);
  for (const auto& c : comps) sum += c.coeff;
  return std::abs(sum - Complex(1.0, 0.0));
}

double min_re_cov_eigenvalue(const std::vector<GGComponent>& comps) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& c : comps) {
    MatrixXd re = c.cov.real();
    re = 0.5 * (re + re.transpose().eval());
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(re, Eigen::EigenvaluesOnly);
    lo = std::min(lo, solver.eigenvalues().minCoeff());
  }
  return lo;
}

double summed_cov_uncertainty(int n, const std::vector<GGComponent>& comps) {
  MatrixXcd sum = MatrixXcd::Zero(2 * n, 2 * n);
  for (const auto& c : comps) sum += c.cov;
  return uncertainty_min_eigenvalue(sum.real());
}

GGDiagnostic validate_components(int n, const std::vector<GGComponent>& comps, double tol,
                                 bool sub_normalized) {
  GGDiagnostic d;
  if (comps.empty()) return d;
  for (const auto& c : comps) {
    if (c.mean.size() != 2 * n || c.cov.rows() != 2 * n || c.cov.cols() != 2 * n) {
      throw ShapeError("component dimensions do not match the mode count");
    }
  }
  if (sub_normalized) {
    Complex sum(0.0, 0.0);
    for (const auto& c : comps) sum += c.coeff;
    if (std::abs(sum.imag()) > tol) {
      d.coeff_sum_error = std::abs(sum.imag());
    } else {
      d.coeff_sum_error = std::max(0.0, sum.real() - 1.0);
    }
  } else {
    d.coeff_sum_error = coeff_sum_error_state(comps);
  }
  d.min_re_cov_eigenvalue = min_re_cov_eigenvalue(comps);
  d.uncertainty_min_eigenvalue = summed_cov_uncertainty(n, comps);
  d.ok = d.coeff_sum_error <= tol && d.min_re_cov_eigenvalue >= -tol &&
         d.uncertainty_min_eigenvalue >= -tol;
  return d;
}

}  // namespace

GGDiagnostic validate_gg_state(const GGState& state, double tol) {
  return validate_components(state.n, state.components, tol, false);
}

GGDiagnostic validate_gg_effect(const GGEffect& eff, double tol) {
  return validate_components(eff.n, eff.components, tol, true);
}

bool validate_gg_channel(const GGChannel& ch, double tol) {
  if (ch.branches.empty()) return false;
  Complex sum(0.0, 0.0);
  for (const auto& b : ch.branches) {
    if (b.disp.size() != 2 * ch.n || b.x_mat.rows() != 2 * ch.n || b.x_mat.cols() != 2 * ch.n ||
        b.y_mat.rows() != 2 * ch.n || b.y_mat.cols() != 2 * ch.n) {
      throw ShapeError("branch dimensions do not match the mode count");
    }
    sum += b.coeff;
  }
  return std::abs(sum - Complex(1.0, 0.0)) <= tol;
}

double gg_wigner_eval(const GGState& state, const VectorXd& point) {
  if (point.size() != 2 * state.n) throw ShapeError("wigner point has wrong dimension");
  Complex total(0.0, 0.0);
  double scale = 0.0;
  const VectorXcd pt = point.cast<Complex>();
  for (std::size_t i = 0; i < state.components.size(); ++i) {
    const auto& c = state.components[i];
    const auto g = complex_gaussian(c.mean, c.cov, pt, std::to_string(i).c_str());
    const Complex term = c.coeff * g.value;
    total += term;
    scale += std::abs(term);
  }
  if (std::abs(total.imag()) > kRealityTol * std::max(1.0, scale)) {
    std::ostringstream os;
    os << "wigner value has non-real part " << total.imag() << " (scale " << scale << ")";
    throw InvalidObjectError(os.str());
  }
  return total.real();
}

GGState gg_apply_channel(const GGState& state, const GGChannel& ch, int max_components) {
  if (ch.n != state.n) throw ShapeError("state and channel mode counts differ");
  const std::size_t count = state.components.size() * ch.branches.size();
  if (count > static_cast<std::size_t>(max_components)) {
    std::ostringstream os;
    os << "component overflow: " << count << " > limit " << max_components;
    throw InvalidObjectError(os.str());
  }
  GGState out;
  out.n = state.n;
  out.components.reserve(count);
  for (const auto& branch : ch.branches) {
    for (const auto& comp : state.components) {
      GGComponent c;
      c.coeff = comp.coeff * branch.coeff;
      c.mean = branch.x_mat * comp.mean + branch.disp;
      c.cov = branch.x_mat * comp.cov * branch.x_mat.transpose() + branch.y_mat;
      out.components.push_back(std::move(c));
    }
  }
  return out;
}

double gg_outcome_probability(const GGState& state, const GGChannel& ch, const GGEffect& eff) {
  if (state.n != ch.n || state.n != eff.n) throw ShapeError("mode counts differ");
  Complex total(0.0, 0.0);
  double scale = 0.0;
  for (std::size_t i = 0; i < state.components.size(); ++i) {
    for (std::size_t k = 0; k < ch.branches.size(); ++k) {
      const auto& comp = state.components[i];
      const auto& br = ch.branches[k];
      const VectorXcd m_out = br.x_mat * comp.mean + br.disp;
      const MatrixXcd v_out = br.x_mat * comp.cov * br.x_mat.transpose() + br.y_mat;
      for (std::size_t j = 0; j < eff.components.size(); ++j) {
        const auto& ec = eff.components[j];
        std::ostringstream name;
        name << "(" << i << "," << j << "," << k << ")";
        const auto g = complex_gaussian(m_out, v_out + ec.cov, ec.mean, name.str().c_str());
        const Complex term = comp.coeff * ec.coeff * br.coeff * g.value;
        total += term;
        scale += std::abs(term);
      }
    }
  }
  if (std::abs(total.imag()) > kRealityTol * std::max(1.0, scale)) {
    std::ostringstream os;
    os << "probability has non-real part " << total.imag();
    throw InvalidObjectError(os.str());
  }
  const double factor = std::pow(2.0 * std::numbers::pi, state.n);
  return factor * total.real();
}

double GGTermDecomposition::recompose() const {
  double sum = 0.0;
  for (const auto& t : terms) {
    sum += t.p_mass * std::exp(-t.r_part) / t.m_norm * std::cos(t.i_part + t.a_angle - t.theta);
  }
  return b2 * sum;
}

GGTermDecomposition gg_decompose_terms(const GGState& state, const GGChannel& ch,
                                       const GGEffect& eff) {
  if (state.n != ch.n || state.n != eff.n) throw ShapeError("mode counts differ");
  GGTermDecomposition dec;
  double b2 = 0.0;
  for (std::size_t i = 0; i < state.components.size(); ++i) {
    for (std::size_t j = 0; j < eff.components.size(); ++j) {
      for (std::size_t k = 0; k < ch.branches.size(); ++k) {
        b2 += std::abs(state.components[i].coeff * eff.components[j].coeff * ch.branches[k].coeff);
      }
    }
  }
  dec.b2 = b2;
  if (b2 <= 0.0) return dec;

  for (std::size_t i = 0; i < state.components.size(); ++i) {
    for (std::size_t k = 0; k < ch.branches.size(); ++k) {
      const auto& comp = state.components[i];
      const auto& br = ch.branches[k];
      const VectorXcd m_out = br.x_mat * comp.mean + br.disp;
      const MatrixXcd v_out = br.x_mat * comp.cov * br.x_mat.transpose() + br.y_mat;
      for (std::size_t j = 0; j < eff.components.size(); ++j) {
        const auto& ec = eff.components[j];
        std::ostringstream name;
        name << "(" << i << "," << j << "," << k << ")";
        const auto g = complex_gaussian(m_out, v_out + ec.cov, ec.mean, name.str().c_str());
        GGTermDecomposition::Term t;
        t.i = static_cast<int>(i);
        t.j = static_cast<int>(j);
        t.k = static_cast<int>(k);
        t.r_part = 0.5 * g.quad.real();
        t.i_part = 0.5 * g.quad.imag();
        t.m_norm = std::sqrt(std::abs(g.det_2pi));
        t.a_angle = 0.5 * std::arg(g.det_2pi);
        const Complex w = comp.coeff * ec.coeff * br.coeff;
        t.p_mass = std::abs(w) / b2;
        t.theta = std::arg(w);
        if (t.theta < 0.0) t.theta += 2.0 * std::numbers::pi;
        dec.terms.push_back(t);
      }
    }
  }
  return dec;
}

GGConstraintConstants gg_b_constants(const GGState& state, const GGChannel& ch,
                                     const GGEffect& eff) {
  GGConstraintConstants out;
  out.b3 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.components.size(); ++i) {
    for (std::size_t k = 0; k < ch.branches.size(); ++k) {
      const auto& comp = state.components[i];
      const auto& br = ch.branches[k];
      const VectorXcd m_out = br.x_mat * comp.mean + br.disp;
      const MatrixXcd v_out = br.x_mat * comp.cov * br.x_mat.transpose() + br.y_mat;
      for (std::size_t j = 0; j < eff.components.size(); ++j) {
        const auto& ec = eff.components[j];
        std::ostringstream name;
        name << "(" << i << "," << j << "," << k << ")";
        const auto g = complex_gaussian(m_out, v_out + ec.cov, ec.mean, name.str().c_str());
        out.b1 = std::max(out.b1, std::abs(g.quad));
        out.b2 += std::abs(comp.coeff * ec.coeff * br.coeff);
        out.b3 = std::min(out.b3, std::sqrt(std::abs(g.det_2pi)));
      }
    }
  }
  return out;
}

GGState gg_from_gaussian(const GaussianState& state) {
  GGState out;
  out.n = state.modes();
  out.components.push_back(GGComponent{Complex(1.0, 0.0), state.mean.cast<Complex>(),
                                       state.cov.cast<Complex>()});
  return out;
}

GGEffect gg_from_effect(const GeneralDyneEffect& eff) {
  GGEffect out;
  out.n = eff.modes();
  out.components.push_back(GGComponent{Complex(1.0, 0.0), eff.outcome.cast<Complex>(),
                                       eff.cov.cast<Complex>()});
  return out;
}

GGChannel gg_from_channel(const GaussianChannel& ch) {
  GGChannel out;
  out.n = ch.modes();
  out.branches.push_back(GGBranch{Complex(1.0, 0.0), ch.disp.cast<Complex>(),
                                  ch.x_mat.cast<Complex>(), ch.y_mat.cast<Complex>()});
  return out;
}

GGEffect gg_effect_from_state(const GGState& state) {
  GGEffect out;
  out.n = state.n;
  out.components = state.components;
  return out;
}

GGState make_cat_state(Complex alpha, CatSign sign) {
  const double a2 = std::norm(alpha);
  const double overlap = std::exp(-2.0 * a2);
  const double sgn = (sign == CatSign::plus) ? 1.0 : -1.0;
  const double norm = 2.0 * (1.0 + sgn * overlap);
  if (norm < 1e-300) {
    throw InvalidObjectError("odd cat state is undefined at alpha = 0");
  }
  const double xa = std::numbers::sqrt2 * alpha.real();
  const double pa = std::numbers::sqrt2 * alpha.imag();
  const MatrixXcd half = (0.5 * MatrixXd::Identity(2, 2)).cast<Complex>();
  const Complex im(0.0, 1.0);

  GGState cat;
  cat.n = 1;
  VectorXcd m(2);
  m << xa, pa;
  cat.components.push_back({Complex(1.0 / norm, 0.0), m, half});
  cat.components.push_back({Complex(1.0 / norm, 0.0), -m, half});
  VectorXcd cross(2);
  cross << im * pa, -im * xa;
  cat.components.push_back({Complex(sgn * overlap / norm, 0.0), cross, half});
  cat.components.push_back({Complex(sgn * overlap / norm, 0.0), -cross, half});
  return cat;
}

GGState make_gkp_state(double epsilon, int lattice, int max_components) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("grid-state damping must lie in (0, 1)");
  }
  if (lattice < 1) throw std::invalid_argument("lattice size must be >= 1");
  const int side = 2 * lattice + 1;
  const std::size_t count = 2 * (static_cast<std::size_t>(side) * side - 1) + 1;
  if (count > static_cast<std::size_t>(max_components)) {
    throw InvalidObjectError("grid state would exceed the component limit");
  }

  const double shrink = 1.0 - 2.0 * epsilon;
  const double width = epsilon + 0.5 / static_cast<double>(count);
  const MatrixXcd cov = (width * MatrixXd::Identity(2, 2)).cast<Complex>();
  const Complex im(0.0, 1.0);

  GGState st;
  st.n = 1;
  st.components.push_back({Complex(1.0, 0.0), VectorXcd::Zero(2), cov});
  for (int s = -lattice; s <= lattice; ++s) {
    for (int t = -lattice; t <= lattice; ++t) {
      if (s == 0 && t == 0) continue;
      const double rad = std::hypot(static_cast<double>(s), static_cast<double>(t));
      VectorXcd u(2);
      u << shrink * s, shrink * t;
      const double rho = shrink * rad;
      const double g = std::sqrt(std::max(rho * rho - rho, 0.0));
      VectorXcd v(2);
      v << -static_cast<double>(t) / rad, static_cast<double>(s) / rad;
      // Antisymmetric sign pattern: (s, t) and (-s, -t) cancel exactly,
      // so only the central component carries the normalization.
      const double sgn = (s > 0 || (s == 0 && t > 0)) ? 1.0 : -1.0;
      const Complex w(0.5 * sgn * (1.0 + rho), 0.0);
      st.components.push_back({w, u + im * g * v, cov});
      st.components.push_back({w, u - im * g * v, cov});
    }
  }
  return st;
}

GGState make_fock_approx(int photons, double r, int max_components) {
  if (photons < 0) throw std::invalid_argument("photon number must be >= 0");
  if (!(r > 0.0) || (photons > 0 && r >= 1.0 / std::sqrt(static_cast<double>(photons)))) {
    throw std::invalid_argument("ring parameter must satisfy 0 < r < 1/sqrt(K)");
  }
  if (photons == 0) {
    return gg_from_gaussian(vacuum_state(1));
  }
  const int ring = 2 * photons + 1;
  if (static_cast<std::size_t>(ring) * ring > static_cast<std::size_t>(max_components)) {
    throw InvalidObjectError("ring state would exceed the component limit");
  }
  const double beta2 = (photons + 1.0) * r;
  const double beta = std::sqrt(beta2);
  const MatrixXcd half = (0.5 * MatrixXd::Identity(2, 2)).cast<Complex>();
  const Complex im(0.0, 1.0);

  std::vector<GGComponent> comps;
  Complex z_sum(0.0, 0.0);
  for (int j = 0; j < ring; ++j) {
    const double phi_j = 2.0 * std::numbers::pi * j / ring;
    const double xj = std::numbers::sqrt2 * beta * std::cos(phi_j);
    const double pj = std::numbers::sqrt2 * beta * std::sin(phi_j);
    for (int l = 0; l < ring; ++l) {
      const double phi_l = 2.0 * std::numbers::pi * l / ring;
      const double xl = std::numbers::sqrt2 * beta * std::cos(phi_l);
      const double pl = std::numbers::sqrt2 * beta * std::sin(phi_l);
      // Cross component of |beta_j><beta_l|: holomorphic mean and overlap.
      VectorXcd m(2);
      m << 0.5 * (xj + xl) + 0.5 * im * (pj - pl), 0.5 * (pj + pl) - 0.5 * im * (xj - xl);
      const double delta = phi_j - phi_l;
      const Complex overlap = std::exp(Complex(-beta2, 0.0) +
                                       beta2 * std::exp(im * delta));
      const Complex phase = std::exp(-im * static_cast<double>(photons) * delta);
      const Complex w = phase * overlap;
      z_sum += w;
      comps.push_back({w, m, half});
    }
  }
  if (std::abs(z_sum) < 1e-300) {
    throw InvalidObjectError("ring normalization vanished");
  }
  for (auto& c : comps) c.coeff /= z_sum;
  GGState st;
  st.n = 1;
  st.components = std::move(comps);
  return st;
}

}  // namespace cvlearn
