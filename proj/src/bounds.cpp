#include "cvlearn/bounds.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cvlearn/errors.hpp"

namespace cvlearn {

namespace {

double log2_of(double x) { return std::log2(x); }

double log2_floored(double x) { return std::log2(std::max(x, 2.0)); }

double require_positive(double x, const char* what) {
  if (!(x > 0.0)) throw ConfigError(std::string(what) + " must be positive");
  return x;
}

}  // namespace

ClassTag class_tag_from_name(const std::string& name) {
  if (name == "f_d") return ClassTag::f_d;
  if (name == "f_quad") return ClassTag::f_quad;
  if (name == "f_p") return ClassTag::f_p;
  if (name == "f_g") return ClassTag::f_g;
  if (name == "f_gp") return ClassTag::f_gp;
  if (name == "f_exp") return ClassTag::f_exp;
  if (name == "f_im") return ClassTag::f_im;
  if (name == "f_ang") return ClassTag::f_ang;
  throw ConfigError("unknown class tag: " + name);
}

std::string class_tag_name(ClassTag tag) {
  switch (tag) {
    case ClassTag::f_d: return "f_d";
    case ClassTag::f_quad: return "f_quad";
    case ClassTag::f_p: return "f_p";
    case ClassTag::f_g: return "f_g";
    case ClassTag::f_gp: return "f_gp";
    case ClassTag::f_exp: return "f_exp";
    case ClassTag::f_im: return "f_im";
    case ClassTag::f_ang: return "f_ang";
  }
  return "?";
}

double poly_class_pdim(int param_count, int order) {
  if (param_count < 1 || order < 1) throw ConfigError("polynomial class needs d, ell >= 1");
  return 2.0 * param_count * log2_of(12.0 * order);
}

double pdim_upper_bound(ClassTag tag, int n, int photon_cutoff, int ell) {
  if (n < 1) throw ConfigError("mode count must be >= 1");
  const double scale = (ell > 0) ? (ell + 1.0) : 1.0;
  const double nn = static_cast<double>(n);
  switch (tag) {
    case ClassTag::f_d:
      // Determinant: order-2n polynomial in the n(2n+1) covariance entries.
      return 2.0 * scale * (2.0 * nn * nn + nn) * log2_of(24.0 * nn);
    case ClassTag::f_quad:
      // Cofactor quadratic form: order 4n-1 in 2n^2+3n parameters.
      return 2.0 * scale * (2.0 * nn * nn + 3.0 * nn) * log2_of(12.0 * (4.0 * nn - 1.0));
    case ClassTag::f_p: {
      if (photon_cutoff < 1) throw ConfigError("f_p needs a photon cutoff K >= 1");
      // Order-4nK polynomial in 2n^2+3n parameters.
      return 2.0 * scale * (2.0 * nn * nn + 3.0 * nn) *
             log2_of(28.0 * nn * photon_cutoff);
    }
    case ClassTag::f_g:
      // Monotone-composition split: quad part plus two determinant parts.
      return pdim_upper_bound(ClassTag::f_quad, n, 0, ell) +
             2.0 * pdim_upper_bound(ClassTag::f_d, n, 0, ell);
    case ClassTag::f_gp:
      return pdim_upper_bound(ClassTag::f_g, n, 0, ell) +
             pdim_upper_bound(ClassTag::f_p, n, photon_cutoff, ell);
    case ClassTag::f_im:
      // Complex-parameter exponent: order 4n+1 in 2(4n^2+2n) real parameters.
      return 4.0 * scale * (4.0 * nn * nn + 2.0 * nn) * log2_of(12.0 * (4.0 * nn + 1.0));
    case ClassTag::f_exp:
      // Radial factor: exponent part plus squared-determinant part
      // (order 4n in 8n^2 parameters).
      return pdim_upper_bound(ClassTag::f_im, n, 0, ell) +
             16.0 * scale * nn * nn * log2_of(48.0 * nn);
    case ClassTag::f_ang:
      // Determinant phase: real part plus squared modulus.
      return 16.0 * scale * nn * nn * log2_of(24.0 * nn) +
             16.0 * scale * nn * nn * log2_of(48.0 * nn);
  }
  throw ConfigError("unhandled class tag");
}

double covering_bound_pdim(double d, double range_bound, double eps, double k) {
  require_positive(eps, "eps");
  require_positive(k, "k");
  require_positive(range_bound, "range bound");
  if (d < 1.0) throw ConfigError("pseudo-dimension must be >= 1");
  return d * log2_of(2.0 * std::numbers::e * range_bound * k / (d * eps));
}

double covering_bound_gg(double d, double b_ratio, double b_tilde, double eps, double k) {
  require_positive(eps, "eps");
  require_positive(k, "k");
  require_positive(b_ratio, "B");
  require_positive(b_tilde, "Btilde");
  if (d < 1.0) throw ConfigError("dimension must be >= 1");
  const double hull = std::ceil((2.0 * b_ratio / eps) * (2.0 * b_ratio / eps));
  return hull * d * log2_of(2.0 * std::numbers::e * k * b_tilde / (d * eps));
}

double pconcept_sample_bound(double d, double eps, double gamma, double delta) {
  require_positive(eps, "eps");
  require_positive(gamma, "gamma");
  require_positive(delta, "delta");
  if (d < 1.0) throw ConfigError("dimension must be >= 1");
  const double lg = log2_floored(d / (gamma * eps));
  return std::ceil((d * lg * lg + log2_of(1.0 / delta)) / eps);
}

double prediction_sample_bound(double d, double eps, double delta) {
  require_positive(eps, "eps");
  require_positive(delta, "delta");
  if (d < 1.0) throw ConfigError("dimension must be >= 1");
  const double lg = log2_floored(1.0 / eps);
  return std::ceil((d * lg * lg + log2_of(1.0 / delta)) / (eps * eps));
}

BoundSetting bound_setting_from_name(const std::string& name) {
  if (name == "g") return BoundSetting::g;
  if (name == "gp") return BoundSetting::gp;
  if (name == "gg") return BoundSetting::gg;
  if (name == "gp-measurement") return BoundSetting::gp_measurement;
  if (name == "task-g") return BoundSetting::task_g;
  if (name == "task-gp") return BoundSetting::task_gp;
  if (name == "task-gg") return BoundSetting::task_gg;
  throw ConfigError("unknown bound setting: " + name);
}

std::string bound_setting_name(BoundSetting s) {
  switch (s) {
    case BoundSetting::g: return "g";
    case BoundSetting::gp: return "gp";
    case BoundSetting::gg: return "gg";
    case BoundSetting::gp_measurement: return "gp-measurement";
    case BoundSetting::task_g: return "task-g";
    case BoundSetting::task_gp: return "task-gp";
    case BoundSetting::task_gg: return "task-gg";
  }
  return "?";
}

BoundBreakdown sample_complexity_bound(BoundSetting setting, const BoundParams& p) {
  require_positive(p.eps, "eps");
  require_positive(p.delta, "delta");
  require_positive(p.nu, "nu");
  if (p.n < 1) throw ConfigError("mode count must be >= 1");

  BoundBreakdown out;
  std::ostringstream formula;

  const double conf = log2_of(1.0 / p.delta);

  auto g_shape = [&](double d, const char* dname) {
    const double lg = log2_floored(1.0 / (p.nu * p.eps));
    const double pref = 1.0 / (std::pow(p.nu, 4) * p.eps * p.eps);
    out.d_value = d;
    out.dim_part = std::ceil(pref * d * lg * lg);
    out.conf_part = std::ceil(pref * conf);
    out.total = std::ceil(pref * (d * lg * lg + conf));
    formula << "(1/(nu^4 eps^2)) (" << dname << " log2^2(1/(nu eps)) + log2(1/delta)), "
            << dname << " = " << d;
  };

  switch (setting) {
    case BoundSetting::g:
      g_shape(pdim_upper_bound(ClassTag::f_g, p.n), "pdim(f_g)");
      break;
    case BoundSetting::gp:
      g_shape(pdim_upper_bound(ClassTag::f_gp, p.n, p.photon_cutoff), "pdim(f_gp)");
      break;
    case BoundSetting::gp_measurement: {
      const double d = std::pow(p.photon_cutoff + 1.0, p.n);
      g_shape(d, "(K+1)^n");
      break;
    }
    case BoundSetting::task_g:
      g_shape(pdim_upper_bound(ClassTag::f_g, p.n, 0, p.ell), "(ell+1) pdim(f_g)");
      break;
    case BoundSetting::task_gp:
      g_shape(pdim_upper_bound(ClassTag::f_gp, p.n, p.photon_cutoff, p.ell),
              "(ell+1) pdim(f_gp)");
      break;
    case BoundSetting::gg:
    case BoundSetting::task_gg: {
      require_positive(p.b2, "b2");
      require_positive(p.b3, "b3");
      if (p.b1 < 0.0) throw ConfigError("b1 must be nonnegative");
      const int ell = (setting == BoundSetting::task_gg) ? p.ell : 0;
      const double d = pdim_upper_bound(ClassTag::f_exp, p.n, 0, ell);
      const double eps_p = p.nu * p.nu * p.eps;
      const double b_ratio = p.b2 / p.b3;
      const double b_tilde = log2_floored(p.b1 * b_ratio) + 9.0;
      const double lg = log2_floored(b_ratio * b_tilde / (eps_p * d));
      out.d_value = d;
      out.dim_part = std::ceil(d * b_ratio * b_ratio / std::pow(eps_p, 4) * lg);
      out.conf_part = std::ceil(conf / (eps_p * eps_p));
      out.total = out.dim_part + out.conf_part;
      formula << "d B^2/eps'^4 log2(B Bt/(eps' d)) + log2(1/delta)/eps'^2, d = " << d
              << ", B = " << b_ratio << ", Bt = " << b_tilde << ", eps' = " << eps_p;
      break;
    }
  }
  out.formula = formula.str();
  return out;
}

}  // namespace cvlearn
