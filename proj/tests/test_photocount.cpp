#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "cvlearn/gaussian.hpp"
#include "cvlearn/photocount.hpp"
#include "cvlearn/random_instances.hpp"

using namespace cvlearn;
using doctest::Approx;

namespace {

// Symbolic-differentiation oracle, independent of the value recurrence:
// polynomials in the 2n Gaussian arguments stored as exponent -> coefficient.
struct Poly {
  std::map<std::vector<int>, double> terms;

  static Poly one(int dim) {
    Poly p;
    p.terms[std::vector<int>(dim, 0)] = 1.0;
    return p;
  }

  Poly derivative(int j) const {
    Poly out;
    for (const auto& [e, c] : terms) {
      if (e[j] == 0) continue;
      auto e2 = e;
      e2[j] -= 1;
      out.terms[e2] += c * e[j];
    }
    return out;
  }

  Poly times_linear(const Eigen::VectorXd& coeffs) const {
    Poly out;
    for (const auto& [e, c] : terms) {
      for (int k = 0; k < coeffs.size(); ++k) {
        if (coeffs(k) == 0.0) continue;
        auto e2 = e;
        e2[k] += 1;
        out.terms[e2] += c * coeffs(k);
      }
    }
    return out;
  }

  Poly plus(const Poly& other, double scale) const {
    Poly out = *this;
    for (const auto& [e, c] : other.terms) out.terms[e] += scale * c;
    return out;
  }

  double eval(const Eigen::VectorXd& m) const {
    double total = 0.0;
    for (const auto& [e, c] : terms) {
      double prod = c;
      for (int k = 0; k < m.size(); ++k) {
        for (int p = 0; p < e[k]; ++p) prod *= m(k);
      }
      total += prod;
    }
    return total;
  }
};

// Exact prefactor polynomial: (-d)^nu exp(-m.A m / 2) = p(m) exp(-m.A m / 2),
// built one derivative at a time via p -> -d_j p + p (A m)_j.
double symbolic_hermite(const MatrixXd& v, const VectorXd& m, const std::vector<int>& k) {
  const int dim = static_cast<int>(m.size());
  const MatrixXd a = v.inverse();
  Poly p = Poly::one(dim);
  for (std::size_t mode = 0; mode < k.size(); ++mode) {
    for (int rep = 0; rep < k[mode]; ++rep) {
      for (int slot : {2 * static_cast<int>(mode), 2 * static_cast<int>(mode) + 1}) {
        // p -> -d_j p + p (A m)_j
        p = p.times_linear(a.row(slot).transpose()).plus(p.derivative(slot), -1.0);
      }
    }
  }
  return p.eval(m);
}

MatrixXd random_pd(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 0.4);
  MatrixXd l = MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) l(i, j) = g(rng);
  }
  return l * l.transpose() + MatrixXd::Identity(dim, dim);
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

GaussianState thermal_state(double nbar) {
  GaussianState st;
  st.mean = VectorXd::Zero(2);
  st.cov = (nbar + 0.5) * MatrixXd::Identity(2, 2);
  return st;
}

GaussianState squeezed_vacuum(double r) {
  GaussianState st;
  st.mean = VectorXd::Zero(2);
  st.cov = MatrixXd::Zero(2, 2);
  st.cov(0, 0) = 0.5 * std::exp(-2.0 * r);
  st.cov(1, 1) = 0.5 * std::exp(2.0 * r);
  return st;
}

}  // namespace

TEST_CASE("hermite: zero index gives one") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 2;
    const MatrixXd v = random_pd(2 * n, rng);
    VectorXd m(2 * n);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 2 * n; ++i) m(i) = g(rng);
    CHECK(hermite_multi(v, m, HermiteIndex{std::vector<int>(n, 0)}) == Approx(1.0));
  }
}

TEST_CASE("hermite matches symbolic differentiation for small orders") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  SUBCASE("single mode up to k = 3") {
    for (int k = 1; k <= 3; ++k) {
      for (int trial = 0; trial < 8; ++trial) {
        const MatrixXd v = random_pd(2, rng);
        VectorXd m(2);
        m << g(rng), g(rng);
        const double engine = hermite_multi(v, m, HermiteIndex{{k}});
        const double oracle = symbolic_hermite(v, m, {k});
        CHECK(engine == Approx(oracle).epsilon(1e-9));
      }
    }
  }
  SUBCASE("two modes with mixed indices") {
    for (int trial = 0; trial < 6; ++trial) {
      const MatrixXd v = random_pd(4, rng);
      VectorXd m(4);
      for (int i = 0; i < 4; ++i) m(i) = g(rng);
      const std::vector<int> k = {1 + trial % 2, 2 - trial % 2};
      const double engine = hermite_multi(v, m, HermiteIndex{k});
      const double oracle = symbolic_hermite(v, m, k);
      CHECK(engine == Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("hermite: derivative recurrence against finite differences") {
  // H_{nu+e_j} G = -d_j (H_nu G), checked with a fourth-order stencil.
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 0.7);
  const double h = 1e-2;
  for (int trial = 0; trial < 12; ++trial) {
    const MatrixXd v = random_pd(2, rng);
    VectorXd m(2);
    m << g(rng), g(rng);
    const int k = 1 + trial % 2;

    auto value = [&](const VectorXd& at, int kk) {
      const double quad = at.dot(v.inverse() * at);
      return hermite_multi(v, at, HermiteIndex{{kk}}) * std::exp(-0.5 * quad);
    };
    // Incrementing the mode index applies one derivative in each slot; test
    // the double derivative -d_0 -d_1 of H_k G against H_{k+1} G.
    auto shifted = [&](double d0, double d1) {
      VectorXd at = m;
      at(0) += d0;
      at(1) += d1;
      return value(at, k);
    };
    auto d1_at = [&](double d0) {
      return (-shifted(d0, 2 * h) + 8 * shifted(d0, h) - 8 * shifted(d0, -h) +
              shifted(d0, -2 * h)) /
             (12 * h);
    };
    const double double_deriv =
        (-d1_at(2 * h) + 8 * d1_at(h) - 8 * d1_at(-h) + d1_at(-2 * h)) / (12 * h);
    const double expected = value(m, k + 1);
    CHECK(double_deriv == Approx(expected).epsilon(5e-7));
  }
}

TEST_CASE("hermite rejects singular parameters") {
  MatrixXd v = MatrixXd::Zero(2, 2);
  v(0, 0) = 1.0;
  CHECK_THROWS_AS(hermite_multi(v, VectorXd::Zero(2), HermiteIndex{{1}}), SingularMatrixError);
}

TEST_CASE("photon counting: vacuum has zero photons") {
  CHECK(gp_outcome_probability(vacuum_state(1), identity_channel(1), HermiteIndex{{0}}) ==
        Approx(1.0).epsilon(1e-12));
  CHECK(gp_outcome_probability(vacuum_state(1), identity_channel(1), HermiteIndex{{3}}) ==
        Approx(0.0).epsilon(1e-12));
}

TEST_CASE("photon counting: coherent state is Poisson") {
  const auto st = coherent_state({1.0, 0.0});
  for (int j = 0; j <= 10; ++j) {
    const double expected = std::exp(-1.0) / factorial(j);
    CHECK(gp_outcome_probability(st, identity_channel(1), HermiteIndex{{j}}) ==
          Approx(expected).epsilon(1e-8));
  }
  // Complex amplitude: Poisson in |alpha|^2.
  const std::complex<double> alpha(0.6, -0.8);
  const auto st2 = coherent_state(alpha);
  const double a2 = std::norm(alpha);
  for (int j = 0; j <= 6; ++j) {
    const double expected = std::exp(-a2) * std::pow(a2, j) / factorial(j);
    CHECK(gp_outcome_probability(st2, identity_channel(1), HermiteIndex{{j}}) ==
          Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("photon counting: thermal state is geometric") {
  const double nbar = 1.7;
  const auto st = thermal_state(nbar);
  for (int j = 0; j <= 10; ++j) {
    const double expected = std::pow(nbar, j) / std::pow(1.0 + nbar, j + 1);
    CHECK(gp_outcome_probability(st, identity_channel(1), HermiteIndex{{j}}) ==
          Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("photon counting: squeezed vacuum") {
  const double r = 0.5;
  const auto st = squeezed_vacuum(r);
  const double t = std::tanh(r);
  for (int j = 0; j <= 9; ++j) {
    double expected = 0.0;
    if (j % 2 == 0) {
      const int half = j / 2;
      expected = factorial(j) / (std::pow(4.0, half) * factorial(half) * factorial(half)) *
                 std::pow(t, j) / std::cosh(r);
    }
    const double got = gp_outcome_probability(st, identity_channel(1), HermiteIndex{{j}});
    CHECK(got == Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("photon counting: two independent modes factorize") {
  GaussianState st;
  st.mean = VectorXd::Zero(4);
  st.cov = MatrixXd::Identity(4, 4);
  st.mean(0) = std::numbers::sqrt2 * 0.9;            // mode 0 coherent 0.9
  st.cov(0, 0) = st.cov(1, 1) = 0.5;
  st.cov(2, 2) = st.cov(3, 3) = 1.3;                 // mode 1 thermal nbar = 0.8
  const auto coh = coherent_state({0.9, 0.0});
  const auto th = thermal_state(0.8);
  for (int k0 = 0; k0 <= 4; ++k0) {
    for (int k1 = 0; k1 <= 4; ++k1) {
      const double joint =
          gp_outcome_probability(st, identity_channel(2), HermiteIndex{{k0, k1}});
      const double m0 = gp_outcome_probability(coh, identity_channel(1), HermiteIndex{{k0}});
      const double m1 = gp_outcome_probability(th, identity_channel(1), HermiteIndex{{k1}});
      CHECK(joint == Approx(m0 * m1).epsilon(1e-8));
    }
  }
}

TEST_CASE("photon counting: normalization with analytic tail") {
  for (int seed = 0; seed < 10; ++seed) {
    const auto inst = random_physical_instance(1, 5.0, 900 + seed);
    const auto out_state = apply_gaussian_channel(inst.state, inst.channel);
    const int cutoff = suggested_photon_cutoff(out_state);
    double total = 0.0;
    for (const auto& [k, p] : gp_distribution(inst.state, inst.channel, cutoff)) total += p;
    const double tail = gp_tail_bound(inst.state, inst.channel, cutoff);
    CHECK(total <= 1.0 + 1e-9);
    CHECK(total + tail >= 1.0 - 1e-6);
  }
}

TEST_CASE("coarse photodetection") {
  SUBCASE("singleton weight reduces to the plain outcome") {
    const auto st = coherent_state({0.8, 0.2});
    PhotoCountEffect eff;
    eff.cutoff = 5;
    eff.weights[{3}] = 1.0;
    CHECK(gp_coarse_probability(st, identity_channel(1), eff) ==
          Approx(gp_outcome_probability(st, identity_channel(1), HermiteIndex{{3}})));
  }
  SUBCASE("uniform weights on the vacuum capture all mass") {
    PhotoCountEffect eff;
    eff.cutoff = 6;
    for (int k = 0; k <= 6; ++k) eff.weights[{k}] = 1.0 / 7.0;
    // q is sub-normalized; the vacuum lives entirely at k = 0.
    CHECK(gp_coarse_probability(vacuum_state(1), identity_channel(1), eff) ==
          Approx(1.0 / 7.0).epsilon(1e-10));
    PhotoCountEffect full;
    full.cutoff = 6;
    full.weights[{0}] = 1.0;
    CHECK(gp_coarse_probability(vacuum_state(1), identity_channel(1), full) ==
          Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("invalid weights are rejected") {
    PhotoCountEffect eff;
    eff.cutoff = 2;
    eff.weights[{1}] = -0.2;
    CHECK_THROWS_AS(gp_coarse_probability(vacuum_state(1), identity_channel(1), eff),
                    InvalidObjectError);
    PhotoCountEffect heavy;
    heavy.cutoff = 2;
    heavy.weights[{0}] = 0.8;
    heavy.weights[{1}] = 0.5;
    CHECK_THROWS_AS(gp_coarse_probability(vacuum_state(1), identity_channel(1), heavy),
                    InvalidObjectError);
  }
}

TEST_CASE("negative round-off is clamped and counted") {
  gp_reset_clamp_count();
  // Squeezed vacuum odd outcomes are exact zeros up to round-off; sweep many
  // of them so any tiny negative triggers the clamp path.
  const auto st = squeezed_vacuum(0.9);
  for (int j = 1; j <= 21; j += 2) {
    const double p = gp_outcome_probability(st, identity_channel(1), HermiteIndex{{j}});
    CHECK(p >= 0.0);
  }
  CHECK(gp_clamp_count() >= 0);
}
