#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvlearn/gaussian.hpp"
#include "cvlearn/random_instances.hpp"

using namespace cvlearn;
using doctest::Approx;

namespace {

// Closed-form eigenvalues of a 2x2 Hermitian matrix [[a, b],[conj(b), d]].
std::pair<double, double> herm2_eigs(double a, double d, std::complex<double> b) {
  const double mid = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
  return {mid - rad, mid + rad};
}

}  // namespace

TEST_CASE("symplectic form blocks and square") {
  for (int n : {1, 2, 3}) {
    const MatrixXd omega = symplectic_form(n);
    CHECK((omega + omega.transpose()).norm() == Approx(0.0));
    CHECK((omega * omega + MatrixXd::Identity(2 * n, 2 * n)).norm() == Approx(0.0));
  }
}

TEST_CASE("state validation: vacuum saturates the uncertainty bound") {
  const auto d = validate_state(vacuum_state(1));
  CHECK(d.ok);
  CHECK(d.min_eigenvalue == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("state validation: quarter-unit covariance is unphysical") {
  GaussianState st;
  st.mean = VectorXd::Zero(2);
  st.cov = 0.25 * MatrixXd::Identity(2, 2);
  // Oracle: eigenvalues of [[1/4, i/2], [-i/2, 1/4]] in closed form.
  const auto [lo, hi] = herm2_eigs(0.25, 0.25, {0.0, 0.5});
  CHECK(lo == Approx(-0.25));
  CHECK(hi == Approx(0.75));
  const auto d = validate_state(st);
  CHECK_FALSE(d.ok);
  CHECK(d.min_eigenvalue == Approx(lo));
}

TEST_CASE("state validation: pure squeezed state is physical") {
  GaussianState st;
  st.mean = VectorXd::Zero(2);
  st.cov = MatrixXd::Zero(2, 2);
  st.cov(0, 0) = 0.5 * std::exp(-2.0);
  st.cov(1, 1) = 0.5 * std::exp(2.0);
  const auto d = validate_state(st);
  CHECK(d.ok);
  CHECK(d.min_eigenvalue == Approx(0.0).epsilon(1e-10));
  // Oracle: closed form gives eigenvalues {a + d, 0} because a d = 1/4.
  const auto [lo, hi] = herm2_eigs(st.cov(0, 0), st.cov(1, 1), {0.0, 0.5});
  CHECK(lo == Approx(0.0).epsilon(1e-12));
  CHECK(hi == Approx(st.cov(0, 0) + st.cov(1, 1)));
}

TEST_CASE("state validation rejects shape mismatches") {
  GaussianState st;
  st.mean = VectorXd::Zero(2);
  st.cov = MatrixXd::Identity(4, 4);
  CHECK_THROWS_AS(validate_state(st), ShapeError);
}

TEST_CASE("channel validation") {
  SUBCASE("identity channel") {
    const auto d = validate_channel(identity_channel(1));
    CHECK(d.ok);
  }
  SUBCASE("balanced loss channel saturates the bound") {
    GaussianChannel ch;
    ch.disp = VectorXd::Zero(2);
    ch.x_mat = std::sqrt(0.5) * MatrixXd::Identity(2, 2);
    ch.y_mat = 0.25 * MatrixXd::Identity(2, 2);
    const auto d = validate_channel(ch);
    CHECK(d.ok);
    // Oracle: eigenvalues of [[1/4, i/4], [-i/4, 1/4]].
    const auto [lo, hi] = herm2_eigs(0.25, 0.25, {0.0, 0.25});
    CHECK(d.min_eigenvalue == Approx(lo).epsilon(1e-10));
    CHECK(lo == Approx(0.0).epsilon(1e-12));
    CHECK(hi == Approx(0.5));
  }
  SUBCASE("noiseless amplification is forbidden") {
    GaussianChannel ch;
    ch.disp = VectorXd::Zero(2);
    ch.x_mat = 2.0 * MatrixXd::Identity(2, 2);
    ch.y_mat = MatrixXd::Zero(2, 2);
    const auto d = validate_channel(ch);
    CHECK_FALSE(d.ok);
    CHECK(d.min_eigenvalue == Approx(-1.5));
  }
}

TEST_CASE("channel action") {
  SUBCASE("identity preserves the state") {
    const auto inst = random_physical_instance(2, 6.0, 11);
    const auto out = apply_gaussian_channel(inst.state, identity_channel(2));
    CHECK((out.mean - inst.state.mean).norm() == Approx(0.0));
    CHECK((out.cov - inst.state.cov).norm() == Approx(0.0));
  }
  SUBCASE("balanced loss on a coherent state") {
    GaussianChannel ch;
    ch.disp = VectorXd::Zero(2);
    ch.x_mat = std::sqrt(0.5) * MatrixXd::Identity(2, 2);
    ch.y_mat = 0.25 * MatrixXd::Identity(2, 2);
    const auto out = apply_gaussian_channel(coherent_state({1.0, 0.0}), ch);
    CHECK(out.mean(0) == Approx(1.0));
    CHECK(out.mean(1) == Approx(0.0));
    CHECK((out.cov - 0.5 * MatrixXd::Identity(2, 2)).norm() == Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("composition law on random instances") {
    for (int seed = 0; seed < 50; ++seed) {
      std::mt19937_64 rng(seed);
      const auto st = random_state(2, 8.0, rng);
      const auto ch1 = random_channel(2, 8.0, rng);
      const auto ch2 = random_channel(2, 8.0, rng);
      const auto sequential = apply_gaussian_channel(apply_gaussian_channel(st, ch1), ch2);
      const auto composed = apply_gaussian_channel(st, compose_channels(ch2, ch1));
      CHECK((sequential.mean - composed.mean).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((sequential.cov - composed.cov).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("channel action preserves validity on 1000 random instances") {
    for (int seed = 0; seed < 1000; ++seed) {
      const auto inst = random_physical_instance(1 + seed % 2, 6.0, 7000 + seed);
      REQUIRE(validate_state(inst.state).ok);
      REQUIRE(validate_channel(inst.channel).ok);
      REQUIRE(validate_effect(inst.effect).ok);
      const auto out = apply_gaussian_channel(inst.state, inst.channel);
      CHECK(validate_state(out).ok);
    }
  }
}

TEST_CASE("gaussian density closed forms") {
  const VectorXd zero2 = VectorXd::Zero(2);
  CHECK(gaussian_density(zero2, 0.5 * MatrixXd::Identity(2, 2), zero2) ==
        Approx(1.0 / std::numbers::pi).epsilon(1e-12));
  CHECK(gaussian_density(zero2, MatrixXd::Identity(2, 2), zero2) ==
        Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-12));
  // Peak value equals the normalization for arbitrary covariances.
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const auto st = random_state(2, 8.0, rng);
    const double peak = gaussian_density(st.mean, st.cov, st.mean);
    const double norm = 1.0 / std::sqrt((2.0 * std::numbers::pi * st.cov).determinant());
    CHECK(peak == Approx(norm).epsilon(1e-10));
  }
}

TEST_CASE("gaussian density rejects singular covariance") {
  const VectorXd zero2 = VectorXd::Zero(2);
  MatrixXd cov = MatrixXd::Zero(2, 2);
  cov(0, 0) = 1.0;
  CHECK_THROWS_AS(gaussian_density(zero2, cov, zero2), SingularMatrixError);
}

TEST_CASE("outcome density closed forms") {
  const auto het0 = heterodyne_effect(VectorXd::Zero(2));
  SUBCASE("vacuum through identity against heterodyne at the origin") {
    CHECK(gaussian_outcome_density(vacuum_state(1), identity_channel(1), het0) ==
          Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-12));
  }
  SUBCASE("coherent state overlap") {
    // Oracle: |<0|alpha>|^2 = exp(-|alpha|^2), divided by (2 pi)^n.
    const double expected = std::exp(-1.0) / (2.0 * std::numbers::pi);
    CHECK(gaussian_outcome_density(coherent_state({1.0, 0.0}), identity_channel(1), het0) ==
          Approx(expected).epsilon(1e-12));
  }
  SUBCASE("peak value at matching outcome") {
    const auto inst = random_physical_instance(1, 5.0, 3);
    const auto out = apply_gaussian_channel(inst.state, inst.channel);
    GeneralDyneEffect eff = inst.effect;
    eff.outcome = out.mean;
    const double val = gaussian_outcome_density(inst.state, inst.channel, eff);
    const double expected =
        1.0 / std::sqrt((2.0 * std::numbers::pi * (out.cov + eff.cov)).determinant());
    CHECK(val == Approx(expected).epsilon(1e-10));
  }
  SUBCASE("symmetry under swapping output state and effect") {
    for (int seed = 0; seed < 30; ++seed) {
      const auto inst = random_physical_instance(2, 6.0, 100 + seed);
      const auto out = apply_gaussian_channel(inst.state, inst.channel);
      const double lhs = gaussian_outcome_density(inst.state, inst.channel, inst.effect);
      // Swap roles: the effect parameters become the state, the channel
      // output becomes the effect.
      GaussianState swapped_state{inst.effect.outcome, inst.effect.cov};
      GeneralDyneEffect swapped_eff{out.mean, out.cov};
      const double rhs =
          gaussian_outcome_density(swapped_state, identity_channel(2), swapped_eff);
      CHECK(lhs == Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("effect probability") {
  const auto het0 = heterodyne_effect(VectorXd::Zero(2));
  CHECK(gaussian_effect_probability(vacuum_state(1), identity_channel(1), het0) ==
        Approx(1.0).epsilon(1e-12));
  CHECK(gaussian_effect_probability(coherent_state({1.0, 0.0}), identity_channel(1), het0) ==
        Approx(std::exp(-1.0)).epsilon(1e-12));
  SUBCASE("stays in the unit interval on random instances") {
    for (int seed = 0; seed < 500; ++seed) {
      const auto inst = random_physical_instance(1 + seed % 2, 7.0, 40000 + seed);
      const double p = gaussian_effect_probability(inst.state, inst.channel, inst.effect);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("random instances are deterministic and well shaped") {
  const auto a = random_physical_instance(2, 6.0, 42);
  const auto b = random_physical_instance(2, 6.0, 42);
  CHECK((a.state.mean - b.state.mean).norm() == 0.0);
  CHECK((a.state.cov - b.state.cov).norm() == 0.0);
  CHECK((a.channel.x_mat - b.channel.x_mat).norm() == 0.0);
  CHECK((a.effect.outcome - b.effect.outcome).norm() == 0.0);
  CHECK(a.state.mean.size() == 4);
  CHECK(a.state.cov.rows() == 4);
  CHECK(a.state.cov.cols() == 4);
  CHECK(a.state.mean.norm() <= 6.0);
  CHECK(a.state.cov.trace() <= 6.0);
}

TEST_CASE("mean photon number of simple states") {
  CHECK(mean_photon_number(vacuum_state(1)) == Approx(0.0));
  CHECK(mean_photon_number(coherent_state({1.0, 0.0})) == Approx(1.0));
  GaussianState thermal;
  thermal.mean = VectorXd::Zero(2);
  thermal.cov = 2.5 * MatrixXd::Identity(2, 2);  // nu = 5/2 -> nbar = 2
  CHECK(mean_photon_number(thermal) == Approx(2.0));
}
