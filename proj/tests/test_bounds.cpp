#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvlearn/bounds.hpp"
#include "cvlearn/errors.hpp"

using namespace cvlearn;
using doctest::Approx;

TEST_CASE("pseudo-dimension formulas at small sizes") {
  CHECK(pdim_upper_bound(ClassTag::f_d, 1) == Approx(27.509775004326936).epsilon(1e-14));
  CHECK(pdim_upper_bound(ClassTag::f_quad, 1) == Approx(51.69925001442312).epsilon(1e-14));
  CHECK(pdim_upper_bound(ClassTag::f_p, 1, 5) == Approx(71.29283016944966).epsilon(1e-14));
  CHECK(pdim_upper_bound(ClassTag::f_g, 1) == Approx(106.718800023077).epsilon(1e-14));
  CHECK(pdim_upper_bound(ClassTag::f_g, 2) == Approx(402.38338786665156).epsilon(1e-14));
  CHECK(pdim_upper_bound(ClassTag::f_gp, 2, 4) == Approx(620.9893256842645).epsilon(1e-14));
  CHECK(pdim_upper_bound(ClassTag::f_exp, 1) == Approx(231.12477430614294).epsilon(1e-14));
  CHECK(pdim_upper_bound(ClassTag::f_ang, 1) == Approx(162.718800023077).epsilon(1e-14));
  // Encoding composition multiplies the parameter count by (ell + 1).
  CHECK(pdim_upper_bound(ClassTag::f_g, 2, 0, 3) ==
        Approx(4.0 * pdim_upper_bound(ClassTag::f_g, 2)).epsilon(1e-14));
  CHECK(poly_class_pdim(3, 10) == Approx(6.0 * std::log2(120.0)).epsilon(1e-14));
  CHECK_THROWS_AS(pdim_upper_bound(ClassTag::f_p, 1, 0), ConfigError);
}

TEST_CASE("covering bound structure") {
  SUBCASE("unit log argument gives a zero bound") {
    const double eps = 0.37;
    const double k = eps / (2.0 * std::numbers::e);
    CHECK(covering_bound_pdim(1.0, 1.0, eps, k) == Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("doubling the range ratio at least quadruples the hull factor") {
    const double base = covering_bound_gg(10.0, 2.0, 5.0, 0.1, 50.0);
    const double doubled = covering_bound_gg(10.0, 4.0, 5.0, 0.1, 50.0);
    CHECK(doubled >= 4.0 * base);
  }
  SUBCASE("monotone increasing in the scale") {
    double prev = 0.0;
    for (double k : {10.0, 30.0, 90.0, 270.0}) {
      const double v = covering_bound_pdim(12.0, 1.0, 0.05, k);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("sample-complexity golden values") {
  BoundParams p;
  p.eps = 0.1;
  p.delta = 0.01;
  p.nu = 1.0;

  SUBCASE("gaussian setting") {
    p.n = 1;
    const auto b = sample_complexity_bound(BoundSetting::g, p);
    CHECK(b.d_value == Approx(106.718800023077).epsilon(1e-14));
    CHECK(b.dim_part == 117767.0);
    CHECK(b.conf_part == 665.0);
    CHECK(b.total == 118431.0);
    p.n = 2;
    CHECK(sample_complexity_bound(BoundSetting::g, p).total == 444703.0);
  }
  SUBCASE("photodetection setting") {
    p.n = 2;
    p.photon_cutoff = 4;
    CHECK(sample_complexity_bound(BoundSetting::gp, p).total == 685939.0);
    p.photon_cutoff = 8;
    CHECK(sample_complexity_bound(BoundSetting::gp, p).total == 716838.0);
  }
  SUBCASE("photodetection measurement learning blows up exponentially") {
    p.photon_cutoff = 5;
    p.n = 3;
    const auto b = sample_complexity_bound(BoundSetting::gp_measurement, p);
    CHECK(b.d_value == 216.0);
    CHECK(b.total == 239025.0);
    double prev = 0.0;
    for (int n : {1, 2, 3, 4}) {
      p.n = n;
      const auto bn = sample_complexity_bound(BoundSetting::gp_measurement, p);
      CHECK(bn.d_value == Approx(std::pow(6.0, n)));
      if (prev > 0.0) CHECK(bn.d_value / prev == Approx(6.0));
      prev = bn.d_value;
    }
  }
  SUBCASE("generalized setting") {
    p.n = 1;
    p.b1 = 2.0;
    p.b2 = 3.0;
    p.b3 = 0.5;
    const auto b = sample_complexity_bound(BoundSetting::gg, p);
    CHECK(b.d_value == Approx(231.12477430614294).epsilon(1e-14));
    CHECK(b.dim_part == 142113295.0);
    CHECK(b.conf_part == 665.0);
    CHECK(b.total == 142113960.0);
  }
  SUBCASE("task setting scales the dimension by ell + 1") {
    p.n = 2;
    p.ell = 3;
    CHECK(sample_complexity_bound(BoundSetting::task_g, p).total == 1776818.0);
  }
}

TEST_CASE("sample-complexity monotonicity") {
  BoundParams p;
  p.n = 1;
  p.delta = 0.01;
  p.nu = 1.0;

  SUBCASE("decreasing in eps") {
    double prev = 1e300;
    for (double eps : {0.02, 0.05, 0.1, 0.2}) {
      p.eps = eps;
      const double t = sample_complexity_bound(BoundSetting::g, p).total;
      CHECK(t < prev);
      prev = t;
    }
  }
  SUBCASE("increasing in n") {
    p.eps = 0.1;
    double prev = 0.0;
    for (int n : {1, 2, 3, 4}) {
      p.n = n;
      const double t = sample_complexity_bound(BoundSetting::g, p).total;
      CHECK(t > prev);
      prev = t;
    }
  }
  SUBCASE("increasing in K") {
    p.eps = 0.1;
    double prev = 0.0;
    for (int k : {1, 2, 4, 8, 16}) {
      p.photon_cutoff = k;
      const double t = sample_complexity_bound(BoundSetting::gp, p).total;
      CHECK(t > prev);
      prev = t;
    }
  }
  SUBCASE("K doubling adds exactly the parameter-count log increment") {
    p.eps = 0.1;
    for (int n : {1, 2, 3}) {
      p.n = n;
      for (int k : {1, 2, 4, 8}) {
        p.photon_cutoff = k;
        const double d1 = sample_complexity_bound(BoundSetting::gp, p).d_value;
        p.photon_cutoff = 2 * k;
        const double d2 = sample_complexity_bound(BoundSetting::gp, p).d_value;
        CHECK(d2 - d1 == Approx(2.0 * (2.0 * n * n + 3.0 * n)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("increasing in the coefficient-mass ratio") {
    p.eps = 0.1;
    p.b1 = 1.0;
    p.b3 = 1.0;
    double prev = 0.0;
    for (double b2 : {1.0, 2.0, 4.0, 8.0}) {
      p.b2 = b2;
      const double t = sample_complexity_bound(BoundSetting::gg, p).total;
      CHECK(t > prev);
      prev = t;
    }
  }
  SUBCASE("decreasing in delta is monotone") {
    p.eps = 0.1;
    double prev = 1e300;
    for (double delta : {0.001, 0.01, 0.1}) {
      p.delta = delta;
      const double t = sample_complexity_bound(BoundSetting::g, p).total;
      CHECK(t <= prev);
      prev = t;
    }
  }
  SUBCASE("growth ratio against the plain setting scales with eps^-2 B^2") {
    p.delta = 0.01;
    p.b1 = 1.0;
    p.b2 = 4.0;
    p.b3 = 1.0;
    double prev_ratio = 0.0;
    for (double eps : {0.2, 0.1, 0.05}) {
      p.eps = eps;
      const double tg = sample_complexity_bound(BoundSetting::g, p).total;
      const double tgg = sample_complexity_bound(BoundSetting::gg, p).total;
      const double ratio = tgg / tg;
      CHECK(ratio > prev_ratio);  // grows as eps shrinks
      prev_ratio = ratio;
    }
  }
}

TEST_CASE("mode-count doubling ratios approach the quadratic-log rate") {
  // With the explicit proof constants the n -> 2n ratio of the dimension
  // term starts just under four (the sub-quadratic parameter counts drag it
  // down at small n) and crosses four once the counts are quadratic-dominated.
  BoundParams p;
  p.eps = 0.1;
  p.delta = 0.01;
  double prev_ratio = 0.0;
  for (int n : {1, 2, 4, 8}) {
    p.n = n;
    const double t1 = sample_complexity_bound(BoundSetting::g, p).total;
    p.n = 2 * n;
    const double t2 = sample_complexity_bound(BoundSetting::g, p).total;
    const double ratio = t2 / t1;
    CHECK(ratio >= 3.7);
    CHECK(ratio >= prev_ratio);
    if (n >= 4) CHECK(ratio >= 4.0);
    prev_ratio = ratio;
  }
}

TEST_CASE("generic learning bounds") {
  CHECK(pconcept_sample_bound(10.0, 0.1, 0.05, 0.01) ==
        Approx(std::ceil((10.0 * std::pow(std::log2(10.0 / 0.005), 2) + std::log2(100.0)) /
                         0.1)));
  CHECK(prediction_sample_bound(10.0, 0.1, 0.01) ==
        Approx(std::ceil((10.0 * std::pow(std::log2(10.0), 2) + std::log2(100.0)) / 0.01)));
  CHECK_THROWS_AS(pconcept_sample_bound(0.5, 0.1, 0.05, 0.01), ConfigError);
  BoundParams bad;
  bad.b3 = 0.0;
  CHECK_THROWS_AS(sample_complexity_bound(BoundSetting::gg, bad), ConfigError);
}

TEST_CASE("name round trips") {
  for (const char* name : {"g", "gp", "gg", "gp-measurement", "task-g", "task-gp", "task-gg"}) {
    CHECK(bound_setting_name(bound_setting_from_name(name)) == name);
  }
  for (const char* name : {"f_d", "f_quad", "f_p", "f_g", "f_gp", "f_exp", "f_im", "f_ang"}) {
    CHECK(class_tag_name(class_tag_from_name(name)) == name);
  }
  CHECK_THROWS_AS(bound_setting_from_name("nope"), ConfigError);
}
