#include <doctest.h>

#include <cmath>
#include <limits>

#include "femdd/discretization.hpp"
#include "femdd/error.hpp"
#include "femdd/jrecon.hpp"

using namespace femdd;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("B(0) is exactly one") { CHECK(bernoulli(0.0) == 1.0); }

TEST_CASE("B matches 50-digit reference values") {
  // z / expm1(z) evaluated with 50 significant digits.
  struct Ref {
    double z, b;
  };
  const Ref refs[] = {
      {1e-8, 0.9999999950000000083333333},
      {-1e-8, 1.000000005000000008333333},
      {0.01, 0.9950083333194444775131448},
      {-0.01, 1.005008333319444477513145},
      {0.5, 0.7707470412683991420655517},
      {-0.5, 1.270747041268399142065552},
      {5.0, 0.0339182745315211554800995},
      {-5.0, 5.0339182745315211554801},
      {10.0, 0.0004540199100968776832896026},
      {50.0, 9.643749239819588915088574e-21},
      {-50.0, 50.00000000000000000000964},
      {500.0, 3.562288203370642765774579e-215},
      {-500.0, 500.0},
      {-700.0, 700.0},
  };
  for (const auto& r : refs) {
    CAPTURE(r.z);
    CHECK(rel(bernoulli(r.z), r.b) < 4e-16);
  }
}

TEST_CASE("e^Z B(Z) = B(-Z)") {
  for (double z : {0.5, -0.5, 5.0, -5.0, 50.0, -50.0, 500.0, -500.0}) {
    CAPTURE(z);
    // exp(500) * B(500) would overflow nowhere, but compute in logs to be safe.
    const double lhs = std::exp(z + std::log(bernoulli(z)));
    CHECK(rel(lhs, bernoulli(-z)) < 1e-13);
  }
}

TEST_CASE("series and exact branches agree at the switch") {
  const double t = kBernoulliSeriesThreshold;
  for (double z : {t, -t, std::nextafter(t, 0.0), std::nextafter(-t, 0.0)}) {
    CAPTURE(z);
    CHECK(std::abs(bernoulli_series(z) - bernoulli_exact(z)) < 1e-15);
  }
}

TEST_CASE("B is positive and decreasing") {
  double prev = std::numeric_limits<double>::infinity();
  for (double z = -60.0; z <= 60.0; z += 0.37) {
    const double b = bernoulli(z);
    CHECK(b > 0.0);
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("B rejects arguments outside the window") {
  CHECK_THROWS_AS(bernoulli(701.0), RangeError);
  CHECK_THROWS_AS(bernoulli(-701.0), RangeError);
  CHECK_THROWS_AS(bernoulli(std::nan("")), RangeError);
}

TEST_CASE("1D optimal diffusion function") {
  // Phi(Pe) = B(2 Pe) + Pe - 1; Phi(5) = B(10) + 4.
  CHECK(rel(stabilization_phi_1d(5.0), 4.00045401991009687768329) < 1e-15);
  CHECK(stabilization_phi_1d(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  // Small-Pe behaviour: Phi ~ Pe^2 / 3.
  CHECK(rel(stabilization_phi_1d(1e-4), 1e-8 / 3.0) < 1e-3);
  CHECK_THROWS(stabilization_phi_1d(-1.0));
}
