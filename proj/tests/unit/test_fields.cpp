#include <cmath>

#include "doctest.h"
#include "kplane/errors.hpp"
#include "kplane/fields.hpp"

using namespace kplane;
using geom::Vector;

TEST_CASE("ball indicator") {
  const auto f = fields::ball_indicator(3, 0.5);
  CHECK(f(Vector::Zero(3)) == 1.0);
  CHECK(f(Vector::Constant(3, 0.4)) == 0.0);
  CHECK(*f.analytic_lp(2.0) == doctest::Approx(std::sqrt(4.0 * M_PI / 3.0 * 0.125)));
}

TEST_CASE("Gaussian exp(-pi|x|^2) has unit integral in every dimension") {
  for (int n : {1, 2, 5}) CHECK(*fields::gaussian(n).analytic_lp(1.0) == doctest::Approx(1.0));
  // ||f||_2^2 = int exp(-2 pi |x|^2) = 2^{-n/2}
  CHECK(*fields::gaussian(2).analytic_lp(2.0) == doctest::Approx(std::pow(0.5, 0.5)));
}

TEST_CASE("Gaussian truncation radius bounds the chi-square tail") {
  // n = 1: P(|Z| > R) for density ~ exp(-pi x^2) is erfc(R sqrt(pi))
  const double r = fields::gaussian_truncation_radius(1, M_PI);
  CHECK(std::erfc(r * std::sqrt(M_PI)) <= 1e-6);
  CHECK(fields::gaussian_truncation_radius(3, M_PI) > r);
}

TEST_CASE("dilation scales the argument and the norms") {
  const auto f = fields::gaussian(2);
  const auto g = fields::dilate(f, 2.0);
  Vector x(2);
  x << 0.3, -0.1;
  CHECK(g(x) == doctest::Approx(f(2.0 * x)));
  // ||f(delta .)||_p = delta^{-n/p} ||f||_p
  CHECK(*g.analytic_lp(1.5) == doctest::Approx(std::pow(2.0, -2.0 / 1.5) * *f.analytic_lp(1.5)));
  CHECK_THROWS_AS(fields::dilate(f, 0.0), InvalidInput);
}

TEST_CASE("tube indicator") {
  const auto t = fields::tube(3, 1, 0.1);
  Vector x = Vector::Zero(3);
  x(0) = 0.9;
  x(1) = 0.05;
  CHECK(t(x) == 1.0);
  x(1) = 0.2;
  CHECK(t(x) == 0.0);
}

TEST_CASE("radial power") {
  const auto f = fields::radial_power(2, 0.5, 0.01, 1.0);
  Vector x = Vector::Zero(2);
  x(0) = 0.25;
  CHECK(f(x) == doctest::Approx(2.0));
  x(0) = 2.0;
  CHECK(f(x) == 0.0);
}

TEST_CASE("linear combination") {
  const auto h = fields::linear_combination(2.0, fields::gaussian(2), -1.0, fields::ball_indicator(2, 1.0));
  CHECK(h(Vector::Zero(2)) == doctest::Approx(1.0));
}

TEST_CASE("sphere fields") {
  const auto cap = fields::zonal_cap(3, M_PI / 3);
  Vector w = Vector::Unit(3, 0);
  CHECK(cap(w) == 1.0);
  CHECK(cap(Vector::Unit(3, 1)) == 0.0);
  const auto c = fields::coordinate_power(3, 2, 1);
  w << 0.6, 0.8, 0.0;
  CHECK(c(w) == doctest::Approx(0.64));
  CHECK(fields::sphere_constant(4, 2.5)(Vector::Unit(4, 2)) == 2.5);
}

TEST_CASE("field spec parser") {
  const auto b = fields::parse_field_spec("ball:r=2", 3, 1);
  REQUIRE(std::holds_alternative<fields::ScalarField>(b));
  CHECK(std::get<fields::ScalarField>(b).radius == doctest::Approx(2.0));
  const auto g = fields::parse_field_spec("gauss", 2, 1);
  CHECK(std::get<fields::ScalarField>(g)(Vector::Zero(2)) == 1.0);
  const auto cap = fields::parse_field_spec("cap:angle=0.5", 3, 1);
  CHECK(std::holds_alternative<fields::SphereField>(cap));
  CHECK_THROWS_AS(fields::parse_field_spec("nosuchfield", 2, 1), InvalidInput);
  CHECK_THROWS_AS(fields::parse_field_spec("ball:r=abc", 2, 1), InvalidInput);
  CHECK_THROWS_AS(fields::parse_field_spec("ball:bogus=1", 2, 1), InvalidInput);
  CHECK_FALSE(fields::field_spec_help().empty());
}

TEST_CASE("evaluation checks the argument dimension") {
  CHECK_THROWS_AS(fields::gaussian(3)(Vector::Zero(2)), InvalidInput);
}

TEST_CASE("Monte-Carlo L^p power of the unit ball is its volume") {
  const auto acc = fields::lp_power_estimate(fields::ball_indicator(2, 1.0), 3.0, randgeo::RngStream{1, 0}, 100000, 1);
  CHECK(std::abs(acc.mean(0) - M_PI) <= 4.0 * acc.std_error(0) + 1e-12);
}
