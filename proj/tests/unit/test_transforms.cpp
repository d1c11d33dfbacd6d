#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "doctest.h"
#include "kplane/errors.hpp"
#include "kplane/fields.hpp"
#include "kplane/transforms.hpp"

using namespace kplane;
using geom::Subspace;
using geom::Vector;
using transforms::QuadMode;
using transforms::QuadSpec;

namespace {

QuadSpec spec(std::size_t samples, std::uint64_t seed = 0) {
  QuadSpec q;
  q.samples = samples;
  q.stream = randgeo::RngStream{seed, 0};
  return q;
}

bool near(double est, double target, double se) { return std::abs(est - target) <= 4.0 * se + 1e-12; }

Vector point(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("chords of the unit disk") {
  const auto disk = fields::ball_indicator(2, 1.0);
  for (double d : {0.0, 0.5, 0.9}) {
    for (auto mode : {QuadMode::PlainMC, QuadMode::StratifiedRadial}) {
      auto q = spec(100000);
      q.mode = mode;
      const auto e = transforms::kplane_transform_at(disk, point({0.0, d}), Subspace::coordinate(2, 1), q);
      CHECK(near(e.value, 2.0 * std::sqrt(1.0 - d * d), e.std_error));
    }
  }
}

TEST_CASE("plane sections of the unit ball in R^3") {
  const auto ball = fields::ball_indicator(3, 1.0);
  const auto e = transforms::kplane_transform_at(ball, point({0.0, 0.0, 0.6}), Subspace::coordinate(3, 2), spec(100000));
  CHECK(near(e.value, M_PI * (1.0 - 0.36), e.std_error));
}

TEST_CASE("Gaussian plane integrals: exp(-pi |x_perp|^2)") {
  for (auto [n, k] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{3, 2}, std::pair{4, 2}}) {
    const auto g = fields::gaussian(n);
    Vector x = Vector::Zero(n);
    x(n - 1) = 0.4;
    const auto e = transforms::kplane_transform_at(g, x, Subspace::coordinate(n, k), spec(100000, n * 10 + k));
    CHECK(near(e.value, std::exp(-M_PI * 0.16), e.std_error));
  }
}

TEST_CASE("transform is translation-invariant along the plane") {
  const auto g = fields::gaussian(3, 2.0, point({0.1, -0.2, 0.3}));
  const auto theta = Subspace::coordinate(3, 1);
  auto q = spec(50000, 4);
  const auto a = transforms::kplane_transform_at(g, point({0.0, 0.1, 0.0}), theta, q);
  const auto b = transforms::kplane_transform_at(g, point({5.0, 0.1, 0.0}), theta, q);
  const auto plane = geom::AffineKPlane::through(theta, point({5.0, 0.1, 0.0}));
  CHECK(plane.base()(0) == doctest::Approx(0.0));
  CHECK(near(a.value, b.value, std::hypot(a.std_error, b.std_error)));
}

TEST_CASE("non-integrable fields are refused outside divergence mode") {
  const auto f = fields::log_divergent(2, 1, 0.6);
  CHECK_THROWS_AS(transforms::kplane_transform_at(f, Vector::Zero(2), Subspace::coordinate(2, 1), spec(1000)),
                  RefusalError);
  auto q = spec(1000);
  q.divergence_mode = true;
  q.truncation = 10.0;
  CHECK_NOTHROW(transforms::kplane_transform_at(f, Vector::Zero(2), Subspace::coordinate(2, 1), q));
}

TEST_CASE("sphere transform normalization") {
  for (auto [n, k] : {std::pair{3, 1}, std::pair{3, 2}, std::pair{5, 3}}) {
    const auto theta = Subspace::coordinate(n, k);
    const auto one = transforms::sphere_transform(fields::sphere_constant(n), theta, spec(20000));
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-14));
    const auto sq = transforms::sphere_transform(fields::coordinate_power(n, 2, 0), theta, spec(20000));
    CHECK(near(sq.value, 1.0 / k, sq.std_error));
  }
}

TEST_CASE("mixed norm of a Gaussian") {
  // T f(theta, y) = exp(-pi |y|^2) on theta-perp for every theta.
  const auto g = fields::gaussian(2);
  auto q = spec(40000, 3);
  q.transform_points = 16;
  const randgeo::TruncationBox box(g.radius);
  const auto l1 = transforms::mixed_norm(g, 2, 1, 1.0, 1.0, box, q);
  CHECK(near(l1.value, 1.0, l1.std_error));
  const auto l2 = transforms::mixed_norm(g, 2, 1, 2.0, 2.0, box, q);
  CHECK(near(l2.value, std::pow(0.5, 0.25), l2.std_error));
}

TEST_CASE("multilinear form of three Gaussians in the plane") {
  // integral over lines of prod T f_j = int_G int_{theta-perp} exp(-3 pi y^2) dy = 3^{-1/2}
  std::vector<fields::ScalarField> f(3, fields::gaussian(2));
  auto q = spec(40000, 5);
  q.transform_points = 16;
  const auto e = transforms::multilinear_A(f, 1, randgeo::TruncationBox(f[0].radius), q);
  CHECK(near(e.value, 1.0 / std::sqrt(3.0), e.std_error));
}

TEST_CASE("line form of the sphere multilinear functional") {
  std::vector<fields::SphereField> f(3, fields::sphere_constant(3, 2.0));
  const auto e = transforms::multilinear_B_line(f, spec(1000));
  CHECK(e.value == doctest::Approx(8.0));
}

TEST_CASE("B_alpha on radial fields") {
  const Vector omega = Vector::Unit(3, 0);
  for (double alpha : {0.5, 1.0, 2.5}) {
    const auto ball = transforms::b_alpha(fields::ball_indicator(3, 1.0), omega, alpha, spec(0));
    CHECK(ball.value == doctest::Approx(1.0 / alpha).epsilon(1e-8));
    // int_0^inf exp(-pi t^2) t^{alpha-1} dt = Gamma(alpha/2) / (2 pi^{alpha/2})
    const auto g = transforms::b_alpha(fields::gaussian(3), omega, alpha, spec(0));
    CHECK(g.value == doctest::Approx(boost::math::tgamma(alpha / 2) / (2.0 * std::pow(M_PI, alpha / 2))).epsilon(1e-5));
  }
  CHECK_THROWS_AS(transforms::b_alpha(fields::gaussian(3), Vector::Ones(3), 1.0, spec(0)), InvalidInput);
}

TEST_CASE("C_alpha of a constant is a beta integral") {
  const Vector wt = Vector::Unit(2, 1);
  for (double alpha : {1.5, 2.0, 3.0}) {
    // int_0^pi sin^{alpha-2} t dt = B(1/2, (alpha-1)/2)
    const auto e = transforms::c_alpha(fields::sphere_constant(3), wt, alpha, spec(0));
    CHECK(e.value == doctest::Approx(boost::math::beta(0.5, (alpha - 1) / 2)).epsilon(1e-8));
  }
  CHECK_THROWS_AS(transforms::c_alpha(fields::sphere_constant(3), wt, 1.0, spec(0)), RefusalError);
}

TEST_CASE("quadrature spec validation") {
  auto q = spec(0);
  q.samples = 0;
  CHECK_THROWS(transforms::kplane_transform_at(fields::gaussian(2), Vector::Zero(2), Subspace::coordinate(2, 1), q));
  CHECK_THROWS_AS(
      transforms::kplane_transform_at(fields::gaussian(3), Vector::Zero(2), Subspace::coordinate(2, 1), spec(100)),
      InvalidInput);
}
