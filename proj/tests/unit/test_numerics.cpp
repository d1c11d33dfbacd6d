#include <cmath>

#include "doctest.h"
#include "kplane/mc.hpp"
#include "kplane/quadrature.hpp"

using namespace kplane;
using geom::Vector;

TEST_CASE("accumulator matches direct mean and variance") {
  const std::vector<double> xs{1.0, 4.0, 2.0, 8.0, 5.0};
  mc::Accumulator a;
  for (double x : xs) a.add(x);
  CHECK(a.count() == 5);
  CHECK(a.mean(0) == doctest::Approx(4.0));
  // sum (x - 4)^2 = 9 + 0 + 4 + 16 + 1 = 30
  CHECK(a.variance(0) == doctest::Approx(7.5));
  CHECK(a.std_error(0) == doctest::Approx(std::sqrt(7.5 / 5.0)));
}

TEST_CASE("merging accumulators equals accumulating everything") {
  mc::Accumulator a(2);
  mc::Accumulator b(2);
  mc::Accumulator all(2);
  for (int i = 0; i < 40; ++i) {
    Vector x(2);
    x << std::sin(i), i * 0.1;
    (i < 15 ? a : b).add(x);
    all.add(x);
  }
  a.merge(b);
  CHECK(a.count() == all.count());
  CHECK((a.mean() - all.mean()).norm() < 1e-12);
  CHECK((a.covariance() - all.covariance()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("run depends only on stream, samples and workers") {
  const auto fn = [](randgeo::Rng& rng, Vector& out) { out(0) = rng.uniform(); };
  for (int w : {1, 3}) {
    const auto a = mc::run(randgeo::RngStream{9, 0}, 1000, w, 1, fn);
    const auto b = mc::run(randgeo::RngStream{9, 0}, 1000, w, 1, fn);
    CHECK(a.mean(0) == b.mean(0));
    CHECK(a.count() == 1000);
  }
}

TEST_CASE("uniform mean is 1/2 within the reported error") {
  const auto a = mc::run(randgeo::RngStream{10, 0}, 100000, 2, 1,
                         [](randgeo::Rng& rng, Vector& out) { out(0) = rng.uniform(); });
  CHECK(std::abs(a.mean(0) - 0.5) <= 4.0 * a.std_error(0));
  CHECK(a.std_error(0) == doctest::Approx(std::sqrt(1.0 / 12.0 / 100000)).epsilon(0.02));
}

TEST_CASE("adaptive Gauss-Kronrod") {
  CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, M_PI).value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(quad::integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0).value ==
        doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
  // jump at 1/3
  const auto r = quad::integrate([](double x) { return x < 1.0 / 3.0 ? 1.0 : 0.0; }, 0.0, 1.0, 1e-8);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("tanh-sinh handles endpoint singularities") {
  CHECK(quad::integrate_singular([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0).value ==
        doctest::Approx(2.0).epsilon(1e-8));
  CHECK(quad::integrate_singular([](double x) { return std::log(x); }, 0.0, 1.0).value ==
        doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("piecewise integration over breakpoints") {
  const auto r = quad::integrate_pieces([](double x) { return std::abs(x - 0.5); }, {0.0, 0.5, 1.0});
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("maximize returns the maximum value") {
  CHECK(quad::maximize([](double x) { return x * (1.0 - x); }, 0.0, 1.0) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(quad::maximize([](double x) { return std::sin(3.0 * x); }, 0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
}
