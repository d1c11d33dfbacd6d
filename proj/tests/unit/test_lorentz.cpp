#include <cmath>

#include "doctest.h"
#include "kplane/errors.hpp"
#include "kplane/fields.hpp"
#include "kplane/lorentz.hpp"

using namespace kplane;

namespace {

lorentz::DistributionSample sample(const fields::ScalarField& f, std::size_t n = 200000) {
  lorentz::SampleSpec s;
  s.samples = n;
  s.stream = randgeo::RngStream{1, 0};
  s.sampling = lorentz::Sampling::StratifiedRadial;
  return lorentz::sample_distribution(f, s);
}

}  // namespace

TEST_CASE("explicit step profile") {
  // f* = 2 on [0, 1), 1 on [1, 3)
  const lorentz::RearrangementProfile f({1.0, 3.0}, {2.0, 1.0});
  CHECK(f(0.5) == 2.0);
  CHECK(f(2.0) == 1.0);
  CHECK(f(4.0) == 0.0);
  CHECK(f.distribution(1.5) == doctest::Approx(1.0));
  CHECK(f.support_measure() == 3.0);
  CHECK(lorentz::lorentz_norm(f, 1.0, 1.0) == doctest::Approx(4.0));
  // ||f||_2 = sqrt(4 + 2)
  CHECK(lorentz::lorentz_norm(f, 2.0, 2.0) == doctest::Approx(std::sqrt(6.0)));
  // weak: sup t f*(t) at p = 1 is 3
  CHECK(lorentz::lorentz_norm(f, 1.0, lorentz::kInf) == doctest::Approx(3.0));
  CHECK(lorentz::k_functional(f, 1.0, 1.0) == doctest::Approx(2.0));
  CHECK(lorentz::k_functional(f, 2.0, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("indicator: (p/q)^{1/q} |E|^{1/p}") {
  for (int n : {1, 2, 3}) {
    const auto ball = fields::ball_indicator(n, 0.8);
    const double measure = randgeo::ball_volume(n, 0.8);
    const auto prof = lorentz::rearrangement(sample(ball));
    for (auto [p, q] : {std::pair{2.0, 1.0}, std::pair{1.5, 3.0}, std::pair{4.0, 4.0}}) {
      CHECK(lorentz::lorentz_norm(prof, p, q) ==
            doctest::Approx(std::pow(p / q, 1.0 / q) * std::pow(measure, 1.0 / p)).epsilon(0.02));
    }
    CHECK(lorentz::lorentz_norm(prof, 2.0, lorentz::kInf) == doctest::Approx(std::sqrt(measure)).epsilon(0.02));
  }
}

TEST_CASE("L^{p,p} equals L^p on Gaussians") {
  const auto g = fields::gaussian(2);
  const auto d = sample(g);
  const auto prof = lorentz::rearrangement(d);
  for (double p : {1.0, 2.0, 3.0}) {
    const double want = *g.analytic_lp(p);
    CHECK(lorentz::lorentz_norm(prof, p, p) == doctest::Approx(want).epsilon(0.02));
    CHECK(lorentz::lp_norm(d, p) == doctest::Approx(want).epsilon(0.02));
  }
}

TEST_CASE("Lorentz norms decrease in q") {
  const auto prof = lorentz::rearrangement(sample(fields::radial_power(2, 0.5, 1e-3, 1.0)));
  const double a = lorentz::lorentz_norm(prof, 2.0, 1.0);
  const double b = lorentz::lorentz_norm(prof, 2.0, 2.0);
  const double c = lorentz::lorentz_norm(prof, 2.0, lorentz::kInf);
  CHECK(a >= b);
  CHECK(b >= c);
}

TEST_CASE("rearrangement is nonincreasing and equimeasurable") {
  const auto d = sample(fields::gaussian(3), 50000);
  const auto prof = lorentz::rearrangement(d);
  const auto& v = prof.values();
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] <= v[i - 1]);
  for (double lambda : {0.1, 0.5, 0.9}) {
    CHECK(prof.distribution(lambda) == doctest::Approx(d.distribution(lambda)).epsilon(0.02));
  }
}

TEST_CASE("distribution function of the unit disk") {
  const auto d = sample(fields::ball_indicator(2, 1.0));
  CHECK(d.distribution(0.5) == doctest::Approx(M_PI).epsilon(1e-6));
  CHECK(d.distribution(1.0) == 0.0);
  CHECK(d.sup() == 1.0);
}

TEST_CASE("weak norm of an indicator") {
  const auto d = sample(fields::ball_indicator(2, 1.0));
  CHECK(lorentz::weak_norm(d, 2.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-6));
}

TEST_CASE("K-functional of an indicator at p = 1 is min(t, |E|), formula and oracle") {
  const auto d = sample(fields::ball_indicator(2, 1.0));
  const auto prof = lorentz::rearrangement(d);
  const auto levels = lorentz::level_grid(d);
  for (double t : {0.1, 1.0, 3.0, 10.0}) {
    const double want = std::min(t, M_PI);
    CHECK(lorentz::k_functional(prof, t, 1.0) == doctest::Approx(want).epsilon(1e-9));
    CHECK(lorentz::k_functional_oracle(d, t, 1.0, levels) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("K-functional tends to the L^p norm") {
  const auto prof = lorentz::rearrangement(sample(fields::gaussian(2)));
  CHECK(lorentz::k_functional(prof, 1e8, 2.0) == doctest::Approx(lorentz::lorentz_norm(prof, 2.0, 2.0)));
}

TEST_CASE("sphere distribution samples cover the sphere area") {
  lorentz::SampleSpec s;
  s.samples = 20000;
  const auto d = lorentz::sample_distribution(fields::sphere_constant(3), s);
  CHECK(d.total_measure == doctest::Approx(4.0 * M_PI));
  CHECK(d.distribution(0.5) == doctest::Approx(4.0 * M_PI));
  // cap of angle a has area 2 pi (1 - cos a)
  s.sampling = lorentz::Sampling::StratifiedRadial;
  const auto cap = lorentz::sample_distribution(fields::zonal_cap(3, M_PI / 3), s);
  CHECK(cap.distribution(0.5) == doctest::Approx(M_PI).epsilon(0.01));
}

TEST_CASE("unbounded fields are refused") {
  lorentz::SampleSpec s;
  s.samples = 100;
  CHECK_THROWS_AS(lorentz::sample_distribution(fields::log_divergent(2, 1, 0.6), s), RefusalError);
}
