// Invariants checked statistically or with common random numbers.

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "kplane/fields.hpp"
#include "kplane/lorentz.hpp"
#include "kplane/mc.hpp"
#include "kplane/transforms.hpp"

using namespace kplane;
using geom::Matrix;
using geom::Subspace;
using geom::Vector;
using transforms::QuadSpec;

namespace {

QuadSpec spec(std::size_t samples, std::uint64_t seed) {
  QuadSpec q;
  q.samples = samples;
  q.stream = randgeo::RngStream{seed, 0};
  return q;
}

Vector point(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("S^0 draws are +-1 with equal frequency") {
  const auto acc = mc::run(randgeo::RngStream{1, 0}, 100000, 1, 1,
                           [](randgeo::Rng& rng, Vector& out) { out(0) = randgeo::sample_sphere(1, rng)(0); });
  CHECK(std::abs(acc.mean(0)) <= 3.0 * acc.std_error(0));
}

TEST_CASE("sphere moments: mean 0 and E[w_1^2] = 1/3") {
  const auto acc = mc::run(randgeo::RngStream{2, 0}, 200000, 1, 4, [](randgeo::Rng& rng, Vector& out) {
    const Vector w = randgeo::sample_sphere(3, rng);
    out << w(0), w(1), w(2), w(0) * w(0);
  });
  for (int i = 0; i < 3; ++i) CHECK(std::abs(acc.mean(i)) <= 3.0 * acc.std_error(i));
  CHECK(std::abs(acc.mean(3) - 1.0 / 3.0) <= 3.0 * acc.std_error(3));
}

TEST_CASE("points on the sphere of a subspace: E[<w, v>^2] = |v_theta|^2 / k") {
  randgeo::Rng pick(randgeo::RngStream{3, 0});
  const auto theta = randgeo::sample_grassmann(5, 3, pick);
  const Vector v = point({1.0, -0.5, 0.2, 0.0, 2.0});
  const double want = (theta.projector() * v).squaredNorm() / 3.0;
  const auto acc = mc::run(randgeo::RngStream{3, 1}, 100000, 1, 2, [&](randgeo::Rng& rng, Vector& out) {
    const Vector w = randgeo::sample_sphere_in_subspace(theta, rng);
    out << std::pow(w.dot(v), 2), (w - theta.projector() * w).norm();
  });
  CHECK(std::abs(acc.mean(0) - want) <= 3.0 * acc.std_error(0));
  CHECK(acc.mean(1) < 1e-10);
}

TEST_CASE("hyperplanes: the normal direction has E[(n . e_1)^2] = 1/n") {
  const int n = 4;
  const auto acc = mc::run(randgeo::RngStream{4, 0}, 100000, 1, 1, [&](randgeo::Rng& rng, Vector& out) {
    const auto theta = randgeo::sample_grassmann(n, n - 1, rng);
    out(0) = std::pow(theta.complement_frame()(0, 0), 2);
  });
  CHECK(std::abs(acc.mean(0) - 1.0 / n) <= 3.0 * acc.std_error(0));
}

TEST_CASE("affine planes: E[|base|^2] = R^2 (n-k) / (n-k+2)") {
  const double r = 1.5;
  const auto acc = mc::run(randgeo::RngStream{5, 0}, 100000, 1, 1, [&](randgeo::Rng& rng, Vector& out) {
    out(0) = randgeo::sample_affine_plane(5, 2, randgeo::TruncationBox(r), rng).plane.base().squaredNorm();
  });
  CHECK(std::abs(acc.mean(0) - r * r * 3.0 / 5.0) <= 3.0 * acc.std_error(0));
}

TEST_CASE("SO(2) rotation angle is uniform (Kolmogorov-Smirnov)") {
  randgeo::Rng rng(randgeo::RngStream{6, 0});
  std::vector<double> u;
  for (int i = 0; i < 100000; ++i) {
    const Matrix m = randgeo::sample_rotation(2, rng);
    double a = std::atan2(m(1, 0), m(0, 0));
    if (a < 0.0) a += 2.0 * M_PI;
    u.push_back(a / (2.0 * M_PI));
  }
  std::sort(u.begin(), u.end());
  double d = 0.0;
  const double nn = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d = std::max({d, (i + 1) / nn - u[i], u[i] - i / nn});
  CHECK(d * std::sqrt(nn) <= 1.82);
}

TEST_CASE("Haar measure: V U has the moments of U") {
  randgeo::Rng pick(randgeo::RngStream{7, 0});
  const Matrix v = randgeo::sample_rotation(3, pick);
  const auto acc = mc::run(randgeo::RngStream{7, 1}, 100000, 1, 2, [&](randgeo::Rng& rng, Vector& out) {
    const Matrix u = randgeo::sample_rotation(3, rng);
    const Matrix vu = v * u;
    out << vu(0, 0) * vu(0, 0) - u(0, 0) * u(0, 0), std::pow(vu(1, 2), 4) - std::pow(u(1, 2), 4);
  });
  for (int i = 0; i < 2; ++i) CHECK(std::abs(acc.mean(i)) <= 3.0 * acc.std_error(i));
}

TEST_CASE("Grassmann sampler is rotation invariant in its projector moments") {
  randgeo::Rng pick(randgeo::RngStream{8, 0});
  const Matrix u = randgeo::sample_rotation(4, pick);
  const auto acc = mc::run(randgeo::RngStream{8, 1}, 100000, 1, 2, [&](randgeo::Rng& rng, Vector& out) {
    const Matrix p = randgeo::sample_grassmann(4, 2, rng).projector();
    const Matrix q = u * p * u.transpose();
    out << q(0, 1) - p(0, 1), q(2, 2) * q(2, 2) - p(2, 2) * p(2, 2);
  });
  for (int i = 0; i < 2; ++i) CHECK(std::abs(acc.mean(i)) <= 3.0 * acc.std_error(i));
}

TEST_CASE("linearity of the transform with common random numbers") {
  const auto f = fields::gaussian(3, 2.0, point({0.2, 0.0, 0.1}));
  const auto g = fields::gaussian(3, 4.0, point({-0.3, 0.1, 0.0}));
  const auto h = fields::linear_combination(2.0, f, -0.5, g);
  auto q = spec(20000, 9);
  q.truncation = 4.0;
  const Vector x = point({0.1, 0.2, -0.1});
  const auto theta = Subspace::coordinate(3, 2);
  const auto th = transforms::kplane_transform_at(h, x, theta, q);
  const auto tf = transforms::kplane_transform_at(f, x, theta, q);
  const auto tg = transforms::kplane_transform_at(g, x, theta, q);
  const double se = std::sqrt(th.std_error * th.std_error + 4.0 * tf.std_error * tf.std_error +
                              0.25 * tg.std_error * tg.std_error);
  CHECK(std::abs(th.value - (2.0 * tf.value - 0.5 * tg.value)) <= 3.0 * se);
}

TEST_CASE("translation along the plane leaves the transform unchanged") {
  const auto f = fields::gaussian(3, 3.0, point({0.3, -0.2, 0.1}));
  const auto theta = Subspace::coordinate(3, 1);
  auto q = spec(20000, 10);
  q.truncation = 3.0;
  const Vector x = point({0.0, 0.2, 0.1});
  const auto plane = geom::AffineKPlane::through(theta, x + point({0.7, 0.0, 0.0}));
  const auto a = transforms::kplane_transform_at(f, x, theta, q);
  const auto b = transforms::kplane_transform(f, plane, q);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
}

TEST_CASE("dilation identity: T f^(delta)(x, theta) = delta^{-k} T f(delta x, theta)") {
  const auto f = fields::gaussian(3, 2.0, point({0.1, 0.0, 0.2}));
  const auto theta = Subspace::coordinate(3, 2);
  const Vector x = point({0.0, 0.0, 0.3});
  for (double delta : {0.5, 1.0, 2.0}) {
    const auto fd = fields::dilate(f, delta);
    auto qa = spec(40000, 11);
    auto qb = spec(40000, 12);
    const auto a = transforms::kplane_transform_at(fd, x, theta, qa);
    const auto b = transforms::kplane_transform_at(f, delta * x, theta, qb);
    const double scale = std::pow(delta, -2.0);
    CHECK(std::abs(a.value - scale * b.value) <= 3.0 * std::hypot(a.std_error, scale * b.std_error) + 1e-12);
  }
}

TEST_CASE("sphere transform is rotation equivariant") {
  const auto f = fields::zonal_cap(3, 1.0, point({0.6, 0.0, 0.8}));
  randgeo::Rng pick(randgeo::RngStream{13, 0});
  const Matrix u = randgeo::sample_rotation(3, pick);
  fields::SphereField fu = f;
  fu.zonal_axis.reset();
  fu.eval = [f, u](const Vector& w) { return f(u * w); };
  const auto theta = Subspace::coordinate(3, 2);
  const Subspace rotated(u * theta.frame());
  const auto a = transforms::sphere_transform(fu, theta, spec(20000, 14));
  const auto b = transforms::sphere_transform(f, rotated, spec(20000, 15));
  CHECK(std::abs(a.value - b.value) <= 3.0 * std::hypot(a.std_error, b.std_error) + 1e-12);
}

TEST_CASE("multilinear form with equal slots matches the mixed norm power") {
  // n = 2, k = 1: A(f, f, f) = ||T f||_{L^3(L^3)}^3
  const auto f = fields::gaussian(2, 2.5, point({0.1, -0.1}));
  const randgeo::TruncationBox box(f.enclosing_radius());
  auto qa = spec(100000, 16);
  qa.transform_points = 16;
  auto qm = spec(100000, 17);
  qm.transform_points = 16;
  const auto a = transforms::multilinear_A({f, f, f}, 1, box, qa);
  const auto m = transforms::mixed_norm(f, 2, 1, 3.0, 3.0, box, qm);
  CHECK(a.value == doctest::Approx(std::pow(m.value, 3)).epsilon(0.05));
}

TEST_CASE("Lorentz norms scale under dilation by delta^{-n/p}") {
  lorentz::SampleSpec s;
  s.samples = 100000;
  s.stream = randgeo::RngStream{18, 0};
  s.sampling = lorentz::Sampling::StratifiedRadial;
  const auto f = fields::radial_power(2, 0.5, 1e-3, 1.0);
  const auto pf = lorentz::rearrangement(lorentz::sample_distribution(f, s));
  for (double delta : {0.5, 2.0}) {
    const auto pd = lorentz::rearrangement(lorentz::sample_distribution(fields::dilate(f, delta), s));
    for (auto [p, q] : {std::pair{2.0, 1.0}, std::pair{3.0, 3.0}}) {
      CHECK(lorentz::lorentz_norm(pd, p, q) ==
            doctest::Approx(std::pow(delta, -2.0 / p) * lorentz::lorentz_norm(pf, p, q)).epsilon(0.03));
    }
  }
}

TEST_CASE("K-functional is nondecreasing and sublinear in t") {
  lorentz::SampleSpec s;
  s.samples = 50000;
  s.sampling = lorentz::Sampling::StratifiedRadial;
  const auto prof = lorentz::rearrangement(lorentz::sample_distribution(fields::gaussian(3), s));
  double prev = 0.0;
  for (double t = 0.01; t < 100.0; t *= 1.7) {
    const double k = lorentz::k_functional(prof, t, 2.0);
    CHECK(k >= prev);
    CHECK(lorentz::k_functional(prof, 2.0 * t, 2.0) <= 2.0 * k + 1e-12);
    prev = k;
  }
  CHECK(lorentz::k_functional(lorentz::RearrangementProfile{}, 1.0, 2.0) == 0.0);
}
