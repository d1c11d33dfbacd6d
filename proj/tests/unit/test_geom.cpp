#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "kplane/errors.hpp"
#include "kplane/geom.hpp"
#include "kplane/randgeo.hpp"

using namespace kplane;
using geom::Matrix;
using geom::Vector;

namespace {

Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  randgeo::Rng rng(randgeo::RngStream{seed, 0});
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

// Sum of squared k x k minors, by brute force over row subsets.
double minor_sum_oracle(const Matrix& v) {
  const int n = static_cast<int>(v.rows());
  const int k = static_cast<int>(v.cols());
  double sum = 0.0;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + k, true);
  do {
    Matrix m(k, k);
    int r = 0;
    for (int i = 0; i < n; ++i)
      if (pick[i]) m.row(r++) = v.row(i);
    sum += m.determinant() * m.determinant();
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return sum;
}

}  // namespace

TEST_CASE("gram determinant of orthogonal vectors is the product of squared lengths") {
  Matrix v = Matrix::Zero(4, 3);
  v(0, 0) = 2.0;
  v(1, 1) = 3.0;
  v(3, 2) = 0.5;
  CHECK(geom::gram_det(v) == doctest::Approx(36.0 * 0.25));
}

TEST_CASE("gram determinant in R^3 equals the squared cross product") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix v = gaussian_matrix(3, 2, s);
    const Eigen::Vector3d a = v.col(0);
    const Eigen::Vector3d b = v.col(1);
    CHECK(geom::gram_det(v) == doctest::Approx(a.cross(b).squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("gram determinant of dependent vectors is zero") {
  Matrix v = gaussian_matrix(5, 3, 1);
  v.col(2) = 2.0 * v.col(0) - v.col(1);
  CHECK(std::abs(geom::gram_det(v)) < 1e-10);
}

TEST_CASE("Cauchy-Binet: minor sum matches brute force and the determinant") {
  for (auto [n, k] : {std::pair{3, 2}, std::pair{5, 3}, std::pair{6, 4}}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Matrix v = gaussian_matrix(n, k, 100 + s);
      const double det = geom::gram_det(v);
      CHECK(geom::gram_minor_sum(v) == doctest::Approx(minor_sum_oracle(v)).epsilon(1e-10));
      CHECK(geom::gram_minor_sum(v) == doctest::Approx(det).epsilon(1e-10));
    }
  }
}

TEST_CASE("minor sum refuses oversized enumerations") {
  CHECK_THROWS_AS(geom::gram_minor_sum(Matrix::Identity(40, 20)), SizeError);
}

TEST_CASE("span of vectors is an orthonormal frame with the same projector") {
  const Matrix v = gaussian_matrix(5, 2, 3);
  const auto theta = geom::span_subspace(v);
  const Matrix p = theta.projector();
  CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(p.trace() == doctest::Approx(2.0));
  CHECK((p * v - v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("span of dependent vectors is degenerate") {
  Matrix v = gaussian_matrix(4, 2, 4);
  v.col(1) = 3.0 * v.col(0);
  CHECK_THROWS_AS(geom::span_subspace(v), DegenerateSpan);
}

TEST_CASE("complement frame is orthogonal to the subspace") {
  const auto theta = geom::span_subspace(gaussian_matrix(6, 2, 5));
  const Matrix c = theta.complement_frame();
  CHECK(c.cols() == 4);
  CHECK((theta.frame().transpose() * c).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((c.transpose() * c - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projection splits a vector into orthogonal parts") {
  const auto theta = geom::span_subspace(gaussian_matrix(4, 2, 6));
  const Vector x = gaussian_matrix(4, 1, 7).col(0);
  const auto pr = geom::project(x, theta);
  CHECK((pr.along + pr.perp - x).norm() < 1e-12);
  CHECK(std::abs(pr.along.dot(pr.perp)) < 1e-12);
}

TEST_CASE("chart round trip") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Matrix a = gaussian_matrix(2, 3, 20 + s);
    const geom::ChartPoint c(5, 2, a);
    const auto theta = geom::chart_to_subspace(c);
    const auto back = geom::subspace_to_chart(theta);
    CHECK((back.a - a).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("chart from spanning rows") {
  const Matrix a = gaussian_matrix(2, 2, 30);
  Matrix s = gaussian_matrix(2, 2, 31);
  Matrix rows(2, 4);
  rows << s, s * a;
  CHECK((geom::chart_from_rows(rows).a - a).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("chart is undefined where the leading block is singular") {
  Matrix frame = Matrix::Zero(3, 1);
  frame(2, 0) = 1.0;
  CHECK_THROWS_AS(geom::subspace_to_chart(geom::Subspace(frame)), ChartDomainError);
}

TEST_CASE("sphere split and join are inverse") {
  randgeo::Rng rng(randgeo::RngStream{1, 0});
  for (int i = 0; i < 20; ++i) {
    const Vector w = randgeo::sample_sphere(4, rng);
    const auto sp = geom::sphere_split(w);
    CHECK(sp.t >= 0.0);
    CHECK(sp.t <= M_PI);
    CHECK((geom::sphere_join(sp.t, sp.omega_tilde) - w).norm() < 1e-12);
  }
}

TEST_CASE("orthonormalize keeps the column span and makes R's diagonal nonnegative") {
  const Matrix a = gaussian_matrix(5, 3, 8);
  const Matrix q = geom::orthonormalize(a);
  CHECK((q.transpose() * q - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  const Matrix r = q.transpose() * a;
  for (int i = 0; i < 3; ++i) CHECK(r(i, i) >= 0.0);
  CHECK((q * r - a).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("binomial and subsets") {
  CHECK(geom::binomial(5, 2) == 10);
  CHECK(geom::binomial(8, 4) == 70);
  CHECK(geom::binomial(4, 0) == 1);
  const auto s = geom::subsets(5, 3);
  CHECK(s.size() == 10);
  CHECK(s.front() == std::vector<int>{0, 1, 2});
  CHECK(s.back() == std::vector<int>{2, 3, 4});
}

TEST_CASE("subspace rejects bad frames") {
  CHECK_THROWS_AS(geom::Subspace(Matrix::Ones(3, 1)), InvalidInput);
  CHECK_THROWS_AS(geom::Subspace(Matrix::Identity(3, 3)), InvalidInput);
}
