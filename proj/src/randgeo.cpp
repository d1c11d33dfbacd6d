#include "kplane/randgeo.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "kplane/errors.hpp"

namespace kplane::randgeo {

namespace {

std::mt19937_64 make_engine(RngStream s) {
  std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                    static_cast<std::uint32_t>(s.stream_id),
                    static_cast<std::uint32_t>(s.stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(RngStream s) : stream_(s), engine_(make_engine(s)) {}

double Rng::uniform() {
  // 53 random bits -> [0, 1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gamma(double shape) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(engine_);
}

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

TruncationBox::TruncationBox(double r) : radius(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("TruncationBox: radius must be positive");
}

double sphere_area(int n) {
  if (n < 1) throw InvalidInput("sphere_area: n >= 1 required");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / boost::math::tgamma(0.5 * n);
}

double ball_volume(int d, double r) {
  if (d < 0) throw InvalidInput("ball_volume: d >= 0 required");
  if (d == 0) return 1.0;
  return std::pow(std::numbers::pi, 0.5 * d) / boost::math::tgamma(0.5 * d + 1.0) *
         std::pow(r, d);
}

Vector sample_sphere(int n, Rng& rng) {
  if (n < 1) throw InvalidInput("sample_sphere: n >= 1 required");
  if (n == 1) {
    Vector v(1);
    v(0) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return v;
  }
  Vector v(n);
  double norm = 0.0;
  do {
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    norm = v.norm();
  } while (!(norm > 1e-300));
  return v / norm;
}

Vector sample_ball(int d, double r, Rng& rng) {
  Vector dir = sample_sphere(d, rng);
  return dir * (r * std::pow(rng.uniform(), 1.0 / d));
}

geom::Subspace sample_grassmann(int n, int k, Rng& rng) {
  if (n < 2 || k < 1 || k >= n) throw InvalidInput("sample_grassmann: need 1 <= k < n");
  Matrix g(n, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  }
  return geom::Subspace(geom::orthonormalize(g));
}

Vector sample_sphere_in_subspace(const geom::Subspace& theta, Rng& rng) {
  return theta.frame() * sample_sphere(theta.k(), rng);
}

Matrix sample_rotation(int n, Rng& rng) {
  if (n < 2) throw InvalidInput("sample_rotation: n >= 2 required");
  Matrix g(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  }
  Matrix q = geom::orthonormalize(g);
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return q;
}

WeightedPlane sample_affine_plane(int n, int k, const TruncationBox& box, Rng& rng) {
  geom::Subspace theta = sample_grassmann(n, k, rng);
  const Matrix perp = theta.complement_frame();
  const Vector base = perp * sample_ball(n - k, box.radius, rng);
  const double weight = ball_volume(n - k, box.radius);
  return {geom::AffineKPlane(std::move(theta), base), weight};
}

Matrix sample_gram_weighted_directions(int n, int k, Rng& rng) {
  if (n < 2 || k < 1 || k >= n) throw InvalidInput("gram-weighted sampler: need 1 <= k < n");
  Matrix w(n, k);
  w.col(0) = sample_sphere(n, rng);
  for (int j = 2; j <= k; ++j) {
    Eigen::HouseholderQR<Matrix> qr(w.leftCols(j - 1));
    const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const double s2 = rng.beta(0.5 * (k - j + 1), 0.5 * (j - 1));
    const double sin_t = std::sqrt(s2);
    const double cos_t = std::sqrt(std::max(0.0, 1.0 - s2));
    const Vector u = q.leftCols(j - 1) * sample_sphere(j - 1, rng);
    const Vector v = q.rightCols(n - j + 1) * sample_sphere(n - j + 1, rng);
    w.col(j - 1) = cos_t * u + sin_t * v;
  }
  return w;
}

double gram_weighted_mass(int n, int k) {
  if (n < 2 || k < 1 || k >= n) throw InvalidInput("gram_weighted_mass: need 1 <= k < n");
  double z = sphere_area(n);
  for (int j = 2; j <= k; ++j) {
    z *= sphere_area(j - 1) * sphere_area(n - j + 1) * 0.5 *
         boost::math::beta(0.5 * (k - j + 1), 0.5 * (j - 1));
  }
  return z;
}

}  // namespace kplane::randgeo
