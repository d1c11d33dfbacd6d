#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace kplane::geom {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kFrameTolerance = 1e-10;
inline constexpr double kRankCutoff = 1e-8;
inline constexpr double kChartCutoff = 1e-8;
inline constexpr std::uint64_t kMinorGuard = 1000000;

// A k-dimensional linear subspace of R^n, stored as an orthonormal n x k frame.
// Only the column span is meaningful; compare subspaces through projector().
class Subspace {
 public:
  explicit Subspace(Matrix frame);

  // span{e_1, ..., e_k}
  static Subspace coordinate(int n, int k);

  int n() const { return static_cast<int>(frame_.rows()); }
  int k() const { return static_cast<int>(frame_.cols()); }
  const Matrix& frame() const { return frame_; }

  Matrix projector() const;
  // Orthonormal n x (n-k) frame of the orthogonal complement.
  Matrix complement_frame() const;
  // frame * u for u in R^k
  Vector embed(const Vector& u) const { return frame_ * u; }

 private:
  Matrix frame_;
};

struct ChartPoint {
  ChartPoint(int n, int k, Matrix a);

  int n;
  int k;
  Matrix a;  // k x (n-k)
};

// The affine plane base + theta with base orthogonal to theta.
class AffineKPlane {
 public:
  AffineKPlane(Subspace theta, Vector base);
  // Plane through x parallel to theta; the base is the component of x in theta-perp.
  static AffineKPlane through(const Subspace& theta, const Vector& x);

  const Subspace& theta() const { return theta_; }
  const Vector& base() const { return base_; }
  Vector point(const Vector& u) const { return base_ + theta_.frame() * u; }

 private:
  Subspace theta_;
  Vector base_;
};

struct Projection {
  Vector along;  // x_theta
  Vector perp;   // x_{theta-perp}
};

struct SphereSplit {
  double t;
  Vector omega_tilde;
};

// Vectors are passed as the columns of an n x k matrix.
Matrix gram_matrix(const Matrix& v);
double gram_det(const Matrix& v);
double gram_minor_sum(const Matrix& v);
Subspace span_subspace(const Matrix& x);

Matrix gram_matrix(std::span<const Vector> v);
double gram_det(std::span<const Vector> v);
double gram_minor_sum(std::span<const Vector> v);
Subspace span_subspace(std::span<const Vector> x);

Matrix stack_columns(std::span<const Vector> v);

Projection project(const Vector& x, const Subspace& theta);

Subspace chart_to_subspace(const ChartPoint& c);
ChartPoint subspace_to_chart(const Subspace& theta);
// a = S^{-1} T for a k x n matrix of spanning rows [S | T].
ChartPoint chart_from_rows(const Matrix& rows);

SphereSplit sphere_split(const Vector& omega);
Vector sphere_join(double t, const Vector& omega_tilde);

// Q factor of a thin QR with the diagonal of R made nonnegative.
Matrix orthonormalize(const Matrix& a);

std::uint64_t binomial(int n, int k);

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> subsets(int n, int k);

}  // namespace kplane::geom
