#include "kplane/geom.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kplane/errors.hpp"

namespace kplane::geom {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entries");
}

}  // namespace

Subspace::Subspace(Matrix frame) : frame_(std::move(frame)) {
  const auto n = frame_.rows();
  const auto k = frame_.cols();
  if (n < 2 || k < 1 || k >= n) {
    throw InvalidInput("Subspace: need 1 <= k < n, got n=" + std::to_string(n) +
                       " k=" + std::to_string(k));
  }
  require_finite(frame_, "Subspace");
  const Matrix gram = frame_.transpose() * frame_;
  const double dev = (gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
  if (dev > kFrameTolerance) {
    throw InvalidInput("Subspace: frame columns are not orthonormal (deviation " +
                       std::to_string(dev) + ")");
  }
}

Subspace Subspace::coordinate(int n, int k) {
  if (n < 2 || k < 1 || k >= n) throw InvalidInput("Subspace::coordinate: need 1 <= k < n");
  return Subspace(Matrix::Identity(n, k));
}

Matrix Subspace::projector() const { return frame_ * frame_.transpose(); }

Matrix Subspace::complement_frame() const {
  const auto n = frame_.rows();
  const auto k = frame_.cols();
  Eigen::HouseholderQR<Matrix> qr(frame_);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - k);
}

ChartPoint::ChartPoint(int n_, int k_, Matrix a_) : n(n_), k(k_), a(std::move(a_)) {
  if (n < 2 || k < 1 || k >= n) throw InvalidInput("ChartPoint: need 1 <= k < n");
  if (a.rows() != k || a.cols() != n - k) {
    throw InvalidInput("ChartPoint: coordinate block must be k x (n-k)");
  }
  require_finite(a, "ChartPoint");
}

AffineKPlane::AffineKPlane(Subspace theta, Vector base)
    : theta_(std::move(theta)), base_(std::move(base)) {
  if (base_.size() != theta_.n()) throw InvalidInput("AffineKPlane: base dimension mismatch");
  if (!base_.allFinite()) throw InvalidInput("AffineKPlane: non-finite base");
  const double off = (theta_.frame().transpose() * base_).cwiseAbs().maxCoeff();
  if (off > kFrameTolerance * std::max(1.0, base_.norm())) {
    throw InvalidInput("AffineKPlane: base point is not orthogonal to the plane direction");
  }
}

AffineKPlane AffineKPlane::through(const Subspace& theta, const Vector& x) {
  return AffineKPlane(theta, project(x, theta).perp);
}

Matrix stack_columns(std::span<const Vector> v) {
  if (v.empty()) throw InvalidInput("expected at least one vector");
  const auto n = v.front().size();
  Matrix m(n, static_cast<Eigen::Index>(v.size()));
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j].size() != n) throw InvalidInput("vectors have unequal dimensions");
    m.col(static_cast<Eigen::Index>(j)) = v[j];
  }
  return m;
}

Matrix gram_matrix(const Matrix& v) {
  if (v.cols() < 1 || v.cols() > v.rows()) {
    throw InvalidInput("gram_matrix: need 1 <= k <= n");
  }
  require_finite(v, "gram_matrix");
  return v.transpose() * v;
}

double gram_det(const Matrix& v) {
  if (v.cols() < 1 || v.cols() > v.rows()) throw InvalidInput("gram_det: need 1 <= k <= n");
  require_finite(v, "gram_det");
  // det(V^T V) = prod R_ii^2 for V = QR; avoids forming the Gram matrix.
  Eigen::HouseholderQR<Matrix> qr(v);
  const Matrix& r = qr.matrixQR();
  double det = 1.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i) det *= r(i, i) * r(i, i);
  if (det < 0.0) {
    if (det < -1e-10) throw std::logic_error("gram_det: negative determinant");
    det = 0.0;
  }
  return det;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (r > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r = r * num / static_cast<std::uint64_t>(i);
  }
  return r;
}

std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

double gram_minor_sum(const Matrix& v) {
  const int n = static_cast<int>(v.rows());
  const int k = static_cast<int>(v.cols());
  if (k < 1 || k > n) throw InvalidInput("gram_minor_sum: need 1 <= k <= n");
  require_finite(v, "gram_minor_sum");
  if (binomial(n, k) > kMinorGuard) {
    throw SizeError("gram_minor_sum: C(" + std::to_string(n) + "," + std::to_string(k) +
                    ") exceeds the enumeration guard");
  }
  double sum = 0.0;
  Matrix minor(k, k);
  for (const auto& rows : subsets(n, k)) {
    for (int i = 0; i < k; ++i) minor.row(i) = v.row(rows[static_cast<std::size_t>(i)]);
    const double d = minor.partialPivLu().determinant();
    sum += d * d;
  }
  return sum;
}

Matrix orthonormalize(const Matrix& a) {
  const auto n = a.rows();
  const auto k = a.cols();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

Subspace span_subspace(const Matrix& x) {
  if (x.cols() < 1 || x.cols() >= x.rows()) {
    throw InvalidInput("span_subspace: need 1 <= k < n");
  }
  require_finite(x, "span_subspace");
  Eigen::JacobiSVD<Matrix> svd(x);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smax > 0.0) || smin < kRankCutoff * smax) {
    throw DegenerateSpan("span_subspace: vectors are linearly dependent (singular value ratio " +
                         std::to_string(smax > 0.0 ? smin / smax : 0.0) + ")");
  }
  return Subspace(orthonormalize(x));
}

Matrix gram_matrix(std::span<const Vector> v) { return gram_matrix(stack_columns(v)); }
double gram_det(std::span<const Vector> v) { return gram_det(stack_columns(v)); }
double gram_minor_sum(std::span<const Vector> v) { return gram_minor_sum(stack_columns(v)); }
Subspace span_subspace(std::span<const Vector> x) { return span_subspace(stack_columns(x)); }

Projection project(const Vector& x, const Subspace& theta) {
  if (x.size() != theta.n()) throw InvalidInput("project: dimension mismatch");
  Projection p;
  p.along = theta.frame() * (theta.frame().transpose() * x);
  p.perp = x - p.along;
  return p;
}

Subspace chart_to_subspace(const ChartPoint& c) {
  Matrix rows(c.k, c.n);
  rows.leftCols(c.k).setIdentity();
  rows.rightCols(c.n - c.k) = c.a;
  return Subspace(orthonormalize(rows.transpose()));
}

ChartPoint chart_from_rows(const Matrix& rows) {
  const int k = static_cast<int>(rows.rows());
  const int n = static_cast<int>(rows.cols());
  if (k < 1 || k >= n) throw InvalidInput("chart_from_rows: need 1 <= k < n");
  require_finite(rows, "chart_from_rows");
  Matrix normalized = rows;
  for (int i = 0; i < k; ++i) {
    const double len = normalized.row(i).norm();
    if (!(len > 0.0)) throw ChartDomainError("chart_from_rows: zero spanning row");
    normalized.row(i) /= len;
  }
  const Matrix s = normalized.leftCols(k);
  const double det = s.partialPivLu().determinant();
  if (!(std::abs(det) >= kChartCutoff)) {
    throw ChartDomainError("subspace lies outside the standard chart (|det S| = " +
                           std::to_string(std::abs(det)) + ")");
  }
  Matrix a = s.partialPivLu().solve(normalized.rightCols(n - k));
  return ChartPoint(n, k, std::move(a));
}

ChartPoint subspace_to_chart(const Subspace& theta) {
  return chart_from_rows(theta.frame().transpose());
}

SphereSplit sphere_split(const Vector& omega) {
  const auto n = omega.size();
  if (n < 2) throw InvalidInput("sphere_split: need n >= 2");
  if (!omega.allFinite() || std::abs(omega.norm() - 1.0) > 1e-10) {
    throw InvalidInput("sphere_split: input is not a unit vector");
  }
  const Vector tail = omega.tail(n - 1);
  const double s = tail.norm();
  SphereSplit out;
  out.t = std::atan2(s, omega(0));
  if (s < 1e-12) {
    out.omega_tilde = Vector::Unit(n - 1, 0);
  } else {
    out.omega_tilde = tail / s;
  }
  return out;
}

Vector sphere_join(double t, const Vector& omega_tilde) {
  Vector out(omega_tilde.size() + 1);
  out(0) = std::cos(t);
  out.tail(omega_tilde.size()) = std::sin(t) * omega_tilde;
  return out;
}

}  // namespace kplane::geom
