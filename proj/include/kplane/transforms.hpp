#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kplane/fields.hpp"
#include "kplane/geom.hpp"
#include "kplane/randgeo.hpp"

namespace kplane::transforms {

using fields::ScalarField;
using fields::SphereField;
using geom::Matrix;
using geom::Vector;
using randgeo::Rng;
using randgeo::RngStream;

enum class QuadMode { PlainMC, StratifiedRadial };

struct QuadSpec {
  std::size_t samples = 100000;
  std::optional<double> truncation;  // overrides the field's truncation radius
  QuadMode mode = QuadMode::PlainMC;
  RngStream stream{};
  int workers = 1;
  // Nested estimates: outer (subspace) and middle (base point) counts; both
  // default to ceil(sqrt(samples)).
  std::optional<std::size_t> outer;
  std::optional<std::size_t> inner;
  // Points per innermost plane integral.
  int transform_points = 64;
  QuadMode transform_mode = QuadMode::StratifiedRadial;
  // Permits non-integrable inputs; the truncation radius must then be given.
  bool divergence_mode = false;

  void validate() const;
};

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  RngStream stream{};
  double truncation_radius = 0.0;
  double tail_bound = 0.0;  // bound on the mass discarded by truncation (relative)
  std::size_t rejected = 0;
  double rejection_fraction = 0.0;
};

// Truncation radius used for f under q; throws RefusalError for fields that
// cannot be integrated along planes unless q is in divergence mode.
double truncation_radius(const ScalarField& f, const QuadSpec& q);

// One unbiased estimate of the integral of f over the plane x + theta (theta
// given by an orthonormal frame) from m points. x need not be orthogonal to theta.
double plane_integral_sample(const ScalarField& f, const Vector& x, const Matrix& frame,
                             double radius, int m, QuadMode mode, Rng& rng);

// T_{k,n} f at the affine plane.
MCEstimate kplane_transform(const ScalarField& f, const geom::AffineKPlane& plane,
                            const QuadSpec& q);
// T_{k,n} f on x + theta for arbitrary x.
MCEstimate kplane_transform_at(const ScalarField& f, const Vector& x, const geom::Subspace& theta,
                               const QuadSpec& q);

// One estimate of the mean of f over the unit sphere of theta (probability measure).
double sphere_mean_sample(const SphereField& f, const Matrix& frame, int m, Rng& rng);
MCEstimate sphere_transform(const SphereField& f, const geom::Subspace& theta, const QuadSpec& q);

// Estimate of the integral over G_{k,n} of (integral over theta-perp of
// |T f|^r)^{q/r}; the mixed norm is its q-th root.
MCEstimate mixed_norm_power(const ScalarField& f, int n, int k, double qexp, double rexp,
                            const randgeo::TruncationBox& box, const QuadSpec& q);
MCEstimate mixed_norm(const ScalarField& f, int n, int k, double qexp, double rexp,
                      const randgeo::TruncationBox& box, const QuadSpec& q);

// A_{k,n}(f_0, ..., f_n) = integral over the plane space of prod T f_j.
MCEstimate multilinear_A(const std::vector<ScalarField>& f, int k,
                         const randgeo::TruncationBox& box, const QuadSpec& q);
// The point-tuple form: integral of f_0(x_0)...f_k(x_k) prod_{j>k} T f_j(x_0, theta)
// times |G(x_1-x_0, ..., x_k-x_0)|^{(k-n)/2}, without the proportionality constant.
MCEstimate multilinear_A_kernel(const std::vector<ScalarField>& f, int k, const QuadSpec& q);

// B_{k,n}(f_1, ..., f_n) = integral over G_{k,n} of prod S f_j.
MCEstimate multilinear_B(const std::vector<SphereField>& f, int k, const QuadSpec& q);
// Gram-weighted sphere form: integral over (S^{n-1})^k of f_1(w_1)...f_k(w_k)
// prod_{j>k} S f_j(theta(w)) |G(w)|^{(k-n)/2}, without the constant.
MCEstimate multilinear_B_kernel(const std::vector<SphereField>& f, int k, const QuadSpec& q);
// k = 1 closed form: mean over the sphere of prod (f_j(w) + f_j(-w))/2.
MCEstimate multilinear_B_line(const std::vector<SphereField>& f, const QuadSpec& q);

// B_alpha f(omega) = int_0^inf f(t omega) t^{alpha-1} dt (deterministic quadrature;
// std_error carries the quadrature error estimate).
MCEstimate b_alpha(const ScalarField& f, const Vector& omega, double alpha, const QuadSpec& q);
// C_alpha f(w~) = int_0^pi f(cos t, sin t w~) |sin t|^{alpha-2} dt.
MCEstimate c_alpha(const SphereField& f, const Vector& omega_tilde, double alpha,
                   const QuadSpec& q);

// Scale of the Gaussian proposal used when sampling points for f.
double proposal_scale(const ScalarField& f);

}  // namespace kplane::transforms
