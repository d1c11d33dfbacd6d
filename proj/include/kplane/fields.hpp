#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kplane/geom.hpp"
#include "kplane/mc.hpp"

namespace kplane::fields {

using geom::Vector;

enum class Decay { Compact, Gaussian, PowerLaw };

// A test function on R^n. Every integrator truncates to the ball of `radius`
// about `center`: exact support for compact fields, the radius beyond which a
// Gaussian tail carries < 1e-6 of the mass otherwise.
struct ScalarField {
  int n = 0;
  std::string name;
  std::function<double(const Vector&)> eval;
  Vector center;
  double radius = 0.0;
  Decay decay = Decay::Compact;
  double rate = 0.0;                  // Gaussian decay rate (|f| <= bound * exp(-rate |x-c|^2))
  std::optional<Vector> box;          // half-widths of an axis-aligned box about center holding the support
  std::optional<double> bound;        // sup |f|
  std::optional<Vector> zonal_axis;   // f is invariant under rotations fixing this axis (through 0)
  std::function<std::optional<double>(double)> lp_norm;  // analytic ||f||_p where known
  std::vector<std::string> tags;
  bool plane_integrable = true;

  double operator()(const Vector& x) const { return eval(x); }
  std::optional<double> analytic_lp(double p) const;
  bool finite_support() const { return decay != Decay::PowerLaw; }
  double enclosing_radius() const { return center.norm() + radius; }
};

// A function on S^{n-1}.
struct SphereField {
  int n = 0;
  std::string name;
  std::function<double(const Vector&)> eval;
  std::optional<double> bound;
  std::optional<Vector> zonal_axis;  // f depends on <omega, axis> only
  std::vector<std::string> tags;

  double operator()(const Vector& omega) const { return eval(omega); }
};

using Field = std::variant<ScalarField, SphereField>;

// Radius R with P(|Z| > R) <= 1e-6 for the density proportional to exp(-rate |x|^2)
// in dimension n (Laurent-Massart chi-square bound).
double gaussian_truncation_radius(int n, double rate);

// Builtin registry.
ScalarField ball_indicator(int n, double r, const Vector& center);
ScalarField ball_indicator(int n, double r = 1.0);
ScalarField gaussian(int n, double rate, const Vector& center);
ScalarField gaussian(int n, double rate = 3.141592653589793);
// Indicator of B^k_1 x B^{n-k}_eps (first k coordinates in the unit ball).
ScalarField tube(int n, int k, double eps);
// (1+|x|)^{-k} log(2+|x|)^{-delta}; flagged as non-integrable along k-planes.
ScalarField log_divergent(int n, int k, double delta);
// min(|x|, r_min)^{-a} on |x| <= r_max, zero outside.
ScalarField radial_power(int n, double a, double r_min, double r_max);
ScalarField zero_field(int n);

SphereField sphere_constant(int n, double value = 1.0);
// Indicator of {<omega, axis> > cos(angle)}.
SphereField zonal_cap(int n, double angle, const Vector& axis);
SphereField zonal_cap(int n, double angle);
// omega_axis^m
SphereField coordinate_power(int n, int m, int axis = 0);

// f^{(delta)}(x) = f(delta x)
ScalarField dilate(const ScalarField& f, double delta);
// a f + b g (support: union of enclosing balls).
ScalarField linear_combination(double a, const ScalarField& f, double b, const ScalarField& g);

// Mini-format "name:param=value,..." (for example "ball:r=1", "gauss",
// "tube:eps=0.1", "cap:angle=0.5"). k supplies the default plane dimension for
// tube and logdiv.
Field parse_field_spec(const std::string& spec, int n, int k);
std::string field_spec_help();

// Monte-Carlo estimate of ||f||_p^p over the truncation region of f.
mc::Accumulator lp_power_estimate(const ScalarField& f, double p, const randgeo::RngStream& s,
                                  std::size_t samples, int workers);

}  // namespace kplane::fields
