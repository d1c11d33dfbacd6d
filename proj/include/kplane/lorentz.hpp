#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "kplane/fields.hpp"
#include "kplane/randgeo.hpp"

namespace kplane::lorentz {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sampling { Plain, StratifiedRadial };

// |f| sampled on its truncation region with every sample carrying the same
// measure `cell`; values are sorted in nonincreasing order.
struct DistributionSample {
  std::vector<double> values;
  double cell = 0.0;
  double total_measure = 0.0;

  std::size_t size() const { return values.size(); }
  double sup() const { return values.empty() ? 0.0 : values.front(); }
  // mu(|f| > lambda)
  double distribution(double lambda) const;
};

struct SampleSpec {
  std::size_t samples = 200000;
  randgeo::RngStream stream{};
  int workers = 1;
  Sampling sampling = Sampling::Plain;
  // Sphere sampling: stratification axis when the field has no zonal axis.
  std::optional<geom::Vector> axis;
};

DistributionSample from_values(std::vector<double> values, double cell);
// Fields must declare a bound and a finite truncation radius.
DistributionSample sample_distribution(const fields::ScalarField& f, const SampleSpec& s);
// Surface measure on S^{n-1}. Stratified sampling stratifies the coordinate along
// the field's zonal axis (or SampleSpec::axis). Unbounded sphere functions are accepted when require_bound is false.
DistributionSample sample_distribution(const fields::SphereField& f, const SampleSpec& s,
                                       bool require_bound = true);

// Step representation of f*: value values[i] on [breakpoints[i-1], breakpoints[i])
// with breakpoints[-1] = 0, and 0 beyond the last breakpoint.
class RearrangementProfile {
 public:
  RearrangementProfile() = default;
  RearrangementProfile(std::vector<double> breakpoints, std::vector<double> values);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double operator()(double t) const;
  // measure{t : f*(t) > lambda}
  double distribution(double lambda) const;
  double support_measure() const { return breakpoints_.empty() ? 0.0 : breakpoints_.back(); }
  void write_csv(std::ostream& out) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

// Groups the sorted sample on a log-spaced grid of `resolution` levels between the
// smallest and largest positive values; each step takes the mean of its group.
RearrangementProfile rearrangement(const DistributionSample& d, int resolution = 512);
RearrangementProfile rearrangement(const fields::ScalarField& f, int resolution, const SampleSpec& s);

// ||f||_{p,q} = (int_0^inf (t^{1/p} f*(t))^q dt/t)^{1/q}; sup form for q = inf.
double lorentz_norm(const RearrangementProfile& f, double p, double q);
double lp_norm(const DistributionSample& d, double p);
// sup_t t^{1/p} f*(t) read off the sorted sample, over t >= min_count cells (the
// extreme order statistics bias the sup upward for unbounded functions).
double weak_norm(const DistributionSample& d, double p, std::size_t min_count = 1);

// (int_0^{t^p} f*(s)^p ds)^{1/p}
double k_functional(const RearrangementProfile& f, double t, double p);
// min over lambda in the grid of ||(|f| - lambda)_+||_p + t min(lambda, sup|f|).
double k_functional_oracle(const DistributionSample& d, double t, double p,
                           const std::vector<double>& levels);
// {0} + log grid between the smallest positive value and the sup + {sup}.
std::vector<double> level_grid(const DistributionSample& d, int resolution = 512);

// (sum_j (2^{-j theta} K(2^j))^q ln 2)^{1/q}, j = -60..60, with the K-functional formula.
double interpolation_norm(const RearrangementProfile& f, double p, double theta, double q);

}  // namespace kplane::lorentz
