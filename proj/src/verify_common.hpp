#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kplane/report.hpp"
#include "kplane/transforms.hpp"
#include "kplane/verify.hpp"

namespace kplane::verify::detail {

struct Side {
  double value = 0.0;
  double se = 0.0;
};

struct RatioCase {
  std::string desc;
  Side lhs;
  Side rhs;
};

struct RatioSummary {
  double c = 0.0;
  double c_se = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
  bool ok = true;
};

// Adds one row per case: cases where either side is within 5 standard errors of
// zero are excluded; the rest must agree pairwise within
// max(3 sqrt(se_i^2 + se_j^2), rel_tol * mean). c is the inverse-variance mean.
RatioSummary ratio_constancy(VerdictReport& report, const std::vector<RatioCase>& cases, double rel_tol);

struct Fit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  bool ok = false;
};

// Weighted least squares of log y against log x; y_se are standard errors of y
// (zeros give unit weights).
Fit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& y_se);

// Family ratios must stay within max/min <= bound; returns the observed spread.
double spread(const std::vector<double>& ratios);

struct Member {
  std::string desc;
  Side lhs;
  Side rhs;
  std::string group;            // members sharing a group form a sweep
  std::optional<double> sweep;  // shrinking parameter (cap angle, radius, width)
};

// One row per member, then the family spread max/min <= max_spread and, for each
// group, the log-log slope of the ratio against the sweep parameter >= min_slope
// (a negative slope means the ratio grows as the parameter shrinks).
void bounded_ratio(VerdictReport& report, const std::vector<Member>& family, double max_spread,
                   double min_slope);

Params make_params(int n, int k, std::size_t samples, const RunConfig& cfg, double tolerance);

transforms::QuadSpec quad_spec(const RunConfig& cfg, std::size_t samples, std::uint64_t sub_stream);

inline bool within(double a, double b, double se_a, double se_b, double rel_tol) {
  const double diff = std::abs(a - b);
  const double sigma = std::sqrt(se_a * se_a + se_b * se_b);
  return diff <= std::max(3.0 * sigma, rel_tol * 0.5 * (std::abs(a) + std::abs(b)));
}

}  // namespace kplane::verify::detail
