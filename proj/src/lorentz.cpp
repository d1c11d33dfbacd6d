#include "kplane/lorentz.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <functional>
#include <ostream>

#include "kplane/errors.hpp"
#include "kplane/mc.hpp"

namespace kplane::lorentz {

using geom::Vector;

namespace {

void check_exponent(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("Lorentz exponent p must satisfy 1 <= p < inf");
}

DistributionSample collect(std::vector<std::vector<double>>& parts, double cell, double total) {
  std::vector<double> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  DistributionSample d = from_values(std::move(all), cell);
  d.total_measure = total;
  return d;
}

}  // namespace

double DistributionSample::distribution(double lambda) const {
  // values are nonincreasing: count those > lambda
  const auto it = std::partition_point(values.begin(), values.end(),
                                       [lambda](double v) { return v > lambda; });
  return cell * static_cast<double>(it - values.begin());
}

DistributionSample from_values(std::vector<double> values, double cell) {
  if (!(cell > 0.0)) throw InvalidInput("distribution sample: cell measure must be positive");
  for (double& v : values) {
    if (!std::isfinite(v)) throw RefusalError("distribution sample: non-finite function value");
    v = std::abs(v);
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  DistributionSample d;
  d.values = std::move(values);
  d.cell = cell;
  d.total_measure = cell * static_cast<double>(d.values.size());
  return d;
}

DistributionSample sample_distribution(const fields::ScalarField& f, const SampleSpec& s) {
  if (!f.bound) throw RefusalError("rearrangement needs a field with a declared bound");
  if (!f.finite_support() || !std::isfinite(f.radius)) {
    throw RefusalError("rearrangement needs a field with a finite truncation radius");
  }
  if (s.samples < 1) throw InvalidInput("rearrangement: samples must be positive");
  const int n = f.n;
  std::vector<std::vector<double>> parts(static_cast<std::size_t>(std::max(1, s.workers)));
  const bool use_box = f.box.has_value() && s.sampling == Sampling::Plain;
  const double measure = use_box ? std::pow(2.0, n) * f.box->prod() : randgeo::ball_volume(n, f.radius);
  const double total = static_cast<double>(s.samples);
  mc::run_partitioned(s.stream, s.samples, s.workers,
                      [&](int w, randgeo::Rng& rng, std::size_t first, std::size_t count) {
                        auto& out = parts[static_cast<std::size_t>(w)];
                        out.reserve(count);
                        Vector x(n);
                        for (std::size_t i = 0; i < count; ++i) {
                          if (use_box) {
                            for (int j = 0; j < n; ++j) {
                              x(j) = f.center(j) + (*f.box)(j) * (2.0 * rng.uniform() - 1.0);
                            }
                          } else if (s.sampling == Sampling::StratifiedRadial) {
                            const double u = (static_cast<double>(first + i) + rng.uniform()) / total;
                            x = f.center + randgeo::sample_sphere(n, rng) * (f.radius * std::pow(u, 1.0 / n));
                          } else {
                            x = f.center + randgeo::sample_ball(n, f.radius, rng);
                          }
                          out.push_back(f(x));
                        }
                      });
  return collect(parts, measure / total, measure);
}

DistributionSample sample_distribution(const fields::SphereField& f, const SampleSpec& s,
                                       bool require_bound) {
  if (require_bound && !f.bound) throw RefusalError("rearrangement needs a sphere field with a declared bound");
  if (s.samples < 1) throw InvalidInput("rearrangement: samples must be positive");
  const int n = f.n;
  if (n < 2) throw InvalidInput("sphere sampling needs n >= 2");
  if (s.sampling == Sampling::StratifiedRadial && !f.zonal_axis && !s.axis) {
    throw InvalidInput("stratified sphere sampling needs an axis");
  }
  const double measure = randgeo::sphere_area(n);
  const double total = static_cast<double>(s.samples);
  const double a = 0.5 * (n - 1);
  std::vector<std::vector<double>> parts(static_cast<std::size_t>(std::max(1, s.workers)));
  mc::run_partitioned(s.stream, s.samples, s.workers,
                      [&](int w, randgeo::Rng& rng, std::size_t first, std::size_t count) {
                        auto& out = parts[static_cast<std::size_t>(w)];
                        out.reserve(count);
                        for (std::size_t i = 0; i < count; ++i) {
                          Vector omega;
                          if (s.sampling == Sampling::StratifiedRadial) {
                            const Vector axis = (s.axis ? *s.axis : *f.zonal_axis).normalized();
                            const double u = (static_cast<double>(first + i) + rng.uniform()) / total;
                            // (x + 1)/2 ~ Beta((n-1)/2, (n-1)/2) for the axis coordinate x
                            const double x = 2.0 * boost::math::ibeta_inv(a, a, u) - 1.0;
                            Vector v = randgeo::sample_sphere(n, rng);
                            v -= axis * axis.dot(v);
                            const double len = v.norm();
                            if (len > 0.0) v /= len;
                            omega = axis * x + v * std::sqrt(std::max(0.0, 1.0 - x * x));
                          } else {
                            omega = randgeo::sample_sphere(n, rng);
                          }
                          out.push_back(f(omega));
                        }
                      });
  return collect(parts, measure / total, measure);
}

RearrangementProfile::RearrangementProfile(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() != values_.size()) throw InvalidInput("profile: size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < 0.0) throw InvalidInput("profile: negative value");
    if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1])) {
      throw InvalidInput("profile: breakpoints must increase strictly");
    }
    if (i > 0 && values_[i] > values_[i - 1]) throw InvalidInput("profile: values must not increase");
  }
  if (!breakpoints_.empty() && !(breakpoints_.front() > 0.0)) {
    throw InvalidInput("profile: breakpoints must be positive");
  }
}

double RearrangementProfile::operator()(double t) const {
  if (t < 0.0) throw InvalidInput("profile evaluated at negative t");
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  if (it == breakpoints_.end()) return 0.0;
  return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

double RearrangementProfile::distribution(double lambda) const {
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > lambda) m = breakpoints_[i];
  }
  return m;
}

void RearrangementProfile::write_csv(std::ostream& out) const {
  out << "t,f_star\n";
  out.precision(17);
  for (std::size_t i = 0; i < values_.size(); ++i) out << breakpoints_[i] << ',' << values_[i] << '\n';
}

RearrangementProfile rearrangement(const DistributionSample& d, int resolution) {
  if (resolution < 1) throw InvalidInput("rearrangement: resolution must be >= 1");
  const auto& v = d.values;
  std::size_t positive = 0;
  while (positive < v.size() && v[positive] > 0.0) ++positive;
  if (positive == 0) return {};
  const double vmax = v.front();
  const double vmin = v[positive - 1];
  std::vector<double> bps;
  std::vector<double> vals;
  const double log_hi = std::log(vmax);
  const double step = (log_hi - std::log(vmin)) / resolution;
  std::size_t i = 0;
  int level = 1;
  while (i < positive) {
    double threshold = -1.0;
    if (step > 0.0) {
      while (level < resolution && std::exp(log_hi - step * level) >= v[i]) ++level;
      threshold = level < resolution ? std::exp(log_hi - step * level) : -1.0;
    }
    double sum = 0.0;
    const std::size_t start = i;
    while (i < positive && v[i] > threshold) sum += v[i++];
    const double mean = sum / static_cast<double>(i - start);
    const double bp = d.cell * static_cast<double>(i);
    const double value = vals.empty() ? mean : std::min(mean, vals.back());
    vals.push_back(value);
    bps.push_back(bp);
  }
  return RearrangementProfile(std::move(bps), std::move(vals));
}

RearrangementProfile rearrangement(const fields::ScalarField& f, int resolution, const SampleSpec& s) {
  return rearrangement(sample_distribution(f, s), resolution);
}

double lorentz_norm(const RearrangementProfile& f, double p, double q) {
  check_exponent(p);
  if (!(q >= 1.0)) throw InvalidInput("Lorentz exponent q must satisfy q >= 1");
  const auto& t = f.breakpoints();
  const auto& v = f.values();
  if (std::isinf(q)) {
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) best = std::max(best, v[i] * std::pow(t[i], 1.0 / p));
    return best;
  }
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double e = q / p;
    sum += std::pow(v[i], q) * (p / q) * (std::pow(t[i], e) - std::pow(prev, e));
    prev = t[i];
  }
  return std::pow(sum, 1.0 / q);
}

double lp_norm(const DistributionSample& d, double p) {
  if (!(p > 0.0)) throw InvalidInput("L^p exponent must be positive");
  if (std::isinf(p)) return d.sup();
  double sum = 0.0;
  for (double v : d.values) sum += std::pow(v, p);
  return std::pow(d.cell * sum, 1.0 / p);
}

double weak_norm(const DistributionSample& d, double p, std::size_t min_count) {
  check_exponent(p);
  double best = 0.0;
  for (std::size_t i = min_count > 0 ? min_count - 1 : 0; i < d.values.size(); ++i) {
    if (d.values[i] <= 0.0) break;
    best = std::max(best, d.values[i] * std::pow(d.cell * static_cast<double>(i + 1), 1.0 / p));
  }
  return best;
}

double k_functional(const RearrangementProfile& f, double t, double p) {
  check_exponent(p);
  if (!(t > 0.0)) throw InvalidInput("K-functional: t must be positive");
  const double s = std::pow(t, p);
  const auto& bp = f.breakpoints();
  const auto& v = f.values();
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < v.size() && prev < s; ++i) {
    sum += std::pow(v[i], p) * (std::min(bp[i], s) - prev);
    prev = bp[i];
  }
  return std::pow(sum, 1.0 / p);
}

std::vector<double> level_grid(const DistributionSample& d, int resolution) {
  std::vector<double> levels{0.0};
  std::size_t positive = 0;
  while (positive < d.values.size() && d.values[positive] > 0.0) ++positive;
  if (positive == 0) return levels;
  const double hi = d.values.front();
  const double lo = d.values[positive - 1];
  if (hi > lo) {
    for (int j = 0; j <= resolution; ++j) {
      levels.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * j / resolution));
    }
  }
  levels.push_back(hi);
  return levels;
}

double k_functional_oracle(const DistributionSample& d, double t, double p,
                           const std::vector<double>& levels) {
  check_exponent(p);
  if (!(t > 0.0)) throw InvalidInput("K-functional: t must be positive");
  const double sup = d.sup();
  double best = INFINITY;
  for (double lambda : levels) {
    double sum = 0.0;
    for (double v : d.values) {
      if (v <= lambda) break;
      const double excess = v - lambda;
      sum += p == 1.0 ? excess : p == 2.0 ? excess * excess : std::pow(excess, p);
    }
    const double value = std::pow(d.cell * sum, 1.0 / p) + t * std::min(lambda, sup);
    best = std::min(best, value);
  }
  return best;
}

double interpolation_norm(const RearrangementProfile& f, double p, double theta, double q) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidInput("interpolation parameter must lie in (0, 1)");
  if (!(q >= 1.0)) throw InvalidInput("interpolation exponent q must be >= 1");
  double sum = 0.0;
  double best = 0.0;
  for (int j = -60; j <= 60; ++j) {
    const double t = std::ldexp(1.0, j);
    const double term = std::pow(t, -theta) * k_functional(f, t, p);
    if (std::isinf(q)) {
      best = std::max(best, term);
    } else {
      sum += std::pow(term, q) * std::log(2.0);
    }
  }
  return std::isinf(q) ? best : std::pow(sum, 1.0 / q);
}

}  // namespace kplane::lorentz
