#include "kplane/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kplane/errors.hpp"
#include "kplane/mc.hpp"
#include "kplane/quadrature.hpp"

namespace kplane::transforms {

using randgeo::ball_volume;

namespace {

std::size_t root_count(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
}

bool small_integer(double r) { return r == std::floor(r) && r >= 1.0 && r <= 8.0; }

// Unbiased estimate of |T f(x, theta)|^r: a product of r independent plane
// integrals when r is a small integer, otherwise the plug-in power.
double plane_power_sample(const ScalarField& f, const Vector& x, const Matrix& frame, double radius,
                          int m, QuadMode mode, double r, Rng& rng) {
  if (small_integer(r)) {
    double prod = 1.0;
    for (int i = 0; i < static_cast<int>(r); ++i) {
      prod *= plane_integral_sample(f, x, frame, radius, m, mode, rng);
      if (prod == 0.0) return 0.0;
    }
    return std::abs(prod);
  }
  return std::pow(std::abs(plane_integral_sample(f, x, frame, radius, m, mode, rng)), r);
}

MCEstimate finish(const mc::Accumulator& acc, const QuadSpec& q, double truncation) {
  MCEstimate e;
  e.value = acc.mean(0);
  e.std_error = acc.std_error(0);
  e.samples = acc.count();
  e.stream = q.stream;
  e.truncation_radius = truncation;
  return e;
}

double tail_bound_for(const ScalarField& f) {
  return f.decay == fields::Decay::Gaussian ? 1e-6 : 0.0;
}

void require_fields(const std::vector<ScalarField>& f, std::size_t count, const char* who) {
  if (f.size() != count) {
    throw InvalidInput(std::string(who) + ": expected " + std::to_string(count) + " fields");
  }
  for (const auto& g : f) {
    if (g.n != f.front().n) throw InvalidInput(std::string(who) + ": fields of unequal dimension");
  }
}

}  // namespace

void QuadSpec::validate() const {
  if (samples < 100) throw InvalidInput("QuadSpec: samples must be >= 100");
  if (workers < 1) throw InvalidInput("QuadSpec: workers must be >= 1");
  if (transform_points < 1) throw InvalidInput("QuadSpec: transform_points must be >= 1");
  if (truncation && !(*truncation > 0.0 && std::isfinite(*truncation))) {
    throw InvalidInput("QuadSpec: truncation radius must be positive and finite");
  }
}

double truncation_radius(const ScalarField& f, const QuadSpec& q) {
  if (!f.plane_integrable && !q.divergence_mode) {
    throw RefusalError("field '" + f.name +
                       "' is not integrable along k-planes; enable divergence mode with an explicit "
                       "truncation radius");
  }
  if (q.truncation) return *q.truncation;
  if (!std::isfinite(f.radius)) {
    throw RefusalError("field '" + f.name + "' has no finite truncation radius");
  }
  return f.radius;
}

double plane_integral_sample(const ScalarField& f, const Vector& x, const Matrix& frame, double radius,
                             int m, QuadMode mode, Rng& rng) {
  const int n = static_cast<int>(frame.rows());
  const int k = static_cast<int>(frame.cols());
  const Vector rel = f.center - x;
  const Vector u0 = frame.transpose() * rel;
  const double d2 = rel.squaredNorm() - u0.squaredNorm();
  const double r2 = radius * radius;
  if (d2 >= r2) return 0.0;
  const double rho = std::sqrt(r2 - std::max(0.0, d2));
  Vector y(n);
  double sum = 0.0;
  if (k == 1 && f.box) {
    // Lines are clipped to the support box as well as the truncation ball.
    const Vector d = frame.col(0);
    const Vector& h = *f.box;
    double lo = u0(0) - rho;
    double hi = u0(0) + rho;
    for (int i = 0; i < n && lo < hi; ++i) {
      if (std::abs(d(i)) < 1e-15) {
        if (std::abs(rel(i)) > h(i)) return 0.0;
        continue;
      }
      double a = (rel(i) - h(i)) / d(i);
      double b = (rel(i) + h(i)) / d(i);
      if (a > b) std::swap(a, b);
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    }
    if (!(lo < hi)) return 0.0;
    for (int i = 0; i < m; ++i) {
      double s = rng.uniform();
      if (mode == QuadMode::StratifiedRadial) s = (i + s) / m;
      y = x + (lo + s * (hi - lo)) * d;
      sum += f(y);
    }
    return (hi - lo) * sum / m;
  }
  const double vol = ball_volume(k, rho);
  Vector u(k);
  for (int i = 0; i < m; ++i) {
    double s = rng.uniform();
    if (mode == QuadMode::StratifiedRadial) s = (i + s) / m;
    const Vector dir = randgeo::sample_sphere(k, rng);
    u = u0 + dir * (rho * std::pow(s, 1.0 / k));
    y.noalias() = frame * u;
    y += x;
    sum += f(y);
  }
  return vol * sum / m;
}

MCEstimate kplane_transform_at(const ScalarField& f, const Vector& x, const geom::Subspace& theta,
                               const QuadSpec& q) {
  q.validate();
  if (x.size() != f.n || theta.n() != f.n) throw InvalidInput("kplane_transform: dimension mismatch");
  const double radius = truncation_radius(f, q);
  const Matrix& frame = theta.frame();
  mc::Accumulator acc;
  if (q.mode == QuadMode::PlainMC) {
    acc = mc::run(q.stream, q.samples, q.workers, 1, [&](Rng& rng, Vector& out) {
      out(0) = plane_integral_sample(f, x, frame, radius, 1, QuadMode::PlainMC, rng);
    });
  } else {
    const int batch = 64;
    const std::size_t groups = std::max<std::size_t>(2, q.samples / batch);
    acc = mc::run(q.stream, groups, q.workers, 1, [&](Rng& rng, Vector& out) {
      out(0) = plane_integral_sample(f, x, frame, radius, batch, QuadMode::StratifiedRadial, rng);
    });
  }
  MCEstimate e = finish(acc, q, radius);
  if (q.mode != QuadMode::PlainMC) e.samples = acc.count() * 64;
  e.tail_bound = tail_bound_for(f);
  return e;
}

MCEstimate kplane_transform(const ScalarField& f, const geom::AffineKPlane& plane, const QuadSpec& q) {
  return kplane_transform_at(f, plane.base(), plane.theta(), q);
}

double sphere_mean_sample(const SphereField& f, const Matrix& frame, int m, Rng& rng) {
  const int k = static_cast<int>(frame.cols());
  if (k == 1) {
    const Vector eta = frame.col(0);
    return 0.5 * (f(eta) + f(-eta));
  }
  double sum = 0.0;
  if (k == 2) {
    const double offset = rng.uniform();
    for (int i = 0; i < m; ++i) {
      const double a = 2.0 * std::numbers::pi * (i + offset) / m;
      const Vector w = frame.col(0) * std::cos(a) + frame.col(1) * std::sin(a);
      sum += f(w);
    }
    return sum / m;
  }
  for (int i = 0; i < m; ++i) sum += f(frame * randgeo::sample_sphere(k, rng));
  return sum / m;
}

MCEstimate sphere_transform(const SphereField& f, const geom::Subspace& theta, const QuadSpec& q) {
  q.validate();
  if (theta.n() != f.n) throw InvalidInput("sphere_transform: dimension mismatch");
  MCEstimate e;
  e.stream = q.stream;
  if (theta.k() == 1) {
    Rng rng(q.stream);
    e.value = sphere_mean_sample(f, theta.frame(), 1, rng);
    e.samples = 2;
    return e;
  }
  const int batch = theta.k() == 2 ? 64 : 1;
  const std::size_t groups = std::max<std::size_t>(2, q.samples / batch);
  const auto acc = mc::run(q.stream, groups, q.workers, 1, [&](Rng& rng, Vector& out) {
    out(0) = sphere_mean_sample(f, theta.frame(), batch, rng);
  });
  e = finish(acc, q, 1.0);
  e.samples = acc.count() * static_cast<std::size_t>(batch);
  return e;
}

MCEstimate mixed_norm_power(const ScalarField& f, int n, int k, double qexp, double rexp,
                            const randgeo::TruncationBox& box, const QuadSpec& q) {
  q.validate();
  if (f.n != n) throw InvalidInput("mixed_norm: field dimension mismatch");
  if (k < 1 || k >= n) throw InvalidInput("mixed_norm: need 1 <= k < n");
  if (!(qexp >= 1.0) || !(rexp >= 1.0) || !std::isfinite(qexp) || !std::isfinite(rexp)) {
    throw InvalidInput("mixed_norm: exponents must satisfy 1 <= q, r < inf");
  }
  const double radius = truncation_radius(f, q);
  if (box.radius < radius) {
    throw InvalidInput("mixed_norm: truncation box radius is smaller than the field's support radius");
  }
  const std::size_t outer = q.outer.value_or(root_count(q.samples));
  const std::size_t inner = q.inner.value_or(root_count(q.samples));
  const double vol = ball_volume(n - k, box.radius);
  const int m = q.transform_points;
  const auto acc = mc::run(q.stream, outer, q.workers, 1, [&](Rng& rng, Vector& out) {
    const geom::Subspace theta = randgeo::sample_grassmann(n, k, rng);
    const Matrix perp = theta.complement_frame();
    const Vector c_perp = perp.transpose() * f.center;
    double sum = 0.0;
    for (std::size_t i = 0; i < inner; ++i) {
      const Vector x = perp * (c_perp + randgeo::sample_ball(n - k, box.radius, rng));
      sum += plane_power_sample(f, x, theta.frame(), radius, m, q.transform_mode, rexp, rng);
    }
    const double inner_integral = vol * sum / static_cast<double>(inner);
    out(0) = std::pow(inner_integral, qexp / rexp);
  });
  MCEstimate e = finish(acc, q, box.radius);
  e.samples = outer * inner;
  e.tail_bound = tail_bound_for(f);
  return e;
}

MCEstimate mixed_norm(const ScalarField& f, int n, int k, double qexp, double rexp,
                      const randgeo::TruncationBox& box, const QuadSpec& q) {
  MCEstimate e = mixed_norm_power(f, n, k, qexp, rexp, box, q);
  const double p = std::max(0.0, e.value);
  if (p > 0.0) {
    const double root = std::pow(p, 1.0 / qexp);
    e.std_error = root / qexp * e.std_error / p;
    e.value = root;
  } else {
    e.value = 0.0;
  }
  return e;
}

MCEstimate multilinear_A(const std::vector<ScalarField>& f, int k, const randgeo::TruncationBox& box,
                         const QuadSpec& q) {
  q.validate();
  if (f.empty()) throw InvalidInput("multilinear_A: no fields");
  const int n = f.front().n;
  require_fields(f, static_cast<std::size_t>(n + 1), "multilinear_A");
  if (k < 1 || k >= n) throw InvalidInput("multilinear_A: need 1 <= k < n");
  std::vector<double> radii;
  double reach = INFINITY;
  for (const auto& g : f) {
    radii.push_back(truncation_radius(g, q));
    reach = std::min(reach, g.center.norm() + radii.back());
  }
  if (box.radius < reach) {
    throw InvalidInput("multilinear_A: truncation box does not cover the plane set meeting all supports");
  }
  const int m = q.transform_points;
  const auto acc = mc::run(q.stream, q.samples, q.workers, 1, [&](Rng& rng, Vector& out) {
    const auto wp = randgeo::sample_affine_plane(n, k, box, rng);
    double prod = wp.weight;
    for (std::size_t j = 0; j < f.size() && prod != 0.0; ++j) {
      prod *= plane_integral_sample(f[j], wp.plane.base(), wp.plane.theta().frame(), radii[j], m,
                                    q.transform_mode, rng);
    }
    out(0) = prod;
  });
  return finish(acc, q, box.radius);
}

double proposal_scale(const ScalarField& f) {
  if (f.decay == fields::Decay::Gaussian) return 1.2 / std::sqrt(2.0 * f.rate);
  return 0.6 * f.radius;
}

MCEstimate multilinear_A_kernel(const std::vector<ScalarField>& f, int k, const QuadSpec& q) {
  q.validate();
  if (f.empty()) throw InvalidInput("multilinear_A_kernel: no fields");
  const int n = f.front().n;
  require_fields(f, static_cast<std::size_t>(n + 1), "multilinear_A_kernel");
  if (k < 1 || k >= n) throw InvalidInput("multilinear_A_kernel: need 1 <= k < n");
  std::vector<double> radii;
  for (const auto& g : f) radii.push_back(truncation_radius(g, q));
  const double z = randgeo::gram_weighted_mass(n, k);
  const double s0 = proposal_scale(f[0]);
  std::vector<double> s(static_cast<std::size_t>(k + 1));
  std::vector<double> radial_norm(static_cast<std::size_t>(k + 1));
  for (int j = 1; j <= k; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    s[ju] = std::sqrt(2.0) * std::max(proposal_scale(f[ju]), s0);
    // integral of r^{k-1} exp(-r^2 / (2 s^2)) over (0, inf)
    radial_norm[ju] = std::pow(s[ju], k) * std::pow(2.0, 0.5 * k - 1.0) * std::tgamma(0.5 * k);
  }
  const double log_p0_norm = -0.5 * n * std::log(2.0 * std::numbers::pi * s0 * s0);
  const int m = q.transform_points;
  const auto acc = mc::run(q.stream, q.samples, q.workers, 2, [&](Rng& rng, Vector& out) {
    Vector x0(n);
    for (int i = 0; i < n; ++i) x0(i) = f[0].center(i) + s0 * rng.normal();
    const double f0 = f[0](x0);
    const Matrix w = randgeo::sample_gram_weighted_directions(n, k, rng);
    std::vector<double> r(static_cast<std::size_t>(k + 1));
    for (int j = 1; j <= k; ++j) {
      r[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j)] * std::sqrt(2.0 * rng.gamma(0.5 * k));
    }
    if (geom::gram_det(w) < 1e-12) {
      out(0) = 0.0;
      out(1) = 1.0;
      return;
    }
    out(1) = 0.0;
    if (f0 == 0.0) {
      out(0) = 0.0;
      return;
    }
    const double dev2 = (x0 - f[0].center).squaredNorm();
    double weight = f0 / std::exp(log_p0_norm - dev2 / (2.0 * s0 * s0)) * z;
    for (int j = 1; j <= k && weight != 0.0; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const Vector xj = x0 + r[ju] * w.col(j - 1);
      weight *= f[ju](xj) * radial_norm[ju] * std::exp(r[ju] * r[ju] / (2.0 * s[ju] * s[ju]));
    }
    if (weight != 0.0 && n > k) {
      const Matrix frame = geom::orthonormalize(w);
      for (int j = k + 1; j <= n && weight != 0.0; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        weight *= plane_integral_sample(f[ju], x0, frame, radii[ju], m, q.transform_mode, rng);
      }
    }
    out(0) = weight;
  });
  MCEstimate e;
  e.value = acc.mean(0);
  e.std_error = acc.std_error(0);
  e.samples = acc.count();
  e.stream = q.stream;
  e.rejected = static_cast<std::size_t>(std::llround(acc.mean(1) * static_cast<double>(acc.count())));
  e.rejection_fraction = acc.mean(1);
  for (const auto& g : f) e.tail_bound = std::max(e.tail_bound, tail_bound_for(g));
  for (double rr : radii) e.truncation_radius = std::max(e.truncation_radius, rr);
  return e;
}

MCEstimate multilinear_B(const std::vector<SphereField>& f, int k, const QuadSpec& q) {
  q.validate();
  if (f.empty()) throw InvalidInput("multilinear_B: no fields");
  const int n = f.front().n;
  if (f.size() != static_cast<std::size_t>(n)) throw InvalidInput("multilinear_B: expected n fields");
  if (k < 1 || k >= n) throw InvalidInput("multilinear_B: need 1 <= k < n");
  const int m = q.transform_points;
  const auto acc = mc::run(q.stream, q.samples, q.workers, 1, [&](Rng& rng, Vector& out) {
    const geom::Subspace theta = randgeo::sample_grassmann(n, k, rng);
    double prod = 1.0;
    for (std::size_t j = 0; j < f.size() && prod != 0.0; ++j) {
      prod *= sphere_mean_sample(f[j], theta.frame(), m, rng);
    }
    out(0) = prod;
  });
  return finish(acc, q, 1.0);
}

MCEstimate multilinear_B_kernel(const std::vector<SphereField>& f, int k, const QuadSpec& q) {
  q.validate();
  if (f.empty()) throw InvalidInput("multilinear_B_kernel: no fields");
  const int n = f.front().n;
  if (f.size() != static_cast<std::size_t>(n)) throw InvalidInput("multilinear_B_kernel: expected n fields");
  if (k < 1 || k >= n) throw InvalidInput("multilinear_B_kernel: need 1 <= k < n");
  const double z = randgeo::gram_weighted_mass(n, k);
  const int m = q.transform_points;
  const auto acc = mc::run(q.stream, q.samples, q.workers, 2, [&](Rng& rng, Vector& out) {
    const Matrix w = randgeo::sample_gram_weighted_directions(n, k, rng);
    if (geom::gram_det(w) < 1e-12) {
      out(0) = 0.0;
      out(1) = 1.0;
      return;
    }
    out(1) = 0.0;
    double prod = z;
    for (int j = 0; j < k && prod != 0.0; ++j) prod *= f[static_cast<std::size_t>(j)](w.col(j));
    if (prod != 0.0) {
      const Matrix frame = geom::orthonormalize(w);
      for (int j = k; j < n && prod != 0.0; ++j) {
        prod *= sphere_mean_sample(f[static_cast<std::size_t>(j)], frame, m, rng);
      }
    }
    out(0) = prod;
  });
  MCEstimate e;
  e.value = acc.mean(0);
  e.std_error = acc.std_error(0);
  e.samples = acc.count();
  e.stream = q.stream;
  e.rejection_fraction = acc.mean(1);
  e.rejected = static_cast<std::size_t>(std::llround(acc.mean(1) * static_cast<double>(acc.count())));
  return e;
}

MCEstimate multilinear_B_line(const std::vector<SphereField>& f, const QuadSpec& q) {
  q.validate();
  if (f.empty()) throw InvalidInput("multilinear_B_line: no fields");
  const int n = f.front().n;
  const auto acc = mc::run(q.stream, q.samples, q.workers, 1, [&](Rng& rng, Vector& out) {
    const Vector w = randgeo::sample_sphere(n, rng);
    double prod = 1.0;
    for (const auto& g : f) prod *= 0.5 * (g(w) + g(-w));
    out(0) = prod;
  });
  return finish(acc, q, 1.0);
}

MCEstimate b_alpha(const ScalarField& f, const Vector& omega, double alpha, const QuadSpec& q) {
  if (!(alpha > 0.0)) throw InvalidInput("b_alpha: alpha must be positive");
  if (omega.size() != f.n || std::abs(omega.norm() - 1.0) > 1e-10) {
    throw InvalidInput("b_alpha: omega must be a unit vector in R^n");
  }
  double reach = 0.0;
  if (q.truncation) {
    if (!f.plane_integrable && !q.divergence_mode) {
      throw RefusalError("b_alpha: field is flagged non-integrable; enable divergence mode");
    }
    reach = *q.truncation;
  } else {
    if (!std::isfinite(f.radius)) throw RefusalError("b_alpha: field needs an explicit truncation radius");
    reach = f.center.norm() + f.radius;
  }
  // t = T v^{1/alpha} turns t^{alpha-1} dt into (T^alpha / alpha) dv.
  Vector x(f.n);
  const auto integrand = [&](double v) {
    x = omega * (reach * std::pow(v, 1.0 / alpha));
    return f(x);
  };
  const auto r = quad::integrate(integrand, 0.0, 1.0, 1e-10);
  const double scale = std::pow(reach, alpha) / alpha;
  MCEstimate e;
  e.value = scale * r.value;
  e.std_error = scale * r.error;
  e.stream = q.stream;
  e.truncation_radius = reach;
  e.tail_bound = tail_bound_for(f);
  return e;
}

MCEstimate c_alpha(const SphereField& f, const Vector& omega_tilde, double alpha, const QuadSpec& q) {
  if (!(alpha > 1.0)) {
    throw RefusalError("c_alpha: the weight |sin t|^{alpha-2} is not integrable for alpha <= 1");
  }
  if (omega_tilde.size() != f.n - 1 || std::abs(omega_tilde.norm() - 1.0) > 1e-10) {
    throw InvalidInput("c_alpha: omega_tilde must be a unit vector in R^{n-1}");
  }
  const auto value_at = [&](double t) { return f(geom::sphere_join(t, omega_tilde)); };
  quad::Result total;
  const double half = 0.5 * std::numbers::pi;
  if (alpha < 2.0) {
    // t = (pi/2) v^b, b = 1/(alpha-1), removes the endpoint singularity.
    const double b = 1.0 / (alpha - 1.0);
    const double scale = std::pow(half, alpha - 1.0) * b;
    const auto ratio = [&](double t) { return t > 0.0 ? std::pow(std::sin(t) / t, alpha - 2.0) : 1.0; };
    const auto left = [&](double v) {
      const double t = half * std::pow(v, b);
      return scale * value_at(t) * ratio(t);
    };
    const auto right = [&](double v) {
      const double t = half * std::pow(v, b);
      return scale * value_at(std::numbers::pi - t) * ratio(t);
    };
    const auto l = quad::integrate(left, 0.0, 1.0, 1e-10);
    const auto r = quad::integrate(right, 0.0, 1.0, 1e-10);
    total.value = l.value + r.value;
    total.error = l.error + r.error;
  } else {
    const auto g = [&](double t) { return value_at(t) * std::pow(std::abs(std::sin(t)), alpha - 2.0); };
    total = quad::integrate_pieces(g, {0.0, half, std::numbers::pi}, 1e-10);
  }
  MCEstimate e;
  e.value = total.value;
  e.std_error = total.error;
  e.stream = q.stream;
  return e;
}

}  // namespace kplane::transforms
