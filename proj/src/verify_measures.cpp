#include <cmath>
#include <functional>

#include "kplane/errors.hpp"
#include "kplane/fields.hpp"
#include "kplane/geom.hpp"
#include "kplane/mc.hpp"
#include "kplane/randgeo.hpp"
#include "verify_common.hpp"

namespace kplane::verify {

namespace {

using geom::Matrix;
using geom::Vector;

constexpr double kGramReject = 1e-12;

bool allowed_pair(int n, int k) {
  return (n == 2 && k == 1) || (n == 3 && k == 1) || (n == 3 && k == 2) || (n == 4 && k == 2);
}

// f(x_1..x_k, P) with the points as columns and P the projector onto their span.
struct PointTuple {
  std::string desc;
  std::function<double(const Matrix&, const Matrix&)> f;
};

std::vector<PointTuple> point_tuples(int n, int k) {
  std::vector<PointTuple> out;
  out.push_back({"prod exp(-pi|x_j|^2)", [](const Matrix& x, const Matrix&) {
                   return std::exp(-M_PI * x.colwise().squaredNorm().sum());
                 }});
  Matrix shift = Matrix::Zero(n, k);
  for (int j = 0; j < k; ++j) {
    shift(j % n, j) = 0.3;
    shift((j + 1) % n, j) = -0.2;
  }
  out.push_back({"shifted Gaussians times (1 + P_11)", [shift](const Matrix& x, const Matrix& p) {
                   return std::exp(-M_PI * (x - shift).colwise().squaredNorm().sum()) * (1.0 + p(0, 0));
                 }});
  Vector b = Vector::Zero(n);
  b(1) = 0.2;
  out.push_back({"ball(0.2 e2, 0.9) x Gaussians times (1 + 2 P_nn)", [b, n](const Matrix& x, const Matrix& p) {
                   if ((x.col(0) - b).norm() > 0.9) return 0.0;
                   double g = 1.0;
                   for (int j = 1; j < x.cols(); ++j) g *= std::exp(-2.0 * x.col(j).squaredNorm());
                   return g * (1.0 + 2.0 * p(n - 1, n - 1));
                 }});
  out.push_back({"zero", [](const Matrix&, const Matrix&) { return 0.0; }});
  return out;
}

void check_rejection(VerdictReport& rep, double fraction) {
  rep.notes["rejection_fraction"] = fraction;
  if (fraction > 0.01) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes["inconclusive_reason"] = "degenerate-sample rejection fraction exceeds 1%";
  }
}

std::vector<detail::RatioCase> to_cases(const std::vector<std::string>& desc, const mc::Accumulator& lhs,
                                        const mc::Accumulator& rhs) {
  std::vector<detail::RatioCase> cases;
  for (std::size_t i = 0; i < desc.size(); ++i) {
    const int c = static_cast<int>(i);
    cases.push_back({desc[i], {lhs.mean(c), lhs.std_error(c)}, {rhs.mean(c), rhs.std_error(c)}});
  }
  return cases;
}

void record_constant(VerdictReport& rep, const detail::RatioSummary& s) {
  rep.notes["c_estimate"] = s.c;
  rep.notes["c_stderr"] = s.c_se;
  rep.notes["cases_excluded"] = s.excluded;
  if (s.used < 2) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes["inconclusive_reason"] = "fewer than two cases survived the division guard";
  }
}

}  // namespace

VerdictReport verify_lemma23(int n, int k, std::size_t samples, const RunConfig& cfg) {
  if (!allowed_pair(n, k)) throw InvalidInput("lemma23: (n, k) must be one of (2,1), (3,1), (3,2), (4,2)");
  if (samples < 1000) throw InvalidInput("lemma23: need at least 1000 samples");
  const double tol = cfg.tolerance.value_or(0.05);
  VerdictReport rep;
  rep.lemma_id = "lemma23";
  rep.params = detail::make_params(n, k, samples, cfg, tol);

  const auto tuples = point_tuples(n, k);
  const int nf = static_cast<int>(tuples.size());
  const double s = 0.6;
  rep.params.extra["proposal_scale"] = s;
  const double gauss_norm = std::pow(2.0 * M_PI * s * s, 0.5 * k);
  const double chi_norm = std::pow(s, k) * std::pow(2.0, 0.5 * k - 1.0) * std::tgamma(0.5 * k);
  const double z = randgeo::gram_weighted_mass(n, k);
  const randgeo::RngStream base{cfg.seed, 0};

  // Points drawn in theta from an isotropic Gaussian of scale s.
  const auto lhs = mc::run(base.sub(1), samples, cfg.workers, nf, [&](randgeo::Rng& rng, Vector& out) {
    const auto theta = randgeo::sample_grassmann(n, k, rng);
    const Matrix& fr = theta.frame();
    Matrix x(n, k);
    double w = 1.0;
    for (int j = 0; j < k; ++j) {
      Vector u(k);
      for (int i = 0; i < k; ++i) u(i) = s * rng.normal();
      x.col(j) = fr * u;
      w *= gauss_norm * std::exp(u.squaredNorm() / (2.0 * s * s));
    }
    const Matrix p = theta.projector();
    for (int i = 0; i < nf; ++i) out(i) = w * tuples[i].f(x, p);
  });

  // Directions from the Gram-weighted sampler, radii with density r^{k-1} exp(-r^2/2s^2).
  const auto rhs = mc::run(base.sub(2), samples, cfg.workers, nf + 1, [&](randgeo::Rng& rng, Vector& out) {
    const Matrix om = randgeo::sample_gram_weighted_directions(n, k, rng);
    if (geom::gram_det(om) < kGramReject) {
      out(nf) = 1.0;
      return;
    }
    Matrix x(n, k);
    double w = z;
    for (int j = 0; j < k; ++j) {
      const double r = s * std::sqrt(2.0 * rng.gamma(0.5 * k));
      x.col(j) = r * om.col(j);
      w *= chi_norm * std::exp(r * r / (2.0 * s * s));
    }
    const Matrix q = geom::orthonormalize(om);
    const Matrix p = q * q.transpose();
    for (int i = 0; i < nf; ++i) out(i) = w * tuples[i].f(x, p);
  });

  std::vector<std::string> desc;
  for (const auto& t : tuples) desc.push_back(t.desc);
  const auto summary = detail::ratio_constancy(rep, to_cases(desc, lhs, rhs), tol);
  rep.settle();
  record_constant(rep, summary);
  check_rejection(rep, rhs.mean(nf));
  return rep;
}

VerdictReport verify_lemma26(int n, int k, std::size_t samples, const RunConfig& cfg) {
  if (!allowed_pair(n, k)) throw InvalidInput("lemma26: (n, k) must be one of (2,1), (3,1), (3,2), (4,2)");
  if (samples < 1000) throw InvalidInput("lemma26: need at least 1000 samples");
  const double tol = cfg.tolerance.value_or(0.05);
  VerdictReport rep;
  rep.lemma_id = "lemma26";
  rep.params = detail::make_params(n, k, samples, cfg, tol);

  using SphereTuple = std::function<double(const Matrix&, const Matrix&)>;
  std::vector<std::string> desc{"F = 1", "prod (1 + w_j1^2)", "cap(w_1) x prod (1 + w_jn^2) x (1 + P_nn)", "zero"};
  const double cap_cos = std::cos(M_PI / 3.0);
  std::vector<SphereTuple> fs{
      [](const Matrix&, const Matrix&) { return 1.0; },
      [](const Matrix& w, const Matrix&) {
        double v = 1.0;
        for (int j = 0; j < w.cols(); ++j) v *= 1.0 + w(0, j) * w(0, j);
        return v;
      },
      [cap_cos, n](const Matrix& w, const Matrix& p) {
        if (w(0, 0) <= cap_cos) return 0.0;
        double v = 1.0 + p(n - 1, n - 1);
        for (int j = 1; j < w.cols(); ++j) v *= 1.0 + w(n - 1, j) * w(n - 1, j);
        return v;
      },
      [](const Matrix&, const Matrix&) { return 0.0; }};
  const int nf = static_cast<int>(fs.size());
  const double z = randgeo::gram_weighted_mass(n, k);
  const randgeo::RngStream base{cfg.seed, 0};

  // For k = 1 the extra components hold the paired difference between the
  // random-sign estimate and the two-point average (f(eta) + f(-eta)) / 2.
  const int dim = k == 1 ? 2 * nf : nf;
  const auto lhs = mc::run(base.sub(1), samples, cfg.workers, dim, [&](randgeo::Rng& rng, Vector& out) {
    const auto theta = randgeo::sample_grassmann(n, k, rng);
    Matrix w(n, k);
    for (int j = 0; j < k; ++j) w.col(j) = randgeo::sample_sphere_in_subspace(theta, rng);
    const Matrix p = theta.projector();
    for (int i = 0; i < nf; ++i) out(i) = fs[i](w, p);
    if (k == 1) {
      const Matrix eta = theta.frame();
      for (int i = 0; i < nf; ++i) {
        const double two = 0.5 * (fs[i](eta, p) + fs[i](-eta, p));
        out(nf + i) = out(i) - two;
      }
    }
  });

  const auto rhs = mc::run(base.sub(2), samples, cfg.workers, nf + 1, [&](randgeo::Rng& rng, Vector& out) {
    const Matrix om = randgeo::sample_gram_weighted_directions(n, k, rng);
    if (geom::gram_det(om) < kGramReject) {
      out(nf) = 1.0;
      return;
    }
    const Matrix q = geom::orthonormalize(om);
    const Matrix p = q * q.transpose();
    for (int i = 0; i < nf; ++i) out(i) = z * fs[i](om, p);
  });

  const auto summary = detail::ratio_constancy(rep, to_cases(desc, lhs, rhs), tol);
  if (k == 1) {
    for (int i = 0; i < nf; ++i) {
      CaseRow row;
      row.desc = "two-point form, " + desc[i];
      row.lhs = lhs.mean(i);
      row.rhs = lhs.mean(i) - lhs.mean(nf + i);
      row.ratio = row.rhs != 0.0 ? row.lhs / row.rhs : NAN;
      row.std_error = lhs.std_error(nf + i);
      row.passed = std::abs(lhs.mean(nf + i)) <= 3.0 * row.std_error;
      row.note = "paired difference with common random numbers";
      rep.add(row);
    }
  }
  rep.settle();
  record_constant(rep, summary);
  check_rejection(rep, rhs.mean(nf));
  return rep;
}

VerdictReport verify_lemma12(int n, int k, std::size_t samples, const RunConfig& cfg) {
  if (n < 2 || n > 6 || k < 1 || k >= n) throw InvalidInput("lemma12: need 1 <= k < n <= 6");
  if (samples < 1000) throw InvalidInput("lemma12: need at least 1000 samples");
  VerdictReport rep;
  rep.lemma_id = "lemma12";
  rep.params = detail::make_params(n, k, samples, cfg, cfg.tolerance.value_or(0.0));

  Vector a = Vector::Zero(n);
  a(0) = 0.3;
  const double r_gauss = fields::gaussian_truncation_radius(n, M_PI);
  const double needed = std::max(r_gauss, a.norm() + 0.8);
  if (cfg.radius && *cfg.radius < needed) {
    throw ConfigurationError("lemma12: truncation radius " + std::to_string(*cfg.radius) +
                             " does not cover the integrand supports (need " + std::to_string(needed) + ")");
  }
  const double big_r = cfg.radius.value_or(needed);
  rep.notes["truncation_radius"] = big_r;

  // F(x, y, P): point x, its component y orthogonal to theta, projector P.
  using Integrand = std::function<double(const Vector&, const Vector&, const Matrix&)>;
  std::vector<std::string> desc{"exp(-pi|x|^2) (1 + P_11)", "indicator |x| <= 1",
                                "indicator |x - 0.3 e1| <= 0.8 (1 + |y|^2)(1 + P_nn)", "zero"};
  std::vector<Integrand> fs{
      [](const Vector& x, const Vector&, const Matrix& p) { return std::exp(-M_PI * x.squaredNorm()) * (1.0 + p(0, 0)); },
      [](const Vector& x, const Vector&, const Matrix&) { return x.squaredNorm() <= 1.0 ? 1.0 : 0.0; },
      [a, n](const Vector& x, const Vector& y, const Matrix& p) {
        if ((x - a).norm() > 0.8) return 0.0;
        return (1.0 + y.squaredNorm()) * (1.0 + p(n - 1, n - 1));
      },
      [](const Vector&, const Vector&, const Matrix&) { return 0.0; }};
  const int nf = static_cast<int>(fs.size());
  const double r2 = big_r * big_r;
  const randgeo::RngStream base{cfg.seed, 0};

  const double lhs_vol = randgeo::ball_volume(n - k, big_r) * randgeo::ball_volume(k, big_r);
  const auto lhs = mc::run(base.sub(1), samples, cfg.workers, nf, [&](randgeo::Rng& rng, Vector& out) {
    const auto theta = randgeo::sample_grassmann(n, k, rng);
    const Vector y = theta.complement_frame() * randgeo::sample_ball(n - k, big_r, rng);
    const Vector x = y + theta.frame() * randgeo::sample_ball(k, big_r, rng);
    if (x.squaredNorm() > r2) return;
    const Matrix p = theta.projector();
    for (int i = 0; i < nf; ++i) out(i) = lhs_vol * fs[i](x, y, p);
  });

  const double rhs_vol = randgeo::ball_volume(n, big_r);
  const auto rhs = mc::run(base.sub(2), samples, cfg.workers, nf, [&](randgeo::Rng& rng, Vector& out) {
    const Vector x = randgeo::sample_ball(n, big_r, rng);
    const auto theta = randgeo::sample_grassmann(n, k, rng);
    const Matrix p = theta.projector();
    const Vector y = x - p * x;
    for (int i = 0; i < nf; ++i) out(i) = rhs_vol * fs[i](x, y, p);
  });

  for (int i = 0; i < nf; ++i) {
    CaseRow row;
    row.desc = desc[i];
    row.lhs = lhs.mean(i);
    row.rhs = rhs.mean(i);
    row.ratio = row.rhs != 0.0 ? row.lhs / row.rhs : NAN;
    row.std_error = std::hypot(lhs.std_error(i), rhs.std_error(i));
    const double allowed = std::max(3.0 * row.std_error, rep.params.tolerance * std::abs(row.rhs));
    row.passed = std::abs(row.lhs - row.rhs) <= allowed;
    row.note = "stderr is of lhs - rhs";
    rep.add(row);
  }
  rep.settle();
  return rep;
}

}  // namespace kplane::verify
