#include <algorithm>
#include <cmath>

#include "kplane/errors.hpp"
#include "kplane/fields.hpp"
#include "kplane/transforms.hpp"
#include "verify_common.hpp"

namespace kplane::verify {

namespace {

using fields::ScalarField;
using geom::Vector;

Vector offset(int n, double a, double b) {
  Vector v = Vector::Zero(n);
  v(0) = a;
  v(1) = b;
  return v;
}

struct FieldTuple {
  std::string desc;
  std::vector<ScalarField> f;
};

std::vector<FieldTuple> field_tuples(int n) {
  std::vector<FieldTuple> out;
  FieldTuple plain{"Gaussians exp(-pi|x|^2)", {}};
  for (int j = 0; j <= n; ++j) plain.f.push_back(fields::gaussian(n));
  out.push_back(plain);

  FieldTuple mixed{"Gaussians with varied rates and centers", {}};
  const double rates[] = {2.0, M_PI, 4.0, 2.5};
  for (int j = 0; j <= n; ++j) {
    mixed.f.push_back(fields::gaussian(n, rates[j % 4], offset(n, 0.2 * ((j % 3) - 1), 0.1 * (j % 2))));
  }
  out.push_back(mixed);

  FieldTuple balls{"ball indicators and Gaussians", {}};
  for (int j = 0; j <= n; ++j) {
    if (j % 2 == 0) {
      balls.f.push_back(fields::ball_indicator(n, 0.8, offset(n, 0.1 * j, -0.1)));
    } else {
      balls.f.push_back(fields::gaussian(n, 3.0, offset(n, 0.0, 0.15)));
    }
  }
  out.push_back(balls);

  FieldTuple zero{"one zero field", {}};
  for (int j = 0; j < n; ++j) zero.f.push_back(fields::gaussian(n));
  zero.f.push_back(fields::zero_field(n));
  out.push_back(zero);
  return out;
}

}  // namespace

VerdictReport verify_lemma11(int n, int k, std::size_t samples, const RunConfig& cfg) {
  if (!((n == 2 && k == 1) || (n == 3 && k == 1) || (n == 3 && k == 2))) {
    throw InvalidInput("lemma11: (n, k) must be one of (2,1), (3,1), (3,2)");
  }
  if (samples < 1000) throw InvalidInput("lemma11: need at least 1000 samples");
  const double tol = cfg.tolerance.value_or(0.05);
  VerdictReport rep;
  rep.lemma_id = "lemma11";
  rep.params = detail::make_params(n, k, samples, cfg, tol);
  const int points = 16;
  rep.params.extra["transform_points"] = points;

  const auto tuples = field_tuples(n);
  std::vector<detail::RatioCase> cases;
  double rejection = 0.0;
  double truncation = 0.0;
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    const auto& tup = tuples[t];
    double reach = INFINITY;
    for (const auto& g : tup.f) reach = std::min(reach, g.enclosing_radius());
    auto qa = detail::quad_spec(cfg, samples, 2 * t + 1);
    qa.transform_points = points;
    auto qk = detail::quad_spec(cfg, samples, 2 * t + 2);
    qk.transform_points = points;
    const auto a = transforms::multilinear_A(tup.f, k, randgeo::TruncationBox(reach), qa);
    const auto b = transforms::multilinear_A_kernel(tup.f, k, qk);
    rejection = std::max(rejection, b.rejection_fraction);
    truncation = std::max(truncation, a.truncation_radius);
    cases.push_back({tup.desc, {a.value, a.std_error}, {b.value, b.std_error}});
  }
  const auto summary = detail::ratio_constancy(rep, cases, tol);

  // The constant must match the one of the Gram-weighted point integral.
  RunConfig sub = cfg;
  sub.tolerance.reset();
  const auto ref = verify_lemma23(n, k, std::max<std::size_t>(samples, 1000000), sub);
  const double c23 = ref.notes.value("c_estimate", NAN);
  const double c23_se = ref.notes.value("c_stderr", NAN);
  CaseRow cross;
  cross.desc = "constant agrees with lemma23 at the same (n, k)";
  cross.lhs = summary.c;
  cross.rhs = c23;
  cross.ratio = summary.c / c23;
  cross.std_error = std::hypot(summary.c_se, c23_se);
  cross.passed = std::abs(summary.c - c23) <= 3.0 * cross.std_error;
  cross.note = "lhs: lemma11 c, rhs: lemma23 c, stderr combined";
  rep.add(cross);

  rep.settle();
  rep.notes["c_estimate"] = summary.c;
  rep.notes["c_stderr"] = summary.c_se;
  rep.notes["c_lemma23"] = c23;
  rep.notes["cases_excluded"] = summary.excluded;
  rep.notes["truncation_radius"] = truncation;
  rep.notes["rejection_fraction"] = rejection;
  if (ref.verdict == Verdict::Inconclusive || summary.used < 2 || rejection > 0.01) {
    rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

}  // namespace kplane::verify
