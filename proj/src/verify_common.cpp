#include "verify_common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kplane::verify::detail {

RatioSummary ratio_constancy(VerdictReport& report, const std::vector<RatioCase>& cases, double rel_tol) {
  RatioSummary s;
  std::vector<std::size_t> rows;
  std::vector<double> ratio;
  std::vector<double> ratio_se;
  for (const auto& c : cases) {
    CaseRow row;
    row.desc = c.desc;
    row.lhs = c.lhs.value;
    row.rhs = c.rhs.value;
    const bool small = std::abs(c.lhs.value) <= 5.0 * c.lhs.se || std::abs(c.rhs.value) <= 5.0 * c.rhs.se;
    if (small) {
      row.excluded = true;
      row.ratio = NAN;
      row.std_error = NAN;
      row.note = "excluded: an estimate is within 5 standard errors of zero";
      ++s.excluded;
      report.add(row);
      continue;
    }
    row.ratio = c.lhs.value / c.rhs.value;
    row.std_error = std::abs(row.ratio) * std::hypot(c.lhs.se / c.lhs.value, c.rhs.se / c.rhs.value);
    report.add(row);
    rows.push_back(report.cases.size() - 1);
    ratio.push_back(row.ratio);
    ratio_se.push_back(row.std_error);
  }
  s.used = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::ostringstream disagree;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (i == j) continue;
      if (!within(ratio[i], ratio[j], ratio_se[i], ratio_se[j], rel_tol)) {
        disagree << (disagree.tellp() > 0 ? ", " : "") << report.cases[rows[j]].desc;
      }
    }
    auto& row = report.cases[rows[i]];
    if (disagree.tellp() > 0) {
      row.passed = false;
      row.note = "ratio disagrees with: " + disagree.str();
      s.ok = false;
    }
  }
  if (!rows.empty()) {
    double wsum = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double floor_se = 1e-12 * std::abs(ratio[i]);
      const double se = std::max(ratio_se[i], floor_se);
      const double w = se > 0.0 ? 1.0 / (se * se) : 1.0;
      wsum += w;
      acc += w * ratio[i];
    }
    s.c = acc / wsum;
    s.c_se = 1.0 / std::sqrt(wsum);
  }
  if (rows.size() < 2) s.ok = false;
  return s;
}

Fit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& y_se) {
  Fit f;
  if (x.size() != y.size() || x.size() < 2) return f;
  double sw = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return f;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    const double rel = (i < y_se.size() && y_se[i] > 0.0) ? y_se[i] / y[i] : 0.0;
    const double w = rel > 0.0 ? 1.0 / (rel * rel) : 1.0;
    sw += w;
    sx += w * lx;
    sy += w * ly;
    sxx += w * lx * lx;
    sxy += w * lx * ly;
  }
  const double det = sw * sxx - sx * sx;
  if (!(det > 0.0)) return f;
  f.slope = (sw * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / sw;
  const bool weighted = std::all_of(y_se.begin(), y_se.end(), [](double s) { return s > 0.0; }) &&
                        y_se.size() == y.size();
  if (weighted) {
    f.slope_se = std::sqrt(sw / det);
  } else if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = std::log(y[i]) - f.intercept - f.slope * std::log(x[i]);
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / static_cast<double>(x.size() - 2) * sw / det);
  }
  f.ok = std::isfinite(f.slope);
  return f;
}

double spread(const std::vector<double>& ratios) {
  if (ratios.empty()) return NAN;
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  if (!(*lo > 0.0)) return INFINITY;
  return *hi / *lo;
}

void bounded_ratio(VerdictReport& report, const std::vector<Member>& family, double max_spread,
                   double min_slope) {
  std::vector<double> ratios;
  std::vector<double> ratio_se;
  std::vector<std::string> groups;
  for (const auto& m : family) {
    CaseRow row;
    row.desc = m.desc;
    row.lhs = m.lhs.value;
    row.rhs = m.rhs.value;
    row.ratio = m.lhs.value / m.rhs.value;
    row.std_error = std::abs(row.ratio) * std::hypot(m.lhs.value != 0.0 ? m.lhs.se / m.lhs.value : 0.0,
                                                     m.rhs.value != 0.0 ? m.rhs.se / m.rhs.value : 0.0);
    row.passed = std::isfinite(row.ratio) && row.ratio > 0.0;
    if (!row.passed) row.note = "ratio is not a positive finite number";
    report.add(row);
    ratios.push_back(row.ratio);
    ratio_se.push_back(row.std_error);
    if (m.sweep && std::find(groups.begin(), groups.end(), m.group) == groups.end()) groups.push_back(m.group);
  }
  CaseRow sp;
  sp.desc = "family spread max/min of the ratio";
  sp.lhs = spread(ratios);
  sp.rhs = max_spread;
  sp.ratio = sp.lhs / max_spread;
  sp.std_error = 0.0;
  sp.passed = sp.lhs <= max_spread;
  report.add(sp);
  for (const auto& g : groups) {
    std::vector<double> x, y, se;
    for (std::size_t i = 0; i < family.size(); ++i) {
      if (family[i].group != g || !family[i].sweep) continue;
      x.push_back(*family[i].sweep);
      y.push_back(ratios[i]);
      se.push_back(ratio_se[i]);
    }
    const auto fit = fit_loglog(x, y, se);
    CaseRow tr;
    tr.desc = "ratio trend in " + g + " as the parameter shrinks (log-log slope)";
    tr.lhs = fit.slope;
    tr.rhs = min_slope;
    tr.ratio = NAN;
    tr.std_error = fit.slope_se;
    tr.passed = fit.ok && fit.slope >= min_slope;
    if (x.size() < 3) {
      tr.excluded = true;
      tr.note = "fewer than three sweep points";
    }
    report.add(tr);
  }
}

Params make_params(int n, int k, std::size_t samples, const RunConfig& cfg, double tolerance) {
  Params p;
  p.n = n;
  p.k = k;
  p.samples = samples;
  p.seed = cfg.seed;
  p.workers = cfg.workers;
  p.tolerance = tolerance;
  return p;
}

transforms::QuadSpec quad_spec(const RunConfig& cfg, std::size_t samples, std::uint64_t sub_stream) {
  transforms::QuadSpec q;
  q.samples = samples;
  q.workers = cfg.workers;
  q.stream = randgeo::RngStream{cfg.seed, 0}.sub(sub_stream);
  return q;
}

}  // namespace kplane::verify::detail
