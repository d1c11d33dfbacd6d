#include "kplane/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kplane/errors.hpp"
#include "kplane/randgeo.hpp"

namespace kplane::fields {

using randgeo::ball_volume;
using randgeo::sphere_area;

namespace {

constexpr double kGaussianTail = 1e-6;

void check_dim(int n) {
  if (n < 1) throw InvalidInput("field dimension must be >= 1");
}

void check_arg(const Vector& x, int n) {
  if (x.size() != n) throw InvalidInput("field evaluated at a point of the wrong dimension");
}

std::function<std::optional<double>(double)> no_norms() {
  return [](double) -> std::optional<double> { return std::nullopt; };
}

}  // namespace

std::optional<double> ScalarField::analytic_lp(double p) const {
  if (!lp_norm) return std::nullopt;
  return lp_norm(p);
}

double gaussian_truncation_radius(int n, double rate) {
  if (!(rate > 0.0)) throw InvalidInput("Gaussian rate must be positive");
  const double l = std::log(1.0 / kGaussianTail);
  const double chi2 = n + 2.0 * std::sqrt(n * l) + 2.0 * l;
  return std::sqrt(chi2 / (2.0 * rate));
}

ScalarField ball_indicator(int n, double r, const Vector& center) {
  check_dim(n);
  if (!(r > 0.0)) throw InvalidInput("ball_indicator: radius must be positive");
  if (center.size() != n) throw InvalidInput("ball_indicator: center dimension mismatch");
  ScalarField f;
  f.n = n;
  f.name = "ball_indicator";
  const double r2 = r * r;
  f.eval = [n, r2, center](const Vector& x) {
    check_arg(x, n);
    return (x - center).squaredNorm() <= r2 ? 1.0 : 0.0;
  };
  f.center = center;
  f.radius = r;
  f.decay = Decay::Compact;
  f.box = Vector::Constant(n, r);
  f.bound = 1.0;
  if (center.isZero()) {
    f.zonal_axis = Vector::Unit(n, 0);
  } else if (n >= 2 && center.tail(n - 1).isZero()) {
    f.zonal_axis = Vector::Unit(n, 0);
  }
  const double vol = ball_volume(n, r);
  f.lp_norm = [vol](double p) -> std::optional<double> { return std::pow(vol, 1.0 / p); };
  f.tags = {"indicator", "compact"};
  return f;
}

ScalarField ball_indicator(int n, double r) { return ball_indicator(n, r, Vector::Zero(n)); }

ScalarField gaussian(int n, double rate, const Vector& center) {
  check_dim(n);
  if (!(rate > 0.0)) throw InvalidInput("gaussian: rate must be positive");
  if (center.size() != n) throw InvalidInput("gaussian: center dimension mismatch");
  ScalarField f;
  f.n = n;
  f.name = "gaussian";
  f.eval = [n, rate, center](const Vector& x) {
    check_arg(x, n);
    return std::exp(-rate * (x - center).squaredNorm());
  };
  f.center = center;
  f.radius = gaussian_truncation_radius(n, rate);
  f.decay = Decay::Gaussian;
  f.rate = rate;
  f.bound = 1.0;
  if (center.isZero() || (n >= 2 && center.tail(n - 1).isZero())) f.zonal_axis = Vector::Unit(n, 0);
  f.lp_norm = [n, rate](double p) -> std::optional<double> {
    return std::pow(std::numbers::pi / (p * rate), 0.5 * n / p);
  };
  f.tags = {"smooth", "gaussian-decay"};
  return f;
}

ScalarField gaussian(int n, double rate) { return gaussian(n, rate, Vector::Zero(n)); }

ScalarField tube(int n, int k, double eps) {
  check_dim(n);
  if (k < 1 || k >= n) throw InvalidInput("tube: need 1 <= k < n");
  if (!(eps > 0.0)) throw InvalidInput("tube: eps must be positive");
  ScalarField f;
  f.n = n;
  f.name = "tube";
  const double e2 = eps * eps;
  f.eval = [n, k, e2](const Vector& x) {
    check_arg(x, n);
    return (x.head(k).squaredNorm() <= 1.0 && x.tail(n - k).squaredNorm() <= e2) ? 1.0 : 0.0;
  };
  f.center = Vector::Zero(n);
  f.radius = std::sqrt(1.0 + e2);
  f.decay = Decay::Compact;
  Vector box(n);
  box.head(k).setConstant(1.0);
  box.tail(n - k).setConstant(eps);
  f.box = box;
  f.bound = 1.0;
  const double vol = ball_volume(k) * ball_volume(n - k, eps);
  f.lp_norm = [vol](double p) -> std::optional<double> { return std::pow(vol, 1.0 / p); };
  f.tags = {"indicator", "compact", "tube"};
  return f;
}

ScalarField log_divergent(int n, int k, double delta) {
  check_dim(n);
  if (k < 1 || k >= n) throw InvalidInput("log_divergent: need 1 <= k < n");
  if (!(delta > 0.0)) throw InvalidInput("log_divergent: delta must be positive");
  ScalarField f;
  f.n = n;
  f.name = "log_divergent";
  f.eval = [n, k, delta](const Vector& x) {
    check_arg(x, n);
    const double r = x.norm();
    return std::pow(1.0 + r, -k) * std::pow(std::log(2.0 + r), -delta);
  };
  f.center = Vector::Zero(n);
  f.radius = std::numeric_limits<double>::infinity();
  f.decay = Decay::PowerLaw;
  f.bound = std::pow(std::log(2.0), -delta);
  f.zonal_axis = Vector::Unit(n, 0);
  f.lp_norm = no_norms();
  f.tags = {"power-law", "divergence-example"};
  f.plane_integrable = false;
  return f;
}

ScalarField radial_power(int n, double a, double r_min, double r_max) {
  check_dim(n);
  if (!(a > 0.0)) throw InvalidInput("radial_power: exponent must be positive");
  if (!(r_min > 0.0) || !(r_max > r_min)) throw InvalidInput("radial_power: need 0 < r_min < r_max");
  ScalarField f;
  f.n = n;
  f.name = "radial_power";
  const double cap = std::pow(r_min, -a);
  f.eval = [n, a, r_min, r_max, cap](const Vector& x) {
    check_arg(x, n);
    const double r = x.norm();
    if (r > r_max) return 0.0;
    if (r <= r_min) return cap;
    return std::pow(r, -a);
  };
  f.center = Vector::Zero(n);
  f.radius = r_max;
  f.decay = Decay::Compact;
  f.box = Vector::Constant(n, r_max);
  f.bound = cap;
  f.zonal_axis = Vector::Unit(n, 0);
  f.lp_norm = [n, a, r_min, r_max](double p) -> std::optional<double> {
    const double inner = ball_volume(n, r_min) * std::pow(r_min, -a * p);
    const double e = n - a * p;
    const double shell = std::abs(e) < 1e-12 ? std::log(r_max / r_min)
                                             : (std::pow(r_max, e) - std::pow(r_min, e)) / e;
    return std::pow(inner + sphere_area(n) * shell, 1.0 / p);
  };
  f.tags = {"power-law", "compact"};
  return f;
}

ScalarField zero_field(int n) {
  check_dim(n);
  ScalarField f;
  f.n = n;
  f.name = "zero";
  f.eval = [n](const Vector& x) {
    check_arg(x, n);
    return 0.0;
  };
  f.center = Vector::Zero(n);
  f.radius = 1.0;
  f.decay = Decay::Compact;
  f.box = Vector::Constant(n, 1.0);
  f.bound = 0.0;
  f.zonal_axis = Vector::Unit(n, 0);
  f.lp_norm = [](double) -> std::optional<double> { return 0.0; };
  f.tags = {"zero"};
  return f;
}

SphereField sphere_constant(int n, double value) {
  check_dim(n);
  SphereField f;
  f.n = n;
  f.name = "constant";
  f.eval = [n, value](const Vector& w) {
    check_arg(w, n);
    return value;
  };
  f.bound = std::abs(value);
  f.zonal_axis = Vector::Unit(n, 0);
  f.tags = {"constant"};
  return f;
}

SphereField zonal_cap(int n, double angle, const Vector& axis) {
  check_dim(n);
  if (!(angle > 0.0) || angle > std::numbers::pi) throw InvalidInput("zonal_cap: angle must lie in (0, pi]");
  if (axis.size() != n || std::abs(axis.norm() - 1.0) > 1e-10) {
    throw InvalidInput("zonal_cap: axis must be a unit vector in R^n");
  }
  SphereField f;
  f.n = n;
  f.name = "zonal_cap";
  const double c = std::cos(angle);
  f.eval = [n, c, axis](const Vector& w) {
    check_arg(w, n);
    return w.dot(axis) > c ? 1.0 : 0.0;
  };
  f.bound = 1.0;
  f.zonal_axis = axis;
  f.tags = {"indicator", "zonal"};
  return f;
}

SphereField zonal_cap(int n, double angle) { return zonal_cap(n, angle, Vector::Unit(n, 0)); }

SphereField coordinate_power(int n, int m, int axis) {
  check_dim(n);
  if (m < 0) throw InvalidInput("coordinate_power: exponent must be >= 0");
  if (axis < 0 || axis >= n) throw InvalidInput("coordinate_power: axis out of range");
  SphereField f;
  f.n = n;
  f.name = "coordinate_power";
  f.eval = [n, m, axis](const Vector& w) {
    check_arg(w, n);
    return std::pow(w(axis), m);
  };
  f.bound = 1.0;
  f.zonal_axis = Vector::Unit(n, axis);
  f.tags = {"smooth", "zonal"};
  return f;
}

ScalarField dilate(const ScalarField& f, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidInput("dilate: delta must be positive");
  ScalarField g = f;
  g.name = f.name + "@dilated";
  auto inner = f.eval;
  g.eval = [inner, delta](const Vector& x) { return inner(delta * x); };
  g.center = f.center / delta;
  g.radius = f.radius / delta;
  if (f.box) g.box = *f.box / delta;
  if (f.decay == Decay::Gaussian) g.rate = f.rate * delta * delta;
  const int n = f.n;
  auto norms = f.lp_norm;
  if (norms) {
    g.lp_norm = [norms, delta, n](double p) -> std::optional<double> {
      auto v = norms(p);
      if (!v) return std::nullopt;
      return *v * std::pow(delta, -n / p);
    };
  }
  return g;
}

ScalarField linear_combination(double a, const ScalarField& f, double b, const ScalarField& g) {
  if (f.n != g.n) throw InvalidInput("linear_combination: dimension mismatch");
  ScalarField h;
  h.n = f.n;
  h.name = "combination";
  auto fe = f.eval;
  auto ge = g.eval;
  h.eval = [a, b, fe, ge](const Vector& x) { return a * fe(x) + b * ge(x); };
  h.center = Vector::Zero(f.n);
  h.radius = std::max(f.enclosing_radius(), g.enclosing_radius());
  h.decay = (f.decay == Decay::PowerLaw || g.decay == Decay::PowerLaw) ? Decay::PowerLaw
            : (f.decay == Decay::Gaussian || g.decay == Decay::Gaussian) ? Decay::Gaussian
                                                                          : Decay::Compact;
  h.rate = std::min(f.decay == Decay::Gaussian ? f.rate : INFINITY,
                    g.decay == Decay::Gaussian ? g.rate : INFINITY);
  if (f.bound && g.bound) h.bound = std::abs(a) * *f.bound + std::abs(b) * *g.bound;
  h.lp_norm = no_norms();
  h.plane_integrable = f.plane_integrable && g.plane_integrable;
  h.tags = {"combination"};
  return h;
}

namespace {

struct Spec {
  std::string name;
  std::map<std::string, double> params;
};

Spec split_spec(const std::string& text) {
  Spec s;
  const auto colon = text.find(':');
  s.name = text.substr(0, colon);
  if (s.name.empty()) throw InvalidInput("empty field name");
  if (colon == std::string::npos) return s;
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw InvalidInput("field parameter '" + item + "' is not of the form key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      throw InvalidInput("field parameter '" + key + "' has non-numeric value '" + val + "'");
    }
    if (used != val.size()) {
      throw InvalidInput("field parameter '" + key + "' has trailing characters");
    }
    s.params[key] = v;
  }
  return s;
}

class Params {
 public:
  explicit Params(Spec s) : spec_(std::move(s)) {}
  double get(const std::string& key, double fallback) {
    used_.push_back(key);
    auto it = spec_.params.find(key);
    return it == spec_.params.end() ? fallback : it->second;
  }
  void finish() const {
    for (const auto& [key, _] : spec_.params) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw InvalidInput("unknown parameter '" + key + "' for field '" + spec_.name + "'");
      }
    }
  }
  const std::string& name() const { return spec_.name; }

 private:
  Spec spec_;
  std::vector<std::string> used_;
};

int as_int(double v, const char* what) {
  if (v != std::floor(v)) throw InvalidInput(std::string(what) + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

Field parse_field_spec(const std::string& text, int n, int k) {
  Params p(split_spec(text));
  const std::string& name = p.name();
  Field out;
  if (name == "ball" || name == "ball_indicator") {
    const double r = p.get("r", 1.0);
    Vector c = Vector::Zero(n);
    c(0) = p.get("shift", 0.0);
    out = ball_indicator(n, r, c);
  } else if (name == "gauss" || name == "gaussian") {
    const double g = p.get("gamma", std::numbers::pi);
    Vector c = Vector::Zero(n);
    c(0) = p.get("shift", 0.0);
    out = gaussian(n, g, c);
  } else if (name == "tube") {
    const double eps = p.get("eps", 0.1);
    out = tube(n, as_int(p.get("k", k), "k"), eps);
  } else if (name == "logdiv" || name == "log_divergent") {
    const double d = p.get("delta", 0.6);
    out = log_divergent(n, as_int(p.get("k", k), "k"), d);
  } else if (name == "power" || name == "radial_power") {
    const double a = p.get("a", 1.0);
    const double rmin = p.get("rmin", 0.01);
    const double rmax = p.get("rmax", 1.0);
    out = radial_power(n, a, rmin, rmax);
  } else if (name == "zero") {
    out = zero_field(n);
  } else if (name == "cap" || name == "zonal_cap") {
    const double angle = p.get("angle", std::numbers::pi / 4);
    const int axis = as_int(p.get("axis", 0), "axis");
    if (axis < 0 || axis >= n) throw InvalidInput("cap axis out of range");
    out = zonal_cap(n, angle, Vector::Unit(n, axis));
  } else if (name == "coord" || name == "coordinate_power") {
    const int m = as_int(p.get("m", 2), "m");
    const int axis = as_int(p.get("axis", 0), "axis");
    out = coordinate_power(n, m, axis);
  } else if (name == "one" || name == "constant") {
    out = sphere_constant(n, p.get("value", 1.0));
  } else {
    throw InvalidInput("unknown field '" + name + "'\n" + field_spec_help());
  }
  p.finish();
  return out;
}

std::string field_spec_help() {
  return "Field specs have the form name[:key=value,...]. Fields on R^n:\n"
         "  ball:r=1,shift=0          indicator of the ball of radius r centred at shift*e1\n"
         "  gauss:gamma=pi,shift=0    exp(-gamma |x - shift*e1|^2)\n"
         "  tube:eps=0.1,k=K          indicator of B^k_1 x B^{n-k}_eps\n"
         "  logdiv:delta=0.6,k=K      (1+|x|)^-k log(2+|x|)^-delta (divergence example)\n"
         "  power:a=1,rmin=0.01,rmax=1  min(|x|,rmin)^-a on |x| <= rmax\n"
         "  zero\n"
         "Fields on S^{n-1}:\n"
         "  cap:angle=pi/4,axis=0     indicator of {<w, e_axis> > cos(angle)}\n"
         "  coord:m=2,axis=0          w_axis^m\n"
         "  one:value=1               constant\n";
}

mc::Accumulator lp_power_estimate(const ScalarField& f, double p, const randgeo::RngStream& s,
                                  std::size_t samples, int workers) {
  if (!f.finite_support()) throw RefusalError("L^p estimate needs a field with finite support radius");
  if (!(p > 0.0)) throw InvalidInput("L^p exponent must be positive");
  const int n = f.n;
  if (f.box) {
    const Vector half = *f.box;
    const double vol = std::pow(2.0, n) * half.prod();
    return mc::run(s, samples, workers, 1, [&](randgeo::Rng& rng, Vector& out) {
      Vector x(n);
      for (int i = 0; i < n; ++i) x(i) = f.center(i) + half(i) * (2.0 * rng.uniform() - 1.0);
      out(0) = vol * std::pow(std::abs(f(x)), p);
    });
  }
  const double vol = ball_volume(n, f.radius);
  return mc::run(s, samples, workers, 1, [&](randgeo::Rng& rng, Vector& out) {
    const Vector x = f.center + randgeo::sample_ball(n, f.radius, rng);
    out(0) = vol * std::pow(std::abs(f(x)), p);
  });
}

}  // namespace kplane::fields
