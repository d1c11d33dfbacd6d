#include "kplane/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "kplane/errors.hpp"
#include "kplane/fields.hpp"
#include "kplane/lorentz.hpp"
#include "kplane/transforms.hpp"
#include "kplane/verify.hpp"

namespace kplane::cli {

namespace {

using verify::Json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  int n = 3;
  int k = 1;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<double> tolerance;
  std::optional<double> radius;
  std::string format = "json";
  std::string out_path;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--n", c.n, "ambient dimension")->check(CLI::Range(1, 16));
  app->add_option("--k", c.k, "plane dimension")->check(CLI::Range(1, 15));
  app->add_option("--samples", c.samples, "Monte-Carlo sample count")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--workers", c.workers, "worker threads (results depend on seed and workers)")
      ->check(CLI::Range(1, 256));
  app->add_option("--tolerance", c.tolerance, "relative tolerance override")->check(CLI::NonNegativeNumber);
  app->add_option("--radius", c.radius, "truncation radius")->check(CLI::PositiveNumber);
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--out", c.out_path, "write output to PATH instead of stdout");
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
  }
  if (v.empty()) throw UsageError("empty vector");
  return v;
}

// "p=2,q=1" -> {p: 2, q: 1}
std::map<std::string, double> parse_pairs(const std::string& text, const std::vector<std::string>& keys) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw UsageError("unknown key '" + key + "'");
    out[key] = parse_vector(item.substr(eq + 1)).at(0);
  }
  for (const auto& key : keys) {
    if (!out.count(key)) throw UsageError("missing key '" + key + "'");
  }
  return out;
}

double parse_exponent(const std::string& text) {
  if (text == "inf") return lorentz::kInf;
  const auto v = parse_vector(text);
  if (v.size() != 1) throw UsageError("expected one exponent");
  return v[0];
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out_path, std::ios::binary);
  if (!file) throw UsageError("cannot write " + c.out_path);
  file << text;
}

std::string estimate_json(double value, double se, std::size_t samples, std::uint64_t seed, Json extra = {}) {
  Json j = Json::object();
  j["value"] = value;
  j["stderr"] = se;
  j["samples"] = samples;
  j["seed"] = seed;
  if (extra.is_object()) {
    for (auto& [key, v] : extra.items()) j[key] = v;
  }
  return j.dump(2) + "\n";
}

std::string estimate_csv(double value, double se, std::size_t samples, std::uint64_t seed) {
  std::ostringstream o;
  o.precision(17);
  o << "value,stderr,samples,seed\n" << value << "," << se << "," << samples << "," << seed << "\n";
  return o.str();
}

int cmd_verify(const std::string& id, const Common& c, const CLI::App& app, std::ostream& out, std::ostream& err) {
  if (id != "all" && !verify::is_verifier(id)) {
    err << "unknown verifier '" << id << "'; valid ids:";
    for (const auto& v : verify::verifier_ids()) err << " " << v;
    err << " all\n";
    return kExitUsage;
  }
  verify::RunConfig cfg;
  if (app.count("--n")) cfg.n = c.n;
  if (app.count("--k")) cfg.k = c.k;
  if (app.count("--samples")) cfg.samples = c.samples;
  cfg.seed = c.seed;
  cfg.workers = c.workers;
  cfg.tolerance = c.tolerance;
  cfg.radius = c.radius;

  std::vector<verify::VerdictReport> reports;
  const std::vector<std::string> ids = id == "all" ? verify::verifier_ids() : std::vector<std::string>{id};
  verify::Verdict overall = verify::Verdict::Pass;
  for (const auto& v : ids) {
    reports.push_back(verify::run_verifier(v, cfg));
    overall = verify::worst(overall, reports.back().verdict);
  }
  std::string text;
  if (c.format == "csv") {
    text = verify::to_csv(reports);
  } else if (id == "all") {
    Json j = Json::object();
    j["verdict"] = verify::verdict_name(overall);
    j["reports"] = Json::array();
    for (const auto& r : reports) j["reports"].push_back(verify::to_json(r));
    text = j.dump(2) + "\n";
  } else {
    text = verify::to_json(reports.front()).dump(2) + "\n";
  }
  emit(c, text, out);
  return static_cast<int>(overall);
}

fields::ScalarField scalar_field(const std::string& spec, const Common& c) {
  auto f = fields::parse_field_spec(spec, c.n, c.k);
  if (!std::holds_alternative<fields::ScalarField>(f)) throw UsageError("'" + spec + "' is a sphere field");
  return std::get<fields::ScalarField>(f);
}

int cmd_transform(const std::string& spec, const std::optional<std::string>& base,
                  const std::optional<std::string>& frame, const Common& c, std::ostream& out) {
  const auto f = scalar_field(spec, c);
  if (c.k >= c.n) throw UsageError("need k < n");
  geom::Subspace theta = geom::Subspace::coordinate(c.n, c.k);
  if (frame) {
    // columns separated by ';'
    std::vector<geom::Vector> cols;
    std::stringstream ss(*frame);
    std::string col;
    while (std::getline(ss, col, ';')) {
      const auto v = parse_vector(col);
      if (static_cast<int>(v.size()) != c.n) throw UsageError("frame columns need n entries");
      cols.push_back(Eigen::Map<const geom::Vector>(v.data(), c.n));
    }
    if (static_cast<int>(cols.size()) != c.k) throw UsageError("frame needs k columns");
    theta = geom::span_subspace(cols);
  }
  geom::Vector x = geom::Vector::Zero(c.n);
  if (base) {
    const auto v = parse_vector(*base);
    if (static_cast<int>(v.size()) != c.n) throw UsageError("base point needs n entries");
    x = Eigen::Map<const geom::Vector>(v.data(), c.n);
  }
  transforms::QuadSpec q;
  q.samples = c.samples;
  q.workers = c.workers;
  q.stream = randgeo::RngStream{c.seed, 0};
  q.truncation = c.radius;
  const auto plane = geom::AffineKPlane::through(theta, x);
  const auto e = transforms::kplane_transform(f, plane, q);
  Json extra = Json::object();
  extra["truncation_radius"] = e.truncation_radius;
  emit(c, c.format == "csv" ? estimate_csv(e.value, e.std_error, e.samples, c.seed)
                            : estimate_json(e.value, e.std_error, e.samples, c.seed, extra),
       out);
  return 0;
}

struct NormFlags {
  std::optional<std::string> lp;
  std::optional<std::string> lorentz;
  std::optional<std::string> mixed;
  std::optional<std::string> weak;
};

// Value and standard error of a rearrangement functional: the value uses all
// samples, the error the spread over 8 disjoint batches.
template <class Functional>
std::pair<double, double> batched(const std::function<lorentz::DistributionSample(const lorentz::SampleSpec&)>& draw,
                                  const Common& c, Functional fn) {
  lorentz::SampleSpec s;
  s.samples = c.samples;
  s.workers = c.workers;
  s.stream = randgeo::RngStream{c.seed, 0};
  const double value = fn(draw(s));
  const int batches = 8;
  if (c.samples < 8 * 100) return {value, NAN};
  double sum = 0.0;
  double sq = 0.0;
  for (int b = 0; b < batches; ++b) {
    lorentz::SampleSpec sb = s;
    sb.samples = c.samples / batches;
    sb.stream = s.stream.sub(static_cast<std::uint64_t>(b + 1));
    const double v = fn(draw(sb));
    sum += v;
    sq += v * v;
  }
  const double mean = sum / batches;
  const double var = std::max(0.0, (sq - batches * mean * mean) / (batches - 1));
  return {value, std::sqrt(var / batches)};
}

int cmd_norm(const std::string& spec, const NormFlags& nf, const Common& c, std::ostream& out) {
  const int given = !!nf.lp + !!nf.lorentz + !!nf.mixed + !!nf.weak;
  if (given != 1) throw UsageError("give exactly one of --lp, --lorentz, --mixed, --weak");
  const auto field = fields::parse_field_spec(spec, c.n, c.k);
  std::function<lorentz::DistributionSample(const lorentz::SampleSpec&)> draw;
  if (const auto* f = std::get_if<fields::ScalarField>(&field)) {
    if (c.radius) throw UsageError("--radius is not used by norm");
    // sample the smaller of the bounding box and the bounding ball
    const bool box = f->box && f->box->prod() * std::pow(2.0, f->n) < randgeo::ball_volume(f->n, f->radius);
    draw = [f, box](lorentz::SampleSpec s) {
      s.sampling = box ? lorentz::Sampling::Plain : lorentz::Sampling::StratifiedRadial;
      return lorentz::sample_distribution(*f, s);
    };
  } else {
    const auto& g = std::get<fields::SphereField>(field);
    draw = [g](lorentz::SampleSpec s) {
      s.sampling = g.zonal_axis ? lorentz::Sampling::StratifiedRadial : lorentz::Sampling::Plain;
      return lorentz::sample_distribution(g, s);
    };
  }
  double value = 0.0;
  double se = 0.0;
  std::size_t samples = c.samples;
  Json extra = Json::object();
  if (nf.lp) {
    const double p = parse_exponent(*nf.lp);
    if (!(p >= 1.0)) throw UsageError("need p >= 1");
    const auto* f = std::get_if<fields::ScalarField>(&field);
    if (f && std::isfinite(p)) {
      const auto acc = fields::lp_power_estimate(*f, p, randgeo::RngStream{c.seed, 0}, c.samples, c.workers);
      const double pw = acc.mean(0);
      value = std::pow(pw, 1.0 / p);
      se = pw > 0.0 ? value * acc.std_error(0) / (p * pw) : 0.0;
    } else {
      std::tie(value, se) = batched(draw, c, [p](const lorentz::DistributionSample& d) { return lorentz::lp_norm(d, p); });
    }
    extra["norm"] = "lp";
    extra["p"] = p;
  } else if (nf.lorentz) {
    const auto kv = parse_pairs(*nf.lorentz, {"p", "q"});
    const double p = kv.at("p");
    const double q = kv.at("q");
    if (!(p >= 1.0 && std::isfinite(p) && q >= 1.0)) throw UsageError("need 1 <= p < inf, q >= 1");
    std::tie(value, se) = batched(draw, c, [p, q](const lorentz::DistributionSample& d) {
      return lorentz::lorentz_norm(lorentz::rearrangement(d), p, q);
    });
    extra["norm"] = "lorentz";
    extra["p"] = p;
    extra["q"] = q;
  } else if (nf.weak) {
    const double p = parse_exponent(*nf.weak);
    if (!(p >= 1.0 && std::isfinite(p))) throw UsageError("need 1 <= p < inf");
    std::tie(value, se) = batched(draw, c, [p](const lorentz::DistributionSample& d) { return lorentz::weak_norm(d, p); });
    extra["norm"] = "weak";
    extra["p"] = p;
  } else {
    const auto kv = parse_pairs(*nf.mixed, {"q", "r"});
    const auto* f = std::get_if<fields::ScalarField>(&field);
    if (!f) throw UsageError("--mixed needs a field on R^n");
    if (c.k >= c.n) throw UsageError("need k < n");
    transforms::QuadSpec q;
    q.samples = c.samples;
    q.workers = c.workers;
    q.stream = randgeo::RngStream{c.seed, 0};
    q.transform_points = 16;
    const auto e = transforms::mixed_norm(*f, c.n, c.k, kv.at("q"), kv.at("r"), randgeo::TruncationBox(f->radius), q);
    value = e.value;
    se = e.std_error;
    samples = e.samples;
    extra["norm"] = "mixed";
    extra["q"] = kv.at("q");
    extra["r"] = kv.at("r");
  }
  emit(c, c.format == "csv" ? estimate_csv(value, se, samples, c.seed) : estimate_json(value, se, samples, c.seed, extra),
       out);
  return 0;
}

Json matrix_json(const geom::Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

int cmd_sample(const std::string& kind, std::size_t count, const Common& c, std::ostream& out) {
  if ((kind == "grassmann" || kind == "plane") && c.k >= c.n) throw UsageError("need k < n");
  randgeo::Rng rng(randgeo::RngStream{c.seed, 0});
  Json items = Json::array();
  std::ostringstream csv;
  csv.precision(17);
  for (std::size_t i = 0; i < count; ++i) {
    Json item = Json::object();
    if (kind == "sphere") {
      const geom::Vector v = randgeo::sample_sphere(c.n, rng);
      item["point"] = matrix_json(v);
      for (int j = 0; j < c.n; ++j) csv << (j ? "," : "") << v(j);
    } else if (kind == "grassmann") {
      const auto theta = randgeo::sample_grassmann(c.n, c.k, rng);
      item["frame"] = matrix_json(theta.frame());
      const geom::Matrix p = theta.projector();
      for (int j = 0; j < p.size(); ++j) csv << (j ? "," : "") << p(j);
    } else if (kind == "rotation") {
      const geom::Matrix u = randgeo::sample_rotation(c.n, rng);
      item["matrix"] = matrix_json(u);
      for (int j = 0; j < u.size(); ++j) csv << (j ? "," : "") << u(j);
    } else {
      const double r = c.radius.value_or(1.0);
      const auto w = randgeo::sample_affine_plane(c.n, c.k, randgeo::TruncationBox(r), rng);
      item["frame"] = matrix_json(w.plane.theta().frame());
      item["base"] = matrix_json(w.plane.base());
      item["weight"] = w.weight;
      for (int j = 0; j < c.n; ++j) csv << (j ? "," : "") << w.plane.base()(j);
      csv << "," << w.weight;
    }
    csv << "\n";
    items.push_back(item);
  }
  if (c.format == "csv") {
    emit(c, csv.str(), out);
  } else {
    Json j = Json::object();
    j["kind"] = kind;
    j["n"] = c.n;
    j["k"] = c.k;
    j["seed"] = c.seed;
    j["samples"] = items;
    emit(c, j.dump(2) + "\n", out);
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"k-plane transform engine and verification harness", "kplane"};
  app.require_subcommand(1);

  Common vc;
  std::string verify_id;
  auto* verify_cmd = app.add_subcommand("verify", "run a verifier (or 'all')");
  verify_cmd->add_option("id", verify_id, "verifier id")->required();
  add_common(verify_cmd, vc);

  Common tc;
  std::string t_field;
  std::optional<std::string> t_base;
  std::optional<std::string> t_frame;
  bool through_origin = false;
  auto* transform_cmd = app.add_subcommand("transform", "integral of a field over one affine k-plane");
  transform_cmd->add_option("--field", t_field, fields::field_spec_help())->required();
  auto* origin_flag = transform_cmd->add_flag("--through-origin", through_origin, "plane through 0 (default)");
  transform_cmd->add_option("--base", t_base, "point x1,...,xn on the plane")->excludes(origin_flag);
  transform_cmd->add_option("--frame", t_frame, "spanning columns, ';'-separated (default e1..ek)");
  add_common(transform_cmd, tc);

  Common nc;
  std::string n_field;
  NormFlags nf;
  auto* norm_cmd = app.add_subcommand("norm", "L^p, Lorentz, weak or mixed norm of a field");
  norm_cmd->add_option("--field", n_field, fields::field_spec_help())->required();
  norm_cmd->add_option("--lp", nf.lp, "P");
  norm_cmd->add_option("--lorentz", nf.lorentz, "p=P,q=Q");
  norm_cmd->add_option("--mixed", nf.mixed, "q=Q,r=R (L^q over subspaces of L^r over the complement)");
  norm_cmd->add_option("--weak", nf.weak, "P");
  add_common(norm_cmd, nc);

  Common sc;
  std::string kind;
  std::size_t count = 10;
  auto* sample_cmd = app.add_subcommand("sample", "draw random geometric objects");
  sample_cmd->add_option("kind", kind, "sphere | grassmann | rotation | plane")
      ->required()
      ->check(CLI::IsMember({"sphere", "grassmann", "rotation", "plane"}));
  sample_cmd->add_option("--count", count, "number of draws")->check(CLI::PositiveNumber);
  add_common(sample_cmd, sc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*verify_cmd) return cmd_verify(verify_id, vc, *verify_cmd, out, err);
    if (*transform_cmd) return cmd_transform(t_field, t_base, t_frame, tc, out);
    if (*norm_cmd) return cmd_norm(n_field, nf, nc, out);
    return cmd_sample(kind, count, sc, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigurationError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace kplane::cli
