#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "kplane/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::vector<const char*> argv{"kplane"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = kplane::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

double value_of(const Result& r) { return nlohmann::json::parse(r.out).at("value").get<double>(); }
double stderr_of(const Result& r) { return nlohmann::json::parse(r.out).at("stderr").get<double>(); }

}  // namespace

TEST_CASE("verify exit codes") {
  CHECK(run({"verify", "gram", "--n", "5", "--k", "3", "--seed", "7"}).code == 0);
  const auto bogus = run({"verify", "bogus"});
  CHECK(bogus.code == 64);
  CHECK(bogus.err.find("lemma23") != std::string::npos);
  CHECK(run({"verify"}).code == 64);
  CHECK(run({"verify", "gram", "--no-such-flag"}).code == 64);
  CHECK(run({"verify", "gram", "--format", "xml"}).code == 64);
  CHECK(run({"verify", "gram", "--n", "9"}).code == 64);
  CHECK(run({}).code == 64);
}

TEST_CASE("verify writes a parseable report") {
  const auto r = run({"verify", "gram", "--n", "4", "--k", "2", "--samples", "50"});
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["lemma_id"] == "gram");
  CHECK(j["params"]["samples"] == 50);
  const auto csv = run({"verify", "gram", "--samples", "50", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("lemma_id,", 0) == 0);
}

TEST_CASE("transform: diameter of the unit disk") {
  const auto r = run({"transform", "--field", "ball:r=1", "--n", "2", "--k", "1", "--through-origin"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(value_of(r) - 2.0) <= 4.0 * stderr_of(r) + 1e-12);
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"value", "stderr", "samples", "seed"}) CHECK(j.contains(key));
}

TEST_CASE("transform: Gaussian plane integral") {
  const auto r = run({"transform", "--field", "gauss", "--n", "3", "--k", "2", "--through-origin"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(value_of(r) - 1.0) <= 4.0 * stderr_of(r));
}

TEST_CASE("transform: offset line and explicit frame") {
  const auto r = run({"transform", "--field", "ball:r=1", "--n", "2", "--k", "1", "--base", "0,0.5"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(value_of(r) - std::sqrt(3.0)) <= 4.0 * stderr_of(r) + 1e-12);
  const auto f = run({"transform", "--field", "ball:r=1", "--n", "2", "--k", "1", "--frame", "0,2", "--base", "0.5,0"});
  REQUIRE(f.code == 0);
  CHECK(std::abs(value_of(f) - std::sqrt(3.0)) <= 4.0 * stderr_of(f) + 1e-12);
}

TEST_CASE("transform usage errors") {
  CHECK(run({"transform", "--n", "2"}).code == 64);
  CHECK(run({"transform", "--field", "nosuch", "--n", "2"}).code == 64);
  CHECK(run({"transform", "--field", "gauss", "--n", "2", "--base", "1,2,3"}).code == 64);
  CHECK(run({"transform", "--field", "gauss", "--n", "2", "--base", "0,1", "--through-origin"}).code == 64);
  CHECK(run({"transform", "--field", "cap", "--n", "3"}).code == 64);
}

TEST_CASE("norm: indicator Lorentz formula and Gaussian L^1") {
  const auto l = run({"norm", "--field", "ball:r=1", "--lorentz", "p=2,q=1", "--n", "2"});
  REQUIRE(l.code == 0);
  CHECK(value_of(l) == doctest::Approx(2.0 * std::sqrt(M_PI)).epsilon(0.02));
  const auto g = run({"norm", "--field", "gauss", "--lp", "1", "--n", "2"});
  REQUIRE(g.code == 0);
  CHECK(std::abs(value_of(g) - 1.0) <= 4.0 * stderr_of(g));
  const auto w = run({"norm", "--field", "ball:r=1", "--weak", "2", "--n", "2"});
  CHECK(value_of(w) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-6));
  const auto m = run({"norm", "--field", "gauss", "--mixed", "q=1,r=1", "--n", "2", "--k", "1"});
  REQUIRE(m.code == 0);
  CHECK(std::abs(value_of(m) - 1.0) <= 4.0 * stderr_of(m));
  const auto s = run({"norm", "--field", "cap:angle=1.0471975511965976", "--lp", "1", "--n", "3"});
  REQUIRE(s.code == 0);
  CHECK(value_of(s) == doctest::Approx(M_PI).epsilon(0.01));
}

TEST_CASE("norm usage errors") {
  CHECK(run({"norm", "--field", "gauss", "--lp", "1", "--weak", "2", "--n", "2"}).code == 64);
  CHECK(run({"norm", "--field", "gauss", "--n", "2"}).code == 64);
  CHECK(run({"norm", "--field", "gauss", "--lorentz", "p=2", "--n", "2"}).code == 64);
  CHECK(run({"norm", "--field", "gauss", "--lorentz", "p=2,q=1,z=3", "--n", "2"}).code == 64);
  CHECK(run({"norm", "--field", "gauss", "--lp", "0.5", "--n", "2"}).code == 64);
}

TEST_CASE("sample subcommand") {
  const auto r = run({"sample", "grassmann", "--n", "4", "--k", "2", "--count", "3", "--seed", "2"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["samples"].size() == 3);
  CHECK(j["samples"][0]["frame"].size() == 4);
  CHECK(run({"sample", "grassmann", "--n", "4", "--k", "2", "--count", "3", "--seed", "2"}).out == r.out);
  CHECK(run({"sample", "plane", "--n", "3", "--k", "1", "--format", "csv"}).code == 0);
  CHECK(run({"sample", "torus"}).code == 64);
}

TEST_CASE("identical command lines give byte-identical output") {
  const std::vector<std::string> args{"verify", "lemma26", "--samples", "10000", "--seed", "4", "--workers", "2"};
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.out == b.out);
  CHECK(a.code == b.code);
}
