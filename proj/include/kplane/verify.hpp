#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kplane/report.hpp"

namespace kplane::verify {

// Settings shared by every verifier. Unset fields fall back to the verifier's
// own defaults, which are the configurations the checks were designed for.
struct RunConfig {
  std::optional<int> n;
  std::optional<int> k;
  std::optional<std::size_t> samples;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<double> tolerance;
  std::optional<double> radius;
};

// Permutation, scaling, orthogonal invariance, Cauchy-Binet and the spherical
// factorization of the Gram determinant on random instances.
VerdictReport verify_gram_identities(int n, int k, std::size_t trials, const RunConfig& cfg);

// Subspace-and-point integral versus the Gram-weighted integral over R^{nk}.
VerdictReport verify_lemma23(int n, int k, std::size_t samples, const RunConfig& cfg);
// Sphere analogue with probability measures on the plane spheres.
VerdictReport verify_lemma26(int n, int k, std::size_t samples, const RunConfig& cfg);
// Plane-point measure against point-plane measure.
VerdictReport verify_lemma12(int n, int k, std::size_t samples, const RunConfig& cfg);
// Multilinear form by definition versus its point-tuple form; also cross-checks the
// constant against verify_lemma23 at the same (n, k).
VerdictReport verify_lemma11(int n, int k, std::size_t samples, const RunConfig& cfg);

struct ScalingOptions {
  int n = 2;
  int k = 1;
  double p = 1.5;
  double q = 3.0;
  double r = 3.0;
  std::vector<double> deltas{0.25, 0.5, 1.0, 2.0, 4.0};
  std::size_t samples = 200000;
};
VerdictReport verify_scaling_necessity(const ScalingOptions& o, const RunConfig& cfg);

struct TubeOptions {
  int n = 2;
  int k = 1;
  double p = 1.5;
  double q = 3.0;
  double r = 3.0;
  std::vector<double> epsilons{0.05, 0.1, 0.2, 0.4};
  std::size_t samples = 200000;
};
VerdictReport verify_tube_necessity(const TubeOptions& o, const RunConfig& cfg);

struct DivergenceOptions {
  int n = 2;
  int k = 1;
  double p = 2.5;
  double delta = 0.6;
  std::vector<double> radii{1e1, 1e2, 1e3, 1e4};
  // Minimum plane-integral growth per decade of truncation radius.
  double min_increment = 0.5;
};
VerdictReport verify_divergence_example(const DivergenceOptions& o, const RunConfig& cfg);

struct Theorem2Options {
  int n = 3;
  int k = 1;
  std::vector<double> angles;  // default {pi/2, pi/4, pi/8, pi/16}
  std::size_t samples = 200000;
};
VerdictReport verify_theorem2_ratio(const Theorem2Options& o, const RunConfig& cfg);

struct BAlphaOptions {
  int n = 3;
  double p = 2.0;
  std::size_t samples = 0;  // 0: deterministic sphere quadrature for zonal fields
};
VerdictReport verify_b_alpha(const BAlphaOptions& o, const RunConfig& cfg);

struct CAlphaOptions {
  int n = 3;
  std::vector<double> alphas{1.5, 2.0, 2.5};
  std::size_t samples = 20000;
};
VerdictReport verify_c_alpha(const CAlphaOptions& o, const RunConfig& cfg);

struct Lemma29Options {
  int n = 3;
  std::optional<double> alpha;  // default (n+1)/2
  std::size_t samples = 400000;
};
VerdictReport verify_lemma29(const Lemma29Options& o, const RunConfig& cfg);

VerdictReport verify_grassmann_invariance(int n, int k, std::size_t samples, const RunConfig& cfg);

struct InterpolationOptions {
  int n = 3;
  double p = 1.0;
  std::vector<double> thetas{0.25, 0.5, 0.75};
  double q = 2.0;
  std::size_t samples = 100000;
};
VerdictReport verify_interpolation(const InterpolationOptions& o, const RunConfig& cfg);

struct Theorem1Options {
  int n = 2;
  int k = 1;
  std::size_t samples = 250000;
};
VerdictReport verify_theorem1_ratio(const Theorem1Options& o, const RunConfig& cfg);

// Registry used by the command line.
const std::vector<std::string>& verifier_ids();
bool is_verifier(const std::string& id);
VerdictReport run_verifier(const std::string& id, const RunConfig& cfg);

}  // namespace kplane::verify
