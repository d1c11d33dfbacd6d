#pragma once

#include <cstdint>
#include <random>

#include "kplane/geom.hpp"

namespace kplane::randgeo {

using geom::Matrix;
using geom::Vector;

// Identity of a random stream. Equal (seed, stream_id) pairs reproduce equal
// sequences. A computation split over w workers uses stream ids
// stream_id, stream_id + 1, ..., stream_id + w - 1; independent estimates inside
// one run are separated by offsets of kStreamStride.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngStream offset(std::uint64_t k) const { return {seed, stream_id + k}; }
  RngStream sub(std::uint64_t k) const { return {seed, stream_id + k * kStreamStride}; }
  static constexpr std::uint64_t kStreamStride = std::uint64_t{1} << 20;

  bool operator==(const RngStream&) const = default;
};

class Rng {
 public:
  explicit Rng(RngStream s);

  const RngStream& stream() const { return stream_; }
  double normal() { return normal_(engine_); }
  // Uniform on [0, 1).
  double uniform();
  double gamma(double shape);
  double beta(double a, double b);
  std::mt19937_64& engine() { return engine_; }

 private:
  RngStream stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct TruncationBox {
  explicit TruncationBox(double radius);
  double radius;
};

struct WeightedPlane {
  geom::AffineKPlane plane;
  double weight;  // volume of the (n-k)-ball the base point was drawn from
};

// |S^{n-1}|, the surface area of the unit sphere in R^n (n >= 1; |S^0| = 2).
double sphere_area(int n);
// Volume of the radius-r ball in R^d.
double ball_volume(int d, double r = 1.0);

Vector sample_sphere(int n, Rng& rng);
// Uniform in the d-ball of radius r.
Vector sample_ball(int d, double r, Rng& rng);
geom::Subspace sample_grassmann(int n, int k, Rng& rng);
Vector sample_sphere_in_subspace(const geom::Subspace& theta, Rng& rng);
Matrix sample_rotation(int n, Rng& rng);
WeightedPlane sample_affine_plane(int n, int k, const TruncationBox& box, Rng& rng);

// Draws (w_1, ..., w_k) in (S^{n-1})^k from the probability measure proportional
// to G(w_1, ..., w_k)^{(k-n)/2} dw_1 ... dw_k (unnormalized surface measures).
// Each w_j is split into its component in span(w_1..w_{j-1}) and its
// orthogonal part; the angle between them has a Beta-distributed sin^2.
Matrix sample_gram_weighted_directions(int n, int k, Rng& rng);
// Total mass of the measure sampled above.
double gram_weighted_mass(int n, int k);

}  // namespace kplane::randgeo
