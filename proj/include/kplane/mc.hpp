#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "kplane/randgeo.hpp"

namespace kplane::mc {

using geom::Matrix;
using geom::Vector;

// Running mean and covariance of a vector-valued sample (Welford), mergeable
// with the pairwise update of Chan et al.
class Accumulator {
 public:
  explicit Accumulator(int dim = 1);

  void add(const Vector& x);
  void add(double x);
  void merge(const Accumulator& other);

  int dim() const { return static_cast<int>(mean_.size()); }
  std::size_t count() const { return count_; }
  const Vector& mean() const { return mean_; }
  double mean(int i) const { return mean_(i); }
  // Sample covariance (divisor count - 1).
  Matrix covariance() const;
  double variance(int i) const;
  // Standard error of the mean of component i.
  double std_error(int i) const;
  // Standard error of the mean of a . x.
  double std_error(const Vector& a) const;

 private:
  std::size_t count_ = 0;
  Vector mean_;
  Matrix m2_;
};

// One call per sample; writes the sample's value vector into out.
using SampleFn = std::function<void(randgeo::Rng&, Vector& out)>;

// Draws `samples` values split into `workers` contiguous chunks. Worker w uses
// Rng(stream.offset(w)); partial accumulators are merged in worker order, so the
// result depends only on (stream, samples, workers).
Accumulator run(const randgeo::RngStream& stream, std::size_t samples, int workers, int dim,
                const SampleFn& fn);

// Same partitioning for callers that need per-worker state: body(worker, rng,
// first, count) is invoked once per worker.
void run_partitioned(const randgeo::RngStream& stream, std::size_t samples, int workers,
                     const std::function<void(int, randgeo::Rng&, std::size_t, std::size_t)>& body);

}  // namespace kplane::mc
