#include "kplane/mc.hpp"

#include <cmath>
#include <exception>
#include <thread>

#include "kplane/errors.hpp"

namespace kplane::mc {

Accumulator::Accumulator(int dim) : mean_(Vector::Zero(dim)), m2_(Matrix::Zero(dim, dim)) {}

void Accumulator::add(const Vector& x) {
  ++count_;
  const Vector delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_.noalias() += delta * (x - mean_).transpose();
}

void Accumulator::add(double x) {
  Vector v(1);
  v(0) = x;
  add(v);
}

void Accumulator::merge(const Accumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const Vector delta = other.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_ += other.m2_ + delta * delta.transpose() * (na * nb / n);
  count_ += other.count_;
}

Matrix Accumulator::covariance() const {
  if (count_ < 2) return Matrix::Zero(dim(), dim());
  return m2_ / static_cast<double>(count_ - 1);
}

double Accumulator::variance(int i) const {
  if (count_ < 2) return 0.0;
  return std::max(0.0, m2_(i, i) / static_cast<double>(count_ - 1));
}

double Accumulator::std_error(int i) const {
  if (count_ < 2) return 0.0;
  return std::sqrt(variance(i) / static_cast<double>(count_));
}

double Accumulator::std_error(const Vector& a) const {
  if (count_ < 2) return 0.0;
  const double v = a.dot(covariance() * a);
  return std::sqrt(std::max(0.0, v) / static_cast<double>(count_));
}

void run_partitioned(const randgeo::RngStream& stream, std::size_t samples, int workers,
                     const std::function<void(int, randgeo::Rng&, std::size_t, std::size_t)>& body) {
  if (workers < 1) throw InvalidInput("worker count must be >= 1");
  const auto w = static_cast<std::size_t>(workers);
  auto chunk = [&](std::size_t i) { return samples * i / w; };
  if (workers == 1) {
    randgeo::Rng rng(stream);
    body(0, rng, 0, samples);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  threads.reserve(w);
  for (std::size_t i = 0; i < w; ++i) {
    threads.emplace_back([&, i] {
      try {
        randgeo::Rng rng(stream.offset(i));
        body(static_cast<int>(i), rng, chunk(i), chunk(i + 1) - chunk(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Accumulator run(const randgeo::RngStream& stream, std::size_t samples, int workers, int dim,
                const SampleFn& fn) {
  std::vector<Accumulator> parts(static_cast<std::size_t>(std::max(workers, 1)), Accumulator(dim));
  run_partitioned(stream, samples, workers,
                  [&](int w, randgeo::Rng& rng, std::size_t, std::size_t count) {
                    Vector out(dim);
                    auto& acc = parts[static_cast<std::size_t>(w)];
                    for (std::size_t i = 0; i < count; ++i) {
                      out.setZero();
                      fn(rng, out);
                      acc.add(out);
                    }
                  });
  Accumulator total(dim);
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace kplane::mc
