#include "kplane/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <queue>
#include <vector>

#include "kplane/errors.hpp"

namespace kplane::quad {

Result integrate(const Fn& f, double a, double b, double rel_tol, int max_depth) {
  if (!(b >= a)) throw InvalidInput("integrate: need a <= b");
  if (a == b) return {};
  // Globally adaptive: always bisect the piece with the largest error estimate.
  struct Piece {
    double a, b, value, error;
    int depth;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto rule = [&](double lo, double hi, int depth) {
    Piece p{lo, hi, 0.0, 0.0, depth};
    p.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 0, 0.0, &p.error);
    return p;
  };
  std::priority_queue<Piece> heap;
  heap.push(rule(a, b, 0));
  double value = heap.top().value;
  double error = heap.top().error;
  constexpr int kMaxPieces = 4000;
  int pieces = 1;
  while (!heap.empty() && error > rel_tol * std::abs(value) && error > 1e-300 && pieces < kMaxPieces) {
    const Piece worst = heap.top();
    if (worst.depth >= max_depth) break;
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Piece left = rule(worst.a, mid, worst.depth + 1);
    const Piece right = rule(mid, worst.b, worst.depth + 1);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++pieces;
  }
  Result r;
  while (!heap.empty()) {
    r.value += heap.top().value;
    r.error += heap.top().error;
    heap.pop();
  }
  return r;
}

Result integrate_singular(const Fn& f, double a, double b, double rel_tol) {
  if (!(b >= a)) throw InvalidInput("integrate_singular: need a <= b");
  if (a == b) return {};
  boost::math::quadrature::tanh_sinh<double> ts;
  Result r;
  double l1 = 0.0;
  r.value = ts.integrate(f, a, b, rel_tol, &r.error, &l1);
  return r;
}

Result integrate_pieces(const Fn& f, const std::vector<double>& breaks, double rel_tol) {
  Result total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const Result piece = integrate(f, breaks[i], breaks[i + 1], rel_tol);
    total.value += piece.value;
    total.error += piece.error;
  }
  return total;
}

double maximize(const Fn& f, double a, double b, int scan) {
  if (!(b > a)) return f(a);
  double best_x = a;
  double best = f(a);
  const double h = (b - a) / scan;
  for (int i = 1; i <= scan; ++i) {
    const double x = a + h * i;
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  const double lo = std::max(a, best_x - h);
  const double hi = std::min(b, best_x + h);
  const auto refined = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo,
                                                             hi, 50);
  return std::max(best, -refined.second);
}

}  // namespace kplane::quad
