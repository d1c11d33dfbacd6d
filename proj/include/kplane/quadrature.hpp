#pragma once

#include <functional>
#include <vector>

namespace kplane::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

using Fn = std::function<double(double)>;

// Adaptive Gauss-Kronrod (15-point) on a finite interval.
Result integrate(const Fn& f, double a, double b, double rel_tol = 1e-10, int max_depth = 30);

// Tanh-sinh on a finite interval; tolerates integrable endpoint singularities.
Result integrate_singular(const Fn& f, double a, double b, double rel_tol = 1e-10);

// Piecewise adaptive integration over the given breakpoints.
Result integrate_pieces(const Fn& f, const std::vector<double>& breaks, double rel_tol = 1e-10);

// Maximizes f on [a, b] by a dense scan followed by golden-section refinement.
double maximize(const Fn& f, double a, double b, int scan = 2000);

}  // namespace kplane::quad
