#pragma once

#include <functional>
#include <utility>

// Test-side reference computations, kept independent of the library's own
// quadrature and characteristic machinery.
namespace oracle {

/// Composite Simpson rule with 2 * panels sub-intervals.
inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      int panels) {
  const int n = 2 * panels;
  const double h = (hi - lo) / n;
  double acc = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) acc += f(lo + i * h) * ((i % 2) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

/// Classical RK4 on the backward characteristic system da/ds = -G(a),
/// integrated over s in [0, t] from the head (a1, a2); returns the foot.
inline std::pair<double, double> trace_back(const std::function<double(double, double)>& g1,
                                            const std::function<double(double, double)>& g2,
                                            double t, double a1, double a2, int steps) {
  const double h = t / steps;
  double x = a1, y = a2;
  for (int i = 0; i < steps; ++i) {
    const double k1x = -g1(x, y), k1y = -g2(x, y);
    const double k2x = -g1(x + 0.5 * h * k1x, y + 0.5 * h * k1y);
    const double k2y = -g2(x + 0.5 * h * k1x, y + 0.5 * h * k1y);
    const double k3x = -g1(x + 0.5 * h * k2x, y + 0.5 * h * k2y);
    const double k3y = -g2(x + 0.5 * h * k2x, y + 0.5 * h * k2y);
    const double k4x = -g1(x + h * k3x, y + h * k3y);
    const double k4y = -g2(x + h * k3x, y + h * k3y);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
  }
  return {x, y};
}

}  // namespace oracle
