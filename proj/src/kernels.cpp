#include "pbm2d/kernels.hpp"

#include <cmath>
#include <string>

namespace pbm2d {

namespace {

constexpr double kCflSlack = 1e-12;  // forgives rounding in dt*G/da products

void require_cfl_range(double a, const char* what) {
  if (!(a >= 0.0 && a <= 1.0 + kCflSlack))
    throw NumericalError(std::string(what) + ": CFL coefficient " + std::to_string(a) +
                         " outside [0, 1], refusing to step");
}

// donor-side cell width; the first node reuses its neighbor's width
double cell_width(const Axis1D& axis, std::size_t j) {
  return j == 0 ? axis.spacing(1) : axis.spacing(j);
}

}  // namespace

// ===== exact shifts ========================================================

std::vector<double> shift_exact_1d(std::span<const double> line, double inflow_value) {
  std::vector<double> out(line.size());
  if (out.empty()) return out;
  out[0] = inflow_value;
  for (std::size_t j = 1; j < line.size(); ++j) out[j] = line[j - 1];
  return out;
}

void shift_exact_1d_inplace(std::span<double> line, double inflow_value) {
  if (line.empty()) return;
  for (std::size_t j = line.size(); j-- > 1;) line[j] = line[j - 1];
  line[0] = inflow_value;
}

// ===== first-order upwind sweeps ===========================================

std::vector<double> upwind_sweep_1d(std::span<const double> line, const SweepPlan& plan,
                                    double inflow_value) {
  if (plan.cfl_per_cell.size() != line.size())
    throw SetupError("upwind_sweep_1d: plan length does not match the line");
  for (double a : plan.cfl_per_cell) require_cfl_range(a, "upwind_sweep_1d");

  std::vector<double> out(line.size());
  double west = inflow_value;
  for (std::size_t j = 0; j < line.size(); ++j) {
    const double a = plan.cfl_per_cell[j];
    // a == 1 must reproduce the pure shift without rounding
    out[j] = (a == 1.0) ? west : line[j] - a * (line[j] - west);
    west = line[j];
  }
  return out;
}

std::vector<double> conservative_sweep_1d(std::span<const double> line, std::span<const double> g,
                                          std::span<const double> ratio, double inflow_flux) {
  if (g.size() != line.size() || ratio.size() != line.size())
    throw SetupError("conservative_sweep_1d: coefficient arrays do not match the line");
  for (std::size_t j = 0; j < line.size(); ++j)
    require_cfl_range(ratio[j] * g[j], "conservative_sweep_1d");

  std::vector<double> out(line.size());
  double west_flux = inflow_flux;
  for (std::size_t j = 0; j < line.size(); ++j) {
    const double flux = g[j] * line[j];
    out[j] = line[j] - ratio[j] * (flux - west_flux);
    west_flux = flux;
  }
  return out;
}

// ===== unsplit 2D steps ====================================================

namespace {

Field2D unsplit_stencil(const Field2D& f, double alpha, double beta) {
  Field2D out(f.grid_ptr());
  for (std::size_t k = 0; k < f.n2(); ++k) {
    for (std::size_t j = 0; j < f.n1(); ++j) {
      const double west = (j == 0) ? 0.0 : f(j - 1, k);
      const double south = (k == 0) ? 0.0 : f(j, k - 1);
      out(j, k) = f(j, k) - alpha * (f(j, k) - west) - beta * (f(j, k) - south);
    }
  }
  return out;
}

}  // namespace

Field2D upwind_step_2d_unsplit(const Field2D& field, double alpha, double beta, BoundarySpec) {
  if (!check_stability(alpha, beta))
    throw NumericalError("upwind_step_2d_unsplit: (alpha, beta) = (" + std::to_string(alpha) +
                         ", " + std::to_string(beta) + ") outside the stable region");
  return unsplit_stencil(field, alpha, beta);
}

Field2D upwind_step_2d_unsplit_unchecked(const Field2D& field, double alpha, double beta,
                                         BoundarySpec) {
  return unsplit_stencil(field, alpha, beta);
}

Field2D advective_step_2d(const Field2D& field, const Field2D& g1, const Field2D& g2, double dt,
                          BoundarySpec) {
  if (g1.size() != field.size() || g2.size() != field.size())
    throw SetupError("advective_step_2d: speed fields do not match the field");
  const auto& grid = field.grid();
  Field2D out(field.grid_ptr());
  for (std::size_t k = 0; k < field.n2(); ++k) {
    const double db = dt / cell_width(grid.axis2, k);
    for (std::size_t j = 0; j < field.n1(); ++j) {
      const double alpha = g1(j, k) * dt / cell_width(grid.axis1, j);
      const double beta = g2(j, k) * db;
      if (!check_stability(alpha, beta))
        throw NumericalError("advective_step_2d: unstable CFL pair at a node");
      const double west = (j == 0) ? 0.0 : field(j - 1, k);
      const double south = (k == 0) ? 0.0 : field(j, k - 1);
      out(j, k) = field(j, k) - alpha * (field(j, k) - west) - beta * (field(j, k) - south);
    }
  }
  return out;
}

Field2D conservative_step_2d(const Field2D& field, const Field2D& g1, const Field2D& g2,
                             double dt, BoundarySpec) {
  if (g1.size() != field.size() || g2.size() != field.size())
    throw SetupError("conservative_step_2d: speed fields do not match the field");
  const auto& grid = field.grid();
  Field2D out(field.grid_ptr());
  for (std::size_t k = 0; k < field.n2(); ++k) {
    const double rb = dt / cell_width(grid.axis2, k);
    for (std::size_t j = 0; j < field.n1(); ++j) {
      const double ra = dt / cell_width(grid.axis1, j);
      if (!check_stability(ra * g1(j, k), rb * g2(j, k)))
        throw NumericalError("conservative_step_2d: unstable CFL pair at a node");
      const double west_flux = (j == 0) ? 0.0 : g1(j - 1, k) * field(j - 1, k);
      const double south_flux = (k == 0) ? 0.0 : g2(j, k - 1) * field(j, k - 1);
      out(j, k) = field(j, k) - ra * (g1(j, k) * field(j, k) - west_flux) -
                  rb * (g2(j, k) * field(j, k) - south_flux);
    }
  }
  return out;
}

// ===== source sub-step =====================================================

Field2D euler_source_step(const Field2D& field, const Scalar3Fn& h, double t, double dt) {
  if (!h) throw SetupError("euler_source_step: missing source callback");
  if (!(dt > 0.0)) throw SetupError("euler_source_step: dt must be positive");
  const auto& grid = field.grid();
  Field2D out(field.grid_ptr());
  for (std::size_t k = 0; k < field.n2(); ++k) {
    for (std::size_t j = 0; j < field.n1(); ++j) {
      const double v = h(t, grid.axis1[j], grid.axis2[k]);
      if (!std::isfinite(v))
        throw NumericalError("euler_source_step: source not finite at t = " + std::to_string(t) +
                             ", a1 = " + std::to_string(grid.axis1[j]) +
                             ", a2 = " + std::to_string(grid.axis2[k]));
      out(j, k) = field(j, k) + dt * v;
    }
  }
  return out;
}

}  // namespace pbm2d
