#pragma once

#include <span>
#include <vector>

#include "pbm2d/core.hpp"

namespace pbm2d {

// ===== sweep plans =========================================================

/// Precomputed coefficients for a one-dimensional upwind pass. axis records
/// which grid direction a field-level sweep runs along; the 1D kernels use
/// only cfl_per_cell (one entry per updated node) and the boundary rule.
struct SweepPlan {
  int axis = 1;
  std::vector<double> cfl_per_cell;
  BoundarySpec boundary{};
};

// ===== exact shifts ========================================================

/// The CFL = 1 upwind step: out[j] = in[j-1], out[0] = inflow_value.
/// Pure memory movement, no arithmetic.
std::vector<double> shift_exact_1d(std::span<const double> line, double inflow_value);
void shift_exact_1d_inplace(std::span<double> line, double inflow_value);

// ===== first-order upwind sweeps ===========================================

/// Advective update out[j] = in[j] - a_j*(in[j] - in[j-1]) with the ghost
/// in[-1] = inflow_value. Cells with a_j == 1 copy their donor directly so
/// a full-CFL sweep matches shift_exact_1d bit for bit. Coefficients outside
/// [0, 1] are a stability violation and refuse to step.
std::vector<double> upwind_sweep_1d(std::span<const double> line, const SweepPlan& plan,
                                    double inflow_value);

/// Conservative (flux-difference) update
///   out[j] = in[j] - ratio[j]*(g[j]*in[j] - g[j-1]*in[j-1])
/// with ghost flux g[-1]*in[-1] = inflow_flux and ratio[j] = dt/da_j.
/// Per-cell stability requires ratio[j]*g[j] in [0, 1].
std::vector<double> conservative_sweep_1d(std::span<const double> line, std::span<const double> g,
                                          std::span<const double> ratio, double inflow_flux);

// ===== unsplit 2D steps ====================================================

/// Constant-coefficient unsplit update
///   out[j,k] = in[j,k] - alpha*(in[j,k] - in[j-1,k]) - beta*(in[j,k] - in[j,k-1])
/// with zero ghosts on both lower faces. Upper faces need no rule: the
/// upwind stencil never reads them for non-negative speeds. Requires
/// alpha, beta >= 0 and alpha + beta <= 1.
Field2D upwind_step_2d_unsplit(const Field2D& field, double alpha, double beta,
                               BoundarySpec boundary = {});

/// Same stencil with the stability gate removed, so tests can demonstrate
/// the blow-up outside the stable region. Never used by the schemes.
Field2D upwind_step_2d_unsplit_unchecked(const Field2D& field, double alpha, double beta,
                                         BoundarySpec boundary = {});

/// Variable-coefficient advective update: per-node speeds g1, g2 sampled on
/// the field's grid, cell widths taken from the grid axes (the donor-side
/// spacing; the first cell reuses the width of its neighbor). Per-node
/// stability requires alpha + beta <= 1.
Field2D advective_step_2d(const Field2D& field, const Field2D& g1, const Field2D& g2, double dt,
                          BoundarySpec boundary = {});

/// Variable-coefficient conservative update with upwind fluxes g*f and zero
/// inflow flux. Same stability rule with alpha = g1*dt/da1 etc.
Field2D conservative_step_2d(const Field2D& field, const Field2D& g1, const Field2D& g2,
                             double dt, BoundarySpec boundary = {});

// ===== source sub-step =====================================================

/// Forward-Euler nonhomogeneous sub-step: out = in + dt*h(t, a1, a2).
/// A non-finite h value reports the offending node.
Field2D euler_source_step(const Field2D& field, const Scalar3Fn& h, double t, double dt);

}  // namespace pbm2d
