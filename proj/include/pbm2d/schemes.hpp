#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include "pbm2d/core.hpp"
#include "pbm2d/mesh.hpp"

namespace pbm2d {

// ===== scheme identifiers ==================================================

/// End-to-end solution strategies. Each id names exactly one driver;
/// advance() dispatches on it after consulting the compatibility table.
enum class SchemeId {
  ConUniformUpwind,
  TransUniformUpwind,
  ConNonuniformUpwind,
  TransNonuniformUpwind,
  ExactAnalytical,
  ExactNumerical,
  ExactInterpolation,
  SplitConUniformUpwind,
  SplitTransUniformUpwind,
  SplitTransNonuniformUpwind,
  SplitExact,
  SplitExactEnhanced,
  SplitNonhomogeneous,
  MuExact,
};

/// Stable kebab-case spellings ("split-exact-enhanced") used by the CLI and
/// config files. Unknown names are rejected with SetupError.
SchemeId parse_scheme_id(std::string_view name);
std::string_view scheme_id_name(SchemeId id);

/// Every id in declaration order, for listings.
std::span<const SchemeId> all_scheme_ids();

// ===== options and results =================================================

/// Tuning knobs for advance(). The defaults reproduce the benchmark runs.
struct AdvanceOptions {
  /// Time step. Unset picks the scheme family's default: the largest stable
  /// dt for upwind schemes, the CFL = 1 step for the shift schemes, one step
  /// spanning t_end for the characteristic schemes (dt is free there).
  std::optional<double> dt;
  /// Run the a2 sub-problem before the a1 sub-problem in split schemes.
  bool axis2_first = false;
  /// Nonhomogeneous split: apply the source sub-step before the advections.
  bool source_first = false;
  /// Panel count for quadrature-built maps and removal weights.
  std::size_t quadrature_panels = 4096;
};

struct RunResult {
  Field2D final_field;  // on the scheme's native output grid
  std::size_t steps_taken = 0;
  /// Nominal step: steps_taken * dt_used >= t_end - 1e-12 always holds; a
  /// truncated final sub-step makes the product overshoot t_end slightly.
  double dt_used = 0.0;
  /// The mesh the run marched on. Jagged schemes report the mesh of the
  /// second (a2) sub-problem, whose node count is the one usually quoted.
  MeshBuildReport mesh_report;
};

// ===== compatibility =======================================================

/// Static support table over (scheme, growth class, source class).
bool scheme_supports(SchemeId scheme, GrowthKind growth, SourceKind source);

/// Throws SetupError naming the scheme and the offending class. Also checks
/// the prerequisites the table cannot express: closed-form maps for
/// exact-analytical, characteristic feet for split-exact-enhanced.
void require_compatible(SchemeId scheme, const ProblemSpec& problem);

// ===== splitting ===========================================================

/// Advances a field along one axis (1 or 2) over the full dt.
using PerAxisSolver =
    std::function<Field2D(const Field2D& field, const GrowthSpec& growth, int axis, double dt)>;

/// One first-order (Lie) split step: the first sub-problem runs over the
/// whole dt and its output becomes the second sub-problem's input. Axis 1
/// goes first unless axis2_first.
Field2D lie_split_step(const Field2D& field, const GrowthSpec& growth, double dt,
                       const PerAxisSolver& solver, bool axis2_first = false);

// ===== driver ==============================================================

/// Integrates the problem to t_end with the named scheme and returns the
/// final field.
///
/// Uniform-grid schemes output on the requested n1 x n2 grid. The nonuniform
/// and jagged schemes build their marching meshes from dt; for them the
/// resolution sizes only the default dt and (for jagged schemes) the uniform
/// grid the output is resampled onto. The characteristic schemes output on
/// the inverse-mapped transformed lattice, which is nonuniform whenever the
/// coordinate maps are nonlinear.
///
/// Shift schemes (split-exact, split-nonhomogeneous, mu-exact) require t_end
/// to be an integer multiple of dt; every other scheme truncates the final
/// step to land exactly on t_end. t_end = 0 returns the initial condition
/// sampled on the output grid.
///
/// Calls share no mutable state: distinct advance() invocations may run
/// concurrently.
RunResult advance(const ProblemSpec& problem, SchemeId scheme, std::size_t n1, std::size_t n2,
                  const AdvanceOptions& options = {});

}  // namespace pbm2d
