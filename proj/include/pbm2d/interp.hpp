#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pbm2d/core.hpp"

namespace pbm2d {

// ===== structured-grid interpolation =======================================

/// What to do with queries outside the mesh hull.
enum class OutOfHull { Clamp, Error };

/// Tensor-product linear interpolation on a structured grid. Exact at nodes
/// and for fields affine in each coordinate. values uses Field2D layout
/// (a2 outer, a1 inner).
double bilinear(const Grid2D& grid, std::span<const double> values, double a1, double a2,
                OutOfHull policy = OutOfHull::Clamp);
double bilinear(const Field2D& field, double a1, double a2,
                OutOfHull policy = OutOfHull::Clamp);

// ===== jagged-mesh resampling ==============================================

/// Nodal values on a JaggedMesh: one inner vector per row, sized like the
/// row's line.
using JaggedValues = std::vector<std::vector<double>>;

/// Precomputed separable interpolation from a jagged source mesh onto a
/// fixed set of target nodes (another jagged mesh or a structured grid).
/// Each target node is located once at construction: its anchor coordinate
/// is bracketed between two source rows, and its line coordinate is
/// bracketed within each of those rows. apply() then evaluates three linear
/// blends per node. Out-of-hull targets clamp to the nearest boundary value,
/// so results never leave [min(source), max(source)] and can never be NaN
/// unless the source values already are (which is reported, not propagated).
class Resampler {
 public:
  Resampler(const JaggedMesh& source, const JaggedMesh& target);
  Resampler(const JaggedMesh& source, GridPtr target);

  /// Resample onto a jagged target. Throws unless this Resampler was built
  /// with one.
  JaggedValues apply(const JaggedValues& source_values) const;

  /// Resample onto a grid target. Throws unless this Resampler was built
  /// with one.
  Field2D apply_to_grid(const JaggedValues& source_values) const;

 private:
  struct NodeLoc {
    std::size_t row[2] = {};     // bracketing source rows (equal when clamped)
    double row_w = 0.0;          // blend toward row[1]
    std::size_t j_lo[2] = {};    // in-row bracket start for each row
    double j_w[2] = {};          // in-row blend weights
  };

  void locate_all(const JaggedMesh& source, const std::vector<std::pair<double, double>>& nodes);
  double blend(const JaggedValues& v, const NodeLoc& loc) const;
  void check_source_shape(const JaggedValues& v) const;

  std::vector<NodeLoc> locs_;               // flattened target-node order
  std::vector<std::size_t> source_shape_;   // per-row sizes of the source
  std::vector<std::size_t> target_rows_;    // per-row sizes of a jagged target
  GridPtr target_grid_;                     // set for grid targets
};

/// One-shot conveniences; bit-identical to building a Resampler and applying
/// it once.
JaggedValues jagged_resample(const JaggedMesh& source, const JaggedValues& values,
                             const JaggedMesh& target);
Field2D jagged_resample(const JaggedMesh& source, const JaggedValues& values, GridPtr target);

/// Evaluate a function at every node of a jagged mesh, in (a1, a2) order
/// resolved through the mesh's line axis.
JaggedValues sample_jagged(const JaggedMesh& mesh, const Scalar2Fn& f);

}  // namespace pbm2d
