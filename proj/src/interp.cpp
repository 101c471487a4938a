#include "pbm2d/interp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace pbm2d {

namespace {

struct Bracket {
  std::size_t lo;
  double w;        // blend toward lo + 1
  bool outside;    // query fell off the ends before clamping
};

Bracket bracket(std::span<const double> xs, double x) {
  if (x <= xs.front()) return {0, 0.0, x < xs.front()};
  if (x >= xs.back()) return {xs.size() - 2, 1.0, x > xs.back()};
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t lo = static_cast<std::size_t>(it - xs.begin()) - 1;
  return {lo, (x - xs[lo]) / (xs[lo + 1] - xs[lo]), false};
}

// two-term form: w = 0 and w = 1 return the end values bit-exactly
double lerp(double lo, double hi, double w) { return (1.0 - w) * lo + w * hi; }

}  // namespace

// ===== structured-grid interpolation =======================================

double bilinear(const Grid2D& grid, std::span<const double> values, double a1, double a2,
                OutOfHull policy) {
  if (values.size() != grid.node_count())
    throw SetupError("bilinear: value array does not match the grid");
  const auto b1 = bracket(grid.axis1.points(), a1);
  const auto b2 = bracket(grid.axis2.points(), a2);
  if (policy == OutOfHull::Error && (b1.outside || b2.outside))
    throw SetupError("bilinear: query (" + std::to_string(a1) + ", " + std::to_string(a2) +
                     ") outside the grid hull");
  const std::size_t n1 = grid.n1();
  const auto at = [&](std::size_t j, std::size_t k) { return values[k * n1 + j]; };
  const double lo = lerp(at(b1.lo, b2.lo), at(b1.lo + 1, b2.lo), b1.w);
  const double hi = lerp(at(b1.lo, b2.lo + 1), at(b1.lo + 1, b2.lo + 1), b1.w);
  return lerp(lo, hi, b2.w);
}

double bilinear(const Field2D& field, double a1, double a2, OutOfHull policy) {
  return bilinear(field.grid(), field.values(), a1, a2, policy);
}

// ===== jagged-mesh resampling ==============================================

namespace {

// target nodes in (a1, a2) terms, row by row
std::vector<std::pair<double, double>> nodes_of(const JaggedMesh& mesh) {
  std::vector<std::pair<double, double>> out;
  out.reserve(mesh.node_count());
  for (const auto& row : mesh.rows())
    for (double x : row.line.points())
      out.emplace_back(mesh.line_axis() == 1 ? x : row.anchor,
                       mesh.line_axis() == 1 ? row.anchor : x);
  return out;
}

std::vector<std::pair<double, double>> nodes_of(const Grid2D& grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.node_count());
  for (std::size_t k = 0; k < grid.n2(); ++k)
    for (std::size_t j = 0; j < grid.n1(); ++j)
      out.emplace_back(grid.axis1[j], grid.axis2[k]);
  return out;
}

}  // namespace

void Resampler::locate_all(const JaggedMesh& source,
                           const std::vector<std::pair<double, double>>& nodes) {
  source_shape_.reserve(source.row_count());
  for (const auto& row : source.rows()) source_shape_.push_back(row.line.size());

  std::vector<double> anchors;
  anchors.reserve(source.row_count());
  for (const auto& row : source.rows()) anchors.push_back(row.anchor);

  locs_.reserve(nodes.size());
  for (const auto& [a1, a2] : nodes) {
    const double b = source.line_axis() == 1 ? a2 : a1;  // anchor-direction coordinate
    const double x = source.line_axis() == 1 ? a1 : a2;  // line-direction coordinate
    NodeLoc loc;
    if (anchors.size() == 1) {
      loc.row[0] = loc.row[1] = 0;
      loc.row_w = 0.0;
    } else {
      const auto br = bracket(anchors, b);
      loc.row[0] = br.lo;
      loc.row[1] = br.lo + 1;
      loc.row_w = br.w;
    }
    for (int side = 0; side < 2; ++side) {
      const auto bx = bracket(source.row(loc.row[side]).line.points(), x);
      loc.j_lo[side] = bx.lo;
      loc.j_w[side] = bx.w;
    }
    locs_.push_back(loc);
  }
}

Resampler::Resampler(const JaggedMesh& source, const JaggedMesh& target) {
  target_rows_.reserve(target.row_count());
  for (const auto& row : target.rows()) target_rows_.push_back(row.line.size());
  locate_all(source, nodes_of(target));
}

Resampler::Resampler(const JaggedMesh& source, GridPtr target) {
  if (!target) throw SetupError("Resampler: null target grid");
  target_grid_ = std::move(target);
  locate_all(source, nodes_of(*target_grid_));
}

void Resampler::check_source_shape(const JaggedValues& v) const {
  if (v.size() != source_shape_.size())
    throw SetupError("Resampler: source values have the wrong row count");
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k].size() != source_shape_[k])
      throw SetupError("Resampler: source row " + std::to_string(k) + " has the wrong length");
}

double Resampler::blend(const JaggedValues& v, const NodeLoc& loc) const {
  const auto along = [&](int side) {
    const auto& row = v[loc.row[side]];
    return lerp(row[loc.j_lo[side]], row[loc.j_lo[side] + 1], loc.j_w[side]);
  };
  return lerp(along(0), along(1), loc.row_w);
}

JaggedValues Resampler::apply(const JaggedValues& source_values) const {
  if (target_grid_) throw SetupError("Resampler: built for a grid target, use apply_to_grid");
  check_source_shape(source_values);
  JaggedValues out(target_rows_.size());
  std::size_t i = 0;
  for (std::size_t k = 0; k < target_rows_.size(); ++k) {
    out[k].resize(target_rows_[k]);
    for (std::size_t j = 0; j < target_rows_[k]; ++j, ++i) {
      const double v = blend(source_values, locs_[i]);
      if (!std::isfinite(v))
        throw NumericalError("jagged resample produced a non-finite value at target row " +
                             std::to_string(k) + ", node " + std::to_string(j));
      out[k][j] = v;
    }
  }
  return out;
}

Field2D Resampler::apply_to_grid(const JaggedValues& source_values) const {
  if (!target_grid_) throw SetupError("Resampler: built for a jagged target, use apply");
  check_source_shape(source_values);
  Field2D out(target_grid_);
  std::size_t i = 0;
  for (std::size_t k = 0; k < target_grid_->n2(); ++k) {
    for (std::size_t j = 0; j < target_grid_->n1(); ++j, ++i) {
      const double v = blend(source_values, locs_[i]);
      if (!std::isfinite(v))
        throw NumericalError("jagged resample produced a non-finite value at grid node (" +
                             std::to_string(j) + ", " + std::to_string(k) + ")");
      out(j, k) = v;
    }
  }
  return out;
}

JaggedValues jagged_resample(const JaggedMesh& source, const JaggedValues& values,
                             const JaggedMesh& target) {
  return Resampler(source, target).apply(values);
}

Field2D jagged_resample(const JaggedMesh& source, const JaggedValues& values, GridPtr target) {
  return Resampler(source, std::move(target)).apply_to_grid(values);
}

JaggedValues sample_jagged(const JaggedMesh& mesh, const Scalar2Fn& f) {
  if (!f) throw SetupError("sample_jagged: missing function");
  JaggedValues out(mesh.row_count());
  for (std::size_t k = 0; k < mesh.row_count(); ++k) {
    const auto& row = mesh.row(k);
    out[k].reserve(row.line.size());
    for (double x : row.line.points())
      out[k].push_back(mesh.line_axis() == 1 ? f(x, row.anchor) : f(row.anchor, x));
  }
  return out;
}

}  // namespace pbm2d
