#include "pbm2d/mesh.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

namespace pbm2d {

namespace {

// Backward march from `upper`: keep stepping down by step_of(a) while the
// next node stays >= 0. An exact hit on zero is kept; the result ascends.
std::vector<double> march_down(double upper, const Scalar1Fn& step_of) {
  const double floor_step = 1e-14 * upper;
  std::vector<double> nodes{upper};
  double a = upper;
  for (;;) {
    const double s = step_of(a);
    if (!(s > floor_step))
      throw SetupError("backward mesh march: step underflow (growth*dt too small)");
    const double next = a - s;
    if (next < 0.0) break;
    nodes.push_back(next);
    a = next;
  }
  std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

void spacing_minmax(const Axis1D& axis, double& mn, double& mx) {
  for (std::size_t i = 1; i < axis.size(); ++i) {
    mn = std::min(mn, axis.spacing(i));
    mx = std::max(mx, axis.spacing(i));
  }
}

}  // namespace

// ===== build reports =======================================================

MeshBuildReport report_for(Grid2D grid) {
  const std::size_t count = grid.node_count();
  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  spacing_minmax(grid.axis1, mn, mx);
  spacing_minmax(grid.axis2, mn, mx);
  return {std::move(grid), count, mn, mx};
}

MeshBuildReport report_for(JaggedMesh mesh) {
  const std::size_t count = mesh.node_count();
  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  for (const auto& row : mesh.rows()) spacing_minmax(row.line, mn, mx);
  for (std::size_t k = 1; k < mesh.row_count(); ++k) {
    const double d = mesh.row(k).anchor - mesh.row(k - 1).anchor;
    mn = std::min(mn, d);
    mx = std::max(mx, d);
  }
  return {std::move(mesh), count, mn, mx};
}

// ===== construction ========================================================

Grid2D build_uniform(const Domain2D& domain, std::size_t n1, std::size_t n2) {
  if (domain.l1 <= 0.0 || domain.l2 <= 0.0) throw SetupError("build_uniform: domain must be positive");
  if (n1 < 2 || n2 < 2) throw SetupError("build_uniform: need at least 2 points per axis");
  return {Axis1D::uniform(0.0, domain.l1, n1), Axis1D::uniform(0.0, domain.l2, n2)};
}

Grid2D build_nonuniform_cfl1(const GrowthSpec& growth, const Domain2D& domain, double dt,
                             double gamma) {
  if (!(dt > 0.0)) throw SetupError("build_nonuniform_cfl1: dt must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw SetupError("build_nonuniform_cfl1: gamma outside [0, 1]");
  if (growth.kind() != GrowthKind::PerAxis && growth.kind() != GrowthKind::Constant)
    throw SetupError("build_nonuniform_cfl1: growth must be per-axis (or constant)");

  const double c1 = 2.0 * gamma, c2 = 2.0 * (1.0 - gamma);
  auto ax1 = march_down(domain.l1,
                        [&](double a) { return c1 * growth.rate1(0.0, a, 0.0) * dt; });
  auto ax2 = march_down(domain.l2,
                        [&](double a) { return c2 * growth.rate2(0.0, 0.0, a) * dt; });
  return {Axis1D(std::move(ax1)), Axis1D(std::move(ax2))};
}

JaggedMesh build_jagged(const GrowthSpec& growth, const Domain2D& domain, double dt,
                        int for_axis) {
  if (!(dt > 0.0)) throw SetupError("build_jagged: dt must be positive");
  if (for_axis != 1 && for_axis != 2) throw SetupError("build_jagged: for_axis must be 1 or 2");
  if (growth.kind() != GrowthKind::Coupled && growth.kind() != GrowthKind::Constant)
    throw SetupError("build_jagged: growth must be coupled (or constant)");

  // anchors march along the other axis, pinned at the far end of the line axis
  const auto rate = [&](int axis, double a1, double a2) {
    return axis == 1 ? growth.rate1(0.0, a1, a2) : growth.rate2(0.0, a1, a2);
  };
  const double line_upper = (for_axis == 1) ? domain.l1 : domain.l2;
  const double anchor_upper = (for_axis == 1) ? domain.l2 : domain.l1;

  auto anchors = march_down(anchor_upper, [&](double b) {
    return dt * (for_axis == 1 ? rate(2, line_upper, b) : rate(1, b, line_upper));
  });

  std::vector<JaggedRow> rows;
  rows.reserve(anchors.size());
  for (double b : anchors) {
    auto line = march_down(line_upper, [&](double a) {
      return dt * (for_axis == 1 ? rate(1, a, b) : rate(2, b, a));
    });
    rows.push_back({b, Axis1D(std::move(line))});
  }
  return JaggedMesh(for_axis, std::move(rows));
}

// ===== plain-text serialization ============================================

namespace {

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void bad_file(const std::filesystem::path& path, const std::string& why) {
  throw SetupError("mesh file " + path.string() + ": " + why);
}

}  // namespace

void write_mesh(const std::filesystem::path& path, const Grid2D& grid) {
  std::ofstream out(path);
  if (!out) throw SetupError("cannot open " + path.string() + " for writing");
  out << "grid " << grid.n1() << ' ' << grid.n2() << '\n';
  for (std::size_t k = 0; k < grid.n2(); ++k)
    for (std::size_t j = 0; j < grid.n1(); ++j)
      out << fmt17(grid.axis1[j]) << ' ' << fmt17(grid.axis2[k]) << '\n';
  if (!out) throw SetupError("write failed for " + path.string());
}

void write_mesh(const std::filesystem::path& path, const JaggedMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw SetupError("cannot open " + path.string() + " for writing");
  out << "jagged " << mesh.line_axis() << ' ' << mesh.row_count() << '\n';
  for (std::size_t k = 0; k < mesh.row_count(); ++k) {
    const auto& row = mesh.row(k);
    for (double a : row.line.points())
      out << k << ' ' << fmt17(row.anchor) << ' ' << fmt17(a) << '\n';
  }
  if (!out) throw SetupError("write failed for " + path.string());
}

std::variant<Grid2D, JaggedMesh> read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SetupError("cannot open " + path.string());
  std::string kind;
  if (!(in >> kind)) bad_file(path, "empty file");

  if (kind == "grid") {
    std::size_t n1 = 0, n2 = 0;
    if (!(in >> n1 >> n2) || n1 < 2 || n2 < 2) bad_file(path, "bad grid header");
    std::vector<double> ax1(n1), ax2(n2);
    for (std::size_t k = 0; k < n2; ++k) {
      for (std::size_t j = 0; j < n1; ++j) {
        double a1 = 0.0, a2 = 0.0;
        if (!(in >> a1 >> a2)) bad_file(path, "truncated node list");
        if (k == 0) ax1[j] = a1;
        else if (a1 != ax1[j]) bad_file(path, "node list is not a tensor grid");
        if (j == 0) ax2[k] = a2;
        else if (a2 != ax2[k]) bad_file(path, "node list is not a tensor grid");
      }
    }
    return Grid2D{Axis1D(std::move(ax1)), Axis1D(std::move(ax2))};
  }

  if (kind == "jagged") {
    int line_axis = 0;
    std::size_t nrows = 0;
    if (!(in >> line_axis >> nrows) || nrows == 0) bad_file(path, "bad jagged header");
    std::vector<double> anchors(nrows, 0.0);
    std::vector<std::vector<double>> lines(nrows);
    std::size_t row = 0;
    double anchor = 0.0, coord = 0.0;
    while (in >> row >> anchor >> coord) {
      if (row >= nrows) bad_file(path, "row index out of range");
      if (lines[row].empty()) anchors[row] = anchor;
      else if (anchor != anchors[row]) bad_file(path, "conflicting anchors within a row");
      lines[row].push_back(coord);
    }
    std::vector<JaggedRow> rows;
    rows.reserve(nrows);
    for (std::size_t k = 0; k < nrows; ++k) {
      if (lines[k].empty()) bad_file(path, "row with no nodes");
      rows.push_back({anchors[k], Axis1D(std::move(lines[k]))});
    }
    return JaggedMesh(line_axis, std::move(rows));
  }

  bad_file(path, "unknown mesh kind '" + kind + "'");
}

}  // namespace pbm2d
