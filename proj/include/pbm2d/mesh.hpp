#pragma once

#include <cstddef>
#include <filesystem>
#include <variant>

#include "pbm2d/core.hpp"

namespace pbm2d {

// ===== build reports =======================================================

/// Summary emitted alongside a constructed mesh. Spacing extrema cover every
/// adjacent node pair: both axes for grids, all rows plus the anchor array
/// for jagged meshes.
struct MeshBuildReport {
  std::variant<Grid2D, JaggedMesh> mesh;
  std::size_t node_count = 0;
  double min_spacing = 0.0;
  double max_spacing = 0.0;
};

MeshBuildReport report_for(Grid2D grid);
MeshBuildReport report_for(JaggedMesh mesh);

// ===== construction ========================================================

/// Equispaced n1 x n2 grid spanning [0, L1] x [0, L2] inclusive. n >= 2.
Grid2D build_uniform(const Domain2D& domain, std::size_t n1, std::size_t n2);

/// Backward-stepped tensor grid for per-axis growth. Each axis is marched
/// down from its upper end with
///   step1 = 2*gamma*G1(a)*dt,   step2 = 2*(1-gamma)*G2(a)*dt,
/// keeping every node >= 0 and stopping before the march would cross zero.
/// gamma in [0, 1] splits the budget between the axes; 0.5 is the default
/// used throughout. Accepts PerAxis or Constant growth.
Grid2D build_nonuniform_cfl1(const GrowthSpec& growth, const Domain2D& domain, double dt,
                             double gamma = 0.5);

/// Per-row mesh for coupled growth. for_axis selects the direction the rows
/// run along. for_axis = 1: the anchor array in a2 is marched down from L2
/// with step dt*G2(L1, a2), and row k is an a1 line marched from L1 with
/// step dt*G1(a1, a2_k). for_axis = 2 mirrors the roles. Same termination
/// rule as build_nonuniform_cfl1. Accepts Coupled or Constant growth.
JaggedMesh build_jagged(const GrowthSpec& growth, const Domain2D& domain, double dt,
                        int for_axis);

// ===== plain-text serialization ============================================

/// Node files round-trip bit-exactly (17 significant digits).
/// Grid2D:      "grid <n1> <n2>" then one "a1 a2" pair per node, a2 outer.
/// JaggedMesh:  "jagged <line_axis> <rows>" then one "<row> <anchor> <coord>"
///              line per node.
void write_mesh(const std::filesystem::path& path, const Grid2D& grid);
void write_mesh(const std::filesystem::path& path, const JaggedMesh& mesh);
std::variant<Grid2D, JaggedMesh> read_mesh(const std::filesystem::path& path);

}  // namespace pbm2d
