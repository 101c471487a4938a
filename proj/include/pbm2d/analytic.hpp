#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string_view>

#include "pbm2d/core.hpp"

namespace pbm2d {

// ===== benchmark cases =====================================================

/// The five benchmark problems plus the fixed-grid variant of the third one
/// (same PDE; solved with the enhanced split scheme).
enum class CaseId { Case1, Case2, Case3, Case4, Case5, Appendix3 };

/// Accepts "case1".."case5" and "appendix3"; throws SetupError otherwise.
CaseId parse_case_id(std::string_view name);
std::string_view case_id_name(CaseId id);

/// A benchmark case: the problem statement plus its closed-form solution.
/// analytic is null only for Case4 (that case is benchmarked against a
/// fine-mesh reference instead).
struct CaseDefinition {
  CaseId id;
  ProblemSpec problem;
  Scalar3Fn analytic;
};

CaseDefinition case_definition(CaseId id);

// ===== closed-form solutions ===============================================

/// Shared Gaussian seed centered at (0.4, 0.4) with squared width 0.005.
double gaussian_bump(double a1, double a2, double amplitude = 50.0);

/// Unit-speed translation of the seed along both axes.
double exact_case1(double t, double a1, double a2);

/// Per-axis affine growth: the mass-weighted seed pulled back along each
/// axis's exponential characteristic, divided by the local rates.
double exact_case2(double t, double a1, double a2);

/// Coupled affine growth: seed evaluated at the linear-system feet, damped
/// by exp(-0.75 t). Throws NumericalError if the foot system degenerates
/// (impossible for t >= 0; guarded anyway).
double exact_case3(double t, double a1, double a2);

/// Unit-speed translation with a linear sink: zero below the inflow front,
/// otherwise the translated seed times exp(-(a1 + a2) t + t^2).
double exact_case5(double t, double a1, double a2);

// ===== characteristic feet (coupled affine growth) =========================

/// Axis-1 coordinate a characteristic of G1 = 0.25 + 0.5 (a1 + a2) occupied
/// time t earlier, holding a2 fixed. Satisfies
/// integral from foot to a1 of da / G1(a, a2) = t.
double characteristic_foot_case3(double t, double a1, double a2);

/// Axis-2 analog for G2 = 0.5 + 0.25 (a1 + a2), holding a1 fixed.
double characteristic_foot2_case3(double t, double a1, double a2);

// ===== fine-mesh reference (source-driven case) ============================

/// The source-driven case has no closed form, so its benchmark reference is
/// the nonhomogeneous split scheme itself on a much finer n x n grid (the
/// harness default is 801 x 801 with the CFL = 1 step 0.0025).
///
/// Results are memoized under cache_dir, one file per (n, dt, t_end) key.
/// Files carry a versioned binary header and are written atomically
/// (temp file + rename); an unreadable, truncated, or mismatched file is
/// silently recomputed and rewritten. An empty cache_dir disables the cache.
/// t_end defaults to the case's own horizon; t_end = 0 is the sampled
/// initial condition.
///
/// Cache format v1, native byte order (the cache is machine-local):
///   bytes  0..7   magic "PBM2DRF1"
///   bytes  8..15  case id, NUL-padded ("case4")
///   u64 n1, u64 n2, f64 dt, f64 t_end
///   u64 FNV-1a hash of the payload bytes
///   f64 * n1*n2 nodal values, a2-major (Field2D layout)
Field2D reference_case4(std::size_t n, double dt, const std::filesystem::path& cache_dir,
                        std::optional<double> t_end = {});

}  // namespace pbm2d
