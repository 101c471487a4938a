#pragma once
// Error metrics, single-case runs, convergence ladders, CSV emission, and
// the JSON config files the CLI accepts. Everything here scores a scheme's
// output against the case's oracle on the scheme's own output nodes; fields
// are never resampled onto a common grid first.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbm2d/analytic.hpp"
#include "pbm2d/core.hpp"
#include "pbm2d/schemes.hpp"

namespace pbm2d {

// ===== error metrics =======================================================

/// sqrt(sum((y - y_ref)^2) / n) over paired samples. Equal lengths, n >= 1.
double rmse(std::span<const double> y, std::span<const double> y_ref);

/// max|y - y_ref| over paired samples. Equal lengths, n >= 1.
double mae(std::span<const double> y, std::span<const double> y_ref);

// ===== reports =============================================================

/// One scored run. n1/n2 are the requested resolution knob (schemes marching
/// on their own nonuniform meshes still report the knob, the mesh node count
/// lives in the run's MeshBuildReport). 0 <= rmse <= mae always holds.
struct ErrorReport {
  SchemeId scheme = SchemeId::ConUniformUpwind;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double dt = 0.0;  // the step actually used
  double rmse = 0.0;
  double mae = 0.0;
  /// Recorded for context only; never asserted and the one CSV column that
  /// varies between identical runs.
  double wall_time_seconds = 0.0;
};

/// Reports over a refinement ladder, coarse to fine, plus the observed order
/// between each adjacent pair: log(e_coarse/e_fine) / log(h_coarse/h_fine).
/// Pairs with an error at the precision floor (<= 1e-13) report NaN, the
/// "machine precision, order undefined" outcome of the exact schemes.
struct ConvergenceTable {
  std::vector<ErrorReport> reports;
  std::vector<double> observed_order;  // size reports.size() - 1
};

// ===== single-case runs ====================================================

/// Where the fine-mesh reference cache lives when the caller does not say:
/// <system temp>/pbm2d-reference-cache.
std::filesystem::path default_cache_dir();

struct RunCaseOptions {
  /// Scheme knobs, including dt (unset picks the scheme family's default).
  AdvanceOptions advance;
  /// Write the final field as CSV ("a1,a2,value") here.
  std::optional<std::filesystem::path> dump_field;
  /// Cache directory for the source-driven case's reference; empty means
  /// default_cache_dir().
  std::filesystem::path cache_dir;
  /// Resolution and step of that reference. The defaults keep it one CFL = 1
  /// run at 4x the finest benchmark ladder rung.
  std::size_t reference_n = 801;
  double reference_dt = 0.0025;
};

/// Advances the case with the scheme and scores the final field against the
/// case's closed form evaluated at the output nodes. The source-driven case
/// has no closed form: it is scored against the cached fine-mesh reference,
/// bilinearly interpolated to the output nodes.
ErrorReport run_case(const CaseDefinition& cs, SchemeId scheme, std::size_t n1, std::size_t n2,
                     const RunCaseOptions& options = {});

// ===== convergence studies =================================================

struct LadderRung {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  /// Unset falls back to options.advance.dt, and past that to the scheme
  /// default at this rung's resolution.
  std::optional<double> dt;
};

/// run_case per rung, rungs in parallel, reports collected in ladder order.
/// Needs >= 3 rungs, strictly increasing in node count. For the
/// source-driven case the reference is generated (or loaded) once before
/// the rungs launch.
ConvergenceTable convergence_study(const CaseDefinition& cs, SchemeId scheme,
                                   std::span<const LadderRung> ladder,
                                   const RunCaseOptions& options = {});

// ===== CSV emission ========================================================

/// "a1,a2,value" header, one node per line (a2 outer), 17 significant
/// digits. Identical runs produce bit-identical dumps.
std::string field_csv(const Field2D& field);
void write_field_csv(const std::filesystem::path& path, const Field2D& field);

std::string report_csv_header();  // scheme,n1,n2,dt,rmse,mae,wall_time_seconds
std::string report_csv_row(const ErrorReport& report);

/// Header plus one row per rung with a trailing observed_order column
/// (empty on the coarsest rung, "nan" when undefined).
std::string convergence_csv(const ConvergenceTable& table);

// ===== config files ========================================================

/// A run description read from a JSON file. Every field mirrors a CLI flag;
/// the CLI fills in whatever the command line left unset, so explicit flags
/// always win over the file.
///
/// Schema (all keys optional, unknown keys rejected):
///   {
///     "case": "case3",                  // case1..case5, appendix3, custom
///     "scheme": "split-exact",
///     "n1": 101, "n2": 101,
///     "dt": 0.1,
///     "axis2_first": false,
///     "source_first": false,
///     "quadrature_panels": 4096,
///     "ladder": [26, 51, 101],          // square rungs for converge
///     "gamma": 0.5,                     // mesh budget split
///     "out": "table.csv",
///     "dump_field": "field.csv",
///     "cache_dir": "ref-cache",
///     "custom": { ... }                 // required iff case == "custom"
///   }
///
/// The "custom" block describes a source-free problem with a Gaussian seed:
///   {
///     "l1": 2.0, "l2": 2.0, "t_end": 1.0,
///     "growth": {"kind": "constant", "g1": 1.0, "g2": 1.0},
///     "seed": {"amplitude": 50.0, "center1": 0.4, "center2": 0.4,
///              "width2": 0.005}         // seed block optional
///   }
/// Affine growth uses {"kind": "affine", "g1": {"c","k1","k2"}, "g2": ...}
/// with G_i = c + k1*a1 + k2*a2. Rates must decouple per axis (cross slope
/// zero; the single-coordinate maps are then attached in closed form) or
/// depend on a1 + a2 only (k1 == k2); anything else is rejected.
struct ConfigFile {
  std::optional<std::string> case_name;
  std::optional<ProblemSpec> custom;  // built eagerly when case == "custom"
  std::optional<std::string> scheme;
  std::optional<std::size_t> n1, n2;
  std::optional<double> dt;
  std::optional<bool> axis2_first, source_first;
  std::optional<std::size_t> quadrature_panels;
  std::vector<std::size_t> ladder;
  std::optional<double> gamma;
  std::optional<std::string> out, dump_field, cache_dir;
};

ConfigFile load_config(const std::filesystem::path& path);

}  // namespace pbm2d
