#pragma once
// Problem-description types and CFL arithmetic shared by every scheme.
//
// Conventions used throughout the library:
//   - intrinsic coordinates a1, a2 live on [0, L1] x [0, L2]
//   - growth rates G1, G2 advect mass toward larger a (non-negative speeds)
//   - fields are dense, row-major with a2 as the outer index so that
//     axis-1 sweeps run over contiguous memory

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pbm2d {

// ===== errors ==============================================================

/// Rejected setup: bad arguments, invalid config, scheme/problem mismatch.
/// The CLI maps this to exit code 2.
class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while running: CFL violation, non-finite value, singular transform.
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ===== scalar callback aliases =============================================

using Scalar1Fn = std::function<double(double)>;
using Scalar2Fn = std::function<double(double, double)>;
using Scalar3Fn = std::function<double(double, double, double)>;

// ===== geometry ============================================================

/// Rectangular domain [0, l1] x [0, l2].
struct Domain2D {
  double l1 = 0.0;
  double l2 = 0.0;
};

/// Strictly increasing 1D coordinate array. Monotonicity is rejected at
/// construction, not at use.
class Axis1D {
 public:
  explicit Axis1D(std::vector<double> points);

  /// n evenly spaced points on [lo, hi]; endpoints exact.
  static Axis1D uniform(double lo, double hi, std::size_t n);

  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  std::span<const double> points() const { return points_; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }

  /// Spacing of cell i, i.e. points[i] - points[i-1]; valid for i in [1, size).
  double spacing(std::size_t i) const { return points_[i] - points_[i - 1]; }
  double min_spacing() const;
  double max_spacing() const;

 private:
  std::vector<double> points_;
};

/// Tensor-product mesh (uniform or not) of two axes.
struct Grid2D {
  Axis1D axis1;
  Axis1D axis2;

  std::size_t n1() const { return axis1.size(); }
  std::size_t n2() const { return axis2.size(); }
  std::size_t node_count() const { return n1() * n2(); }
};

using GridPtr = std::shared_ptr<const Grid2D>;

/// One line of a jagged mesh: the coordinates along the line axis plus the
/// fixed coordinate (anchor) on the other axis.
struct JaggedRow {
  double anchor;
  Axis1D line;
};

/// Per-row mesh for the split sub-problems: every row has its own backward-
/// stepped line; anchors are strictly increasing across rows.
class JaggedMesh {
 public:
  /// line_axis: 1 if lines run along a1 (anchors are a2 values), else 2.
  JaggedMesh(int line_axis, std::vector<JaggedRow> rows);

  int line_axis() const { return line_axis_; }
  std::size_t row_count() const { return rows_.size(); }
  const JaggedRow& row(std::size_t k) const { return rows_[k]; }
  std::span<const JaggedRow> rows() const { return rows_; }
  std::size_t node_count() const;

 private:
  int line_axis_;
  std::vector<JaggedRow> rows_;
};

// ===== fields ==============================================================

/// Dense nodal values on a Grid2D. Storage is row-major with a2 outer:
/// value(j, k) = values[k * n1 + j].
class Field2D {
 public:
  explicit Field2D(GridPtr grid);                              // zero-filled
  Field2D(GridPtr grid, std::vector<double> values);           // shape-checked

  /// Evaluate f(a1, a2) at every node.
  static Field2D sample(GridPtr grid, const Scalar2Fn& f);

  std::size_t n1() const { return grid_->n1(); }
  std::size_t n2() const { return grid_->n2(); }
  std::size_t size() const { return values_.size(); }

  double operator()(std::size_t j, std::size_t k) const { return values_[k * n1_ + j]; }
  double& operator()(std::size_t j, std::size_t k) { return values_[k * n1_ + j]; }

  /// Contiguous a1-line at a2 index k.
  std::span<double> row(std::size_t k) { return {values_.data() + k * n1_, n1_}; }
  std::span<const double> row(std::size_t k) const { return {values_.data() + k * n1_, n1_}; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  double max_abs() const;

 private:
  GridPtr grid_;
  std::size_t n1_;
  std::vector<double> values_;
};

// ===== growth ==============================================================

enum class GrowthKind { Constant, PerAxis, Coupled, TimeOnly, SeparableTimeSize };

struct ConstantGrowth {
  double g1 = 0.0;  // g >= 0; zero is the degenerate single-axis limit
  double g2 = 0.0;
};

/// Optional closed forms for the exact schemes: map_i(a) = integral of 1/G_i
/// from 0 to a, with map_i(0) = 0, plus its inverse.
struct PerAxisClosedForms {
  Scalar1Fn map1, map1_inverse;
  Scalar1Fn map2, map2_inverse;
};

struct PerAxisGrowth {
  Scalar1Fn g1, g2;  // G_i(a_i) > 0 on the domain
  PerAxisClosedForms closed;
};

/// Optional closed-form characteristic feet for the enhanced split scheme:
/// foot_i(dt, a1, a2) is the axis-i coordinate a characteristic occupies dt
/// earlier with the other coordinate frozen.
struct CoupledFeet {
  Scalar3Fn foot1, foot2;
};

struct CoupledGrowth {
  Scalar2Fn g1, g2;  // G_i(a1, a2) > 0 on the domain
  CoupledFeet feet;
};

struct TimeAntiderivatives {
  Scalar1Fn tau1, tau2;  // tau_i(t) = integral of G_i over [0, t], optional
};

struct TimeOnlyGrowth {
  Scalar1Fn g1, g2;  // G_i(t) > 0
  TimeAntiderivatives closed;
};

struct SeparableGrowth {
  Scalar1Fn g1_time, g2_time;  // G_i(t, a_i) = g_time(t) * g_size(a_i)
  Scalar1Fn g1_size, g2_size;
  TimeAntiderivatives time_closed;
  PerAxisClosedForms size_closed;  // maps for the size factors
};

/// Tagged union over the growth-rate classes the schemes distinguish.
class GrowthSpec {
 public:
  static GrowthSpec constant(double g1, double g2);
  static GrowthSpec per_axis(Scalar1Fn g1, Scalar1Fn g2, PerAxisClosedForms closed = {});
  static GrowthSpec coupled(Scalar2Fn g1, Scalar2Fn g2, CoupledFeet feet = {});
  static GrowthSpec time_only(Scalar1Fn g1, Scalar1Fn g2, TimeAntiderivatives closed = {});
  static GrowthSpec separable(Scalar1Fn g1_time, Scalar1Fn g1_size, Scalar1Fn g2_time,
                              Scalar1Fn g2_size, TimeAntiderivatives time_closed = {},
                              PerAxisClosedForms size_closed = {});

  GrowthKind kind() const;
  bool time_dependent() const;

  /// Unified point evaluation; every class accepts (t, a1, a2) and ignores
  /// what it does not depend on.
  double rate1(double t, double a1, double a2) const;
  double rate2(double t, double a1, double a2) const;

  template <typename T>
  const T& as() const {
    return std::get<T>(v_);
  }
  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

  /// Samples G over the domain (and [0, t_end] for time-dependent classes)
  /// and throws SetupError on a non-positive value. Constant growth is exempt
  /// (g = 0 is the documented degenerate limit).
  void check_positive(const Domain2D& domain, double t_end) const;

  /// Maxima over the nodes of a uniform sampling grid; used by the stable-dt
  /// helpers and the schemes' default time steps.
  double max_rate1(const Domain2D& domain, double t_end) const;
  double max_rate2(const Domain2D& domain, double t_end) const;

 private:
  using V = std::variant<ConstantGrowth, PerAxisGrowth, CoupledGrowth, TimeOnlyGrowth,
                         SeparableGrowth>;
  explicit GrowthSpec(V v) : v_(std::move(v)) {}
  V v_;
};

// ===== sources =============================================================

enum class SourceKind { None, General, LinearSink };

/// Rows of the removal-transform table: which arguments lambda depends on.
enum class LambdaForm { Constant, A1, A2, T, TA1, TA2, A1A2, TA1A2 };

/// For constant lambda the transform weight has three equivalent shapes.
enum class ConstantMuBranch { T, A1, A2 };

struct GeneralSource {
  Scalar3Fn h;  // h(t, a1, a2), added to df/dt
};

struct LinearSink {
  LambdaForm form = LambdaForm::Constant;
  Scalar3Fn lambda;  // lambda(t, a1, a2); unused arguments ignored per form
  ConstantMuBranch branch = ConstantMuBranch::T;
  Scalar3Fn mu_closed_form;  // optional closed-form weight mu(t, a1, a2)
};

class SourceSpec {
 public:
  static SourceSpec none();
  static SourceSpec general(Scalar3Fn h);
  static SourceSpec linear_sink(LinearSink sink);

  SourceKind kind() const;
  const GeneralSource& general_term() const;
  const LinearSink& sink() const;

 private:
  using V = std::variant<std::monostate, GeneralSource, LinearSink>;
  explicit SourceSpec(V v) : v_(std::move(v)) {}
  V v_;
};

// ===== boundaries ==========================================================

/// Lower faces (a_i = 0): inflow with a zero ghost value.
enum class InflowRule { GhostZero };
/// Upper faces (a_i = L_i): zero-gradient outflow. Pure upwind stencils with
/// non-negative speeds never read the upper ghost, so this is free.
enum class OutflowRule { NoFlux };

struct BoundarySpec {
  InflowRule inflow = InflowRule::GhostZero;
  OutflowRule outflow = OutflowRule::NoFlux;
};

// ===== problem =============================================================

/// Complete benchmark problem: growth + source + domain + initial condition.
struct ProblemSpec {
  GrowthSpec growth;
  SourceSpec source;
  Domain2D domain;
  Scalar2Fn initial;  // f0(a1, a2)
  double t_end = 0.0;
  BoundarySpec boundary;

  /// Validates domain/t_end/initial and samples growth positivity.
  /// t_end = 0 is allowed (schemes return the initial condition).
  static ProblemSpec make(GrowthSpec growth, SourceSpec source, Domain2D domain,
                          Scalar2Fn initial, double t_end, BoundarySpec boundary = {});
};

// ===== CFL arithmetic ======================================================

/// (alpha, beta) = (g1 dt / da1, g2 dt / da2). Throws SetupError on
/// non-positive dt/da or negative g.
std::pair<double, double> cfl_numbers(double g1, double g2, double dt, double da1, double da2);

/// Von Neumann condition for the 2D upwind step: alpha, beta >= 0 and
/// alpha + beta <= 1 (small tolerance on the sum).
bool check_stability(double alpha, double beta) noexcept;

/// Largest stable dt for the unsplit 2D step: 1 / (maxG1/da1 + maxG2/da2).
/// Maxima are taken over the nodes of the uniform grid implied by da over the
/// domain (and over t in [0, t_end] for time-dependent growth).
double stable_dt_unsplit(const GrowthSpec& growth, double da1, double da2,
                         const Domain2D& domain, double t_end = 0.0);

/// Largest dt stable for both split sub-problems:
/// min(da1/maxG1, da2/maxG2). Never smaller than stable_dt_unsplit.
double stable_dt_split(const GrowthSpec& growth, double da1, double da2,
                       const Domain2D& domain, double t_end = 0.0);

}  // namespace pbm2d
