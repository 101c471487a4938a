#include "pbm2d/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pbm2d {

namespace {

bool finite(double x) { return std::isfinite(x); }

// Uniform sample points including both endpoints.
std::vector<double> sample_points(double lo, double hi, std::size_t n) {
  std::vector<double> pts(n);
  for (std::size_t i = 0; i < n; ++i)
    pts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  pts.back() = hi;
  return pts;
}

}  // namespace

// ===== Axis1D ==============================================================

Axis1D::Axis1D(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw SetupError("Axis1D needs at least two points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!finite(points_[i])) throw SetupError("Axis1D point is not finite");
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw SetupError("Axis1D points must be strictly increasing");
  }
}

Axis1D Axis1D::uniform(double lo, double hi, std::size_t n) {
  if (n < 2) throw SetupError("Axis1D::uniform needs n >= 2");
  if (!(hi > lo)) throw SetupError("Axis1D::uniform needs hi > lo");
  return Axis1D(sample_points(lo, hi, n));
}

double Axis1D::min_spacing() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < points_.size(); ++i) m = std::min(m, spacing(i));
  return m;
}

double Axis1D::max_spacing() const {
  double m = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) m = std::max(m, spacing(i));
  return m;
}

// ===== JaggedMesh ==========================================================

JaggedMesh::JaggedMesh(int line_axis, std::vector<JaggedRow> rows)
    : line_axis_(line_axis), rows_(std::move(rows)) {
  if (line_axis_ != 1 && line_axis_ != 2) throw SetupError("JaggedMesh line_axis must be 1 or 2");
  if (rows_.empty()) throw SetupError("JaggedMesh needs at least one row");
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    if (!finite(rows_[k].anchor)) throw SetupError("JaggedMesh anchor is not finite");
    if (k > 0 && !(rows_[k].anchor > rows_[k - 1].anchor))
      throw SetupError("JaggedMesh anchors must be strictly increasing");
  }
}

std::size_t JaggedMesh::node_count() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.line.size();
  return n;
}

// ===== Field2D =============================================================

Field2D::Field2D(GridPtr grid)
    : grid_(std::move(grid)), n1_(grid_->n1()), values_(grid_->node_count(), 0.0) {}

Field2D::Field2D(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), n1_(grid_->n1()), values_(std::move(values)) {
  if (values_.size() != grid_->node_count())
    throw SetupError("Field2D value count does not match grid");
}

Field2D Field2D::sample(GridPtr grid, const Scalar2Fn& f) {
  if (!f) throw SetupError("Field2D::sample needs a callback");
  Field2D out(std::move(grid));
  const auto& g = out.grid();
  for (std::size_t k = 0; k < g.n2(); ++k)
    for (std::size_t j = 0; j < g.n1(); ++j) out(j, k) = f(g.axis1[j], g.axis2[k]);
  return out;
}

double Field2D::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

// ===== GrowthSpec ==========================================================

GrowthSpec GrowthSpec::constant(double g1, double g2) {
  if (!finite(g1) || !finite(g2) || g1 < 0.0 || g2 < 0.0)
    throw SetupError("constant growth needs finite g1, g2 >= 0");
  return GrowthSpec(V{ConstantGrowth{g1, g2}});
}

GrowthSpec GrowthSpec::per_axis(Scalar1Fn g1, Scalar1Fn g2, PerAxisClosedForms closed) {
  if (!g1 || !g2) throw SetupError("per-axis growth needs both rate callbacks");
  return GrowthSpec(V{PerAxisGrowth{std::move(g1), std::move(g2), std::move(closed)}});
}

GrowthSpec GrowthSpec::coupled(Scalar2Fn g1, Scalar2Fn g2, CoupledFeet feet) {
  if (!g1 || !g2) throw SetupError("coupled growth needs both rate callbacks");
  return GrowthSpec(V{CoupledGrowth{std::move(g1), std::move(g2), std::move(feet)}});
}

GrowthSpec GrowthSpec::time_only(Scalar1Fn g1, Scalar1Fn g2, TimeAntiderivatives closed) {
  if (!g1 || !g2) throw SetupError("time-only growth needs both rate callbacks");
  return GrowthSpec(V{TimeOnlyGrowth{std::move(g1), std::move(g2), std::move(closed)}});
}

GrowthSpec GrowthSpec::separable(Scalar1Fn g1_time, Scalar1Fn g1_size, Scalar1Fn g2_time,
                                 Scalar1Fn g2_size, TimeAntiderivatives time_closed,
                                 PerAxisClosedForms size_closed) {
  if (!g1_time || !g1_size || !g2_time || !g2_size)
    throw SetupError("separable growth needs all four factor callbacks");
  return GrowthSpec(V{SeparableGrowth{std::move(g1_time), std::move(g2_time), std::move(g1_size),
                                      std::move(g2_size), std::move(time_closed),
                                      std::move(size_closed)}});
}

GrowthKind GrowthSpec::kind() const {
  switch (v_.index()) {
    case 0: return GrowthKind::Constant;
    case 1: return GrowthKind::PerAxis;
    case 2: return GrowthKind::Coupled;
    case 3: return GrowthKind::TimeOnly;
    default: return GrowthKind::SeparableTimeSize;
  }
}

bool GrowthSpec::time_dependent() const {
  return kind() == GrowthKind::TimeOnly || kind() == GrowthKind::SeparableTimeSize;
}

double GrowthSpec::rate1(double t, double a1, double a2) const {
  switch (kind()) {
    case GrowthKind::Constant: return as<ConstantGrowth>().g1;
    case GrowthKind::PerAxis: return as<PerAxisGrowth>().g1(a1);
    case GrowthKind::Coupled: return as<CoupledGrowth>().g1(a1, a2);
    case GrowthKind::TimeOnly: return as<TimeOnlyGrowth>().g1(t);
    default: {
      const auto& s = as<SeparableGrowth>();
      return s.g1_time(t) * s.g1_size(a1);
    }
  }
}

double GrowthSpec::rate2(double t, double a1, double a2) const {
  switch (kind()) {
    case GrowthKind::Constant: return as<ConstantGrowth>().g2;
    case GrowthKind::PerAxis: return as<PerAxisGrowth>().g2(a2);
    case GrowthKind::Coupled: return as<CoupledGrowth>().g2(a1, a2);
    case GrowthKind::TimeOnly: return as<TimeOnlyGrowth>().g2(t);
    default: {
      const auto& s = as<SeparableGrowth>();
      return s.g2_time(t) * s.g2_size(a2);
    }
  }
}

namespace {

constexpr std::size_t kSpatialSamples = 65;
constexpr std::size_t kTimeSamples = 33;

// Applies fn to every (t, a1, a2) on the sampling lattice for this growth
// class; 2D spatial coupling only sampled where the class needs it.
template <typename Fn>
void for_growth_samples(const GrowthSpec& g, const Domain2D& d, double t_end, Fn&& fn) {
  auto a1s = sample_points(0.0, d.l1, kSpatialSamples);
  auto a2s = sample_points(0.0, d.l2, kSpatialSamples);
  auto ts = g.time_dependent() ? sample_points(0.0, std::max(t_end, 0.0), kTimeSamples)
                               : std::vector<double>{0.0};
  const bool coupled = g.kind() == GrowthKind::Coupled;
  for (double t : ts) {
    if (coupled) {
      for (double a1 : a1s)
        for (double a2 : a2s) fn(t, a1, a2);
    } else {
      for (double a1 : a1s) fn(t, a1, 0.0);
      for (double a2 : a2s) fn(t, 0.0, a2);
    }
  }
}

}  // namespace

void GrowthSpec::check_positive(const Domain2D& domain, double t_end) const {
  if (kind() == GrowthKind::Constant) return;  // g >= 0 validated at construction
  for_growth_samples(*this, domain, t_end, [&](double t, double a1, double a2) {
    const double r1 = rate1(t, a1, a2);
    const double r2 = rate2(t, a1, a2);
    if (!finite(r1) || !finite(r2) || r1 <= 0.0 || r2 <= 0.0)
      throw SetupError("growth rate must be finite and strictly positive on the domain");
  });
}

double GrowthSpec::max_rate1(const Domain2D& domain, double t_end) const {
  double m = 0.0;
  for_growth_samples(*this, domain, t_end,
                     [&](double t, double a1, double a2) { m = std::max(m, rate1(t, a1, a2)); });
  return m;
}

double GrowthSpec::max_rate2(const Domain2D& domain, double t_end) const {
  double m = 0.0;
  for_growth_samples(*this, domain, t_end,
                     [&](double t, double a1, double a2) { m = std::max(m, rate2(t, a1, a2)); });
  return m;
}

// ===== SourceSpec ==========================================================

SourceSpec SourceSpec::none() { return SourceSpec(V{std::monostate{}}); }

SourceSpec SourceSpec::general(Scalar3Fn h) {
  if (!h) throw SetupError("general source needs a callback");
  return SourceSpec(V{GeneralSource{std::move(h)}});
}

SourceSpec SourceSpec::linear_sink(LinearSink sink) {
  if (!sink.lambda) throw SetupError("linear sink needs a lambda callback");
  return SourceSpec(V{std::move(sink)});
}

SourceKind SourceSpec::kind() const {
  switch (v_.index()) {
    case 0: return SourceKind::None;
    case 1: return SourceKind::General;
    default: return SourceKind::LinearSink;
  }
}

const GeneralSource& SourceSpec::general_term() const {
  if (kind() != SourceKind::General) throw SetupError("source is not a general term");
  return std::get<GeneralSource>(v_);
}

const LinearSink& SourceSpec::sink() const {
  if (kind() != SourceKind::LinearSink) throw SetupError("source is not a linear sink");
  return std::get<LinearSink>(v_);
}

// ===== ProblemSpec =========================================================

ProblemSpec ProblemSpec::make(GrowthSpec growth, SourceSpec source, Domain2D domain,
                              Scalar2Fn initial, double t_end, BoundarySpec boundary) {
  if (!finite(domain.l1) || !finite(domain.l2) || domain.l1 <= 0.0 || domain.l2 <= 0.0)
    throw SetupError("domain lengths must be finite and positive");
  if (!finite(t_end) || t_end < 0.0) throw SetupError("t_end must be finite and >= 0");
  if (!initial) throw SetupError("problem needs an initial-condition callback");
  growth.check_positive(domain, t_end);
  return ProblemSpec{std::move(growth), std::move(source), domain,
                     std::move(initial), t_end,             boundary};
}

// ===== CFL arithmetic ======================================================

std::pair<double, double> cfl_numbers(double g1, double g2, double dt, double da1, double da2) {
  if (!finite(dt) || dt <= 0.0) throw SetupError("cfl_numbers needs dt > 0");
  if (!finite(da1) || !finite(da2) || da1 <= 0.0 || da2 <= 0.0)
    throw SetupError("cfl_numbers needs da1, da2 > 0");
  if (!finite(g1) || !finite(g2) || g1 < 0.0 || g2 < 0.0)
    throw SetupError("cfl_numbers needs g1, g2 >= 0");
  return {g1 * dt / da1, g2 * dt / da2};
}

bool check_stability(double alpha, double beta) noexcept {
  if (!finite(alpha) || !finite(beta)) return false;
  if (alpha < 0.0 || beta < 0.0) return false;
  return alpha + beta <= 1.0 + 1e-12;
}

namespace {

void check_spacings(double da1, double da2) {
  if (!finite(da1) || !finite(da2) || da1 <= 0.0 || da2 <= 0.0)
    throw SetupError("stable dt needs da1, da2 > 0");
}

}  // namespace

double stable_dt_unsplit(const GrowthSpec& growth, double da1, double da2, const Domain2D& domain,
                         double t_end) {
  check_spacings(da1, da2);
  const double m1 = growth.max_rate1(domain, t_end);
  const double m2 = growth.max_rate2(domain, t_end);
  const double denom = m1 / da1 + m2 / da2;
  if (denom <= 0.0) throw SetupError("growth vanishes on both axes; supply dt explicitly");
  return 1.0 / denom;
}

double stable_dt_split(const GrowthSpec& growth, double da1, double da2, const Domain2D& domain,
                       double t_end) {
  check_spacings(da1, da2);
  const double m1 = growth.max_rate1(domain, t_end);
  const double m2 = growth.max_rate2(domain, t_end);
  if (m1 <= 0.0 && m2 <= 0.0)
    throw SetupError("growth vanishes on both axes; supply dt explicitly");
  const double inf = std::numeric_limits<double>::infinity();
  return std::min(m1 > 0.0 ? da1 / m1 : inf, m2 > 0.0 ? da2 / m2 : inf);
}

}  // namespace pbm2d
