#include "pbm2d/schemes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pbm2d/interp.hpp"
#include "pbm2d/kernels.hpp"
#include "pbm2d/transform.hpp"

namespace pbm2d {

// ===== identifier tables ===================================================

namespace {

struct IdRow {
  SchemeId id;
  std::string_view name;
};

constexpr std::array<IdRow, 14> kIdTable{{
    {SchemeId::ConUniformUpwind, "con-uniform-upwind"},
    {SchemeId::TransUniformUpwind, "trans-uniform-upwind"},
    {SchemeId::ConNonuniformUpwind, "con-nonuniform-upwind"},
    {SchemeId::TransNonuniformUpwind, "trans-nonuniform-upwind"},
    {SchemeId::ExactAnalytical, "exact-analytical"},
    {SchemeId::ExactNumerical, "exact-numerical"},
    {SchemeId::ExactInterpolation, "exact-interpolation"},
    {SchemeId::SplitConUniformUpwind, "split-con-uniform-upwind"},
    {SchemeId::SplitTransUniformUpwind, "split-trans-uniform-upwind"},
    {SchemeId::SplitTransNonuniformUpwind, "split-trans-nonuniform-upwind"},
    {SchemeId::SplitExact, "split-exact"},
    {SchemeId::SplitExactEnhanced, "split-exact-enhanced"},
    {SchemeId::SplitNonhomogeneous, "split-nonhomogeneous"},
    {SchemeId::MuExact, "mu-exact"},
}};

constexpr std::array<SchemeId, kIdTable.size()> kAllIds = [] {
  std::array<SchemeId, kIdTable.size()> ids{};
  for (std::size_t i = 0; i < kIdTable.size(); ++i) ids[i] = kIdTable[i].id;
  return ids;
}();

const char* growth_kind_name(GrowthKind k) {
  switch (k) {
    case GrowthKind::Constant: return "constant";
    case GrowthKind::PerAxis: return "per-axis";
    case GrowthKind::Coupled: return "coupled";
    case GrowthKind::TimeOnly: return "time-only";
    case GrowthKind::SeparableTimeSize: return "separable time-size";
  }
  return "?";
}

const char* source_kind_name(SourceKind k) {
  switch (k) {
    case SourceKind::None: return "no source term";
    case SourceKind::General: return "a general source term";
    case SourceKind::LinearSink: return "a linear sink";
  }
  return "?";
}

}  // namespace

SchemeId parse_scheme_id(std::string_view name) {
  for (const auto& row : kIdTable)
    if (row.name == name) return row.id;
  throw SetupError("unknown scheme '" + std::string(name) + "'");
}

std::string_view scheme_id_name(SchemeId id) {
  for (const auto& row : kIdTable)
    if (row.id == id) return row.name;
  throw SetupError("unknown scheme id");
}

std::span<const SchemeId> all_scheme_ids() { return kAllIds; }

// ===== compatibility =======================================================

bool scheme_supports(SchemeId scheme, GrowthKind growth, SourceKind source) {
  using GK = GrowthKind;
  using SK = SourceKind;
  const bool size_only = growth == GK::Constant || growth == GK::PerAxis || growth == GK::Coupled;
  const bool tensor = growth == GK::Constant || growth == GK::PerAxis;
  switch (scheme) {
    case SchemeId::ConUniformUpwind:
      return size_only;  // any source
    case SchemeId::TransUniformUpwind:
    case SchemeId::ConNonuniformUpwind:
    case SchemeId::TransNonuniformUpwind:
      return tensor && source == SK::None;
    case SchemeId::ExactAnalytical:
    case SchemeId::ExactNumerical:
      if (growth == GK::Coupled) return false;
      if (source == SK::General) return false;
      if (source == SK::LinearSink) return growth == GK::Constant;
      return true;
    case SchemeId::ExactInterpolation:
      return growth == GK::Constant && source == SK::None;
    case SchemeId::SplitConUniformUpwind:
    case SchemeId::SplitTransUniformUpwind:
      return size_only && source == SK::None;
    case SchemeId::SplitTransNonuniformUpwind:
    case SchemeId::SplitExact:
      return (growth == GK::Constant || growth == GK::Coupled) && source == SK::None;
    case SchemeId::SplitExactEnhanced:
      return growth == GK::Coupled && source == SK::None;
    case SchemeId::SplitNonhomogeneous:
      return growth == GK::Constant;  // any source
    case SchemeId::MuExact:
      return growth == GK::Constant && source == SK::LinearSink;
  }
  return false;
}

void require_compatible(SchemeId scheme, const ProblemSpec& problem) {
  const GrowthKind g = problem.growth.kind();
  const SourceKind s = problem.source.kind();
  const std::string who = "scheme " + std::string(scheme_id_name(scheme));
  if (!scheme_supports(scheme, g, s))
    throw SetupError(who + " does not support " + growth_kind_name(g) + " growth with " +
                     source_kind_name(s));

  if (scheme == SchemeId::ExactAnalytical) {
    if (g == GrowthKind::PerAxis) {
      const auto& c = problem.growth.as<PerAxisGrowth>().closed;
      if (!c.map1 || !c.map1_inverse || !c.map2 || !c.map2_inverse)
        throw SetupError(who +
                         " needs closed-form coordinate maps on the per-axis growth;"
                         " supply PerAxisClosedForms or use exact-numerical");
    } else if (g == GrowthKind::TimeOnly) {
      const auto& c = problem.growth.as<TimeOnlyGrowth>().closed;
      if (!c.tau1 || !c.tau2)
        throw SetupError(who +
                         " needs closed-form time antiderivatives on the time-only growth;"
                         " supply TimeAntiderivatives or use exact-numerical");
    } else if (g == GrowthKind::SeparableTimeSize) {
      const auto& sg = problem.growth.as<SeparableGrowth>();
      const bool maps = sg.size_closed.map1 && sg.size_closed.map1_inverse &&
                        sg.size_closed.map2 && sg.size_closed.map2_inverse;
      if (!maps || !sg.time_closed.tau1 || !sg.time_closed.tau2)
        throw SetupError(who +
                         " needs closed-form size maps and time antiderivatives on the"
                         " separable growth; supply them or use exact-numerical");
    }
  }
  if (scheme == SchemeId::SplitExactEnhanced) {
    const auto& feet = problem.growth.as<CoupledGrowth>().feet;
    if (!feet.foot1 || !feet.foot2)
      throw SetupError(who + " needs closed-form characteristic feet on the coupled growth");
  }
}

// ===== splitting ===========================================================

Field2D lie_split_step(const Field2D& field, const GrowthSpec& growth, double dt,
                       const PerAxisSolver& solver, bool axis2_first) {
  if (!solver) throw SetupError("lie_split_step: missing per-axis solver");
  if (!(dt >= 0.0)) throw SetupError("lie_split_step: dt must be non-negative");
  const int first = axis2_first ? 2 : 1;
  const int second = axis2_first ? 1 : 2;
  Field2D star = solver(field, growth, first, dt);
  return solver(star, growth, second, dt);
}

// ===== shared plumbing =====================================================

namespace {

GridPtr make_grid(Grid2D grid) { return std::make_shared<const Grid2D>(std::move(grid)); }

GridPtr uniform_grid(const ProblemSpec& p, std::size_t n1, std::size_t n2) {
  return make_grid(build_uniform(p.domain, n1, n2));
}

// donor-side cell width; the first node reuses its neighbor's width
double donor_width(const Axis1D& axis, std::size_t j) {
  return j == 0 ? axis.spacing(1) : axis.spacing(j);
}

struct StepPlan {
  std::size_t steps = 0;
  double dt = 0.0;       // nominal step
  double last_dt = 0.0;  // final step; == dt unless truncated
};

/// Splits [0, t_end] into steps of dt. Shift schemes demand divisibility;
/// everyone else truncates the final step to land exactly on t_end.
StepPlan plan_steps(double t_end, double dt, bool needs_divisible, std::string_view scheme) {
  if (!(dt > 0.0)) throw SetupError(std::string(scheme) + ": dt must be positive");
  if (t_end <= 0.0) return {0, dt, dt};
  if (needs_divisible) {
    const double n = std::round(t_end / dt);
    if (n < 1.0 || std::abs(n * dt - t_end) > 1e-9 * std::max(1.0, t_end))
      throw SetupError(std::string(scheme) + ": t_end = " + std::to_string(t_end) +
                       " must be an integer multiple of dt = " + std::to_string(dt));
    return {static_cast<std::size_t>(n), dt, dt};
  }
  auto n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  if (n == 0) n = 1;
  const double last = t_end - static_cast<double>(n - 1) * dt;
  return {n, dt, last};
}

double step_size(const StepPlan& plan, std::size_t i) {
  return i + 1 == plan.steps ? plan.last_dt : plan.dt;
}

/// CFL = 1 step for constant growth: min over axes with motion of da/g.
double cfl_one_dt(const ConstantGrowth& g, double da1, double da2, double t_end) {
  double dt = t_end > 0.0 ? t_end : 1.0;  // both speeds zero: one idle step
  if (g.g1 > 0.0) dt = std::min(dt, da1 / g.g1);
  if (g.g2 > 0.0) dt = std::min(dt, da2 / g.g2);
  return dt;
}

double default_dt(SchemeId scheme, const ProblemSpec& p, std::size_t n1, std::size_t n2) {
  const double da1 = p.domain.l1 / static_cast<double>(n1 - 1);
  const double da2 = p.domain.l2 / static_cast<double>(n2 - 1);
  switch (scheme) {
    case SchemeId::ConUniformUpwind:
    case SchemeId::TransUniformUpwind:
      return stable_dt_unsplit(p.growth, da1, da2, p.domain, p.t_end);
    case SchemeId::ConNonuniformUpwind:
    case SchemeId::TransNonuniformUpwind:
    case SchemeId::SplitConUniformUpwind:
    case SchemeId::SplitTransUniformUpwind:
    case SchemeId::SplitTransNonuniformUpwind:
    case SchemeId::SplitExact:
    case SchemeId::SplitExactEnhanced:
      return stable_dt_split(p.growth, da1, da2, p.domain, p.t_end);
    case SchemeId::ExactInterpolation:
    case SchemeId::SplitNonhomogeneous:
    case SchemeId::MuExact:
      return cfl_one_dt(p.growth.as<ConstantGrowth>(), da1, da2, p.t_end);
    case SchemeId::ExactAnalytical:
    case SchemeId::ExactNumerical:
      if (p.source.kind() == SourceKind::LinearSink)  // routed to the removal driver
        return cfl_one_dt(p.growth.as<ConstantGrowth>(), da1, da2, p.t_end);
      return p.t_end > 0.0 ? p.t_end : 1.0;  // dt is free; one composed step
  }
  throw SetupError("default_dt: unknown scheme");
}

/// Per-node growth rates sampled once; valid for time-independent classes.
Field2D sample_rate(GridPtr grid, const GrowthSpec& g, int axis) {
  return Field2D::sample(std::move(grid), [&g, axis](double a1, double a2) {
    return axis == 1 ? g.rate1(0.0, a1, a2) : g.rate2(0.0, a1, a2);
  });
}

/// Applies op to every axis-aligned line. op(line, other_index) returns the
/// updated line; axis-2 lines are gathered into a contiguous scratch copy.
template <typename Op>
void for_each_line(Field2D& f, int axis, Op&& op) {
  if (axis == 1) {
    for (std::size_t k = 0; k < f.n2(); ++k) {
      const std::vector<double> out = op(std::span<const double>(f.row(k)), k);
      std::copy(out.begin(), out.end(), f.row(k).begin());
    }
    return;
  }
  std::vector<double> line(f.n2());
  for (std::size_t j = 0; j < f.n1(); ++j) {
    for (std::size_t k = 0; k < f.n2(); ++k) line[k] = f(j, k);
    const std::vector<double> out = op(std::span<const double>(line), j);
    for (std::size_t k = 0; k < f.n2(); ++k) f(j, k) = out[k];
  }
}

/// Moves the field `cells` nodes toward larger coordinates along axis, with
/// zero inflow. The CFL = 1 upwind update is exactly this memory move.
void shift_axis(Field2D& f, int axis, std::size_t cells) {
  if (cells == 0) return;
  if (axis == 1) {
    for (std::size_t k = 0; k < f.n2(); ++k) {
      auto row = f.row(k);
      if (cells >= row.size()) {
        std::fill(row.begin(), row.end(), 0.0);
        continue;
      }
      for (std::size_t j = row.size(); j-- > cells;) row[j] = row[j - cells];
      std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(cells), 0.0);
    }
    return;
  }
  for (std::size_t k = f.n2(); k-- > 0;) {
    auto dst = f.row(k);
    if (k < cells) {
      std::fill(dst.begin(), dst.end(), 0.0);
    } else {
      const auto src = f.row(k - cells);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
}

/// Whole number of cells a constant-speed CFL shift covers per step.
std::size_t integer_shift(double g, double dt, double da, std::string_view scheme) {
  const double alpha = g * dt / da;
  const double n = std::round(alpha);
  if (std::abs(alpha - n) > 1e-9 * std::max(1.0, alpha))
    throw SetupError(std::string(scheme) + ": advection shifts need an integer per-axis CFL;"
                                           " got g*dt/da = " +
                     std::to_string(alpha));
  return static_cast<std::size_t>(n);
}

RunResult finish(Field2D field, const StepPlan& plan, MeshBuildReport report) {
  return RunResult{std::move(field), plan.steps, plan.dt, std::move(report)};
}

// ===== uniform-grid upwind drivers =========================================

RunResult run_unsplit_uniform(const ProblemSpec& p, SchemeId scheme, std::size_t n1,
                              std::size_t n2, double dt) {
  const GridPtr grid = uniform_grid(p, n1, n2);
  const StepPlan plan = plan_steps(p.t_end, dt, false, scheme_id_name(scheme));
  Field2D f = Field2D::sample(grid, p.initial);
  if (plan.steps == 0) return finish(std::move(f), plan, report_for(*grid));

  const bool trans = scheme == SchemeId::TransUniformUpwind;
  const Field2D g1 = sample_rate(grid, p.growth, 1);
  const Field2D g2 = sample_rate(grid, p.growth, 2);
  if (trans) f = to_advective(f, p.growth, AxisScope::Both);

  double t = 0.0;
  for (std::size_t i = 0; i < plan.steps; ++i) {
    const double dt_i = step_size(plan, i);
    Field2D next = trans ? advective_step_2d(f, g1, g2, dt_i, p.boundary)
                         : conservative_step_2d(f, g1, g2, dt_i, p.boundary);
    // sources enter the same explicit update, evaluated on the pre-step field
    if (p.source.kind() == SourceKind::General) {
      next = euler_source_step(next, p.source.general_term().h, t, dt_i);
    } else if (p.source.kind() == SourceKind::LinearSink) {
      const auto& grid_ref = f.grid();
      const auto& lambda = p.source.sink().lambda;
      for (std::size_t k = 0; k < f.n2(); ++k)
        for (std::size_t j = 0; j < f.n1(); ++j)
          next(j, k) -= dt_i * lambda(t, grid_ref.axis1[j], grid_ref.axis2[k]) * f(j, k);
    }
    f = std::move(next);
    t += dt_i;
  }
  if (trans) f = from_advective(f, p.growth, AxisScope::Both);
  return finish(std::move(f), plan, report_for(*grid));
}

RunResult run_split_uniform(const ProblemSpec& p, SchemeId scheme, std::size_t n1, std::size_t n2,
                            double dt, bool axis2_first) {
  const GridPtr grid = uniform_grid(p, n1, n2);
  const StepPlan plan = plan_steps(p.t_end, dt, false, scheme_id_name(scheme));
  Field2D f = Field2D::sample(grid, p.initial);
  if (plan.steps == 0) return finish(std::move(f), plan, report_for(*grid));

  const bool trans = scheme == SchemeId::SplitTransUniformUpwind;
  const Field2D g1 = sample_rate(grid, p.growth, 1);
  const Field2D g2 = sample_rate(grid, p.growth, 2);

  const PerAxisSolver solver = [&](const Field2D& in, const GrowthSpec& growth, int axis,
                                   double dt_i) {
    const Field2D& g = axis == 1 ? g1 : g2;
    const Axis1D& coords = axis == 1 ? in.grid().axis1 : in.grid().axis2;
    Field2D work = trans
                       ? to_advective(in, growth, axis == 1 ? AxisScope::Axis1 : AxisScope::Axis2)
                       : in;
    if (trans) {
      for_each_line(work, axis, [&](std::span<const double> line, std::size_t other) {
        SweepPlan sweep{axis, std::vector<double>(line.size()), p.boundary};
        for (std::size_t i = 0; i < line.size(); ++i) {
          const double gv = axis == 1 ? g(i, other) : g(other, i);
          sweep.cfl_per_cell[i] = gv * dt_i / donor_width(coords, i);
        }
        return upwind_sweep_1d(line, sweep, 0.0);
      });
      return from_advective(work, growth, axis == 1 ? AxisScope::Axis1 : AxisScope::Axis2);
    }
    for_each_line(work, axis, [&](std::span<const double> line, std::size_t other) {
      std::vector<double> gv(line.size()), ratio(line.size());
      for (std::size_t i = 0; i < line.size(); ++i) {
        gv[i] = axis == 1 ? g(i, other) : g(other, i);
        ratio[i] = dt_i / donor_width(coords, i);
      }
      return conservative_sweep_1d(line, gv, ratio, 0.0);
    });
    return work;
  };

  for (std::size_t i = 0; i < plan.steps; ++i)
    f = lie_split_step(f, p.growth, step_size(plan, i), solver, axis2_first);
  return finish(std::move(f), plan, report_for(*grid));
}

// ===== nonuniform tensor-mesh driver =======================================

RunResult run_sweep_nonuniform(const ProblemSpec& p, SchemeId scheme, double dt) {
  const GridPtr grid = make_grid(build_nonuniform_cfl1(p.growth, p.domain, dt));
  const StepPlan plan = plan_steps(p.t_end, dt, false, scheme_id_name(scheme));
  Field2D f = Field2D::sample(grid, p.initial);
  if (plan.steps == 0) return finish(std::move(f), plan, report_for(*grid));

  const bool trans = scheme == SchemeId::TransNonuniformUpwind;
  // per-axis rates: tensor growth, so each axis needs only its own coordinate
  const auto axis_rates = [&](const Axis1D& coords, int axis) {
    std::vector<double> g(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
      g[i] = axis == 1 ? p.growth.rate1(0.0, coords[i], 0.0) : p.growth.rate2(0.0, 0.0, coords[i]);
    return g;
  };
  const std::vector<double> g1 = axis_rates(grid->axis1, 1);
  const std::vector<double> g2 = axis_rates(grid->axis2, 2);

  if (trans) f = to_advective(f, p.growth, AxisScope::Both);
  for (std::size_t i = 0; i < plan.steps; ++i) {
    const double dt_i = step_size(plan, i);
    for (int axis : {1, 2}) {
      const Axis1D& coords = axis == 1 ? grid->axis1 : grid->axis2;
      const std::vector<double>& g = axis == 1 ? g1 : g2;
      // local CFL is 1 by mesh construction wherever growth matches the law
      if (trans) {
        SweepPlan sweep{axis, std::vector<double>(coords.size()), p.boundary};
        for (std::size_t n = 0; n < coords.size(); ++n)
          sweep.cfl_per_cell[n] = g[n] * dt_i / donor_width(coords, n);
        for_each_line(f, axis, [&](std::span<const double> line, std::size_t) {
          return upwind_sweep_1d(line, sweep, 0.0);
        });
      } else {
        std::vector<double> ratio(coords.size());
        for (std::size_t n = 0; n < coords.size(); ++n) ratio[n] = dt_i / donor_width(coords, n);
        for_each_line(f, axis, [&](std::span<const double> line, std::size_t) {
          return conservative_sweep_1d(line, g, ratio, 0.0);
        });
      }
    }
  }
  if (trans) f = from_advective(f, p.growth, AxisScope::Both);
  return finish(std::move(f), plan, report_for(*grid));
}

// ===== characteristic drivers ==============================================

/// One axis of the composed characteristic evaluation: the output axis, the
/// matching transformed lattice, the displacement accumulated over the whole
/// run, and the per-axis conservative weight (null when it cancels).
struct CharacteristicAxis {
  Axis1D out;
  std::vector<double> tilde;
  std::optional<MonotoneMap> map;  // absent: transformed coordinate == physical
  double tau = 0.0;
  Scalar1Fn hat;
};

CharacteristicAxis characteristic_axis(const ProblemSpec& p, bool analytical,
                                       std::size_t quadrature_panels, int axis, std::size_t n) {
  const double length = axis == 1 ? p.domain.l1 : p.domain.l2;
  const double t_end = p.t_end;
  CharacteristicAxis out{Axis1D::uniform(0.0, length, n), {}, {}, 0.0, {}};

  const auto lattice_from_map = [&](const MonotoneMap& map) {
    const Axis1D tilde_axis = Axis1D::uniform(0.0, map.total(), n);
    std::vector<double> tilde(tilde_axis.points().begin(), tilde_axis.points().end());
    std::vector<double> physical(n);
    for (std::size_t i = 0; i < n; ++i) physical[i] = map.inverse(tilde[i]);
    physical.front() = 0.0;
    physical.back() = length;
    out.out = Axis1D(std::move(physical));
    out.tilde = std::move(tilde);
  };

  switch (p.growth.kind()) {
    case GrowthKind::Constant: {
      const auto& g = p.growth.as<ConstantGrowth>();
      const double gi = axis == 1 ? g.g1 : g.g2;
      if (gi <= 0.0) break;  // no motion along this axis
      if (analytical) {
        out.map = make_coordinate_map([gi](double) { return gi; }, length,
                                      [gi](double a) { return a / gi; },
                                      [gi](double y) { return y * gi; });
      } else {
        out.map =
            make_coordinate_map([gi](double) { return gi; }, length, {}, {}, quadrature_panels);
      }
      lattice_from_map(*out.map);
      out.tau = t_end;
      break;
    }
    case GrowthKind::PerAxis: {
      const auto& g = p.growth.as<PerAxisGrowth>();
      const Scalar1Fn& rate = axis == 1 ? g.g1 : g.g2;
      if (analytical) {
        out.map = make_coordinate_map(rate, length,
                                      axis == 1 ? g.closed.map1 : g.closed.map2,
                                      axis == 1 ? g.closed.map1_inverse : g.closed.map2_inverse);
      } else {
        out.map = make_coordinate_map(rate, length, {}, {}, quadrature_panels);
      }
      lattice_from_map(*out.map);
      out.tau = t_end;
      out.hat = rate;
      break;
    }
    case GrowthKind::TimeOnly: {
      const auto& g = p.growth.as<TimeOnlyGrowth>();
      if (analytical) {
        const Scalar1Fn& tau = axis == 1 ? g.closed.tau1 : g.closed.tau2;
        out.tau = tau(t_end) - tau(0.0);
      } else if (t_end > 0.0) {
        out.tau = make_time_map(axis == 1 ? g.g1 : g.g2, t_end, {}, {}, quadrature_panels)
                      .forward(t_end);
      }
      break;  // rates carry no size dependence: physical coordinates, no weight
    }
    case GrowthKind::SeparableTimeSize: {
      const auto& g = p.growth.as<SeparableGrowth>();
      const Scalar1Fn& size = axis == 1 ? g.g1_size : g.g2_size;
      if (analytical) {
        out.map = make_coordinate_map(size, length,
                                      axis == 1 ? g.size_closed.map1 : g.size_closed.map2,
                                      axis == 1 ? g.size_closed.map1_inverse
                                                : g.size_closed.map2_inverse);
        const Scalar1Fn& tau = axis == 1 ? g.time_closed.tau1 : g.time_closed.tau2;
        out.tau = tau(t_end) - tau(0.0);
      } else {
        out.map = make_coordinate_map(size, length, {}, {}, quadrature_panels);
        if (t_end > 0.0)
          out.tau = make_time_map(axis == 1 ? g.g1_time : g.g2_time, t_end, {}, {},
                                  quadrature_panels)
                        .forward(t_end);
      }
      lattice_from_map(*out.map);
      out.hat = size;
      break;
    }
    case GrowthKind::Coupled:
      throw SetupError("characteristic_axis: coupled growth has no per-axis map");
  }
  if (out.tilde.empty())
    out.tilde.assign(out.out.points().begin(), out.out.points().end());
  return out;
}

RunResult run_characteristic(const ProblemSpec& p, SchemeId scheme, std::size_t n1,
                             std::size_t n2, double dt, std::size_t quadrature_panels) {
  const bool analytical = scheme == SchemeId::ExactAnalytical;
  const StepPlan plan = plan_steps(p.t_end, dt, false, scheme_id_name(scheme));
  const CharacteristicAxis ax1 = characteristic_axis(p, analytical, quadrature_panels, 1, n1);
  const CharacteristicAxis ax2 = characteristic_axis(p, analytical, quadrature_panels, 2, n2);
  const GridPtr grid = make_grid(Grid2D{ax1.out, ax2.out});

  // the weighted density is constant along transformed characteristics, so
  // the whole run is one evaluation of the initial data at the feet
  Field2D f(grid);
  for (std::size_t k = 0; k < n2; ++k) {
    const double head2 = ax2.out[k];
    const double ft2 = ax2.tilde[k] - ax2.tau;
    for (std::size_t j = 0; j < n1; ++j) {
      const double head1 = ax1.out[j];
      const double ft1 = ax1.tilde[j] - ax1.tau;
      if (ft1 < 0.0 || ft2 < 0.0) continue;  // characteristic entered through inflow
      const double foot1 = ax1.map ? ax1.map->inverse(ft1) : ft1;
      const double foot2 = ax2.map ? ax2.map->inverse(ft2) : ft2;
      double v = p.initial(foot1, foot2);
      if (ax1.hat) v *= ax1.hat(foot1) / ax1.hat(head1);
      if (ax2.hat) v *= ax2.hat(foot2) / ax2.hat(head2);
      f(j, k) = v;
    }
  }
  return finish(std::move(f), plan, report_for(*grid));
}

RunResult run_exact_interpolation(const ProblemSpec& p, std::size_t n1, std::size_t n2,
                                  double dt) {
  const GridPtr grid = uniform_grid(p, n1, n2);
  const StepPlan plan = plan_steps(p.t_end, dt, false, "exact-interpolation");
  Field2D f = Field2D::sample(grid, p.initial);
  const auto& g = p.growth.as<ConstantGrowth>();

  for (std::size_t i = 0; i < plan.steps; ++i) {
    const double dt_i = step_size(plan, i);
    Field2D next(grid);
    for (std::size_t k = 0; k < n2; ++k) {
      const double qy = grid->axis2[k] - g.g2 * dt_i;
      if (qy < 0.0) continue;  // inflow: upstream of the domain carries zero
      for (std::size_t j = 0; j < n1; ++j) {
        const double qx = grid->axis1[j] - g.g1 * dt_i;
        if (qx < 0.0) continue;
        next(j, k) = bilinear(f, qx, qy, OutOfHull::Clamp);
      }
    }
    f = std::move(next);
  }
  return finish(std::move(f), plan, report_for(*grid));
}

// ===== jagged-mesh split drivers ===========================================

/// Static per-row data for one jagged sub-problem mesh: the growth component
/// along the line axis at every node, donor-side widths, and the number of
/// cells one full sub-step moves (the mesh is built at quantum dt/hop).
struct JaggedSide {
  JaggedMesh mesh;
  std::vector<std::vector<double>> g;
  std::vector<std::vector<double>> width;
  std::size_t hop = 1;
};

JaggedSide make_side(const GrowthSpec& growth, const Domain2D& domain, double dt, int for_axis,
                     std::size_t hop) {
  const double mesh_dt = dt / double(hop);
  JaggedSide side{build_jagged(growth, domain, mesh_dt, for_axis), {}, {}, hop};
  side.g.reserve(side.mesh.row_count());
  side.width.reserve(side.mesh.row_count());
  for (const JaggedRow& row : side.mesh.rows()) {
    std::vector<double> g(row.line.size()), w(row.line.size());
    for (std::size_t j = 0; j < row.line.size(); ++j) {
      const double c = row.line[j];
      g[j] = for_axis == 1 ? growth.rate1(0.0, c, row.anchor) : growth.rate2(0.0, row.anchor, c);
      // a one-node row has no donor: give it the full-CFL width so it drains
      w[j] = row.line.size() > 1 ? donor_width(row.line, j) : g[j] * mesh_dt;
    }
    side.g.push_back(std::move(g));
    side.width.push_back(std::move(w));
  }
  return side;
}

/// Advances one sub-problem on its jagged mesh: scale to G*f, move hop cells
/// (exact) or sweep with per-cell CFL (upwind), scale back.
void advance_side(const JaggedSide& side, JaggedValues& vals, double dt_i, bool exact_shift) {
  for (std::size_t r = 0; r < side.mesh.row_count(); ++r) {
    std::vector<double>& line = vals[r];
    const std::vector<double>& g = side.g[r];
    if (exact_shift) {
      // mesh spacing equals g*(dt/hop): the exact update over dt moves hop
      // cells, carrying the conservative weight g_source/g_target
      const std::size_t k = side.hop;
      for (std::size_t j = line.size(); j-- > 0;)
        line[j] = j >= k ? g[j - k] * line[j - k] / g[j] : 0.0;
      continue;
    }
    std::vector<double> hat(line.size());
    for (std::size_t j = 0; j < line.size(); ++j) hat[j] = g[j] * line[j];
    SweepPlan plan{side.mesh.line_axis(), std::vector<double>(line.size()), {}};
    for (std::size_t j = 0; j < line.size(); ++j)
      plan.cfl_per_cell[j] = g[j] * dt_i / side.width[r][j];
    const std::vector<double> swept = upwind_sweep_1d(hat, plan, 0.0);
    for (std::size_t j = 0; j < line.size(); ++j) line[j] = swept[j] / g[j];
  }
}

RunResult run_jagged_split(const ProblemSpec& p, SchemeId scheme, std::size_t n1, std::size_t n2,
                           double dt, bool axis2_first) {
  const bool exact_shift = scheme == SchemeId::SplitExact;
  const StepPlan plan = plan_steps(p.t_end, dt, exact_shift, scheme_id_name(scheme));
  // The upwind variant needs per-cell CFL <= 1, so its mesh quantum is the
  // step itself. The exact variant moves whole cells regardless of quantum;
  // refining its meshes well below the requested resolution keeps the
  // cross-mesh transfer loss an order under the splitting error it exists
  // to expose.
  constexpr double kQuantumRefine = 4.0;
  const auto hop_for = [&](int axis) -> std::size_t {
    if (!exact_shift) return 1;
    const double da = (axis == 1 ? p.domain.l1 : p.domain.l2) / double((axis == 1 ? n1 : n2) - 1);
    const double vmax = axis == 1 ? p.growth.max_rate1(p.domain, p.t_end)
                                  : p.growth.max_rate2(p.domain, p.t_end);
    const double cells = kQuantumRefine * vmax * dt / da;
    return cells <= 1.0 ? 1 : std::size_t(std::ceil(cells - 1e-9));
  };
  const int first_axis = axis2_first ? 2 : 1;
  const int second_axis = axis2_first ? 1 : 2;
  const JaggedSide first = make_side(p.growth, p.domain, dt, first_axis, hop_for(first_axis));
  const JaggedSide second = make_side(p.growth, p.domain, dt, second_axis, hop_for(second_axis));
  const JaggedSide& report_side = axis2_first ? first : second;  // the a2 sub-problem's mesh
  const GridPtr out_grid = uniform_grid(p, n1, n2);

  if (plan.steps == 0)
    return finish(Field2D::sample(out_grid, p.initial), plan, report_for(report_side.mesh));

  const Resampler cross(first.mesh, second.mesh);
  const Resampler back(second.mesh, first.mesh);
  const Resampler out(second.mesh, out_grid);

  JaggedValues vals = sample_jagged(first.mesh, p.initial);
  Field2D result(out_grid);
  for (std::size_t i = 0; i < plan.steps; ++i) {
    const double dt_i = step_size(plan, i);
    advance_side(first, vals, dt_i, exact_shift);
    JaggedValues vals2 = cross.apply(vals);
    advance_side(second, vals2, dt_i, exact_shift);
    if (i + 1 == plan.steps) {
      result = out.apply_to_grid(vals2);
    } else {
      vals = back.apply(vals2);
    }
  }
  return finish(std::move(result), plan, report_for(report_side.mesh));
}

// ===== enhanced split driver ===============================================

RunResult run_split_exact_enhanced(const ProblemSpec& p, std::size_t n1, std::size_t n2,
                                   double dt, bool axis2_first) {
  const GridPtr grid = uniform_grid(p, n1, n2);
  const StepPlan plan = plan_steps(p.t_end, dt, false, "split-exact-enhanced");
  Field2D f = Field2D::sample(grid, p.initial);
  if (plan.steps == 0) return finish(std::move(f), plan, report_for(*grid));

  const auto& feet = p.growth.as<CoupledGrowth>().feet;
  const auto sub_step = [&](const Field2D& in, int axis, double dt_i) {
    const AxisScope scope = axis == 1 ? AxisScope::Axis1 : AxisScope::Axis2;
    const Field2D hat = to_advective(in, p.growth, scope);
    Field2D next(in.grid_ptr());
    const auto& grid_ref = in.grid();
    for (std::size_t k = 0; k < in.n2(); ++k) {
      const double y = grid_ref.axis2[k];
      for (std::size_t j = 0; j < in.n1(); ++j) {
        const double x = grid_ref.axis1[j];
        const double q = axis == 1 ? feet.foot1(dt_i, x, y) : feet.foot2(dt_i, x, y);
        if (q < 0.0) continue;  // characteristic entered through inflow
        next(j, k) = axis == 1 ? bilinear(hat, q, y, OutOfHull::Clamp)
                               : bilinear(hat, x, q, OutOfHull::Clamp);
      }
    }
    return from_advective(next, p.growth, scope);
  };

  for (std::size_t i = 0; i < plan.steps; ++i) {
    const double dt_i = step_size(plan, i);
    f = sub_step(f, axis2_first ? 2 : 1, dt_i);
    f = sub_step(f, axis2_first ? 1 : 2, dt_i);
  }
  return finish(std::move(f), plan, report_for(*grid));
}

// ===== nonhomogeneous and removal drivers ==================================

RunResult run_split_nonhomogeneous(const ProblemSpec& p, std::size_t n1, std::size_t n2,
                                   double dt, const AdvanceOptions& opt) {
  const GridPtr grid = uniform_grid(p, n1, n2);
  const StepPlan plan = plan_steps(p.t_end, dt, true, "split-nonhomogeneous");
  Field2D f = Field2D::sample(grid, p.initial);
  if (plan.steps == 0) return finish(std::move(f), plan, report_for(*grid));

  const auto& g = p.growth.as<ConstantGrowth>();
  const std::size_t s1 =
      integer_shift(g.g1, plan.dt, grid->axis1.spacing(1), "split-nonhomogeneous");
  const std::size_t s2 =
      integer_shift(g.g2, plan.dt, grid->axis2.spacing(1), "split-nonhomogeneous");

  const auto advect = [&] {
    shift_axis(f, opt.axis2_first ? 2 : 1, opt.axis2_first ? s2 : s1);
    shift_axis(f, opt.axis2_first ? 1 : 2, opt.axis2_first ? s1 : s2);
  };
  const auto source = [&](double t) {
    if (p.source.kind() == SourceKind::General) {
      f = euler_source_step(f, p.source.general_term().h, t, plan.dt);
    } else if (p.source.kind() == SourceKind::LinearSink) {
      // the removal sub-problem has the exact solution f*exp(-lambda*dt)
      const auto& lambda = p.source.sink().lambda;
      for (std::size_t k = 0; k < f.n2(); ++k)
        for (std::size_t j = 0; j < f.n1(); ++j)
          f(j, k) *= std::exp(-lambda(t, grid->axis1[j], grid->axis2[k]) * plan.dt);
    }
  };

  double t = 0.0;
  for (std::size_t i = 0; i < plan.steps; ++i) {
    if (opt.source_first) {
      source(t);
      advect();
    } else {
      advect();
      source(t);
    }
    t += plan.dt;
  }
  return finish(std::move(f), plan, report_for(*grid));
}

RunResult run_mu_exact(const ProblemSpec& p, std::size_t n1, std::size_t n2, double dt,
                       std::size_t quadrature_panels, bool force_quadrature_mu,
                       std::string_view scheme_name) {
  const GridPtr grid = uniform_grid(p, n1, n2);
  const StepPlan plan = plan_steps(p.t_end, dt, true, scheme_name);
  if (plan.steps == 0)
    return finish(Field2D::sample(grid, p.initial), plan, report_for(*grid));
  const auto& g = p.growth.as<ConstantGrowth>();

  LinearSink sink = p.source.sink();
  if (force_quadrature_mu) sink.mu_closed_form = {};
  const MuFunction mu = make_mu(sink, g.g1, g.g2, quadrature_panels);

  // any positive solution of the weight's transport identity works: the
  // weighted density w = mu*f obeys pure advection regardless of scaling
  Field2D w = Field2D::sample(
      grid, [&](double a1, double a2) { return p.initial(a1, a2) * mu.mu(0.0, a1, a2); });
  const std::size_t s1 = integer_shift(g.g1, plan.dt, grid->axis1.spacing(1), scheme_name);
  const std::size_t s2 = integer_shift(g.g2, plan.dt, grid->axis2.spacing(1), scheme_name);
  for (std::size_t i = 0; i < plan.steps; ++i) {
    shift_axis(w, 1, s1);
    shift_axis(w, 2, s2);
  }

  Field2D f(grid);
  for (std::size_t k = 0; k < n2; ++k)
    for (std::size_t j = 0; j < n1; ++j) {
      const double m = mu.mu(p.t_end, grid->axis1[j], grid->axis2[k]);
      if (!(m > 0.0) || !std::isfinite(m))
        throw NumericalError(std::string(scheme_name) + ": removal weight not positive at (" +
                             std::to_string(grid->axis1[j]) + ", " +
                             std::to_string(grid->axis2[k]) + ")");
      f(j, k) = w(j, k) / m;
    }
  return finish(std::move(f), plan, report_for(*grid));
}

}  // namespace

// ===== dispatch ============================================================

RunResult advance(const ProblemSpec& problem, SchemeId scheme, std::size_t n1, std::size_t n2,
                  const AdvanceOptions& options) {
  if (n1 < 2 || n2 < 2) throw SetupError("advance: resolution must be at least 2 x 2");
  if (!problem.initial) throw SetupError("advance: problem has no initial condition");
  if (!(problem.t_end >= 0.0)) throw SetupError("advance: t_end must be non-negative");
  if (options.dt && !(*options.dt > 0.0)) throw SetupError("advance: dt must be positive");
  if (options.quadrature_panels == 0)
    throw SetupError("advance: quadrature_panels must be positive");
  require_compatible(scheme, problem);

  const double dt = options.dt ? *options.dt : default_dt(scheme, problem, n1, n2);
  switch (scheme) {
    case SchemeId::ConUniformUpwind:
    case SchemeId::TransUniformUpwind:
      return run_unsplit_uniform(problem, scheme, n1, n2, dt);
    case SchemeId::ConNonuniformUpwind:
    case SchemeId::TransNonuniformUpwind:
      return run_sweep_nonuniform(problem, scheme, dt);
    case SchemeId::ExactAnalytical:
    case SchemeId::ExactNumerical:
      if (problem.source.kind() == SourceKind::LinearSink)
        return run_mu_exact(problem, n1, n2, dt, options.quadrature_panels,
                            scheme == SchemeId::ExactNumerical, scheme_id_name(scheme));
      return run_characteristic(problem, scheme, n1, n2, dt, options.quadrature_panels);
    case SchemeId::ExactInterpolation:
      return run_exact_interpolation(problem, n1, n2, dt);
    case SchemeId::SplitConUniformUpwind:
    case SchemeId::SplitTransUniformUpwind:
      return run_split_uniform(problem, scheme, n1, n2, dt, options.axis2_first);
    case SchemeId::SplitTransNonuniformUpwind:
    case SchemeId::SplitExact:
      return run_jagged_split(problem, scheme, n1, n2, dt, options.axis2_first);
    case SchemeId::SplitExactEnhanced:
      return run_split_exact_enhanced(problem, n1, n2, dt, options.axis2_first);
    case SchemeId::SplitNonhomogeneous:
      return run_split_nonhomogeneous(problem, n1, n2, dt, options);
    case SchemeId::MuExact:
      return run_mu_exact(problem, n1, n2, dt, options.quadrature_panels, false, "mu-exact");
  }
  throw SetupError("advance: unknown scheme");
}

}  // namespace pbm2d
