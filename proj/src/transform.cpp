#include "pbm2d/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace pbm2d {

namespace {

double simpson(const Scalar1Fn& f, double lo, double hi, std::size_t n_panels) {
  if (hi == lo) return 0.0;
  const double h = (hi - lo) / static_cast<double>(n_panels);
  double acc = 0.0;
  for (std::size_t i = 0; i < n_panels; ++i) {
    const double a = lo + h * static_cast<double>(i);
    const double b = (i + 1 == n_panels) ? hi : lo + h * static_cast<double>(i + 1);
    acc += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  }
  return acc;
}

}  // namespace

// ===== monotone maps =======================================================

MonotoneMap build_map(Scalar1Fn integrand, double length, Scalar1Fn closed_forward,
                      Scalar1Fn closed_inverse, std::size_t n_panels, const char* what) {
  if (!(length > 0.0)) throw SetupError(std::string(what) + ": length must be positive");
  if (!integrand) throw SetupError(std::string(what) + ": missing integrand");

  MonotoneMap m;
  m.length_ = length;
  m.integrand_ = integrand;

  if (closed_forward) {
    m.provenance_ = MonotoneMap::Provenance::Analytical;
    m.n_panels_ = 0;
    m.closed_forward_ = std::move(closed_forward);
    m.closed_inverse_ = std::move(closed_inverse);
    // positivity of the slope backs both monotonicity and Newton inversion
    for (int i = 0; i <= 128; ++i) {
      const double x = length * static_cast<double>(i) / 128.0;
      if (!(integrand(x) > 0.0))
        throw SetupError(std::string(what) + ": integrand not positive on the domain");
    }
    const double y0 = m.closed_forward_(0.0);
    if (!(std::abs(y0) <= 1e-12 * std::max(1.0, std::abs(m.closed_forward_(length)))))
      throw SetupError(std::string(what) + ": closed form does not vanish at 0");
    return m;
  }

  if (n_panels < 2) throw SetupError(std::string(what) + ": need at least 2 panels");
  m.provenance_ = MonotoneMap::Provenance::Quadrature;
  m.n_panels_ = n_panels;
  m.ys_.resize(n_panels + 1);
  m.slopes_.resize(n_panels + 1);
  m.ys_[0] = 0.0;
  for (std::size_t i = 0; i <= n_panels; ++i) {
    const double x = length * static_cast<double>(i) / static_cast<double>(n_panels);
    const double g = integrand(x);
    if (!(g > 0.0)) throw SetupError(std::string(what) + ": integrand not positive on the domain");
    m.slopes_[i] = g;
  }
  for (std::size_t i = 0; i < n_panels; ++i) {
    const double a = length * static_cast<double>(i) / static_cast<double>(n_panels);
    const double b = length * static_cast<double>(i + 1) / static_cast<double>(n_panels);
    const double mid = integrand(0.5 * (a + b));
    if (!(mid > 0.0)) throw SetupError(std::string(what) + ": integrand not positive on the domain");
    m.ys_[i + 1] = m.ys_[i] + (b - a) / 6.0 * (m.slopes_[i] + 4.0 * mid + m.slopes_[i + 1]);
    if (!(m.ys_[i + 1] > m.ys_[i]))
      throw NumericalError(std::string(what) + ": tabulated map is not increasing");
  }
  return m;
}

double MonotoneMap::total() const {
  return provenance_ == Provenance::Analytical ? closed_forward_(length_) : ys_.back();
}

double MonotoneMap::hermite(std::size_t panel, double x) const {
  const double h = length_ / static_cast<double>(n_panels_);
  const double x0 = h * static_cast<double>(panel);
  const double s = (x - x0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * ys_[panel] + (s3 - 2.0 * s2 + s) * h * slopes_[panel] +
         (-2.0 * s3 + 3.0 * s2) * ys_[panel + 1] + (s3 - s2) * h * slopes_[panel + 1];
}

double MonotoneMap::hermite_slope(std::size_t panel, double x) const {
  const double h = length_ / static_cast<double>(n_panels_);
  const double x0 = h * static_cast<double>(panel);
  const double s = (x - x0) / h;
  const double s2 = s * s;
  return ((6.0 * s2 - 6.0 * s) * ys_[panel] + (3.0 * s2 - 4.0 * s + 1.0) * h * slopes_[panel] +
          (-6.0 * s2 + 6.0 * s) * ys_[panel + 1] + (3.0 * s2 - 2.0 * s) * h * slopes_[panel + 1]) /
         h;
}

double MonotoneMap::forward(double x) const {
  x = std::clamp(x, 0.0, length_);
  if (provenance_ == Provenance::Analytical) return closed_forward_(x);
  const double h = length_ / static_cast<double>(n_panels_);
  const auto panel = std::min(static_cast<std::size_t>(x / h), n_panels_ - 1);
  return hermite(panel, x);
}

double MonotoneMap::inverse(double y) const {
  if (provenance_ == Provenance::Analytical) {
    y = std::clamp(y, std::min(0.0, total()), std::max(0.0, total()));
    if (closed_inverse_) return closed_inverse_(y);
    // bracketed Newton on the closed form; integrand_ is its exact slope
    double lo = 0.0, hi = length_;
    double x = length_ * (total() > 0.0 ? y / total() : 0.5);
    for (int it = 0; it < 100; ++it) {
      const double fy = closed_forward_(x) - y;
      if (fy > 0.0) hi = x;
      else lo = x;
      const double step = fy / integrand_(x);
      double next = x - step;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= 1e-15 * length_) return next;
      x = next;
    }
    return x;
  }

  y = std::clamp(y, 0.0, ys_.back());
  const auto it = std::upper_bound(ys_.begin(), ys_.end(), y);
  std::size_t panel = (it == ys_.begin()) ? 0 : static_cast<std::size_t>(it - ys_.begin()) - 1;
  panel = std::min(panel, n_panels_ - 1);

  const double h = length_ / static_cast<double>(n_panels_);
  double lo = h * static_cast<double>(panel), hi = lo + h;
  const double dy = ys_[panel + 1] - ys_[panel];
  double x = lo + h * ((y - ys_[panel]) / dy);
  for (int itn = 0; itn < 60; ++itn) {
    const double fy = hermite(panel, x) - y;
    if (fy > 0.0) hi = x;
    else lo = x;
    const double slope = hermite_slope(panel, x);
    double next = (slope > 0.0) ? x - fy / slope : 0.5 * (lo + hi);
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * length_) return next;
    x = next;
  }
  return x;
}

MonotoneMap make_coordinate_map(Scalar1Fn growth, double length, Scalar1Fn closed_forward,
                                Scalar1Fn closed_inverse, std::size_t n_panels) {
  if (!growth) throw SetupError("make_coordinate_map: missing growth callback");
  auto integrand = [g = std::move(growth)](double a) {
    const double v = g(a);
    if (!(v > 0.0)) throw SetupError("make_coordinate_map: growth not positive on the domain");
    return 1.0 / v;
  };
  return build_map(integrand, length, std::move(closed_forward), std::move(closed_inverse),
                   n_panels, "make_coordinate_map");
}

MonotoneMap make_time_map(Scalar1Fn rate, double t_end, Scalar1Fn closed_forward,
                          Scalar1Fn closed_inverse, std::size_t n_panels) {
  if (!rate) throw SetupError("make_time_map: missing rate callback");
  return build_map(std::move(rate), t_end, std::move(closed_forward), std::move(closed_inverse),
                   n_panels, "make_time_map");
}

// ===== conservative <-> advective field scaling ============================

namespace {

double scaling_weight(const GrowthSpec& growth, AxisScope scope, double a1, double a2) {
  double w = 1.0;
  if (scope != AxisScope::Axis2) w *= growth.rate1(0.0, a1, a2);
  if (scope != AxisScope::Axis1) w *= growth.rate2(0.0, a1, a2);
  return w;
}

Field2D scale_field(const Field2D& field, const GrowthSpec& growth, AxisScope scope,
                    bool multiply) {
  if (growth.time_dependent())
    throw SetupError("advective scaling requires time-independent growth");
  const auto& grid = field.grid();
  Field2D out(field.grid_ptr());
  for (std::size_t k = 0; k < grid.n2(); ++k) {
    for (std::size_t j = 0; j < grid.n1(); ++j) {
      const double w = scaling_weight(growth, scope, grid.axis1[j], grid.axis2[k]);
      if (!(w > 0.0))
        throw SetupError("advective scaling: non-positive growth weight at a node");
      out(j, k) = multiply ? field(j, k) * w : field(j, k) / w;
    }
  }
  return out;
}

}  // namespace

Field2D to_advective(const Field2D& field, const GrowthSpec& growth, AxisScope scope) {
  return scale_field(field, growth, scope, true);
}

Field2D from_advective(const Field2D& field_hat, const GrowthSpec& growth, AxisScope scope) {
  return scale_field(field_hat, growth, scope, false);
}

// ===== removal-term weight functions =======================================

MuFunction make_mu(const LinearSink& sink, double g1, double g2, std::size_t n_panels) {
  if (!sink.lambda && !sink.mu_closed_form)
    throw SetupError("make_mu: sink has neither lambda nor a closed form");

  const bool needs_g1 = sink.form == LambdaForm::A1 || sink.form == LambdaForm::A1A2 ||
                        (sink.form == LambdaForm::Constant && sink.branch == ConstantMuBranch::A1);
  const bool needs_g2 = sink.form == LambdaForm::A2 ||
                        (sink.form == LambdaForm::Constant && sink.branch == ConstantMuBranch::A2);
  if (needs_g1 && !(g1 > 0.0))
    throw SetupError("make_mu: this lambda form divides by g1, which must be positive");
  if (needs_g2 && !(g2 > 0.0))
    throw SetupError("make_mu: this lambda form divides by g2, which must be positive");

  MuFunction out;
  out.form = sink.form;

  // characteristic feet, exposed regardless of whether a closed form is used
  switch (sink.form) {
    case LambdaForm::TA1:
      out.foot1 = [g1](double t, double a1, double) { return a1 - g1 * t; };
      break;
    case LambdaForm::TA2:
      out.foot2 = [g2](double t, double, double a2) { return a2 - g2 * t; };
      break;
    case LambdaForm::A1A2:
      out.foot2 = [g1, g2](double, double a1, double a2) { return a2 - (g2 / g1) * a1; };
      break;
    case LambdaForm::TA1A2:
      out.foot1 = [g1](double t, double a1, double) { return a1 - g1 * t; };
      out.foot2 = [g2](double t, double, double a2) { return a2 - g2 * t; };
      break;
    default:
      break;
  }

  if (sink.mu_closed_form) {
    out.mu = sink.mu_closed_form;
    return out;
  }

  const Scalar3Fn lam = sink.lambda;
  switch (sink.form) {
    case LambdaForm::Constant: {
      const double lv = lam(0.0, 0.0, 0.0);
      switch (sink.branch) {
        case ConstantMuBranch::T:
          out.mu = [lv](double t, double, double) { return std::exp(lv * t); };
          break;
        case ConstantMuBranch::A1:
          out.mu = [lv, g1](double, double a1, double) { return std::exp(lv * a1 / g1); };
          break;
        case ConstantMuBranch::A2:
          out.mu = [lv, g2](double, double, double a2) { return std::exp(lv * a2 / g2); };
          break;
      }
      break;
    }
    case LambdaForm::A1:
      out.mu = [lam, g1, n_panels](double, double a1, double) {
        return std::exp(simpson([&](double s) { return lam(0.0, s, 0.0); }, 0.0, a1, n_panels) /
                        g1);
      };
      break;
    case LambdaForm::A2:
      out.mu = [lam, g2, n_panels](double, double, double a2) {
        return std::exp(simpson([&](double s) { return lam(0.0, 0.0, s); }, 0.0, a2, n_panels) /
                        g2);
      };
      break;
    case LambdaForm::T:
      out.mu = [lam, n_panels](double t, double, double) {
        return std::exp(simpson([&](double s) { return lam(s, 0.0, 0.0); }, 0.0, t, n_panels));
      };
      break;
    case LambdaForm::TA1:
      out.mu = [lam, g1, n_panels](double t, double a1, double) {
        const double a10 = a1 - g1 * t;
        return std::exp(
            simpson([&](double s) { return lam(s, g1 * s + a10, 0.0); }, 0.0, t, n_panels));
      };
      break;
    case LambdaForm::TA2:
      out.mu = [lam, g2, n_panels](double t, double, double a2) {
        const double a20 = a2 - g2 * t;
        return std::exp(
            simpson([&](double s) { return lam(s, 0.0, g2 * s + a20); }, 0.0, t, n_panels));
      };
      break;
    case LambdaForm::A1A2:
      out.mu = [lam, g1, g2, n_panels](double, double a1, double a2) {
        const double a20 = a2 - (g2 / g1) * a1;
        return std::exp(
            simpson([&](double s) { return lam(0.0, s, (g2 / g1) * s + a20); }, 0.0, a1,
                    n_panels) /
            g1);
      };
      break;
    case LambdaForm::TA1A2:
      out.mu = [lam, g1, g2, n_panels](double t, double a1, double a2) {
        const double a10 = a1 - g1 * t, a20 = a2 - g2 * t;
        return std::exp(simpson([&](double s) { return lam(s, g1 * s + a10, g2 * s + a20); }, 0.0,
                                t, n_panels));
      };
      break;
  }
  return out;
}

}  // namespace pbm2d
