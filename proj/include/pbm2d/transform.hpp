#pragma once

#include <cstddef>
#include <vector>

#include "pbm2d/core.hpp"

namespace pbm2d {

// ===== monotone maps =======================================================

class MonotoneMap;

/// Shared assembly for both map factories; use make_coordinate_map or
/// make_time_map instead of calling this directly.
MonotoneMap build_map(Scalar1Fn integrand, double length, Scalar1Fn closed_forward,
                      Scalar1Fn closed_inverse, std::size_t n_panels, const char* what);

/// Strictly increasing map y(x) on [0, length] with y(0) = 0, plus its
/// inverse. Two provenances:
///   Analytical  - caller supplied the closed form (and usually its inverse);
///   Quadrature  - built from the integrand by composite Simpson tabulation
///                 at panel boundaries, evaluated between nodes by a cubic
///                 Hermite patch whose end slopes are the exact integrand
///                 values, inverted by bracketed Newton on the same patch.
/// Both directions of the quadrature form converge at fourth order in the
/// panel width. Inputs are clamped to the map's domain/range.
class MonotoneMap {
 public:
  enum class Provenance { Analytical, Quadrature };

  double forward(double x) const;
  double inverse(double y) const;

  double length() const { return length_; }
  /// Image of the right end point, forward(length).
  double total() const;
  Provenance provenance() const { return provenance_; }
  std::size_t panels() const { return n_panels_; }

 private:
  friend MonotoneMap build_map(Scalar1Fn integrand, double length, Scalar1Fn closed_forward,
                               Scalar1Fn closed_inverse, std::size_t n_panels,
                               const char* what);

  MonotoneMap() = default;

  double hermite(std::size_t panel, double x) const;
  double hermite_slope(std::size_t panel, double x) const;

  double length_ = 0.0;
  Provenance provenance_ = Provenance::Quadrature;
  std::size_t n_panels_ = 0;
  Scalar1Fn closed_forward_;
  Scalar1Fn closed_inverse_;
  Scalar1Fn integrand_;            // slope of forward; drives Newton
  std::vector<double> ys_;         // cumulative integral at panel boundaries
  std::vector<double> slopes_;     // integrand at panel boundaries
};

/// Size-coordinate map for one axis: forward(a) = integral of 1/growth from
/// 0 to a. Supplying closed_forward (and optionally closed_inverse) yields an
/// Analytical map; otherwise composite Simpson with n_panels is used.
/// growth must be positive on [0, length].
MonotoneMap make_coordinate_map(Scalar1Fn growth, double length, Scalar1Fn closed_forward = {},
                                Scalar1Fn closed_inverse = {}, std::size_t n_panels = 4096);

/// Transformed-time map: forward(t) = integral of rate from 0 to t.
/// rate must be positive on [0, t_end].
MonotoneMap make_time_map(Scalar1Fn rate, double t_end, Scalar1Fn closed_forward = {},
                          Scalar1Fn closed_inverse = {}, std::size_t n_panels = 4096);

// ===== conservative <-> advective field scaling ============================

/// Which growth factors enter the scaling weight.
enum class AxisScope { Both, Axis1, Axis2 };

/// Returns the field scaled by the growth weight at each node:
///   Both  -> G1*G2 (the full conservative-to-advective change of variable),
///   Axis1 -> G1 only, Axis2 -> G2 only (per-sub-problem scaling for splits).
/// Growth must be time-independent (Constant, PerAxis or Coupled) and
/// positive at every node of the field's grid.
Field2D to_advective(const Field2D& field, const GrowthSpec& growth,
                     AxisScope scope = AxisScope::Both);

/// Inverse of to_advective: divides by the same weight.
Field2D from_advective(const Field2D& field_hat, const GrowthSpec& growth,
                       AxisScope scope = AxisScope::Both);

// ===== removal-term weight functions =======================================

/// Weight mu for the linear-sink transform f_hat = mu*f under constant
/// growth (g1, g2). mu solves  mu_t + g1*mu_a1 + g2*mu_a2 = lambda*mu  with
/// the row-specific normalization from the removal-transform table. The
/// characteristic feet the row's integral runs along are exposed for tests;
/// they are null for rows that need none.
struct MuFunction {
  LambdaForm form = LambdaForm::Constant;
  Scalar3Fn mu;     // mu(t, a1, a2), strictly positive
  Scalar3Fn foot1;  // a1 foot of the characteristic through (t, a1, a2)
  Scalar3Fn foot2;  // a2 foot
};

/// Builds the weight for sink.form. Path integrals without a closed form use
/// composite Simpson with n_panels. Rows whose formula divides by a growth
/// rate require that rate to be positive. If sink.mu_closed_form is set it
/// is used verbatim as the evaluable.
MuFunction make_mu(const LinearSink& sink, double g1, double g2, std::size_t n_panels = 4096);

}  // namespace pbm2d
