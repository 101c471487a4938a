#include "pbm2d/analytic.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace pbm2d {

// ===== closed-form solutions ===============================================

double gaussian_bump(double a1, double a2, double amplitude) {
  const double d1 = a1 - 0.4, d2 = a2 - 0.4;
  return amplitude * std::exp(-d1 * d1 / 0.005 - d2 * d2 / 0.005);
}

double exact_case1(double t, double a1, double a2) {
  return gaussian_bump(a1 - t, a2 - t);
}

namespace {

double rate1_case2(double a) { return 0.1 + 0.05 * a; }
double rate2_case2(double a) { return 0.5 + 0.25 * a; }

}  // namespace

double exact_case2(double t, double a1, double a2) {
  const double u = (a1 + 2.0) * std::exp(-0.05 * t) - 2.0;
  const double v = (a2 + 2.0) * std::exp(-0.25 * t) - 2.0;
  // mass-weighted density is conserved along characteristics
  return rate1_case2(u) * rate2_case2(v) * gaussian_bump(u, v) /
         (rate1_case2(a1) * rate2_case2(a2));
}

double exact_case3(double t, double a1, double a2) {
  const double e = std::exp(0.75 * t);
  const double c1 = 3.0 * a1 + 0.75 * t + 2.0 - 2.0 * e;
  const double c2 = 3.0 * a2 - 0.75 * t + 1.0 - e;
  const double qa = 1.0 + 2.0 * e, qb = -2.0 + 2.0 * e;
  const double qc = -1.0 + e, qd = 2.0 + e;
  const double den = qb * qc - qa * qd;  // collapses to -9 e^{0.75 t}
  if (std::abs(den) < 1e-12) throw NumericalError("foot system is singular");
  return gaussian_bump((qb * c2 - qd * c1) / den, (qc * c1 - qa * c2) / den) *
         std::exp(-0.75 * t);
}

double exact_case5(double t, double a1, double a2) {
  // characteristics below the front entered through a zero-inflow face
  if (a1 < t || a2 < t) return 0.0;
  return gaussian_bump(a1 - t, a2 - t) * std::exp(-(a1 + a2) * t + t * t);
}

// ===== characteristic feet =================================================

double characteristic_foot_case3(double t, double a1, double a2) {
  return std::exp(-0.5 * t) * (0.5 + a1 + a2) - 0.5 - a2;
}

double characteristic_foot2_case3(double t, double a1, double a2) {
  return std::exp(-0.25 * t) * (2.0 + a1 + a2) - 2.0 - a1;
}

// ===== case definitions ====================================================

namespace {

Scalar2Fn seed_bump(double amplitude) {
  return [amplitude](double a1, double a2) { return gaussian_bump(a1, a2, amplitude); };
}

GrowthSpec growth_case2() {
  PerAxisClosedForms closed;
  closed.map1 = [](double a) { return 20.0 * std::log1p(0.5 * a); };
  closed.map1_inverse = [](double y) { return 2.0 * std::expm1(y / 20.0); };
  closed.map2 = [](double a) { return 4.0 * std::log1p(0.5 * a); };
  closed.map2_inverse = [](double y) { return 2.0 * std::expm1(y / 4.0); };
  return GrowthSpec::per_axis(rate1_case2, rate2_case2, std::move(closed));
}

GrowthSpec growth_case3() {
  CoupledFeet feet;
  feet.foot1 = characteristic_foot_case3;
  feet.foot2 = characteristic_foot2_case3;
  return GrowthSpec::coupled([](double x, double y) { return 0.25 + 0.5 * (x + y); },
                             [](double x, double y) { return 0.5 + 0.25 * (x + y); },
                             std::move(feet));
}

}  // namespace

CaseDefinition case_definition(CaseId id) {
  const Domain2D box{2.0, 2.0};
  switch (id) {
    case CaseId::Case1:
      return {id,
              ProblemSpec::make(GrowthSpec::constant(1.0, 1.0), SourceSpec::none(), box,
                                seed_bump(50.0), 1.0),
              exact_case1};
    case CaseId::Case2:
      return {id,
              ProblemSpec::make(growth_case2(), SourceSpec::none(), box, seed_bump(50.0), 1.0),
              exact_case2};
    case CaseId::Case3:
    case CaseId::Appendix3:
      return {id,
              ProblemSpec::make(growth_case3(), SourceSpec::none(), box, seed_bump(50.0), 1.0),
              exact_case3};
    case CaseId::Case4:
      return {id,
              ProblemSpec::make(GrowthSpec::constant(1.0, 1.0),
                                SourceSpec::general(
                                    [](double, double x, double y) { return 1.0 + x * y; }),
                                box, seed_bump(10.0), 1.0),
              {}};
    case CaseId::Case5: {
      LinearSink sink;
      sink.form = LambdaForm::A1A2;
      sink.lambda = [](double, double x, double y) { return x + y; };
      sink.mu_closed_form = [](double, double x, double y) { return std::exp(x * y); };
      return {id,
              ProblemSpec::make(GrowthSpec::constant(1.0, 1.0),
                                SourceSpec::linear_sink(std::move(sink)), box, seed_bump(50.0),
                                1.0),
              exact_case5};
    }
  }
  throw SetupError("unknown case id");
}

CaseId parse_case_id(std::string_view name) {
  if (name == "case1") return CaseId::Case1;
  if (name == "case2") return CaseId::Case2;
  if (name == "case3") return CaseId::Case3;
  if (name == "case4") return CaseId::Case4;
  if (name == "case5") return CaseId::Case5;
  if (name == "appendix3") return CaseId::Appendix3;
  throw SetupError("unknown case: " + std::string(name));
}

std::string_view case_id_name(CaseId id) {
  switch (id) {
    case CaseId::Case1: return "case1";
    case CaseId::Case2: return "case2";
    case CaseId::Case3: return "case3";
    case CaseId::Case4: return "case4";
    case CaseId::Case5: return "case5";
    case CaseId::Appendix3: return "appendix3";
  }
  throw SetupError("unknown case id");
}

}  // namespace pbm2d
