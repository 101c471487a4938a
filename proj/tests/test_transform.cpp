#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pbm2d/mesh.hpp"
#include "pbm2d/transform.hpp"

using namespace pbm2d;

namespace {

const Scalar1Fn kG1 = [](double a) { return 0.1 + 0.05 * a; };
const Scalar1Fn kG2 = [](double a) { return 0.5 + 0.25 * a; };
const Scalar1Fn kM1 = [](double a) { return 20.0 * std::log1p(0.5 * a); };
const Scalar1Fn kM1Inv = [](double y) { return 2.0 * std::expm1(y / 20.0); };
const Scalar1Fn kM2 = [](double a) { return 4.0 * std::log1p(0.5 * a); };

}  // namespace

TEST_CASE("unit growth gives the identity coordinate map") {
  auto m = make_coordinate_map([](double) { return 1.0; }, 2.0, {}, {}, 64);
  CHECK(m.provenance() == MonotoneMap::Provenance::Quadrature);
  CHECK(m.forward(0.0) == 0.0);
  for (double x : {0.013, 0.5, 1.111, 1.999, 2.0}) {
    CHECK(m.forward(x) == doctest::Approx(x).epsilon(1e-14));
    CHECK(m.inverse(x) == doctest::Approx(x).epsilon(1e-13));
  }
}

TEST_CASE("coordinate map reproduces the logarithmic closed forms") {
  auto quad = make_coordinate_map(kG1, 2.0);
  CHECK(quad.panels() == 4096);
  CHECK(quad.forward(2.0) == doctest::Approx(20.0 * std::log(2.0)).epsilon(1e-12));

  auto quad2 = make_coordinate_map(kG2, 2.0);
  CHECK(quad2.forward(2.0) == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));

  auto closed = make_coordinate_map(kG1, 2.0, kM1, kM1Inv);
  CHECK(closed.provenance() == MonotoneMap::Provenance::Analytical);
  CHECK(closed.forward(2.0) == doctest::Approx(13.862943611198906).epsilon(1e-15));
  CHECK(closed.total() == closed.forward(2.0));

  // quadrature tracks the closed form across the whole domain
  for (int i = 0; i <= 40; ++i) {
    const double a = 2.0 * i / 40.0;
    CHECK(quad.forward(a) == doctest::Approx(kM1(a)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("forward and inverse compose to the identity") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 2.0);

  auto quad = make_coordinate_map(kG1, 2.0);
  auto newton = make_coordinate_map(kG1, 2.0, kM1);  // closed forward, no closed inverse
  auto closed = make_coordinate_map(kG1, 2.0, kM1, kM1Inv);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    CHECK(std::abs(quad.inverse(quad.forward(a)) - a) < 1e-6 * 2.0);
    CHECK(std::abs(newton.inverse(newton.forward(a)) - a) < 1e-10 * 2.0);
    CHECK(std::abs(closed.inverse(closed.forward(a)) - a) < 1e-10 * 2.0);
  }
  // the tabulated inversion is far tighter than the contract asks
  CHECK(std::abs(quad.inverse(quad.forward(1.3)) - 1.3) < 1e-12);
}

TEST_CASE("quadrature error drops at least fourfold per panel doubling") {
  std::vector<double> errs;
  for (std::size_t n : {64, 128, 256, 512}) {
    auto m = make_coordinate_map(kG1, 2.0, {}, {}, n);
    double emax = 0.0, einv = 0.0;
    for (int i = 0; i <= 257; ++i) {
      const double a = 2.0 * i / 257.0;
      emax = std::max(emax, std::abs(m.forward(a) - kM1(a)));
      einv = std::max(einv, std::abs(m.inverse(kM1(a)) - a));
    }
    errs.push_back(std::max(emax, einv));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    if (errs[i] < 1e-13) continue;  // at the rounding floor further gains stall
    CHECK(errs[i - 1] / errs[i] >= 4.0);
  }
  CHECK(errs.back() < 1e-9);
}

TEST_CASE("time maps integrate the rate") {
  auto ident = make_time_map([](double) { return 1.0; }, 1.0, {}, {}, 32);
  CHECK(ident.forward(0.7) == doctest::Approx(0.7).epsilon(1e-14));

  auto affine = make_time_map([](double t) { return 2.0 * t + 1.0; }, 1.0);
  CHECK(affine.forward(1.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(affine.forward(0.5) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(affine.inverse(2.0) == doctest::Approx(1.0).epsilon(1e-12));

  auto expo = make_time_map([](double t) { return std::exp(t); }, 1.0);
  CHECK(expo.forward(1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  CHECK(expo.total() == doctest::Approx(1.718281828459045).epsilon(1e-13));
}

TEST_CASE("map construction rejects bad inputs") {
  CHECK_THROWS_AS(make_coordinate_map([](double a) { return 1.0 - a; }, 2.0), SetupError);
  CHECK_THROWS_AS(make_coordinate_map({}, 2.0), SetupError);
  CHECK_THROWS_AS(make_coordinate_map([](double) { return 1.0; }, 0.0), SetupError);
  CHECK_THROWS_AS(make_time_map([](double) { return -1.0; }, 1.0), SetupError);
  // closed form that does not vanish at zero
  CHECK_THROWS_AS(make_coordinate_map(kG1, 2.0, [](double a) { return 1.0 + a; }), SetupError);
}

TEST_CASE("advective scaling multiplies by the growth weight") {
  auto grid = std::make_shared<Grid2D>(build_uniform({2.0, 2.0}, 5, 5));
  auto ones = Field2D::sample(grid, [](double, double) { return 1.0; });

  auto same = to_advective(ones, GrowthSpec::constant(1.0, 1.0));
  for (double v : same.values()) CHECK(v == 1.0);

  auto g = GrowthSpec::per_axis(kG1, kG2);
  auto hat = to_advective(ones, g);
  CHECK(hat(4, 4) == doctest::Approx(0.2 * 1.0).epsilon(1e-14));  // corner a1 = a2 = 2
  CHECK(hat(0, 0) == doctest::Approx(0.1 * 0.5).epsilon(1e-14));

  auto hat1 = to_advective(ones, g, AxisScope::Axis1);
  CHECK(hat1(4, 0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(hat1(0, 4) == doctest::Approx(0.1).epsilon(1e-14));

  auto gc = GrowthSpec::coupled([](double a1, double a2) { return 0.25 + 0.5 * (a1 + a2); },
                                [](double a1, double a2) { return 0.5 + 0.25 * (a1 + a2); });
  auto hatc = to_advective(ones, gc, AxisScope::Axis2);
  CHECK(hatc(4, 4) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("advective scaling round-trips and rejects bad weights") {
  auto grid = std::make_shared<Grid2D>(build_uniform({2.0, 2.0}, 9, 7));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 5.0);
  Field2D f(grid);
  for (double& v : f.values()) v = u(rng);

  auto g = GrowthSpec::per_axis(kG1, kG2);
  for (auto scope : {AxisScope::Both, AxisScope::Axis1, AxisScope::Axis2}) {
    auto back = from_advective(to_advective(f, g, scope), g, scope);
    for (std::size_t i = 0; i < f.values().size(); ++i)
      CHECK(back.values()[i] ==
            doctest::Approx(f.values()[i]).epsilon(1e-14).scale(f.max_abs()));
  }

  Field2D zero(grid);
  auto z = from_advective(zero, g);
  CHECK(z.max_abs() == 0.0);

  // growth vanishing at a node of the grid
  auto gz = GrowthSpec::per_axis([](double a) { return a; }, [](double) { return 1.0; });
  CHECK_THROWS_AS(to_advective(f, gz), SetupError);
  // time-dependent growth has no single scaling weight
  auto gt = GrowthSpec::time_only([](double t) { return 1.0 + t; }, [](double) { return 1.0; });
  CHECK_THROWS_AS(to_advective(f, gt), SetupError);
}

// ===== removal-term weights ================================================

namespace {

LinearSink sink_of(LambdaForm form, Scalar3Fn lam,
                   ConstantMuBranch branch = ConstantMuBranch::T) {
  LinearSink s;
  s.form = form;
  s.lambda = std::move(lam);
  s.branch = branch;
  return s;
}

}  // namespace

TEST_CASE("constant-lambda weights in all three shapes") {
  auto lam2 = [](double, double, double) { return 2.0; };
  auto t = make_mu(sink_of(LambdaForm::Constant, lam2, ConstantMuBranch::T), 1.0, 1.0);
  CHECK(t.mu(1.0, 9.0, 9.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-15));
  CHECK(t.mu(0.0, 9.0, 9.0) == 1.0);

  auto a1 = make_mu(sink_of(LambdaForm::Constant, lam2, ConstantMuBranch::A1), 4.0, 1.0);
  CHECK(a1.mu(9.0, 1.0, 9.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-15));

  auto a2 = make_mu(sink_of(LambdaForm::Constant, lam2, ConstantMuBranch::A2), 1.0, 0.5);
  CHECK(a2.mu(9.0, 9.0, 1.0) == doctest::Approx(std::exp(4.0)).epsilon(1e-15));

  auto none = make_mu(sink_of(LambdaForm::Constant, [](double, double, double) { return 0.0; }),
                      1.0, 1.0);
  CHECK(none.mu(3.0, 1.0, 1.0) == 1.0);
}

TEST_CASE("single-argument lambda rows integrate from zero") {
  // lambda(a1) = 0.3 + 0.2 a1^2, g1 = 1.3: exponent (0.3 a1 + 0.2 a1^3/3)/1.3
  auto r1 = make_mu(sink_of(LambdaForm::A1,
                            [](double, double a1, double) { return 0.3 + 0.2 * a1 * a1; }),
                    1.3, 1.0);
  CHECK(r1.mu(9.0, 1.5, 9.0) == doctest::Approx(std::exp(0.675 / 1.3)).epsilon(1e-13));
  CHECK_FALSE(static_cast<bool>(r1.foot1));

  // lambda(a2) = a2^2, g2 = 0.8: exponent a2^3/(3*0.8)
  auto r2 = make_mu(sink_of(LambdaForm::A2, [](double, double, double a2) { return a2 * a2; }),
                    1.0, 0.8);
  CHECK(r2.mu(9.0, 9.0, 1.2) == doctest::Approx(std::exp(1.728 / 2.4)).epsilon(1e-13));

  // lambda(t) = 2t: mu = exp(t^2)
  auto rt = make_mu(sink_of(LambdaForm::T, [](double t, double, double) { return 2.0 * t; }),
                    1.0, 1.0);
  CHECK(rt.mu(0.9, 9.0, 9.0) == doctest::Approx(std::exp(0.81)).epsilon(1e-13));
  CHECK(rt.mu(0.0, 9.0, 9.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("characteristic-path rows match hand-integrated forms") {
  // lambda(t, a1) = t + a1 with g1 = 2: mu = exp(a1 t - t^2/2)
  auto ta1 = make_mu(sink_of(LambdaForm::TA1,
                             [](double t, double a1, double) { return t + a1; }),
                     2.0, 1.0);
  CHECK(ta1.mu(0.7, 1.1, 9.0) == doctest::Approx(std::exp(0.525)).epsilon(1e-13));
  CHECK(ta1.foot1(0.7, 1.1, 9.0) == doctest::Approx(1.1 - 2.0 * 0.7).epsilon(1e-15));

  // lambda(t, a2) = t*a2 with g2 = 0.5: mu = exp(a2 t^2/2 - t^3/12)
  auto ta2 = make_mu(sink_of(LambdaForm::TA2,
                             [](double t, double, double a2) { return t * a2; }),
                     1.0, 0.5);
  const double t = 0.8, a2 = 1.4;
  CHECK(ta2.mu(t, 9.0, a2) ==
        doctest::Approx(std::exp(a2 * t * t / 2.0 - t * t * t / 12.0)).epsilon(1e-13));
  CHECK(ta2.foot2(t, 9.0, a2) == doctest::Approx(a2 - 0.5 * t).epsilon(1e-15));

  // lambda(a1, a2) = a1 + a2 with g1 = g2 = 1: mu = exp(a1*a2)
  auto aa = make_mu(sink_of(LambdaForm::A1A2,
                            [](double, double a1, double a2) { return a1 + a2; }),
                    1.0, 1.0);
  CHECK(aa.mu(9.0, 1.2, 0.9) == doctest::Approx(std::exp(1.08)).epsilon(1e-13));
  CHECK(aa.foot2(9.0, 1.2, 0.9) == doctest::Approx(0.9 - 1.2).epsilon(1e-15));

  // lambda(t, a1, a2) = t + a1 + a2 with g = (1,1): mu = exp((a1+a2)t - t^2/2)
  auto taa = make_mu(sink_of(LambdaForm::TA1A2,
                             [](double t, double a1, double a2) { return t + a1 + a2; }),
                     1.0, 1.0);
  CHECK(taa.mu(0.6, 1.0, 0.5) ==
        doctest::Approx(std::exp(1.5 * 0.6 - 0.18)).epsilon(1e-13));
  CHECK(taa.foot1(0.6, 1.0, 0.5) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(taa.foot2(0.6, 1.0, 0.5) == doctest::Approx(-0.1).epsilon(1e-14));
}

TEST_CASE("weight rows that divide by a growth rate demand it positive") {
  auto lam = [](double, double a1, double a2) { return a1 + a2; };
  CHECK_THROWS_AS(make_mu(sink_of(LambdaForm::A1A2, lam), 0.0, 1.0), SetupError);
  CHECK_THROWS_AS(make_mu(sink_of(LambdaForm::A1, lam), 0.0, 1.0), SetupError);
  CHECK_THROWS_AS(make_mu(sink_of(LambdaForm::A2, lam), 1.0, 0.0), SetupError);
  CHECK_THROWS_AS(
      make_mu(sink_of(LambdaForm::Constant, lam, ConstantMuBranch::A1), 0.0, 1.0), SetupError);
  CHECK_NOTHROW(make_mu(sink_of(LambdaForm::TA1, lam), 0.0, 1.0));  // feet only, no division
  CHECK_THROWS_AS(make_mu(LinearSink{}, 1.0, 1.0), SetupError);     // nothing to build from
}

TEST_CASE("a supplied closed form bypasses quadrature") {
  LinearSink s;
  s.form = LambdaForm::A1A2;
  s.lambda = [](double, double a1, double a2) { return a1 + a2; };
  s.mu_closed_form = [](double, double a1, double a2) { return std::exp(a1 * a2); };
  auto m = make_mu(s, 1.0, 1.0, 8);  // panel count irrelevant for closed forms
  CHECK(m.mu(9.0, 1.7, 1.3) == std::exp(1.7 * 1.3));
  CHECK(static_cast<bool>(m.foot2));
}

TEST_CASE("every weight satisfies its transport identity") {
  // finite-difference residual of mu_t + g1 mu_a1 + g2 mu_a2 - lambda mu
  const double g1 = 1.3, g2 = 0.8, h = 1e-4;
  std::vector<std::pair<LambdaForm, Scalar3Fn>> rows = {
      {LambdaForm::Constant, [](double, double, double) { return 0.7; }},
      {LambdaForm::A1, [](double, double a1, double) { return 0.3 + 0.2 * a1 * a1; }},
      {LambdaForm::A2, [](double, double, double a2) { return 0.5 + 0.1 * a2 * a2; }},
      {LambdaForm::T, [](double t, double, double) { return 1.0 + 0.5 * std::sin(t); }},
      {LambdaForm::TA1, [](double t, double a1, double) { return 0.4 + 0.3 * t + 0.2 * a1; }},
      {LambdaForm::TA2, [](double t, double, double a2) { return 0.2 + 0.1 * t * a2; }},
      {LambdaForm::A1A2,
       [](double, double a1, double a2) { return 0.2 + 0.1 * a1 + 0.3 * a2 + 0.05 * a1 * a2; }},
      {LambdaForm::TA1A2,
       [](double t, double a1, double a2) { return 0.1 + 0.2 * t + 0.1 * a1 + 0.15 * a2; }},
  };

  for (auto& [form, lam] : rows) {
    auto m = make_mu(sink_of(form, lam), g1, g2, 512);
    CAPTURE(static_cast<int>(form));
    for (double t : {0.2, 0.5, 0.8}) {
      for (double a1 : {0.3, 0.9, 1.5}) {
        for (double a2 : {0.4, 1.0, 1.6}) {
          const double mu = m.mu(t, a1, a2);
          CHECK(mu > 0.0);
          const double dt = (m.mu(t + h, a1, a2) - m.mu(t - h, a1, a2)) / (2.0 * h);
          const double d1 = (m.mu(t, a1 + h, a2) - m.mu(t, a1 - h, a2)) / (2.0 * h);
          const double d2 = (m.mu(t, a1, a2 + h) - m.mu(t, a1, a2 - h)) / (2.0 * h);
          const double resid = dt + g1 * d1 + g2 * d2 - lam(t, a1, a2) * mu;
          CHECK(std::abs(resid) <= 1e-5 * mu * (1.0 + std::abs(lam(t, a1, a2))));
        }
      }
    }
  }
}
