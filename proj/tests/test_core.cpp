#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pbm2d/core.hpp"

using namespace pbm2d;

namespace {

GrowthSpec case2_growth() {
  return GrowthSpec::per_axis([](double a) { return 0.1 + 0.05 * a; },
                              [](double a) { return 0.5 + 0.25 * a; });
}

GrowthSpec case3_growth() {
  return GrowthSpec::coupled([](double a1, double a2) { return 0.25 + 0.5 * (a1 + a2); },
                             [](double a1, double a2) { return 0.5 + 0.25 * (a1 + a2); });
}

}  // namespace

TEST_CASE("cfl_numbers basic values") {
  auto [a, b] = cfl_numbers(1.0, 1.0, 0.02, 0.02, 0.02);
  CHECK(a == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b == doctest::Approx(1.0).epsilon(1e-15));

  auto [a2, b2] = cfl_numbers(0.0, 5.0, 0.1, 0.1, 0.25);
  CHECK(a2 == 0.0);
  CHECK(b2 == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("cfl_numbers rejects bad arguments") {
  CHECK_THROWS_AS(cfl_numbers(1, 1, 0.0, 0.1, 0.1), SetupError);
  CHECK_THROWS_AS(cfl_numbers(1, 1, -0.1, 0.1, 0.1), SetupError);
  CHECK_THROWS_AS(cfl_numbers(1, 1, 0.1, 0.0, 0.1), SetupError);
  CHECK_THROWS_AS(cfl_numbers(-1, 1, 0.1, 0.1, 0.1), SetupError);
}

TEST_CASE("check_stability matches the von Neumann region") {
  CHECK(check_stability(0.5, 0.5));
  CHECK(check_stability(1.0, 0.0));
  CHECK(check_stability(0.0, 0.0));
  CHECK_FALSE(check_stability(0.6, 0.6));
  CHECK_FALSE(check_stability(-0.1, 0.3));
  CHECK_FALSE(check_stability(0.3, -0.1));
  CHECK_FALSE(check_stability(1.2, 0.0));
}

TEST_CASE("stable_dt_unsplit on constant and per-axis growth") {
  Domain2D d{2.0, 2.0};
  CHECK(stable_dt_unsplit(GrowthSpec::constant(1, 1), 0.02, 0.02, d) ==
        doctest::Approx(0.01).epsilon(1e-14));
  // case-2 rates: max G1 = 0.2, max G2 = 1.0 at a = 2
  CHECK(stable_dt_unsplit(case2_growth(), 0.02, 0.02, d) ==
        doctest::Approx(1.0 / 60.0).epsilon(1e-12));
}

TEST_CASE("stable_dt_split values and degenerate axis") {
  Domain2D d{2.0, 2.0};
  CHECK(stable_dt_split(GrowthSpec::constant(1, 1), 0.02, 0.02, d) ==
        doctest::Approx(0.02).epsilon(1e-14));
  // case-3 rates peak at the far corner: G1 = 2.25, G2 = 1.5
  CHECK(stable_dt_split(case3_growth(), 0.02, 0.02, d) ==
        doctest::Approx(0.02 / 2.25).epsilon(1e-12));
  // degenerate g2 = 0 reduces to the single-axis limit da1/g1
  CHECK(stable_dt_split(GrowthSpec::constant(2, 0), 0.1, 0.1, d) ==
        doctest::Approx(0.05).epsilon(1e-14));
  CHECK_THROWS_AS(stable_dt_split(GrowthSpec::constant(0, 0), 0.1, 0.1, d), SetupError);
}

TEST_CASE("split dt is never below unsplit dt") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> c(0.05, 2.0), m(0.0, 1.5), len(0.5, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double c1 = c(rng), m1 = m(rng), c2 = c(rng), m2 = m(rng);
    auto g = GrowthSpec::per_axis([=](double a) { return c1 + m1 * a; },
                                  [=](double a) { return c2 + m2 * a; });
    Domain2D d{len(rng), len(rng)};
    const double da1 = d.l1 / 40.0, da2 = d.l2 / 40.0;
    CHECK(stable_dt_split(g, da1, da2, d) >= stable_dt_unsplit(g, da1, da2, d) - 1e-15);
  }
}

TEST_CASE("Axis1D validates its points") {
  CHECK_THROWS_AS(Axis1D({1.0}), SetupError);
  CHECK_THROWS_AS(Axis1D({0.0, 0.0}), SetupError);
  CHECK_THROWS_AS(Axis1D({0.0, -1.0}), SetupError);
  CHECK_THROWS_AS(Axis1D({0.0, std::nan("")}), SetupError);

  auto ax = Axis1D::uniform(0.0, 2.0, 101);
  CHECK(ax.size() == 101);
  CHECK(ax.front() == 0.0);
  CHECK(ax.back() == 2.0);
  CHECK(ax.min_spacing() == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(ax.max_spacing() == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("Field2D layout is a2-outer, a1-inner") {
  auto grid = std::make_shared<Grid2D>(Grid2D{Axis1D::uniform(0, 1, 3), Axis1D::uniform(0, 1, 2)});
  Field2D f(grid);
  f(2, 1) = 7.0;  // j = 2 along a1, k = 1 along a2
  CHECK(f.values()[1 * 3 + 2] == 7.0);
  CHECK(f.row(1)[2] == 7.0);
  CHECK(f.max_abs() == 7.0);

  CHECK_THROWS_AS(Field2D(grid, std::vector<double>(5, 0.0)), SetupError);

  auto s = Field2D::sample(grid, [](double a1, double a2) { return a1 + 10.0 * a2; });
  CHECK(s(2, 0) == doctest::Approx(1.0));
  CHECK(s(0, 1) == doctest::Approx(10.0));
}

TEST_CASE("JaggedMesh validates anchors and counts nodes") {
  std::vector<JaggedRow> rows;
  rows.push_back({0.0, Axis1D({0.0, 1.0, 2.0})});
  rows.push_back({0.5, Axis1D({0.0, 2.0})});
  JaggedMesh m(1, std::move(rows));
  CHECK(m.node_count() == 5);
  CHECK(m.line_axis() == 1);

  std::vector<JaggedRow> bad;
  bad.push_back({0.5, Axis1D({0.0, 1.0})});
  bad.push_back({0.5, Axis1D({0.0, 1.0})});
  CHECK_THROWS_AS(JaggedMesh(1, std::move(bad)), SetupError);
}

TEST_CASE("GrowthSpec evaluates every class through the unified accessors") {
  CHECK(GrowthSpec::constant(2, 3).rate1(9, 9, 9) == 2.0);
  CHECK(GrowthSpec::constant(2, 3).rate2(9, 9, 9) == 3.0);

  CHECK(case2_growth().rate1(0, 2.0, 0.0) == doctest::Approx(0.2));
  CHECK(case2_growth().rate2(0, 0.0, 2.0) == doctest::Approx(1.0));

  CHECK(case3_growth().rate1(0, 1.0, 1.0) == doctest::Approx(1.25));
  CHECK(case3_growth().rate2(0, 1.0, 1.0) == doctest::Approx(1.0));

  auto gt = GrowthSpec::time_only([](double t) { return 1.0 + t; }, [](double) { return 2.0; });
  CHECK(gt.rate1(0.5, 9, 9) == doctest::Approx(1.5));
  CHECK(gt.rate2(0.5, 9, 9) == doctest::Approx(2.0));
  CHECK(gt.time_dependent());

  auto gs = GrowthSpec::separable([](double t) { return 1.0 + t; },
                                  [](double a) { return 0.1 + 0.05 * a; },
                                  [](double) { return 1.0; }, [](double a) { return 1.0 + a; });
  CHECK(gs.rate1(1.0, 2.0, 0.0) == doctest::Approx(2.0 * 0.2));
  CHECK(gs.rate2(1.0, 0.0, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("growth positivity is sampled at problem construction") {
  Domain2D d{2.0, 2.0};
  auto f0 = [](double, double) { return 0.0; };

  // G1 crosses zero inside the domain
  auto bad = GrowthSpec::per_axis([](double a) { return 0.1 - 0.1 * a; },
                                  [](double) { return 1.0; });
  CHECK_THROWS_AS(ProblemSpec::make(bad, SourceSpec::none(), d, f0, 1.0), SetupError);

  // constant growth is exempt: zero rate is the documented degenerate limit
  CHECK_NOTHROW(ProblemSpec::make(GrowthSpec::constant(0, 5), SourceSpec::none(), d, f0, 1.0));
}

TEST_CASE("ProblemSpec validation") {
  Domain2D d{2.0, 2.0};
  auto f0 = [](double, double) { return 1.0; };
  auto g = GrowthSpec::constant(1, 1);

  CHECK_NOTHROW(ProblemSpec::make(g, SourceSpec::none(), d, f0, 0.0));  // t_end = 0 allowed
  CHECK_THROWS_AS(ProblemSpec::make(g, SourceSpec::none(), d, f0, -1.0), SetupError);
  CHECK_THROWS_AS(ProblemSpec::make(g, SourceSpec::none(), Domain2D{0.0, 2.0}, f0, 1.0),
                  SetupError);
  CHECK_THROWS_AS(ProblemSpec::make(g, SourceSpec::none(), d, Scalar2Fn{}, 1.0), SetupError);
}

TEST_CASE("SourceSpec accessors enforce kinds") {
  LinearSink sink;
  sink.form = LambdaForm::A1A2;
  sink.lambda = [](double, double a1, double a2) { return a1 + a2; };
  auto s = SourceSpec::linear_sink(sink);
  CHECK(s.kind() == SourceKind::LinearSink);
  CHECK(s.sink().form == LambdaForm::A1A2);
  CHECK_THROWS_AS(s.general_term(), SetupError);
  CHECK(SourceSpec::none().kind() == SourceKind::None);
  CHECK_THROWS_AS(SourceSpec::general(Scalar3Fn{}), SetupError);
}
