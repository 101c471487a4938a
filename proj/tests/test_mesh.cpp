#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "pbm2d/mesh.hpp"

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

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const char* name) : path(std::filesystem::temp_directory_path() / name) {}
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("build_uniform spans the domain inclusively") {
  auto g = build_uniform({2.0, 2.0}, 3, 3);
  CHECK(g.axis1.points()[0] == 0.0);
  CHECK(g.axis1.points()[1] == 1.0);
  CHECK(g.axis1.points()[2] == 2.0);
  CHECK(g.axis2.points()[2] == 2.0);

  auto fine = build_uniform({2.0, 2.0}, 101, 101);
  CHECK(fine.axis1.min_spacing() == doctest::Approx(0.02).epsilon(1e-13));
  CHECK(fine.axis2.max_spacing() == doctest::Approx(0.02).epsilon(1e-13));

  CHECK(build_uniform({1.0, 2.0}, 2, 2).node_count() == 4);
  CHECK_THROWS_AS(build_uniform({2.0, 2.0}, 1, 3), SetupError);
  CHECK_THROWS_AS(build_uniform({0.0, 2.0}, 3, 3), SetupError);
}

TEST_CASE("backward march: constant growth gives uniform spacing") {
  // step_i = 2*gamma_i*G_i*dt with gamma = 0.5 collapses to G_i*dt
  auto g = build_nonuniform_cfl1(GrowthSpec::constant(1.0, 1.0), {1.0, 1.0}, 0.1, 0.5);
  CHECK(g.n1() == 11);
  CHECK(g.n2() == 11);
  CHECK(std::abs(g.axis1.front()) < 1e-14);  // lands on zero up to rounding
  CHECK(g.axis1.min_spacing() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(g.axis1.max_spacing() == doctest::Approx(0.1).epsilon(1e-12));

  // cross-check against the equispaced constructor
  auto u = build_uniform({1.0, 1.0}, 11, 11);
  for (std::size_t j = 0; j < 11; ++j)
    CHECK(g.axis1[j] == doctest::Approx(u.axis1[j]).epsilon(1e-12));
}

TEST_CASE("gamma = 1 starves axis 2 and is rejected") {
  auto g = GrowthSpec::constant(0.5, 0.5);
  CHECK_THROWS_AS(build_nonuniform_cfl1(g, {1.0, 1.0}, 0.1, 1.0), SetupError);
  CHECK_THROWS_AS(build_nonuniform_cfl1(g, {1.0, 1.0}, 0.1, 1.5), SetupError);
  CHECK_THROWS_AS(build_nonuniform_cfl1(g, {1.0, 1.0}, 0.0, 0.5), SetupError);
  CHECK_THROWS_AS(build_nonuniform_cfl1(case3_growth(), {1.0, 1.0}, 0.1, 0.5), SetupError);
}

TEST_CASE("backward march node counts for affine per-axis growth") {
  auto g = build_nonuniform_cfl1(case2_growth(), {2.0, 2.0}, 0.05, 0.5);
  CHECK(g.n1() == 277);
  CHECK(g.n2() == 56);
  CHECK(g.axis1.back() == 2.0);
  CHECK(g.axis2.back() == 2.0);
  // first kept node sits just above zero; next step would cross
  CHECK(g.axis1.front() == doctest::Approx(0.0045716978749177663).epsilon(1e-13));
  CHECK(g.axis2.front() == doctest::Approx(0.0026300461364073234).epsilon(1e-13));
}

TEST_CASE("backward march is reproducible step by step") {
  auto g = build_nonuniform_cfl1(case2_growth(), {2.0, 2.0}, 0.05, 0.5);
  const auto growth = case2_growth();
  for (std::size_t j = g.n1() - 1; j > 0; --j) {
    const double step = (2.0 * 0.5) * growth.rate1(0.0, g.axis1[j], 0.0) * 0.05;
    CHECK(g.axis1[j] - step == g.axis1[j - 1]);  // bit-exact replay
  }
}

TEST_CASE("build_jagged degenerates to a uniform block for constant growth") {
  auto m = build_jagged(GrowthSpec::constant(1.0, 1.0), {1.0, 1.0}, 0.5, 1);
  CHECK(m.row_count() == 3);
  CHECK(m.node_count() == 9);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(m.row(k).anchor == doctest::Approx(0.5 * k));
    CHECK(m.row(k).line.size() == 3);
    CHECK(m.row(k).line[0] == 0.0);
    CHECK(m.row(k).line[1] == 0.5);
    CHECK(m.row(k).line[2] == 1.0);
  }
}

TEST_CASE("build_jagged node counts for coupled affine growth") {
  auto m2 = build_jagged(case3_growth(), {2.0, 2.0}, 0.01, 2);
  CHECK(m2.line_axis() == 2);
  CHECK(m2.row_count() == 118);
  CHECK(m2.node_count() == 25367);
  CHECK(m2.row(0).anchor == doctest::Approx(0.0033003554224148163).epsilon(1e-13));
  CHECK(m2.row(0).line.size() == 277);
  CHECK(m2.row(117).anchor == 2.0);

  auto m1 = build_jagged(case3_growth(), {2.0, 2.0}, 0.01, 1);
  CHECK(m1.row_count() == 162);
  CHECK(m1.node_count() == 30731);
  CHECK(m1.row(0).anchor == doctest::Approx(0.0098566963585512684).epsilon(1e-13));
  CHECK(m1.row(0).line.size() == 318);

  CHECK_THROWS_AS(build_jagged(case3_growth(), {2.0, 2.0}, 0.01, 3), SetupError);
  CHECK_THROWS_AS(build_jagged(case2_growth(), {2.0, 2.0}, 0.01, 1), SetupError);
}

TEST_CASE("rows inherit their spacing from the anchor coordinate") {
  // G1 depends on a2 only: each row is internally uniform, rows differ
  auto g = GrowthSpec::coupled([](double, double a2) { return 0.5 + a2; },
                               [](double, double) { return 1.0; });
  auto m = build_jagged(g, {2.0, 2.0}, 0.1, 1);
  for (const auto& row : m.rows()) {
    CHECK(row.line.max_spacing() - row.line.min_spacing() < 1e-12);
    CHECK(row.line.min_spacing() == doctest::Approx(0.1 * (0.5 + row.anchor)).epsilon(1e-12));
  }
  CHECK(m.row(0).line.min_spacing() < m.row(m.row_count() - 1).line.min_spacing());
}

TEST_CASE("random positive growth always yields strictly increasing meshes") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> c(0.2, 1.5), m(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double c1 = c(rng), m1 = m(rng), c2 = c(rng), m2 = m(rng);
    auto g = GrowthSpec::coupled(
        [=](double a1, double a2) { return c1 + m1 * (a1 + 0.5 * a2); },
        [=](double a1, double a2) { return c2 + m2 * (0.5 * a1 + a2); });
    // Axis1D and JaggedMesh constructors enforce monotonicity; reaching the
    // checks below means construction found no violation
    auto mesh = build_jagged(g, {1.0, 1.0}, 0.07, (i % 2) ? 1 : 2);
    CHECK(mesh.node_count() >= mesh.row_count());
    auto grid = build_nonuniform_cfl1(
        GrowthSpec::per_axis([=](double a) { return c1 + m1 * a; },
                             [=](double a) { return c2 + m2 * a; }),
        {1.0, 1.0}, 0.07, 0.5);
    CHECK(grid.n1() >= 2);
  }
}

TEST_CASE("mesh reports count nodes and bracket spacings") {
  auto rep = report_for(build_uniform({2.0, 1.0}, 5, 3));
  CHECK(rep.node_count == 15);
  CHECK(rep.min_spacing == doctest::Approx(0.5));
  CHECK(rep.max_spacing == doctest::Approx(0.5));

  auto jrep = report_for(build_jagged(case3_growth(), {2.0, 2.0}, 0.01, 2));
  CHECK(jrep.node_count == 25367);
  CHECK(jrep.min_spacing > 0.0);
  CHECK(jrep.max_spacing < 0.05);
}

TEST_CASE("grid files round-trip bit-exactly") {
  TempFile f("pbm2d_grid_roundtrip.txt");
  auto g = build_nonuniform_cfl1(case2_growth(), {2.0, 2.0}, 0.2, 0.5);
  write_mesh(f.path, g);
  auto back = read_mesh(f.path);
  auto* gb = std::get_if<Grid2D>(&back);
  REQUIRE(gb != nullptr);
  REQUIRE(gb->n1() == g.n1());
  REQUIRE(gb->n2() == g.n2());
  for (std::size_t j = 0; j < g.n1(); ++j) CHECK(gb->axis1[j] == g.axis1[j]);
  for (std::size_t k = 0; k < g.n2(); ++k) CHECK(gb->axis2[k] == g.axis2[k]);
}

TEST_CASE("jagged files round-trip bit-exactly") {
  TempFile f("pbm2d_jagged_roundtrip.txt");
  auto m = build_jagged(case3_growth(), {2.0, 2.0}, 0.25, 1);
  write_mesh(f.path, m);
  auto back = read_mesh(f.path);
  auto* mb = std::get_if<JaggedMesh>(&back);
  REQUIRE(mb != nullptr);
  REQUIRE(mb->row_count() == m.row_count());
  CHECK(mb->line_axis() == m.line_axis());
  for (std::size_t k = 0; k < m.row_count(); ++k) {
    CHECK(mb->row(k).anchor == m.row(k).anchor);
    REQUIRE(mb->row(k).line.size() == m.row(k).line.size());
    for (std::size_t j = 0; j < m.row(k).line.size(); ++j)
      CHECK(mb->row(k).line[j] == m.row(k).line[j]);
  }
}

TEST_CASE("read_mesh rejects malformed files") {
  TempFile f("pbm2d_bad_mesh.txt");
  auto put = [&](const char* text) {
    std::FILE* fp = std::fopen(f.path.string().c_str(), "w");
    REQUIRE(fp != nullptr);
    std::fputs(text, fp);
    std::fclose(fp);
  };
  put("");
  CHECK_THROWS_AS(read_mesh(f.path), SetupError);
  put("lattice 2 2\n");
  CHECK_THROWS_AS(read_mesh(f.path), SetupError);
  put("grid 2 2\n0 0\n1 0\n0 1\n");
  CHECK_THROWS_AS(read_mesh(f.path), SetupError);
  put("grid 2 2\n0 0\n1 0\n0 1\n2 1\n");  // inconsistent tensor structure
  CHECK_THROWS_AS(read_mesh(f.path), SetupError);
  CHECK_THROWS_AS(read_mesh("/nonexistent/pbm2d.txt"), SetupError);
}
