#include "pbm2d/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pbm2d/interp.hpp"

namespace pbm2d {

// ===== error metrics =======================================================

namespace {

void check_paired(std::span<const double> y, std::span<const double> y_ref, const char* what) {
  if (y.size() != y_ref.size())
    throw SetupError(std::string(what) + ": length mismatch (" + std::to_string(y.size()) +
                     " vs " + std::to_string(y_ref.size()) + ")");
  if (y.empty()) throw SetupError(std::string(what) + ": empty input");
}

}  // namespace

double rmse(std::span<const double> y, std::span<const double> y_ref) {
  check_paired(y, y_ref, "rmse");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - y_ref[i];
    acc += d * d;
  }
  return std::sqrt(acc / double(y.size()));
}

double mae(std::span<const double> y, std::span<const double> y_ref) {
  check_paired(y, y_ref, "mae");
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) worst = std::max(worst, std::abs(y[i] - y_ref[i]));
  return worst;
}

// ===== single-case runs ====================================================

std::filesystem::path default_cache_dir() {
  return std::filesystem::temp_directory_path() / "pbm2d-reference-cache";
}

namespace {

std::filesystem::path resolved_cache_dir(const RunCaseOptions& options) {
  return options.cache_dir.empty() ? default_cache_dir() : options.cache_dir;
}

// Oracle values at the output grid's nodes: the closed form when the case
// has one, otherwise the fine-mesh reference interpolated to the nodes.
std::vector<double> oracle_values(const CaseDefinition& cs, const Grid2D& grid,
                                  const RunCaseOptions& options) {
  std::vector<double> values;
  values.reserve(grid.node_count());
  if (cs.analytic) {
    const double t = cs.problem.t_end;
    for (std::size_t k = 0; k < grid.n2(); ++k)
      for (std::size_t j = 0; j < grid.n1(); ++j)
        values.push_back(cs.analytic(t, grid.axis1[j], grid.axis2[k]));
    return values;
  }
  if (cs.id != CaseId::Case4)
    throw SetupError("run_case: case has no closed form and no reference");
  const Field2D reference = reference_case4(options.reference_n, options.reference_dt,
                                            resolved_cache_dir(options), cs.problem.t_end);
  for (std::size_t k = 0; k < grid.n2(); ++k)
    for (std::size_t j = 0; j < grid.n1(); ++j)
      values.push_back(bilinear(reference, grid.axis1[j], grid.axis2[k]));
  return values;
}

}  // namespace

ErrorReport run_case(const CaseDefinition& cs, SchemeId scheme, std::size_t n1, std::size_t n2,
                     const RunCaseOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult run = advance(cs.problem, scheme, n1, n2, options.advance);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;

  const std::vector<double> oracle = oracle_values(cs, run.final_field.grid(), options);

  ErrorReport report;
  report.scheme = scheme;
  report.n1 = n1;
  report.n2 = n2;
  report.dt = run.dt_used;
  report.rmse = rmse(run.final_field.values(), oracle);
  report.mae = mae(run.final_field.values(), oracle);
  report.wall_time_seconds = elapsed.count();

  if (options.dump_field) write_field_csv(*options.dump_field, run.final_field);
  return report;
}

// ===== convergence studies =================================================

ConvergenceTable convergence_study(const CaseDefinition& cs, SchemeId scheme,
                                   std::span<const LadderRung> ladder,
                                   const RunCaseOptions& options) {
  if (ladder.size() < 3)
    throw SetupError("convergence_study: ladder needs at least 3 rungs, got " +
                     std::to_string(ladder.size()));
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i].n1 * ladder[i].n2 <= ladder[i - 1].n1 * ladder[i - 1].n2)
      throw SetupError("convergence_study: ladder must strictly increase in node count");

  // One reference generation up front so parallel rungs only read the cache.
  if (!cs.analytic && cs.id == CaseId::Case4)
    reference_case4(options.reference_n, options.reference_dt, resolved_cache_dir(options),
                    cs.problem.t_end);

  std::vector<std::future<ErrorReport>> futures;
  futures.reserve(ladder.size());
  for (const LadderRung& rung : ladder) {
    RunCaseOptions rung_options = options;
    rung_options.advance.dt = rung.dt ? rung.dt : options.advance.dt;
    rung_options.dump_field.reset();  // one shared path would race across rungs
    futures.push_back(std::async(std::launch::async, [&cs, scheme, rung, rung_options] {
      return run_case(cs, scheme, rung.n1, rung.n2, rung_options);
    }));
  }

  ConvergenceTable table;
  table.reports.reserve(ladder.size());
  for (auto& f : futures) table.reports.push_back(f.get());

  // At or below the precision floor a ratio measures roundoff, not order.
  constexpr double kFloor = 1e-13;
  table.observed_order.reserve(ladder.size() - 1);
  for (std::size_t i = 1; i < table.reports.size(); ++i) {
    const ErrorReport& coarse = table.reports[i - 1];
    const ErrorReport& fine = table.reports[i];
    const double h_ratio = std::sqrt(double((fine.n1 - 1) * (fine.n2 - 1)) /
                                     double((coarse.n1 - 1) * (coarse.n2 - 1)));
    double order = std::numeric_limits<double>::quiet_NaN();
    if (coarse.rmse > kFloor && fine.rmse > kFloor && h_ratio > 1.0)
      order = std::log(coarse.rmse / fine.rmse) / std::log(h_ratio);
    table.observed_order.push_back(order);
  }
  return table;
}

// ===== CSV emission ========================================================

namespace {

void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void append_report_fields(std::string& out, const ErrorReport& r) {
  out += scheme_id_name(r.scheme);
  out += ',';
  out += std::to_string(r.n1);
  out += ',';
  out += std::to_string(r.n2);
  out += ',';
  append_g17(out, r.dt);
  out += ',';
  append_g17(out, r.rmse);
  out += ',';
  append_g17(out, r.mae);
  out += ',';
  append_g17(out, r.wall_time_seconds);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw SetupError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw SetupError("write failed: " + path.string());
}

}  // namespace

std::string field_csv(const Field2D& field) {
  const Grid2D& grid = field.grid();
  std::string out = "a1,a2,value\n";
  out.reserve(out.size() + field.size() * 60);
  for (std::size_t k = 0; k < grid.n2(); ++k)
    for (std::size_t j = 0; j < grid.n1(); ++j) {
      append_g17(out, grid.axis1[j]);
      out += ',';
      append_g17(out, grid.axis2[k]);
      out += ',';
      append_g17(out, field(j, k));
      out += '\n';
    }
  return out;
}

void write_field_csv(const std::filesystem::path& path, const Field2D& field) {
  write_text(path, field_csv(field));
}

std::string report_csv_header() { return "scheme,n1,n2,dt,rmse,mae,wall_time_seconds\n"; }

std::string report_csv_row(const ErrorReport& report) {
  std::string out;
  append_report_fields(out, report);
  out += '\n';
  return out;
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::string out = "scheme,n1,n2,dt,rmse,mae,wall_time_seconds,observed_order\n";
  for (std::size_t i = 0; i < table.reports.size(); ++i) {
    append_report_fields(out, table.reports[i]);
    out += ',';
    if (i > 0 && i - 1 < table.observed_order.size()) append_g17(out, table.observed_order[i - 1]);
    out += '\n';
  }
  return out;
}

// ===== config files ========================================================

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& message) {
  throw SetupError("config: " + message);
}

void reject_unknown_keys(const json& object, std::initializer_list<const char*> allowed,
                         const char* where) {
  for (const auto& item : object.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known) config_error(std::string("unknown key \"") + item.key() + "\" in " + where);
  }
}

double take_number(const json& object, const char* key, const char* where) {
  const json& v = object.at(key);
  if (!v.is_number()) config_error(std::string(key) + " in " + where + " must be a number");
  return v.get<double>();
}

double take_number_or(const json& object, const char* key, const char* where, double fallback) {
  return object.contains(key) ? take_number(object, key, where) : fallback;
}

// Affix the closed-form single-coordinate map for G(a) = c + k*a:
//   map(a) = log1p(k*a/c)/k,  inverse(y) = c*expm1(k*y)/k, linear when k = 0.
void attach_affine_maps(PerAxisClosedForms& closed, int axis, double c, double k) {
  Scalar1Fn forward, inverse;
  if (k == 0.0) {
    forward = [c](double a) { return a / c; };
    inverse = [c](double y) { return c * y; };
  } else {
    forward = [c, k](double a) { return std::log1p(k * a / c) / k; };
    inverse = [c, k](double y) { return c * std::expm1(k * y) / k; };
  }
  if (axis == 1) {
    closed.map1 = std::move(forward);
    closed.map1_inverse = std::move(inverse);
  } else {
    closed.map2 = std::move(forward);
    closed.map2_inverse = std::move(inverse);
  }
}

struct AffineRate {
  double c = 0.0, k1 = 0.0, k2 = 0.0;
};

AffineRate parse_affine_rate(const json& object, const char* key) {
  if (!object.contains(key)) config_error(std::string("affine growth needs \"") + key + "\"");
  const json& v = object.at(key);
  if (!v.is_object()) config_error(std::string(key) + " of affine growth must be an object");
  reject_unknown_keys(v, {"c", "k1", "k2"}, key);
  AffineRate r;
  r.c = take_number_or(v, "c", key, 0.0);
  r.k1 = take_number_or(v, "k1", key, 0.0);
  r.k2 = take_number_or(v, "k2", key, 0.0);
  return r;
}

GrowthSpec growth_from_config(const json& growth) {
  if (!growth.is_object()) config_error("growth must be an object");
  if (!growth.contains("kind") || !growth.at("kind").is_string())
    config_error("growth needs a string \"kind\"");
  const std::string kind = growth.at("kind").get<std::string>();

  if (kind == "constant") {
    reject_unknown_keys(growth, {"kind", "g1", "g2"}, "growth");
    return GrowthSpec::constant(take_number(growth, "g1", "growth"),
                                take_number(growth, "g2", "growth"));
  }
  if (kind == "affine") {
    reject_unknown_keys(growth, {"kind", "g1", "g2"}, "growth");
    const AffineRate r1 = parse_affine_rate(growth, "g1");
    const AffineRate r2 = parse_affine_rate(growth, "g2");
    if (r1.k1 == 0.0 && r1.k2 == 0.0 && r2.k1 == 0.0 && r2.k2 == 0.0)
      return GrowthSpec::constant(r1.c, r2.c);
    if (r1.k2 == 0.0 && r2.k1 == 0.0) {
      // Each rate depends on its own coordinate only; the schemes that want
      // coordinate maps get them in closed form.
      PerAxisClosedForms closed;
      attach_affine_maps(closed, 1, r1.c, r1.k1);
      attach_affine_maps(closed, 2, r2.c, r2.k2);
      return GrowthSpec::per_axis([r1](double a) { return r1.c + r1.k1 * a; },
                                  [r2](double a) { return r2.c + r2.k2 * a; },
                                  std::move(closed));
    }
    if (r1.k1 == r1.k2 && r2.k1 == r2.k2)
      return GrowthSpec::coupled(
          [r1](double a1, double a2) { return r1.c + r1.k1 * (a1 + a2); },
          [r2](double a1, double a2) { return r2.c + r2.k1 * (a1 + a2); });
    config_error(
        "affine growth must decouple per axis (cross slope zero) or couple "
        "through a1 + a2 (k1 == k2)");
  }
  config_error("growth kind must be \"constant\" or \"affine\", got \"" + kind + "\"");
}

ProblemSpec custom_problem_from_config(const json& custom) {
  if (!custom.is_object()) config_error("custom block must be an object");
  reject_unknown_keys(custom, {"l1", "l2", "t_end", "growth", "seed"}, "custom");
  for (const char* key : {"l1", "l2", "t_end"})
    if (!custom.contains(key)) config_error(std::string("custom block needs \"") + key + "\"");
  if (!custom.contains("growth")) config_error("custom block needs \"growth\"");

  Domain2D domain{take_number(custom, "l1", "custom"), take_number(custom, "l2", "custom")};
  const double t_end = take_number(custom, "t_end", "custom");
  GrowthSpec growth = growth_from_config(custom.at("growth"));

  double amplitude = 50.0, center1 = 0.4, center2 = 0.4, width2 = 0.005;
  if (custom.contains("seed")) {
    const json& seed = custom.at("seed");
    if (!seed.is_object()) config_error("seed must be an object");
    reject_unknown_keys(seed, {"amplitude", "center1", "center2", "width2"}, "seed");
    amplitude = take_number_or(seed, "amplitude", "seed", amplitude);
    center1 = take_number_or(seed, "center1", "seed", center1);
    center2 = take_number_or(seed, "center2", "seed", center2);
    width2 = take_number_or(seed, "width2", "seed", width2);
    if (width2 <= 0.0) config_error("seed width2 must be positive");
  }
  Scalar2Fn initial = [amplitude, center1, center2, width2](double a1, double a2) {
    const double d1 = a1 - center1;
    const double d2 = a2 - center2;
    return amplitude * std::exp(-(d1 * d1 + d2 * d2) / width2);
  };

  return ProblemSpec::make(std::move(growth), SourceSpec::none(), domain, std::move(initial),
                           t_end);
}

template <typename T>
std::optional<T> take_optional(const json& object, const char* key, const char* expected) {
  if (!object.contains(key)) return std::nullopt;
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string(key) + " must be " + expected);
  }
}

}  // namespace

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open " + path.string());
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    config_error("parse error in " + path.string() + ": " + e.what());
  }
  if (!root.is_object()) config_error("top level must be an object");
  reject_unknown_keys(root,
                      {"case", "custom", "scheme", "n1", "n2", "dt", "axis2_first",
                       "source_first", "quadrature_panels", "ladder", "gamma", "out",
                       "dump_field", "cache_dir"},
                      "config");

  ConfigFile config;
  config.case_name = take_optional<std::string>(root, "case", "a string");
  config.scheme = take_optional<std::string>(root, "scheme", "a string");
  config.n1 = take_optional<std::size_t>(root, "n1", "a positive integer");
  config.n2 = take_optional<std::size_t>(root, "n2", "a positive integer");
  config.dt = take_optional<double>(root, "dt", "a number");
  config.axis2_first = take_optional<bool>(root, "axis2_first", "a boolean");
  config.source_first = take_optional<bool>(root, "source_first", "a boolean");
  config.quadrature_panels =
      take_optional<std::size_t>(root, "quadrature_panels", "a positive integer");
  if (auto ladder = take_optional<std::vector<std::size_t>>(root, "ladder", "an integer array"))
    config.ladder = std::move(*ladder);
  config.gamma = take_optional<double>(root, "gamma", "a number");
  config.out = take_optional<std::string>(root, "out", "a string");
  config.dump_field = take_optional<std::string>(root, "dump_field", "a string");
  config.cache_dir = take_optional<std::string>(root, "cache_dir", "a string");

  const bool wants_custom = config.case_name && *config.case_name == "custom";
  if (root.contains("custom") && !wants_custom)
    config_error("a custom block requires \"case\": \"custom\"");
  if (wants_custom) {
    if (!root.contains("custom")) config_error("\"case\": \"custom\" needs a custom block");
    config.custom = custom_problem_from_config(root.at("custom"));
  }
  return config;
}

}  // namespace pbm2d
