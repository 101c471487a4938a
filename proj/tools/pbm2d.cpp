// Benchmark CLI: single runs, convergence ladders, mesh emission, and the
// case/scheme listing. Exit codes: 0 success, 2 setup error (bad arguments,
// config, or scheme/problem mismatch), 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbm2d/harness.hpp"
#include "pbm2d/mesh.hpp"

using namespace pbm2d;

namespace {

// One subcommand's worth of raw option values. Fields stay unset unless the
// command line (or, as a fallback, the config file) supplies them.
struct Args {
  std::string config_path;
  std::string case_name;
  std::string scheme_name;
  std::optional<std::size_t> n1, n2;
  std::optional<double> dt;
  bool axis2_first = false;
  bool source_first = false;
  std::optional<std::size_t> panels;
  std::vector<std::size_t> ladder;
  std::optional<double> gamma;
  std::string out;
  std::string dump_field;
  std::string cache_dir;
  std::optional<int> jagged_axis;

  ConfigFile config;  // loaded when config_path is set
};

// The command line wins; the config file fills whatever it left unset.
void merge_config(Args& args, const CLI::App& cmd) {
  if (args.config_path.empty()) return;
  args.config = load_config(args.config_path);
  const ConfigFile& file = args.config;

  auto given = [&cmd](const std::string& name) {
    const CLI::Option* option = cmd.get_option_no_throw(name);
    return option != nullptr && option->count() > 0;
  };
  if (!given("--case") && file.case_name) args.case_name = *file.case_name;
  if (!given("--scheme") && file.scheme) args.scheme_name = *file.scheme;
  if (!args.n1 && file.n1) args.n1 = file.n1;
  if (!args.n2 && file.n2) args.n2 = file.n2;
  if (!args.dt && file.dt) args.dt = file.dt;
  if (!given("--axis2-first") && file.axis2_first) args.axis2_first = *file.axis2_first;
  if (!given("--source-first") && file.source_first) args.source_first = *file.source_first;
  if (!args.panels && file.quadrature_panels) args.panels = file.quadrature_panels;
  if (args.ladder.empty() && !file.ladder.empty()) args.ladder = file.ladder;
  if (!args.gamma && file.gamma) args.gamma = file.gamma;
  if (!given("--out") && file.out) args.out = *file.out;
  if (!given("--dump-field") && file.dump_field) args.dump_field = *file.dump_field;
  if (!given("--cache-dir") && file.cache_dir) args.cache_dir = *file.cache_dir;
}

void require(bool present, const char* what) {
  if (!present) throw SetupError(std::string("missing ") + what +
                                 " (pass the flag or supply it in --config)");
}

AdvanceOptions advance_options(const Args& args) {
  AdvanceOptions options;
  options.dt = args.dt;
  options.axis2_first = args.axis2_first;
  options.source_first = args.source_first;
  if (args.panels) options.quadrature_panels = *args.panels;
  return options;
}

RunCaseOptions run_options(const Args& args) {
  RunCaseOptions options;
  options.advance = advance_options(args);
  if (!args.dump_field.empty()) options.dump_field = args.dump_field;
  if (!args.cache_dir.empty()) options.cache_dir = args.cache_dir;
  return options;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw SetupError("cannot open for writing: " + path);
  out << content;
  if (!out) throw SetupError("write failed: " + path);
}

bool is_custom(const Args& args) { return args.case_name == "custom"; }

const ProblemSpec& custom_problem(const Args& args) {
  if (!args.config.custom)
    throw SetupError("case \"custom\" needs a --config file with a custom block");
  return *args.config.custom;
}

// ===== run =================================================================

int do_run(Args& args) {
  require(!args.case_name.empty(), "--case");
  require(!args.scheme_name.empty(), "--scheme");
  require(bool(args.n1), "--n1");
  require(bool(args.n2), "--n2");
  const SchemeId scheme = parse_scheme_id(args.scheme_name);

  ErrorReport report;
  if (is_custom(args)) {
    // No oracle for custom problems: advance, dump if asked, report nan errors.
    const ProblemSpec& problem = custom_problem(args);
    const auto t0 = std::chrono::steady_clock::now();
    RunResult run = advance(problem, scheme, *args.n1, *args.n2, advance_options(args));
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
    report.scheme = scheme;
    report.n1 = *args.n1;
    report.n2 = *args.n2;
    report.dt = run.dt_used;
    report.rmse = std::numeric_limits<double>::quiet_NaN();
    report.mae = std::numeric_limits<double>::quiet_NaN();
    report.wall_time_seconds = elapsed.count();
    if (!args.dump_field.empty()) write_field_csv(args.dump_field, run.final_field);
  } else {
    report = run_case(case_definition(parse_case_id(args.case_name)), scheme, *args.n1, *args.n2,
                      run_options(args));
  }

  const std::string csv = report_csv_header() + report_csv_row(report);
  std::cout << csv;
  if (!args.out.empty()) write_text_file(args.out, csv);
  return 0;
}

// ===== converge ============================================================

int do_converge(Args& args) {
  require(!args.case_name.empty(), "--case");
  require(!args.scheme_name.empty(), "--scheme");
  require(!args.ladder.empty(), "--ladder");
  if (is_custom(args))
    throw SetupError("convergence studies need an oracle; custom problems have none");
  const SchemeId scheme = parse_scheme_id(args.scheme_name);

  // An explicit dt belongs to the coarsest rung and refines with the grid,
  // keeping the CFL number fixed across the ladder.
  std::vector<LadderRung> ladder;
  ladder.reserve(args.ladder.size());
  for (std::size_t n : args.ladder) {
    LadderRung rung{n, n, {}};
    if (args.dt && n > 1)
      rung.dt = *args.dt * double(args.ladder.front() - 1) / double(n - 1);
    ladder.push_back(rung);
  }

  RunCaseOptions options = run_options(args);
  options.advance.dt.reset();  // per-rung steps live in the ladder
  const ConvergenceTable table =
      convergence_study(case_definition(parse_case_id(args.case_name)), scheme, ladder, options);

  const std::string csv = convergence_csv(table);
  std::cout << csv;
  if (!args.out.empty()) write_text_file(args.out, csv);
  return 0;
}

// ===== mesh ================================================================

int do_mesh(Args& args, bool gamma_given) {
  require(!args.case_name.empty(), "--case");
  require(bool(args.dt), "--dt");
  require(!args.out.empty(), "--out");

  const ProblemSpec& problem = is_custom(args)
                                   ? custom_problem(args)
                                   : case_definition(parse_case_id(args.case_name)).problem;

  const auto print = [&args](const MeshBuildReport& report) {
    std::cout << "nodes=" << report.node_count << " min_spacing=" << report.min_spacing
              << " max_spacing=" << report.max_spacing << " file=" << args.out << '\n';
  };
  if (problem.growth.kind() == GrowthKind::Coupled) {
    if (gamma_given)
      throw SetupError("--gamma splits the per-axis budget of the tensor mesh; "
                       "the jagged build for coupled growth has no such split");
    const JaggedMesh mesh =
        build_jagged(problem.growth, problem.domain, *args.dt, args.jagged_axis.value_or(2));
    write_mesh(args.out, mesh);
    print(report_for(mesh));
  } else {
    if (args.jagged_axis)
      throw SetupError("--axis picks the jagged line direction; this growth builds "
                       "a tensor mesh");
    const Grid2D grid = build_nonuniform_cfl1(problem.growth, problem.domain, *args.dt,
                                              args.gamma.value_or(0.5));
    write_mesh(args.out, grid);
    print(report_for(grid));
  }
  return 0;
}

// ===== list ================================================================

int do_list() {
  struct CaseRow {
    CaseId id;
    const char* blurb;
  };
  const CaseRow cases[] = {
      {CaseId::Case1, "constant unit growth, pure translation, closed form"},
      {CaseId::Case2, "per-axis affine growth, closed form"},
      {CaseId::Case3, "coupled affine growth, closed form"},
      {CaseId::Case4, "constant growth with a polynomial source, fine-mesh reference"},
      {CaseId::Case5, "constant growth with a linear removal term, closed form"},
      {CaseId::Appendix3, "the coupled-growth problem rerun on a fixed grid"},
  };

  std::cout << "cases:\n";
  for (const CaseRow& row : cases)
    std::cout << "  " << case_id_name(row.id) << (row.id == CaseId::Appendix3 ? "  " : "      ")
              << row.blurb << '\n';

  std::cout << "\nschemes:\n";
  for (SchemeId scheme : all_scheme_ids()) std::cout << "  " << scheme_id_name(scheme) << '\n';

  std::cout << "\ncompatibility (+ runs, - rejected):\n  ";
  std::cout.width(30);
  std::cout << std::left << "scheme";
  for (const CaseRow& row : cases) std::cout << ' ' << case_id_name(row.id);
  std::cout << '\n';
  for (SchemeId scheme : all_scheme_ids()) {
    std::cout << "  ";
    std::cout.width(30);
    std::cout << std::left << scheme_id_name(scheme);
    for (const CaseRow& row : cases) {
      bool ok = true;
      try {
        require_compatible(scheme, case_definition(row.id).problem);
      } catch (const SetupError&) {
        ok = false;
      }
      const std::size_t pad = std::string(case_id_name(row.id)).size();
      std::cout << ' ';
      std::cout.width(std::streamsize(pad));
      std::cout << std::left << (ok ? '+' : '-');
    }
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D population balance benchmark: operator-splitting and "
               "characteristics-based schemes for hyperbolic growth problems"};
  app.require_subcommand(1);

  Args args;

  auto add_common = [&args](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path,
                    "JSON config supplying any flag the command line leaves unset");
    cmd->add_option("--case", args.case_name,
                    "case1..case5, appendix3, or custom (custom needs --config)");
    cmd->add_option("--cache-dir", args.cache_dir,
                    "directory for the fine-mesh reference cache");
  };

  CLI::App* run = app.add_subcommand("run", "advance one case with one scheme and report errors");
  add_common(run);
  run->add_option("--scheme", args.scheme_name, "scheme id, see `list`");
  run->add_option("--n1", args.n1, "output nodes along a1");
  run->add_option("--n2", args.n2, "output nodes along a2");
  run->add_option("--dt", args.dt, "time step (default: the scheme family's largest exact "
                                   "or stable step)");
  run->add_flag("--axis2-first", args.axis2_first, "run the a2 sub-problem first in splits");
  run->add_flag("--source-first", args.source_first,
                "apply the source sub-step before the advections");
  run->add_option("--panels", args.panels, "quadrature panels for numerically built maps");
  run->add_option("--dump-field", args.dump_field, "write the final field as CSV here");
  run->add_option("--out", args.out, "write the error report as CSV here");

  CLI::App* converge =
      app.add_subcommand("converge", "run a resolution ladder and report observed orders");
  add_common(converge);
  converge->add_option("--scheme", args.scheme_name, "scheme id, see `list`");
  converge->add_option("--ladder", args.ladder, "comma-separated per-axis node counts")
      ->delimiter(',');
  converge->add_option("--dt", args.dt,
                       "coarsest-rung step; finer rungs scale it by (n0-1)/(n-1)");
  converge->add_flag("--axis2-first", args.axis2_first, "run the a2 sub-problem first in splits");
  converge->add_flag("--source-first", args.source_first,
                     "apply the source sub-step before the advections");
  converge->add_option("--panels", args.panels, "quadrature panels for numerically built maps");
  converge->add_option("--out", args.out, "write the convergence table as CSV here");

  CLI::App* mesh = app.add_subcommand(
      "mesh", "emit the full-step (CFL = 1) mesh a case's growth induces at a given dt");
  add_common(mesh);
  mesh->add_option("--dt", args.dt, "time step the mesh is built for");
  mesh->add_option("--gamma", args.gamma, "per-axis budget split of the tensor mesh, in [0, 1]");
  mesh->add_option("--axis", args.jagged_axis, "jagged line direction (1 or 2, default 2)");
  mesh->add_option("--out", args.out, "node file path");

  CLI::App* list = app.add_subcommand("list", "cases, schemes, and their compatibility");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      merge_config(args, *run);
      return do_run(args);
    }
    if (converge->parsed()) {
      merge_config(args, *converge);
      return do_converge(args);
    }
    if (mesh->parsed()) {
      merge_config(args, *mesh);
      return do_mesh(args, mesh->get_option("--gamma")->count() > 0);
    }
    if (list->parsed()) return do_list();
  } catch (const SetupError& e) {
    std::cerr << "setup error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
