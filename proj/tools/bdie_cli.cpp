// Command-line front end. CSV goes to standard output unless an output path is given.
// Exit codes: 0 all checks passed, 1 a check failed or a run aborted, 2 usage error.

#include "bdie/acceptance.hpp"
#include "bdie/error.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

int emit(const bdie::Rows& rows, const std::string& path) {
  if (path.empty()) {
    bdie::write_csv(std::cout, rows);
  } else {
    std::ofstream out(path);
    bdie::require(static_cast<bool>(out), bdie::ErrorKind::resource, "cannot open '" + path + "' for writing");
    bdie::write_csv(out, rows);
  }
  return bdie::all_passed(rows) ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-domain integral equation solver and verification harness"};
  app.require_subcommand(1);

  auto* mesh = app.add_subcommand("mesh", "Mesh utilities");
  mesh->require_subcommand(1);
  auto* gen = mesh->add_subcommand("gen", "Generate a cube or ball mesh");
  std::string mesh_shape = "cube", mesh_out;
  int refine = 2;
  gen->add_option("--shape", mesh_shape, "cube or ball")->check(CLI::IsMember({"cube", "ball"}));
  gen->add_option("--refine", refine, "cells per cube edge, or ball subdivision level")->check(CLI::NonNegativeNumber);
  gen->add_option("--out", mesh_out, "output path")->required();

  auto* kernels = app.add_subcommand("kernels-check", "Kernel values against closed forms");
  std::string out_path;
  kernels->add_option("--out", out_path, "CSV output path");

  auto* identities = app.add_subcommand("identities", "Transfer, jump, sphere and Green identity checks");
  std::string id_shape = "ball";
  int id_level = 2;
  identities->add_option("--shape", id_shape, "cube or ball")->check(CLI::IsMember({"cube", "ball"}));
  identities->add_option("--level", id_level, "refinement level")->check(CLI::NonNegativeNumber);
  identities->add_option("--out", out_path, "CSV output path");

  auto* solve = app.add_subcommand("solve", "Solve one manufactured problem");
  std::string problem, system_id, case_id = "M1", solve_shape = "cube", solver = "lu", lifting = "hat";
  int solve_level = 2;
  bool no_stabilize = false;
  solve->add_option("--problem", problem, "dirichlet or neumann")
      ->required()
      ->check(CLI::IsMember({"dirichlet", "neumann"}));
  solve->add_option("--system", system_id, "d1, d2delta, d2, n1delta, n1 or n2")->required();
  solve->add_option("--case", case_id, "manufactured case id (M0, M1, M2)");
  solve->add_option("--shape", solve_shape, "cube or ball")->check(CLI::IsMember({"cube", "ball"}));
  solve->add_option("--level", solve_level, "refinement level")->check(CLI::NonNegativeNumber);
  solve->add_flag("--no-stabilize", no_stabilize, "solve the singular Neumann system by least squares");
  solve->add_option("--solver", solver, "lu or gmres")->check(CLI::IsMember({"lu", "gmres"}));
  solve->add_option("--lifting", lifting, "hat or harmonic")->check(CLI::IsMember({"hat", "harmonic"}));
  solve->add_option("--out", out_path, "CSV output path");

  auto* convergence = app.add_subcommand("convergence", "Refinement study from a config file");
  std::string config_path;
  convergence->add_option("--config", config_path, "study config path")->required();

  auto* accept = app.add_subcommand("accept", "Run one acceptance criterion");
  int criterion = 1;
  accept->add_option("--criterion", criterion, "criterion number")
      ->required()
      ->check(CLI::Range(1, bdie::kCriterionCount));
  accept->add_option("--out", out_path, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const bdie::MeshPair m = bdie::build_mesh(mesh_shape, refine);
      bdie::save_mesh(mesh_out, m);
      std::cerr << fmt::format("{} level {}: {} vertices, {} tets, {} boundary triangles, h = {:.4g}\n", m.shape,
                               m.level, m.dom.num_vertices(), m.dom.num_tets(), m.bnd.num_triangles(), m.h);
      return 0;
    }
    if (kernels->parsed()) return emit(bdie::run_kernels_check(), out_path);
    if (identities->parsed()) return emit(bdie::run_identity_suite(id_shape, id_level), out_path);
    if (solve->parsed()) {
      bdie::SolveRequest req;
      req.system = bdie::system_from_id(system_id);
      const bool dirichlet = bdie::is_dirichlet(req.system);
      if (dirichlet != (problem == "dirichlet"))
        bdie::fail(bdie::ErrorKind::usage, "system " + system_id + " does not solve a " + problem + " problem");
      req.case_id = case_id;
      bdie::find_case(case_id);
      req.shape = solve_shape;
      req.level = solve_level;
      req.stabilize = !no_stabilize;
      req.solver = bdie::solver_path_from_id(solver);
      req.lifting = bdie::lifting_from_id(lifting);
      return emit(bdie::run_solve(req), out_path);
    }
    if (convergence->parsed()) {
      const bdie::StudyConfig cfg = bdie::load_study_config(config_path);
      return emit(bdie::run_convergence(cfg), cfg.output);
    }
    if (accept->parsed()) {
      const bdie::CriterionResult r = bdie::run_criterion(criterion);
      std::cerr << fmt::format("criterion {}: {}  {}\n", r.id, r.passed() ? "PASS" : "FAIL", r.title);
      return emit(r.rows, out_path);
    }
  } catch (const bdie::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.kind() == bdie::ErrorKind::usage) {
      std::cerr << app.help();
      return kExitUsage;
    }
    return kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
