#include "geopmp/cli.hpp"

#include "geopmp/errors.hpp"
#include "geopmp/frequency.hpp"
#include "geopmp/io.hpp"
#include "geopmp/pmp.hpp"
#include "geopmp/solvers.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>

namespace geopmp {

namespace {

struct UsageError : Error {
  using Error::Error;
};

double default_tolerance() {
  const char* env = std::getenv("GEOPMP_TOL");
  if (!env || !*env) return kDefaultPmpTolerance;
  try {
    size_t pos = 0;
    const double v = std::stod(env, &pos);
    if (pos != std::string(env).size() || !(v > 0.0)) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("GEOPMP_TOL must be a positive number, got '") + env + "'");
  }
}

void summarize(const PMPReport& r, std::ostream& err) {
  auto mark = [](bool ok) { return ok ? "ok  " : "FAIL"; };
  err << "feasible          " << mark(r.feasible) << "\n"
      << "adjoint dynamics  " << mark(r.adjoint_ok()) << " " << r.adjoint_dynamics << "\n"
      << "transversality    " << mark(r.transversality_ok()) << " " << r.transversality << "\n"
      << "stationarity      " << mark(r.stationarity_ok()) << " " << r.stationarity
      << (r.stationarity_checked ? "" : " (not checked)") << "\n"
      << "complementarity   " << mark(r.complementarity_ok()) << " " << r.complementarity << "\n"
      << "nonnegativity     " << mark(r.nonnegativity_ok()) << " " << r.nonnegativity_violation << "\n"
      << "nontriviality     " << mark(r.nontriviality_ok()) << " " << r.nontriviality_mass << "\n";
  for (const auto& n : r.notes) err << "note: " << n << "\n";
  err << (r.all_pass() ? "PASS" : "FAIL") << " (tolerance " << r.tolerance << ")\n";
}

int cmd_verify(const std::string& problem_path, const std::string& traj_path,
               const std::string& cert_path, std::optional<double> tol, std::ostream& out,
               std::ostream& err) {
  const double t = tol ? *tol : default_tolerance();
  const ControlProblem problem = parse_problem_file(problem_path);
  const Trajectory traj = trajectory_from_csv(problem, read_text_file(traj_path));
  Json j;
  PMPReport report;
  if (!cert_path.empty()) {
    Json cj;
    try {
      cj = Json::parse(read_text_file(cert_path));
    } catch (const Json::parse_error& e) {
      throw ParseError("", std::string("certificate: invalid JSON: ") + e.what());
    }
    const PMPCertificate cert = certificate_from_json(problem, cj);
    report = verify(problem, traj, cert, t);
    j["certificate"] = to_json(cert);
    j["certificate_source"] = "file";
  } else {
    RecoveryOptions ro;
    ro.tolerance = t;
    const auto rec = recover_multipliers(problem, traj, ro);
    report = rec.report;
    j["certificate"] = to_json(rec.certificate);
    j["certificate_source"] = "recovered";
    j["lp_residual"] = rec.lp_residual;
  }
  j["report"] = to_json(report);
  out << j.dump(2) << "\n";
  summarize(report, err);
  return report.all_pass() ? kExitPass : kExitFail;
}

int cmd_solve(const std::string& problem_path, const std::string& method, double grid_res,
              int max_iters, unsigned seed, std::optional<double> tol, const std::string& csv_path,
              const std::string& init_path, std::ostream& out, std::ostream& err) {
  const ControlProblem problem = parse_problem_file(problem_path);
  SolveOptions opts;
  try {
    opts.method = parse_solve_method(method);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  opts.grid_resolution = grid_res;
  opts.max_iters = max_iters;
  opts.seed = seed;
  opts.verify_tol = tol ? *tol : default_tolerance();
  try {
    opts.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::vector<Vec> init;
  if (!init_path.empty()) init = trajectory_from_csv(problem, read_text_file(init_path)).controls;

  SolveResult r;
  try {
    r = solve(problem, opts, init);
  } catch (const NonConvergence& e) {
    Json j;
    j["method"] = to_string(opts.method);
    j["status"] = "non-convergence";
    j["converged"] = false;
    j["final_residual"] = e.final_residual();
    j["message"] = e.what();
    out << j.dump(2) << "\n";
    err << "solve: " << e.what() << "\n";
    return kExitFail;
  } catch (const InfeasibleError& e) {
    Json j;
    j["method"] = to_string(opts.method);
    j["status"] = "infeasible";
    j["converged"] = false;
    j["message"] = e.what();
    out << j.dump(2) << "\n";
    err << "solve: " << e.what() << "\n";
    return kExitFail;
  }
  const std::string csv = trajectory_to_csv(r.trajectory);
  if (!csv_path.empty()) write_text_file(csv_path, csv);
  Json j = to_json(r);
  j["trajectory_csv"] = csv;
  out << j.dump(2) << "\n";
  err << "method " << to_string(r.method) << ", status " << r.status << ", objective " << r.objective
      << ", iterations " << r.iterations << "\n";
  summarize(r.pmp_report, err);
  return r.converged ? kExitPass : kExitFail;
}

int cmd_freq(const std::string& problem_path, int horizon, int control_dim,
             const std::vector<std::string>& allowed, std::ostream& out, std::ostream& err) {
  FrequencySpec spec;
  if (!problem_path.empty()) {
    spec = parse_problem_file(problem_path).freq;
  } else {
    if (horizon < 1 || control_dim < 1)
      throw UsageError("freq-matrices needs --problem or --horizon and --control-dim");
    spec = FrequencySpec::unconstrained(horizon, control_dim);
    if (!allowed.empty()) {
      if (static_cast<int>(allowed.size()) != control_dim)
        throw UsageError("give one --allowed list per control component");
      for (int k = 0; k < control_dim; ++k) {
        std::set<int> bins;
        std::stringstream ss(allowed[k]);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          if (tok.empty()) continue;
          try {
            bins.insert(std::stoi(tok));
          } catch (const std::exception&) {
            throw UsageError("--allowed expects comma-separated bins, got '" + allowed[k] + "'");
          }
        }
        spec.allowed_support[k] = bins;
      }
    }
    try {
      spec.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  const auto mats = build_freq_matrices(spec);
  out << to_json(mats).dump(2) << "\n";
  err << "ell = " << mats.ell << " constraint rows for T = " << mats.horizon << ", m = "
      << mats.control_dim << "\n";
  return kExitPass;
}

int cmd_dft(const std::string& input, int column, std::ostream& out, std::ostream& err) {
  const auto rows = read_numeric_csv(read_text_file(input));
  if (rows.empty()) throw UsageError("dft: input has no numeric rows");
  Vec seq(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (column < 0 || column >= static_cast<int>(rows[i].size()))
      throw UsageError("dft: column " + std::to_string(column) + " missing in row " + std::to_string(i));
    seq(i) = rows[i][column];
  }
  const CVec v = dft(seq);
  out << dft_to_csv(v);
  const auto s = support(v);
  err << "T = " << seq.size() << ", support {";
  bool first = true;
  for (int b : s) {
    err << (first ? "" : ", ") << b;
    first = false;
  }
  err << "}\n";
  return kExitPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete-time optimal control on embedded manifolds", "geopmp"};
  app.require_subcommand(1);

  std::string problem_path, traj_path, cert_path, method = "direct-grid", csv_path, init_path, input;
  std::optional<double> tol;
  double grid_res = 1e-3;
  int max_iters = 500;
  unsigned seed = 0;
  int horizon = 0, control_dim = 0, column = 0;
  std::vector<std::string> allowed;

  auto* verify_cmd = app.add_subcommand("verify", "Check the necessary conditions on a trajectory");
  verify_cmd->add_option("--problem,-p", problem_path, "Problem JSON")->required();
  verify_cmd->add_option("--trajectory,-x", traj_path, "Trajectory CSV")->required();
  verify_cmd->add_option("--certificate,-c", cert_path, "Certificate JSON (recovered when absent)");
  verify_cmd->add_option("--tol", tol, "Verification tolerance");

  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file");
  solve_cmd->add_option("--problem,-p", problem_path, "Problem JSON")->required();
  solve_cmd->add_option("--method", method, "direct-grid | projected-descent | shooting");
  solve_cmd->add_option("--grid-res", grid_res, "Grid spacing per control coordinate");
  solve_cmd->add_option("--max-iters", max_iters, "Iteration limit");
  solve_cmd->add_option("--seed", seed, "Multistart seed");
  solve_cmd->add_option("--tol", tol, "Verification tolerance of the attached report");
  solve_cmd->add_option("--csv", csv_path, "Write the trajectory CSV here");
  solve_cmd->add_option("--init", init_path, "Initial guess trajectory CSV (shooting)");

  auto* freq_cmd = app.add_subcommand("freq-matrices", "Print the frequency constraint matrices");
  freq_cmd->add_option("--problem,-p", problem_path, "Problem JSON");
  freq_cmd->add_option("--horizon", horizon, "Horizon T");
  freq_cmd->add_option("--control-dim", control_dim, "Control dimension m");
  freq_cmd->add_option("--allowed", allowed, "Allowed bins per component, comma separated");

  auto* dft_cmd = app.add_subcommand("dft", "DFT of a sequence read from CSV");
  dft_cmd->add_option("--input,-i", input, "CSV file")->required();
  dft_cmd->add_option("--column", column, "Column to transform (default 0)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*verify_cmd) return cmd_verify(problem_path, traj_path, cert_path, tol, out, err);
    if (*solve_cmd)
      return cmd_solve(problem_path, method, grid_res, max_iters, seed, tol, csv_path, init_path, out, err);
    if (*freq_cmd) return cmd_freq(problem_path, horizon, control_dim, allowed, out, err);
    if (*dft_cmd) return cmd_dft(input, column, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  } catch (const SingularStationarity& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  } catch (const Error& e) {
    // Unreadable inputs and unmet solver preconditions.
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args) { return run_cli(args, std::cout, std::cerr); }

}  // namespace geopmp
