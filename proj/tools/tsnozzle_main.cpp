// Batch entry point: background profiles, exit-pressure maps, single
// transonic-shock solves and stability sweeps over a perturbation family.
//
// Exit codes: 0 success, 2 solver non-convergence, 3 invalid input.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nozzle/driver.hpp"
#include "nozzle/io.hpp"

namespace {

using nozzle::Error;

struct RunSpec {
  std::string mode;
  std::string out_dir = ".";
  nozzle::GasModel gas;
  nozzle::NozzleGeom geom;
  nozzle::EntranceData entrance;
  double r_sh = 1.5;
  double p_exit = -1.0;  // overrides r_sh when set
  nozzle::PerturbationSpec pert;
  nozzle::SolverConfig config;
  std::vector<double> sigmas{1e-2, 5e-3, 2.5e-3};
  int pmap_samples = 9;
  bool serial = false;
};

// Plain key = value text file; '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (strip(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw Error("config line " + std::to_string(lineno) + ": empty key or value");
    kv[key] = val;
  }
  return kv;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  const double x = std::stod(v, &pos);
  if (pos != v.size()) throw Error("config key " + key + ": bad number '" + v + "'");
  return x;
}

void apply_config(RunSpec& rs, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "mode") rs.mode = v;
    else if (k == "out_dir") rs.out_dir = v;
    else if (k == "gamma") rs.gas.gamma = to_double(k, v);
    else if (k == "r_en") rs.geom.r_en = to_double(k, v);
    else if (k == "r_ex") rs.geom.r_ex = to_double(k, v);
    else if (k == "phi0") rs.geom.phi0 = to_double(k, v);
    else if (k == "rho_en") rs.entrance.rho_en = to_double(k, v);
    else if (k == "u_en") rs.entrance.u_en = to_double(k, v);
    else if (k == "p_en") rs.entrance.p_en = to_double(k, v);
    else if (k == "r_sh") rs.r_sh = to_double(k, v);
    else if (k == "p_exit") rs.p_exit = to_double(k, v);
    else if (k == "a_potential") rs.pert.upstream.a_potential = to_double(k, v);
    else if (k == "a_entropy") rs.pert.upstream.a_entropy = to_double(k, v);
    else if (k == "a_swirl") rs.pert.upstream.a_swirl = to_double(k, v);
    else if (k == "a_psi") rs.pert.upstream.a_psi = to_double(k, v);
    else if (k == "k_mode") rs.pert.upstream.k_mode = int(to_double(k, v));
    else if (k == "a_exit_cos") rs.pert.a_exit_cos = to_double(k, v);
    else if (k == "a_exit_uniform") rs.pert.a_exit_uniform = to_double(k, v);
    else if (k == "exit_k_mode") rs.pert.exit_k_mode = int(to_double(k, v));
    else if (k == "nr") rs.config.nr = int(to_double(k, v));
    else if (k == "nphi") rs.config.nphi = int(to_double(k, v));
    else if (k == "max_outer") rs.config.max_outer = int(to_double(k, v));
    else if (k == "max_inner") rs.config.max_inner = int(to_double(k, v));
    else if (k == "max_pressure_iters")
      rs.config.max_pressure_iters = int(to_double(k, v));
    else if (k == "tol_front") rs.config.tol_front = to_double(k, v);
    else if (k == "tol_field") rs.config.tol_field = to_double(k, v);
    else if (k == "tol_pressure") rs.config.tol_pressure = to_double(k, v);
    else if (k == "omega_front") rs.config.omega_front = to_double(k, v);
    else if (k == "omega_psi") rs.config.omega_psi = to_double(k, v);
    else if (k == "sigma_admissible") rs.config.sigma_admissible = to_double(k, v);
    else if (k == "alpha_norm") rs.config.alpha_norm = to_double(k, v);
    else if (k == "front_init_offset")
      rs.config.front_init_offset = to_double(k, v);
    else if (k == "pmap_samples") rs.pmap_samples = int(to_double(k, v));
    else if (k == "serial") rs.serial = v == "1" || v == "true";
    else if (k == "sigmas") {
      rs.sigmas.clear();
      std::stringstream ss(v);
      std::string tok;
      while (std::getline(ss, tok, ','))
        rs.sigmas.push_back(to_double(k, tok));
      if (rs.sigmas.empty()) throw Error("config key sigmas: empty list");
    } else {
      throw Error("unknown config key '" + k + "'");
    }
  }
}

std::filesystem::path out_path(const RunSpec& rs, const std::string& name) {
  return std::filesystem::path(rs.out_dir) / name;
}

nozzle::RadialProfile make_profile(const RunSpec& rs) {
  double r_sh = rs.r_sh;
  if (rs.p_exit > 0.0)
    r_sh = nozzle::shock_from_exit_pressure(rs.geom, rs.entrance, rs.p_exit,
                                            rs.gas);
  return nozzle::RadialProfile(rs.geom, rs.entrance, r_sh, rs.gas);
}

int run_background(const RunSpec& rs) {
  const auto range = nozzle::exit_pressure_range(rs.geom, rs.entrance, rs.gas);
  const nozzle::RadialProfile profile = make_profile(rs);
  profile.write_csv(out_path(rs, "profile.csv").string());
  std::string rep;
  rep += "{\n";
  rep += "  \"r_sh\": " + nozzle::format_double(profile.r_sh()) + ",\n";
  rep += "  \"mass_flux\": " + nozzle::format_double(profile.mass_flux()) + ",\n";
  rep += "  \"b0\": " + nozzle::format_double(profile.gas().b0) + ",\n";
  rep += "  \"p_min\": " + nozzle::format_double(range.p_min) + ",\n";
  rep += "  \"p_max\": " + nozzle::format_double(range.p_max) + ",\n";
  rep += "  \"p_exit\": " +
         nozzle::format_double(profile.p_plus(rs.geom.r_ex)) + "\n";
  rep += "}\n";
  nozzle::write_file_atomic(out_path(rs, "background.json").string(), rep);
  std::printf("background: r_sh = %.12g, p_exit = %.12g, p in (%.12g, %.12g)\n",
              profile.r_sh(), profile.p_plus(rs.geom.r_ex), range.p_min,
              range.p_max);
  return 0;
}

int run_pmap(const RunSpec& rs) {
  const auto range = nozzle::exit_pressure_range(rs.geom, rs.entrance, rs.gas);
  std::string body = "p_c,r_c\n";
  const int n = rs.pmap_samples;
  for (int k = 0; k < n; ++k) {
    const double t = double(k + 1) / double(n + 1);
    const double pc = range.p_min + t * (range.p_max - range.p_min);
    const double rc =
        nozzle::shock_from_exit_pressure(rs.geom, rs.entrance, pc, rs.gas);
    body += nozzle::format_csv_row({pc, rc});
  }
  nozzle::write_file_atomic(out_path(rs, "pmap.csv").string(), body);
  std::printf("p-map: %d rows over (%.12g, %.12g) -> pmap.csv\n", n, range.p_min,
              range.p_max);
  return 0;
}

int run_solve(const RunSpec& rs) {
  const nozzle::RadialProfile profile = make_profile(rs);
  const nozzle::Solution sol =
      nozzle::solve_for_exit_pressure(profile, rs.pert, rs.config);
  nozzle::write_file_atomic(out_path(rs, "report.json").string(),
                            sol.report.to_json());
  nozzle::write_solution_csv(out_path(rs, "fields.csv").string(), sol);
  nozzle::write_front_csv(out_path(rs, "front.csv").string(), sol.front);
  std::vector<double> phi_nodes(sol.grid.npn());
  for (int j = 0; j < sol.grid.npn(); ++j) phi_nodes[j] = sol.grid.phi(j);
  nozzle::write_front_history_csv(out_path(rs, "front_history.csv").string(),
                                  sol.front_history, phi_nodes);
  nozzle::write_residual_csv(out_path(rs, "residuals.csv").string(),
                             sol.residual_history);
  nozzle::write_gnuplot_script(out_path(rs, "plots.gp").string(), "fields.csv",
                               "front.csv", "residuals.csv");
  std::printf("solve: converged = %d, sigma = %.3e, deviation = %.3e\n",
              int(sol.report.converged), sol.report.sigma,
              sol.report.deviation.total());
  return sol.report.converged ? 0 : 2;
}

int run_sweep(const RunSpec& rs) {
  const nozzle::RadialProfile profile = make_profile(rs);
  const nozzle::SweepResult res =
      nozzle::stability_sweep(profile, rs.pert, rs.sigmas, rs.config);
  std::string body = "sigma_request,sigma_measured,deviation,ratio,converged\n";
  for (const auto& row : res.rows)
    body += nozzle::format_csv_row({row.sigma_request, row.sigma_measured,
                                    row.deviation, row.ratio,
                                    double(row.converged)});
  nozzle::write_file_atomic(out_path(rs, "sweep.csv").string(), body);
  std::printf("sweep: %zu rows, ratio spread = %.3f%%, linear regime = %d\n",
              res.rows.size(), 100.0 * res.ratio_spread, int(res.linear_regime));
  for (const auto& row : res.rows)
    if (!row.converged) return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady axisymmetric transonic-shock solver for divergent nozzles"};
  std::string config_path, mode_flag, out_dir_flag;
  double gamma_flag = -1.0, r_sh_flag = -1.0, p_exit_flag = -1.0;
  bool serial_flag = false;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--mode", mode_flag, "background | p-map | solve | sweep");
  app.add_option("--out-dir", out_dir_flag, "output directory");
  app.add_option("--gamma", gamma_flag, "adiabatic exponent");
  app.add_option("--r-sh", r_sh_flag, "background shock radius");
  app.add_option("--p-exit", p_exit_flag, "background exit pressure");
  app.add_flag("--serial", serial_flag, "run all kernels on one thread");

  CLI11_PARSE(app, argc, argv);

  RunSpec rs;
  try {
    if (!config_path.empty()) apply_config(rs, parse_config_file(config_path));
    if (!mode_flag.empty()) rs.mode = mode_flag;
    if (!out_dir_flag.empty()) rs.out_dir = out_dir_flag;
    if (gamma_flag > 0.0) rs.gas.gamma = gamma_flag;
    if (r_sh_flag > 0.0) rs.r_sh = r_sh_flag;
    if (p_exit_flag > 0.0) rs.p_exit = p_exit_flag;
    if (serial_flag) rs.serial = true;
    if (rs.serial) {
      nozzle::par::set_default_mode(nozzle::par::ExecMode::Serial);
      rs.config.mode = nozzle::par::ExecMode::Serial;
    }
    rs.geom.validate();
    rs.entrance.validate(nozzle::GasModel{
        rs.gas.gamma,
        nozzle::bernoulli(
            {rs.entrance.rho_en, {rs.entrance.u_en, 0, 0}, rs.entrance.p_en},
            rs.gas)});
    if (rs.mode.empty())
      throw Error("no mode given (use --mode or 'mode = ...' in the config)");
    std::filesystem::create_directories(rs.out_dir);
    if (rs.mode == "background") return run_background(rs);
    if (rs.mode == "p-map") return run_pmap(rs);
    if (rs.mode == "solve") return run_solve(rs);
    if (rs.mode == "sweep") return run_sweep(rs);
    throw Error("unknown mode '" + rs.mode + "'");
  } catch (const nozzle::MaxIterations& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
