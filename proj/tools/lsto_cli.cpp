#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lsto/config.hpp"
#include "lsto/driver.hpp"
#include "lsto/output.hpp"

namespace fs = std::filesystem;
using namespace lsto;

namespace {

std::vector<double> parse_radius_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::runtime_error("empty radius list");
  return out;
}

struct RunOutputs {
  RunResult result;
  Evaluation final_eval;
};

RunOutputs run_problem(const RunConfig& cfg, const fs::path& outdir, int output_every) {
  fs::create_directories(outdir);
  Driver driver(build_problem(cfg));

  Evaluation last;
  auto on_iter = [&](const IterationRecord& rec, const DesignVector&, const Evaluation& ev) {
    last = ev;
    if (rec.iter % output_every == 0)
      write_vtk((outdir / ("state_" + std::to_string(rec.iter) + ".vtk")).string(),
                driver.spec().grid, make_snapshot(ev));
    std::printf("it %4d  z %12.6g  F %10.5g  g1 %10.3g  Psi %12.6g  mass %10.5g\n", rec.iter,
                rec.z, rec.f_term, rec.g1, rec.psi, rec.mass);
  };

  RunOutputs out;
  out.result = driver.run(on_iter);
  out.final_eval = last;
  write_vtk((outdir / "state_final.vtk").string(), driver.spec().grid,
            make_snapshot(out.final_eval));
  write_history_csv((outdir / "history.csv").string(), out.result.history);

  std::ofstream cfg_echo(outdir / "config_effective.ini");
  cfg_echo << echo_config(cfg);
  return out;
}

double measured_feature(const Driver& driver, const Evaluation& ev) {
  // Solid phase rho_hat > 0.5 restricted to phi > 0 regions; exclusion boxes
  // keep the load/support pads out of the statistic.
  const auto& spec = driver.spec();
  Vector indicator = ev.fields.rho_hat;
  for (int i = 0; i < indicator.size(); ++i)
    if (ev.fields.phi[i] <= 0.0) indicator[i] = 0.0;
  return minimum_feature_diameter(spec.grid, indicator, 0.5, spec.measure_exclude);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"combined level-set / density topology optimization"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", vtk_path, radii_csv;
  int max_iters_override = -1;
  double radius_override = -1.0;
  int fd_samples = 8;

  auto* run_cmd = app.add_subcommand("run", "run one optimization");
  run_cmd->add_option("--config", config_path, "config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--max-iters", max_iters_override, "override schedule max_iters");
  run_cmd->add_option("--radius", radius_override, "override density filter radius");

  auto* fd_cmd = app.add_subcommand("fd-check", "finite-difference check of the sensitivities");
  fd_cmd->add_option("--config", config_path, "config file")->required();
  fd_cmd->add_option("--samples", fd_samples, "design variables sampled per block");

  auto* sweep_cmd = app.add_subcommand("sweep", "density filter radius sweep");
  sweep_cmd->add_option("--config", config_path, "config file")->required();
  sweep_cmd->add_option("--radii", radii_csv, "comma-separated radii")->required();
  sweep_cmd->add_option("--out", out_dir, "output directory");

  auto* measure_cmd = app.add_subcommand("measure", "minimum feature size of a saved state");
  measure_cmd->add_option("--vtk", vtk_path, "state file written by run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      RunConfig cfg = load_config(config_path);
      if (max_iters_override > 0) cfg.max_iters = max_iters_override;
      if (radius_override > 0.0) cfg.density_filter_radius = radius_override;
      const auto out = run_problem(cfg, out_dir, cfg.output_every);
      Driver driver(build_problem(cfg));
      const double feat = measured_feature(driver, out.final_eval);
      std::printf("converged %s  final z %.8g  Psi %.8g  mass %.8g  min_feature %.6g\n",
                  out.result.converged ? "yes" : "no", out.result.history.back().z,
                  out.result.history.back().psi, out.result.history.back().mass, feat);
      return 0;
    }

    if (*fd_cmd) {
      RunConfig cfg = load_config(config_path);
      Driver driver(build_problem(cfg));
      const auto rep = driver.fd_verify(driver.initial_design(), 1, fd_samples, 1e-6, cfg.seed);
      std::printf("fd-check: %d samples, max rel error %.3e, mean rel error %.3e\n", rep.samples,
                  rep.max_rel_error, rep.mean_rel_error);
      return rep.max_rel_error <= 1e-3 ? 0 : 1;
    }

    if (*sweep_cmd) {
      RunConfig cfg = load_config(config_path);
      const auto radii = parse_radius_list(radii_csv);
      fs::create_directories(out_dir);
      std::ofstream summary(fs::path(out_dir) / "summary.csv");
      summary << "radius,converged,z,Psi,mass,min_feature\n";
      summary.precision(10);
      for (double r : radii) {
        RunConfig c = cfg;
        c.density_filter_radius = r;
        std::ostringstream sub;
        sub << "r_" << r;
        const auto out = run_problem(c, fs::path(out_dir) / sub.str(), c.output_every);
        Driver driver(build_problem(c));
        const double feat = measured_feature(driver, out.final_eval);
        const auto& rec = out.result.history.back();
        summary << r << ',' << (out.result.converged ? 1 : 0) << ',' << rec.z << ',' << rec.psi
                << ',' << rec.mass << ',' << feat << '\n';
      }
      return 0;
    }

    if (*measure_cmd) {
      const VtkFile vf = read_vtk(vtk_path);
      auto it = vf.point_scalars.find("rho_hat");
      auto ip = vf.point_scalars.find("phi");
      if (it == vf.point_scalars.end() || ip == vf.point_scalars.end())
        throw std::runtime_error("state file lacks rho_hat/phi point arrays");
      StructuredGrid grid = build_grid(vf.nx, vf.ny, vf.h);
      Vector indicator = it->second;
      for (int i = 0; i < indicator.size(); ++i)
        if (ip->second[i] <= 0.0) indicator[i] = 0.0;
      const double feat = minimum_feature_diameter(grid, indicator, 0.5);
      std::printf("min_feature %.6g\n", feat);
      return 0;
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  return 2;
}
