#pragma once

#include <string>

#include "lsto/driver.hpp"

namespace lsto {

// Every algorithmic constant, with paper-default values. Parsed from a
// line-oriented `key = value` file with [section] headers and '#' comments;
// unknown keys are rejected.
struct RunConfig {
  // [grid]
  int nx = 120;
  int ny = 40;
  double h = 1.0;

  // [filter]  (radii in length units; negative = default factor of h)
  double ls_filter_radius = -1.0;      // default 1.5 h
  double density_filter_radius = -1.0; // default 4 h

  // [bounds]
  double phi_bound_factor = 3.0;  // phi_up = +factor*h, phi_low = -factor*h

  // [material]
  double youngs_solid = 2.0e3;
  double youngs_void = 1.0e-8;
  double poisson = 0.4;
  double density_solid = 1.0;
  bool plane_strain = false;

  // [schedule]
  int continuation_step = 10;
  int continuation_iters = 100;
  int max_iters = 175;
  double gamma_pr_initial = 0.001;
  double gamma_pr_final = 40.0;
  double beta_rho_initial = 2.0;
  double beta_rho_final = 12.0;
  double rho_th_initial_factor = 0.25;  // times rho_0
  double rho_th_final_factor = 0.9;     // times rho_0
  double rho_th_final = -1.0;           // absolute override when >= 0
  double eta_gamma = 2.0;
  double eta_beta = 2.0;
  double eta_rho = 2.0;
  double eta_w2 = 2.0;

  // [projection]
  double tau_pr = 0.001;

  // [penalty]
  double xi = 0.1;
  double phi_th_hs_factor = 0.10;  // times phi_low
  double phi_th_fs_factor = 0.50;  // times phi_low
  double w_phi = 1.0;
  double w_grad_phi = 1.0;

  // [weights]
  double w1 = 0.8345;
  double w2_initial = 0.005;
  double w2_final = 0.01;
  double w3 = 0.015;
  double w4 = 0.150;
  double w5 = 1.50;

  // [problem]
  std::string variant = "strain-energy-min";  // | mass-min-total | mass-min-solid
  double mass_fraction = 0.40;
  double strain_energy_bound = 1.5e5;
  double initial_density = -1.0;  // default: mass_fraction
  double initial_phi_factor = 0.10;  // times phi_up
  double traction = -10.0;
  int load_patch_elems = 4;
  int frozen_depth_elems = 3;
  int support_pad_elems = 1;
  int hole_pattern_nx = 0;
  int hole_pattern_ny = 0;
  double hole_size_factor = 0.5;  // hole side as a fraction of the pattern pitch

  // [optimizer]
  double move_limit_phi = 0.1;
  double move_limit_rho = 0.2;
  bool gcmma_inner = false;
  double kkt_tol = 1e-9;

  // [solver]
  double residual_tol = 1e-10;

  // [run]
  int output_every = 25;
  double convergence_tol = 1e-3;
  unsigned long seed = 0;

  double resolved_ls_radius() const { return ls_filter_radius > 0.0 ? ls_filter_radius : 1.5 * h; }
  double resolved_density_radius() const {
    return density_filter_radius > 0.0 ? density_filter_radius : 4.0 * h;
  }
  double resolved_initial_density() const {
    return initial_density >= 0.0 ? initial_density : mass_fraction;
  }
};

// Throws std::runtime_error with a line number on parse errors and a
// key/constraint message on validation failures.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

std::string echo_config(const RunConfig& cfg);

// Assembles the full problem description from a validated config.
ProblemSpec build_problem(const RunConfig& cfg);

}  // namespace lsto
