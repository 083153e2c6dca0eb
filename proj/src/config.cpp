#include "lsto/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lsto {

namespace {

struct Key {
  std::string section;
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <class T>
Key make_key(const std::string& section, const std::string& name, T RunConfig::*member) {
  Key k;
  k.section = section;
  k.name = name;
  k.set = [member, name](RunConfig& c, const std::string& v) {
    std::istringstream is(v);
    if constexpr (std::is_same_v<T, bool>) {
      std::string w;
      is >> w;
      if (w == "true" || w == "1") c.*member = true;
      else if (w == "false" || w == "0") c.*member = false;
      else throw std::runtime_error("invalid boolean for " + name + ": " + v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      c.*member = v;
    } else {
      T out{};
      is >> out;
      if (is.fail()) throw std::runtime_error("invalid value for " + name + ": " + v);
      c.*member = out;
    }
  };
  k.get = [member](const RunConfig& c) -> std::string {
    if constexpr (std::is_same_v<T, bool>) return (c.*member) ? "true" : "false";
    else if constexpr (std::is_same_v<T, std::string>) return c.*member;
    else if constexpr (std::is_same_v<T, double>) return fmt_double(c.*member);
    else return std::to_string(c.*member);
  };
  return k;
}

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = {
      make_key("grid", "nx", &RunConfig::nx),
      make_key("grid", "ny", &RunConfig::ny),
      make_key("grid", "h", &RunConfig::h),
      make_key("filter", "ls_filter_radius", &RunConfig::ls_filter_radius),
      make_key("filter", "density_filter_radius", &RunConfig::density_filter_radius),
      make_key("bounds", "phi_bound_factor", &RunConfig::phi_bound_factor),
      make_key("material", "youngs_solid", &RunConfig::youngs_solid),
      make_key("material", "youngs_void", &RunConfig::youngs_void),
      make_key("material", "poisson", &RunConfig::poisson),
      make_key("material", "density_solid", &RunConfig::density_solid),
      make_key("material", "plane_strain", &RunConfig::plane_strain),
      make_key("schedule", "continuation_step", &RunConfig::continuation_step),
      make_key("schedule", "continuation_iters", &RunConfig::continuation_iters),
      make_key("schedule", "max_iters", &RunConfig::max_iters),
      make_key("schedule", "gamma_pr_initial", &RunConfig::gamma_pr_initial),
      make_key("schedule", "gamma_pr_final", &RunConfig::gamma_pr_final),
      make_key("schedule", "beta_rho_initial", &RunConfig::beta_rho_initial),
      make_key("schedule", "beta_rho_final", &RunConfig::beta_rho_final),
      make_key("schedule", "rho_th_initial_factor", &RunConfig::rho_th_initial_factor),
      make_key("schedule", "rho_th_final_factor", &RunConfig::rho_th_final_factor),
      make_key("schedule", "rho_th_final", &RunConfig::rho_th_final),
      make_key("schedule", "eta_gamma", &RunConfig::eta_gamma),
      make_key("schedule", "eta_beta", &RunConfig::eta_beta),
      make_key("schedule", "eta_rho", &RunConfig::eta_rho),
      make_key("schedule", "eta_w2", &RunConfig::eta_w2),
      make_key("projection", "tau_pr", &RunConfig::tau_pr),
      make_key("penalty", "xi", &RunConfig::xi),
      make_key("penalty", "phi_th_hs_factor", &RunConfig::phi_th_hs_factor),
      make_key("penalty", "phi_th_fs_factor", &RunConfig::phi_th_fs_factor),
      make_key("penalty", "w_phi", &RunConfig::w_phi),
      make_key("penalty", "w_grad_phi", &RunConfig::w_grad_phi),
      make_key("weights", "w1", &RunConfig::w1),
      make_key("weights", "w2_initial", &RunConfig::w2_initial),
      make_key("weights", "w2_final", &RunConfig::w2_final),
      make_key("weights", "w3", &RunConfig::w3),
      make_key("weights", "w4", &RunConfig::w4),
      make_key("weights", "w5", &RunConfig::w5),
      make_key("problem", "variant", &RunConfig::variant),
      make_key("problem", "mass_fraction", &RunConfig::mass_fraction),
      make_key("problem", "strain_energy_bound", &RunConfig::strain_energy_bound),
      make_key("problem", "initial_density", &RunConfig::initial_density),
      make_key("problem", "initial_phi_factor", &RunConfig::initial_phi_factor),
      make_key("problem", "traction", &RunConfig::traction),
      make_key("problem", "load_patch_elems", &RunConfig::load_patch_elems),
      make_key("problem", "frozen_depth_elems", &RunConfig::frozen_depth_elems),
      make_key("problem", "support_pad_elems", &RunConfig::support_pad_elems),
      make_key("problem", "hole_pattern_nx", &RunConfig::hole_pattern_nx),
      make_key("problem", "hole_pattern_ny", &RunConfig::hole_pattern_ny),
      make_key("problem", "hole_size_factor", &RunConfig::hole_size_factor),
      make_key("optimizer", "move_limit_phi", &RunConfig::move_limit_phi),
      make_key("optimizer", "move_limit_rho", &RunConfig::move_limit_rho),
      make_key("optimizer", "gcmma_inner", &RunConfig::gcmma_inner),
      make_key("optimizer", "kkt_tol", &RunConfig::kkt_tol),
      make_key("solver", "residual_tol", &RunConfig::residual_tol),
      make_key("run", "output_every", &RunConfig::output_every),
      make_key("run", "convergence_tol", &RunConfig::convergence_tol),
      make_key("run", "seed", &RunConfig::seed),
  };
  return keys;
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error("config validation: " + msg);
}

void validate(const RunConfig& c) {
  require(c.nx >= 1 && c.ny >= 1, "nx and ny must be >= 1");
  require(c.h > 0.0, "h must be > 0");
  require(c.resolved_ls_radius() > 0.0, "ls_filter_radius must be > 0");
  require(c.resolved_density_radius() > 0.0, "density_filter_radius must be > 0");
  require(c.phi_bound_factor > 0.0, "phi_bound_factor must be > 0");
  require(c.youngs_solid > c.youngs_void && c.youngs_void > 0.0,
          "youngs moduli must satisfy youngs_solid > youngs_void > 0");
  require(c.poisson >= 0.0 && c.poisson < 0.5, "poisson must be in [0, 0.5)");
  require(c.continuation_step >= 1, "continuation_step must be >= 1");
  require(c.continuation_iters >= c.continuation_step,
          "continuation_iters must be >= continuation_step");
  require(c.max_iters >= 1, "max_iters must be >= 1");
  require(c.gamma_pr_initial > 0.0, "gamma_pr_initial must be > 0");
  require(c.gamma_pr_final > 0.0, "gamma_pr_final must be > 0");
  require(c.beta_rho_initial >= 1.0, "beta_rho_initial must be >= 1");
  require(c.tau_pr > 0.0 && c.tau_pr < 1.0, "tau_pr must be in (0, 1)");
  require(c.xi > 0.0, "xi must be > 0");
  require(c.phi_th_hs_factor > 0.0 && c.phi_th_hs_factor < 1.0,
          "phi_th_hs_factor must be in (0, 1)");
  require(c.phi_th_fs_factor > 0.0 && c.phi_th_fs_factor < 1.0,
          "phi_th_fs_factor must be in (0, 1)");
  require(c.mass_fraction > 0.0 && c.mass_fraction <= 1.0, "mass_fraction must be in (0, 1]");
  require(c.strain_energy_bound > 0.0, "strain_energy_bound must be > 0");
  require(c.variant == "strain-energy-min" || c.variant == "mass-min-total" ||
              c.variant == "mass-min-solid",
          "variant must be one of strain-energy-min, mass-min-total, mass-min-solid");
  require(c.w1 > 0.0, "w1 must be > 0");
  require(c.w2_initial >= 0.0 && c.w3 >= 0.0 && c.w4 >= 0.0 && c.w5 >= 0.0,
          "penalty weights must be >= 0");
  require(c.move_limit_phi > 0.0 && c.move_limit_rho > 0.0, "move limits must be > 0");
  require(c.residual_tol > 0.0, "residual_tol must be > 0");
  require(c.output_every >= 1, "output_every must be >= 1");
  require(c.load_patch_elems >= 1 && c.load_patch_elems <= c.nx,
          "load_patch_elems must be in [1, nx]");
  require(c.support_pad_elems >= 0 && c.support_pad_elems < c.nx,
          "support_pad_elems must be in [0, nx)");
  require(c.hole_pattern_nx >= 0 && c.hole_pattern_ny >= 0, "hole pattern counts must be >= 0");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config parse error at line " + std::to_string(lineno) +
                                 ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config parse error at line " + std::to_string(lineno) +
                               ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    bool found = false;
    for (const auto& k : registry()) {
      if (k.section == section && k.name == key) {
        k.set(cfg, value);
        found = true;
        break;
      }
    }
    if (!found)
      throw std::runtime_error("config parse error at line " + std::to_string(lineno) +
                               ": unknown key '" + section + "." + key + "'");
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string echo_config(const RunConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& k : registry()) {
    if (k.section != section) {
      if (!section.empty()) os << "\n";
      section = k.section;
      os << "[" << section << "]\n";
    }
    os << k.name << " = " << k.get(cfg) << "\n";
  }
  return os.str();
}

ProblemSpec build_problem(const RunConfig& cfg) {
  Beam2dConfigHooks hooks;
  hooks.load_patch_elems = cfg.load_patch_elems;
  hooks.frozen_depth_elems = cfg.frozen_depth_elems;
  hooks.support_pad_elems = cfg.support_pad_elems;
  hooks.traction = cfg.traction;

  ProblemSpec spec;
  if (cfg.variant == "strain-energy-min") {
    spec = make_beam2d_spec(cfg.nx, cfg.ny, cfg.h, cfg.resolved_ls_radius(),
                            cfg.resolved_density_radius(), hooks);
  } else {
    spec = make_massmin_spec(cfg.nx, cfg.ny, cfg.h, cfg.resolved_ls_radius(),
                             cfg.resolved_density_radius(), cfg.variant == "mass-min-solid",
                             cfg.strain_energy_bound, hooks);
  }

  spec.bounds.phi_up = cfg.phi_bound_factor * cfg.h;
  spec.bounds.phi_low = -cfg.phi_bound_factor * cfg.h;
  spec.material.E_solid = cfg.youngs_solid;
  spec.material.E_void = cfg.youngs_void;
  spec.material.nu = cfg.poisson;
  spec.material.theta_solid = cfg.density_solid;
  spec.elasticity.plane_strain = cfg.plane_strain;

  spec.schedule.step = cfg.continuation_step;
  spec.schedule.length = cfg.continuation_iters;
  spec.schedule.max_iters = cfg.max_iters;
  spec.schedule.gamma0 = cfg.gamma_pr_initial;
  spec.schedule.gammaf = cfg.gamma_pr_final;
  spec.schedule.beta0 = cfg.beta_rho_initial;
  spec.schedule.betaf = cfg.beta_rho_final;
  spec.schedule.eta_gamma = cfg.eta_gamma;
  spec.schedule.eta_beta = cfg.eta_beta;
  spec.schedule.eta_rho = cfg.eta_rho;
  spec.schedule.eta_w2 = cfg.eta_w2;
  spec.schedule.w2_0 = cfg.w2_initial;
  spec.schedule.w2_f = cfg.w2_final;

  spec.rho0 = cfg.resolved_initial_density();
  spec.schedule.rho_th0 = cfg.rho_th_initial_factor * spec.rho0;
  spec.schedule.rho_thf =
      cfg.rho_th_final >= 0.0 ? cfg.rho_th_final : cfg.rho_th_final_factor * spec.rho0;

  spec.tau_pr = cfg.tau_pr;
  spec.xi = cfg.xi;
  spec.phi_th_hs = cfg.phi_th_hs_factor * spec.bounds.phi_low;
  spec.phi_th_fs = cfg.phi_th_fs_factor * spec.bounds.phi_low;
  spec.w_phi = cfg.w_phi;
  spec.w_grad_phi = cfg.w_grad_phi;

  spec.weights.w1 = cfg.w1;
  spec.weights.w3 = cfg.w3;
  spec.weights.w4 = cfg.w4;
  spec.weights.w5 = cfg.w5;

  spec.gamma_m = cfg.mass_fraction;
  spec.psi_ref = cfg.strain_energy_bound;
  spec.phi0 = cfg.initial_phi_factor * spec.bounds.phi_up;

  if (cfg.hole_pattern_nx > 0 && cfg.hole_pattern_ny > 0) {
    const double W = spec.grid.width();
    const double H = spec.grid.height();
    const double px = W / cfg.hole_pattern_nx;
    const double py = H / cfg.hole_pattern_ny;
    for (int j = 0; j < cfg.hole_pattern_ny; ++j) {
      for (int i = 0; i < cfg.hole_pattern_nx; ++i) {
        const double cx = (i + 0.5) * px;
        const double cy = (j + 0.5) * py;
        const double hx = 0.5 * cfg.hole_size_factor * px;
        const double hy = 0.5 * cfg.hole_size_factor * py;
        spec.initial_holes.push_back({cx - hx, cy - hy, cx + hx, cy + hy});
      }
    }
  }

  spec.move_phi = cfg.move_limit_phi;
  spec.move_rho = cfg.move_limit_rho;
  spec.gcmma_inner = cfg.gcmma_inner;
  spec.kkt_tol = cfg.kkt_tol;
  spec.residual_tol = cfg.residual_tol;
  spec.convergence_tol = cfg.convergence_tol;
  return spec;
}

}  // namespace lsto
