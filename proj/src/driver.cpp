#include "lsto/driver.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace lsto {

Driver::Driver(ProblemSpec spec) : spec_(std::move(spec)) {
  if (spec_.frozen.empty()) spec_.frozen.assign(spec_.grid.num_nodes(), false);
  if (spec_.mass_ref <= 0.0)
    spec_.mass_ref = spec_.grid.area() * spec_.elasticity.thickness * 1.0;
}

DesignVector Driver::initial_design() const {
  const int n = spec_.grid.num_nodes();
  DesignVector s;
  s.s_phi = Vector::Constant(n, spec_.phi0);
  s.s_rho = Vector::Constant(n, spec_.rho0);
  s.frozen = spec_.frozen;
  for (int i = 0; i < n; ++i) {
    const auto x = spec_.grid.node_coords(i);
    for (const auto& hole : spec_.initial_holes)
      if (hole.contains(x.x(), x.y())) s.s_phi[i] = spec_.bounds.phi_low;
  }
  return clamp_and_freeze(s, spec_.bounds);
}

Evaluation Driver::evaluate(const DesignVector& s, int iter, const TargetLSF* frozen_target) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& grid = spec_.grid;
  const int n = grid.num_nodes();
  const int ne = grid.num_elements();

  const double gamma_pr = spec_.schedule.gamma_pr_at(iter);
  const double beta_rho = spec_.schedule.beta_rho_at(iter);
  const double rho_th = spec_.schedule.rho_th_hs_at(iter);
  const double w2 = spec_.schedule.w2_at(iter);

  ProjectionParams pp{gamma_pr, spec_.tau_pr};
  Evaluation ev;
  ev.fields = evaluate_fields(grid, s, spec_.filter_phi, spec_.filter_rho, pp);

  const Interface interface = extract_interface(grid, ev.fields.phi);
  ev.fractions = solid_fractions(grid, ev.fields.phi);
  if (frozen_target) {
    ev.target = *frozen_target;
  } else {
    ev.target = signed_distance_target(grid, interface, ev.fields.phi, spec_.bounds.phi_low,
                                       spec_.bounds.phi_up);
  }

  // Ersatz modulus and elasticity solve.
  Vector E(ne);
  for (int e = 0; e < ne; ++e)
    E[e] = element_modulus(ev.fields.elem_rho_hat[e], ev.fractions.f[e], beta_rho,
                           spec_.material);
  const SolveResult sol =
      assemble_and_solve(grid, E, spec_.elasticity, spec_.material.nu, spec_.residual_tol);
  ev.psi = sol.psi;
  ev.u = sol.u;
  ev.elem_modulus = E;

  const MassResult m_solid = solid_mass(grid, ev.fields.elem_rho_hat, ev.fractions.f,
                                        spec_.material, spec_.elasticity.thickness);
  const MassResult m_total = total_mass(grid, ev.fields.elem_rho_hat, spec_.material,
                                        spec_.elasticity.thickness);
  ev.mass = spec_.variant == ProblemVariant::MassMinTotal ? m_total.value : m_solid.value;

  PenaltyParams pen;
  pen.xi = spec_.xi;
  pen.phi_th_hs = spec_.phi_th_hs;
  pen.rho_th_hs = rho_th;
  pen.phi_th_fs = spec_.phi_th_fs;
  pen.w_phi = spec_.w_phi;
  pen.w_grad_phi = spec_.w_grad_phi;
  pen.phi_up = spec_.bounds.phi_up;
  pen.phi_low = spec_.bounds.phi_low;

  const PerimeterResult per = perimeter(grid, interface);
  const PenaltyValue reg = regularization_penalty(grid, ev.fields.phi, ev.target, pen);
  const PenaltyValue hs = hole_seeding_penalty(grid, ev.fields.phi, ev.fields.rho_hat, pen);
  const PenaltyValue vddr = vddr_penalty(grid, ev.fields.phi, ev.fields.s_hat_rho, pen);

  // Element-level chain pieces shared by the strain-energy and mass paths.
  const Vector dpsi_dE = strain_energy_modulus_gradient(grid, sol, spec_.material.nu,
                                                        spec_.elasticity.plane_strain);
  Vector dpsi_elem_rho(ne), dpsi_elem_f(ne);
  for (int e = 0; e < ne; ++e) {
    const auto d = modulus_derivatives(ev.fields.elem_rho_hat[e], ev.fractions.f[e], beta_rho,
                                       spec_.material);
    dpsi_elem_rho[e] = dpsi_dE[e] * d.d_rho;
    dpsi_elem_f[e] = dpsi_dE[e] * d.d_f;
  }

  // Element quantities -> nodal phi / nodal rho_hat -> design blocks.
  auto chain_to_design = [&](const Vector& d_elem_rho, const Vector& d_elem_f,
                             Vector& out_phi, Vector& out_rho) {
    Vector d_node_rho = Vector::Zero(n);
    Vector d_node_phi = Vector::Zero(n);
    for (int e = 0; e < ne; ++e) {
      const auto c = grid.elem_conn(e);
      const double dr = 0.25 * d_elem_rho[e];
      for (int k = 0; k < 4; ++k) d_node_rho[c[k]] += dr;
      for (const auto& [node, dfd] : ev.fractions.df_dphi[e])
        d_node_phi[node] += d_elem_f[e] * dfd;
    }
    for (int i = 0; i < n; ++i)
      d_node_rho[i] *= project_derivative(ev.fields.s_hat_rho[i], pp);
    out_rho = apply_filter_transpose(spec_.filter_rho, d_node_rho);
    out_phi = apply_filter_transpose(spec_.filter_phi, d_node_phi);
  };

  Vector dpsi_phi, dpsi_rho;
  chain_to_design(dpsi_elem_rho, dpsi_elem_f, dpsi_phi, dpsi_rho);

  Vector dmass_phi, dmass_rho;
  if (spec_.variant == ProblemVariant::MassMinTotal) {
    chain_to_design(m_total.d_elem_rho, m_total.d_elem_f, dmass_phi, dmass_rho);
  } else {
    chain_to_design(m_solid.d_elem_rho, m_solid.d_elem_f, dmass_phi, dmass_rho);
  }

  // Penalty gradients to the design blocks.
  const Vector dper_phi = apply_filter_transpose(spec_.filter_phi, per.d_by_dphi);
  const Vector dreg_phi = apply_filter_transpose(spec_.filter_phi, reg.d_phi);
  const Vector dhs_phi = apply_filter_transpose(spec_.filter_phi, hs.d_phi);
  const Vector dvddr_rho = apply_filter_transpose(spec_.filter_rho, vddr.d_rho);

  const auto& w = spec_.weights;
  double perf = 0.0;
  Vector dperf_phi, dperf_rho;
  if (spec_.variant == ProblemVariant::StrainEnergyMin) {
    if (!psi0_) psi0_ = ev.psi;
    perf = ev.psi / *psi0_;
    dperf_phi = dpsi_phi / *psi0_;
    dperf_rho = dpsi_rho / *psi0_;
  } else {
    perf = ev.mass / spec_.mass_ref;
    dperf_phi = dmass_phi / spec_.mass_ref;
    dperf_rho = dmass_rho / spec_.mass_ref;
  }

  ev.z = w.w1 * perf + w2 * per.value + w.w3 * reg.value + w.w4 * hs.value + w.w5 * vddr.value;
  ev.dz_phi = w.w1 * dperf_phi + w2 * dper_phi + w.w3 * dreg_phi + w.w4 * dhs_phi;
  ev.dz_rho = w.w1 * dperf_rho + w.w5 * dvddr_rho;

  ev.g.resize(1);
  if (spec_.variant == ProblemVariant::StrainEnergyMin) {
    ev.g[0] = m_solid.value / spec_.mass_ref - spec_.gamma_m;
    Vector dmsolid_phi, dmsolid_rho;
    chain_to_design(m_solid.d_elem_rho, m_solid.d_elem_f, dmsolid_phi, dmsolid_rho);
    ev.dg_phi = dmsolid_phi / spec_.mass_ref;
    ev.dg_rho = dmsolid_rho / spec_.mass_ref;
  } else {
    ev.g[0] = ev.psi / spec_.psi_ref - 1.0;
    ev.dg_phi = dpsi_phi / spec_.psi_ref;
    ev.dg_rho = dpsi_rho / spec_.psi_ref;
  }

  for (int i = 0; i < n; ++i) {
    if (spec_.frozen[i]) {
      ev.dz_phi[i] = ev.dz_rho[i] = 0.0;
      ev.dg_phi[i] = ev.dg_rho[i] = 0.0;
    }
  }

  auto& r = ev.record;
  r.iter = iter;
  r.z = ev.z;
  r.f_term = perf;
  r.p_per = w2 * per.value;
  r.p_reg = w.w3 * reg.value;
  r.p_hs = w.w4 * hs.value;
  r.p_vddr = w.w5 * vddr.value;
  r.g1 = ev.g[0];
  r.psi = ev.psi;
  r.mass = ev.mass;
  r.gamma_pr = gamma_pr;
  r.beta_rho = beta_rho;
  r.rho_th_hs = rho_th;
  r.w2 = w2;
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                  .count();
  return ev;
}

RunResult Driver::run(const IterationCallback& on_iteration) {
  const auto& grid = spec_.grid;
  const int n = grid.num_nodes();
  psi0_.reset();

  std::vector<int> active;
  active.reserve(n);
  for (int i = 0; i < n; ++i)
    if (!spec_.frozen[i]) active.push_back(i);
  const int na = static_cast<int>(active.size());
  const int nvars = 2 * na;

  // Normalize the performance term by the uniform hole-free design so the
  // objective balance does not depend on any seeded initial hole pattern.
  if (!psi0_ && !spec_.initial_holes.empty()) {
    DesignVector ref;
    ref.s_phi = Vector::Constant(n, spec_.phi0);
    ref.s_rho = Vector::Constant(n, spec_.rho0);
    ref.frozen = spec_.frozen;
    evaluate(clamp_and_freeze(ref, spec_.bounds), 0);
  }

  const double phi_span = spec_.bounds.phi_up - spec_.bounds.phi_low;
  Vector xmin(nvars), xmax(nvars), move(nvars);
  for (int k = 0; k < na; ++k) {
    xmin[k] = spec_.bounds.phi_low;
    xmax[k] = spec_.bounds.phi_up;
    move[k] = spec_.move_phi * phi_span;
    xmin[na + k] = 0.0;
    xmax[na + k] = 1.0;
    move[na + k] = spec_.move_rho;
  }

  auto pack = [&](const DesignVector& s) {
    Vector x(nvars);
    for (int k = 0; k < na; ++k) {
      x[k] = s.s_phi[active[k]];
      x[na + k] = s.s_rho[active[k]];
    }
    return x;
  };
  auto unpack = [&](const Vector& x, DesignVector& s) {
    for (int k = 0; k < na; ++k) {
      s.s_phi[active[k]] = x[k];
      s.s_rho[active[k]] = x[na + k];
    }
    s = clamp_and_freeze(s, spec_.bounds);
  };

  MMAOptimizer::Options mma_opts;
  mma_opts.kkt_tol = spec_.kkt_tol;
  MMAOptimizer mma(nvars, 1, mma_opts);
  RunResult out;
  out.design = initial_design();

  int calm_iters = 0;
  double z_prev = 0.0;
  for (int iter = 0; iter < spec_.schedule.max_iters; ++iter) {
    Evaluation ev = evaluate(out.design, iter);
    out.history.push_back(ev.record);
    if (on_iteration) on_iteration(ev.record, out.design, ev);

    // Convergence is tested only after the continuation has finished.
    const bool feasible = ev.g.maxCoeff() <= spec_.constraint_tol;
    if (iter > 0 && std::abs(ev.z - z_prev) <= spec_.convergence_tol * std::abs(ev.z))
      ++calm_iters;
    else
      calm_iters = 0;
    z_prev = ev.z;
    if (iter > spec_.schedule.deactivation_iter() && feasible && calm_iters >= 2) {
      out.converged = true;
      break;
    }

    Vector df0(nvars), dg(nvars);
    for (int k = 0; k < na; ++k) {
      df0[k] = ev.dz_phi[active[k]];
      df0[na + k] = ev.dz_rho[active[k]];
      dg[k] = ev.dg_phi[active[k]];
      dg[na + k] = ev.dg_rho[active[k]];
    }
    Eigen::MatrixXd dgm = dg.transpose();

    const Vector x = pack(out.design);
    Vector xnew;
    if (spec_.gcmma_inner) {
      DesignVector trial = out.design;
      auto eval_trial = [&](const Vector& xt) {
        unpack(xt, trial);
        Evaluation et = evaluate(trial, iter);
        return std::make_pair(et.z, et.g);
      };
      xnew = mma.step_gcmma(x, ev.z, df0, ev.g, dgm, xmin, xmax, move, eval_trial);
    } else {
      xnew = mma.step(x, ev.z, df0, ev.g, dgm, xmin, xmax, move);
    }
    unpack(xnew, out.design);
  }
  return out;
}

FDReport Driver::fd_verify(const DesignVector& s, int iter, int n_samples, double eps,
                           uint64_t seed) {
  Evaluation base = evaluate(s, iter);
  const TargetLSF target = base.target;  // held fixed across perturbed evaluations

  const int n = spec_.grid.num_nodes();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);

  const double scale_z = std::max(
      {base.dz_phi.cwiseAbs().maxCoeff(), base.dz_rho.cwiseAbs().maxCoeff(), 1e-30});
  const double scale_g = std::max(
      {base.dg_phi.cwiseAbs().maxCoeff(), base.dg_rho.cwiseAbs().maxCoeff(), 1e-30});

  FDReport rep;
  double sum = 0.0;
  for (int k = 0; k < 2 * n_samples; ++k) {
    const bool phi_block = k < n_samples;
    int node = pick(rng);
    while (spec_.frozen[node]) node = pick(rng);

    auto perturbed = [&](double delta) {
      DesignVector sp = s;
      (phi_block ? sp.s_phi[node] : sp.s_rho[node]) += delta;
      return evaluate(sp, iter, &target);
    };
    const Evaluation plus = perturbed(eps);
    const Evaluation minus = perturbed(-eps);

    const double fd_z = (plus.z - minus.z) / (2.0 * eps);
    const double fd_g = (plus.g[0] - minus.g[0]) / (2.0 * eps);
    const double adj_z = phi_block ? base.dz_phi[node] : base.dz_rho[node];
    const double adj_g = phi_block ? base.dg_phi[node] : base.dg_rho[node];

    const double err_z = std::abs(adj_z - fd_z) / std::max(std::abs(fd_z), 1e-4 * scale_z);
    const double err_g = std::abs(adj_g - fd_g) / std::max(std::abs(fd_g), 1e-4 * scale_g);
    const double err = std::max(err_z, err_g);
    rep.max_rel_error = std::max(rep.max_rel_error, err);
    sum += err;
    ++rep.samples;
  }
  rep.mean_rel_error = sum / rep.samples;
  return rep;
}

namespace {

ProblemSpec beam_common(int nx, int ny, double h, double r_f_phi, double r_f_rho,
                        const Beam2dConfigHooks& hooks) {
  ProblemSpec spec;
  spec.grid = build_grid(nx, ny, h);
  spec.filter_phi = build_filter(spec.grid, r_f_phi);
  spec.filter_rho = build_filter(spec.grid, r_f_rho);
  spec.bounds.phi_up = 3.0 * h;
  spec.bounds.phi_low = -3.0 * h;
  spec.phi_th_hs = 0.10 * spec.bounds.phi_low;
  spec.phi_th_fs = 0.50 * spec.bounds.phi_low;
  spec.phi0 = 0.10 * spec.bounds.phi_up;

  // Symmetry plane at x = 0, roller support at the bottom-right corner,
  // traction patch at the top against the symmetry plane.
  DirichletBC sym;
  sym.comp = 0;
  for (int j = 0; j <= ny; ++j) sym.nodes.push_back(spec.grid.node_id(0, j));
  DirichletBC support;
  support.comp = 1;
  for (int i = nx - hooks.support_pad_elems; i <= nx; ++i)
    support.nodes.push_back(spec.grid.node_id(i, 0));
  spec.elasticity.dirichlet = {sym, support};

  const int half_patch = std::max(1, hooks.load_patch_elems / 2);
  for (int i = 0; i < half_patch; ++i) {
    TractionEdge edge;
    edge.node_a = spec.grid.node_id(i, ny);
    edge.node_b = spec.grid.node_id(i + 1, ny);
    edge.traction = Eigen::Vector2d(0.0, hooks.traction);
    spec.elasticity.tractions.push_back(edge);
  }

  // Non-design pads around the load patch and the support.
  spec.frozen.assign(spec.grid.num_nodes(), false);
  const int d = hooks.frozen_depth_elems;
  auto freeze_box = [&](int i0, int i1, int j0, int j1) {
    for (int j = std::max(0, j0); j <= std::min(ny, j1); ++j)
      for (int i = std::max(0, i0); i <= std::min(nx, i1); ++i)
        spec.frozen[spec.grid.node_id(i, j)] = true;
  };
  freeze_box(0, half_patch + d, ny - d, ny);
  freeze_box(nx - hooks.support_pad_elems - d, nx, 0, d);

  const double m = h;  // one element of margin around the pads
  spec.measure_exclude = {
      {-m, (ny - d) * h - m, (half_patch + d) * h + m, ny * h + m},
      {(nx - hooks.support_pad_elems - d) * h - m, -m, nx * h + m, d * h + m}};

  return spec;
}

}  // namespace

ProblemSpec make_beam2d_spec(int nx, int ny, double h, double r_f_phi, double r_f_rho,
                             const Beam2dConfigHooks& hooks) {
  if (nx < 1 || ny < 1 || h <= 0.0)
    throw std::invalid_argument("make_beam2d_spec: invalid dimensions");
  ProblemSpec spec = beam_common(nx, ny, h, r_f_phi, r_f_rho, hooks);
  spec.variant = ProblemVariant::StrainEnergyMin;
  spec.weights = {0.8345, 0.015, 0.150, 1.50};
  spec.schedule.w2_0 = 0.005;
  spec.schedule.w2_f = 0.01;
  spec.gamma_m = 0.40;
  spec.rho0 = spec.gamma_m;
  return spec;
}

ProblemSpec make_massmin_spec(int nx, int ny, double h, double r_f_phi, double r_f_rho,
                              bool solid_mass_variant, double psi_ref,
                              const Beam2dConfigHooks& hooks) {
  if (nx < 1 || ny < 1 || h <= 0.0)
    throw std::invalid_argument("make_massmin_spec: invalid dimensions");
  ProblemSpec spec = beam_common(nx, ny, h, r_f_phi, r_f_rho, hooks);
  spec.variant = solid_mass_variant ? ProblemVariant::MassMinSolid : ProblemVariant::MassMinTotal;
  spec.weights = {0.819, 0.03, 0.15, solid_mass_variant ? 10.0 : 0.0};
  spec.schedule.w2_0 = 0.001;
  spec.schedule.w2_f = 0.01;
  spec.psi_ref = psi_ref;
  spec.rho0 = 0.40;
  return spec;
}

}  // namespace lsto
