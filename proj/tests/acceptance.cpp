// Acceptance battery. Each numbered criterion prints exactly one PASS/FAIL
// line with the measured quantities; the process exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "lsto/config.hpp"
#include "lsto/driver.hpp"
#include "lsto/fields.hpp"
#include "lsto/geometry.hpp"
#include "lsto/grid.hpp"
#include "lsto/mma.hpp"
#include "lsto/penalties.hpp"

using namespace lsto;

namespace {

int n_failed = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  (%s)\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++n_failed;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

DesignVector random_feasible(const ProblemSpec& spec, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uphi(spec.bounds.phi_low, spec.bounds.phi_up);
  std::uniform_real_distribution<double> urho(0.05, 0.95);
  DesignVector s;
  const int n = spec.grid.num_nodes();
  s.s_phi.resize(n);
  s.s_rho.resize(n);
  s.frozen = spec.frozen;
  for (int i = 0; i < n; ++i) {
    s.s_phi[i] = uphi(rng);
    s.s_rho[i] = urho(rng);
  }
  return clamp_and_freeze(s, spec.bounds);
}

// ---- criterion 1: adjoint gradient vs central finite differences ----------

void criterion_1() {
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (unsigned seed = 1; seed <= 5; ++seed) {
    ProblemSpec spec = make_beam2d_spec(12, 4, 1.0, 1.5, 4.0);
    Driver driver(spec);
    const FDReport rep = driver.fd_verify(random_feasible(spec, seed), 30, 20, 1e-4, seed);
    worst = std::max(worst, rep.max_rel_error);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(1, worst <= 1e-4 && secs <= 60.0,
         fmt("max rel FD error %.3g <= 1e-4 over 5 seeds x 20 samples/block, %.1f s", worst,
             secs));
}

// ---- criterion 2: filter row sums and projection properties ---------------

void criterion_2() {
  const StructuredGrid g = build_grid(40, 20, 1.0);
  double row_err = 0.0;
  for (double r : {1.5, 4.0, 8.0}) {
    const FilterOperator F = build_filter(g, r);
    const Vector sums = F.F * Vector::Ones(g.num_nodes());
    row_err = std::max(row_err, (sums.array() - 1.0).abs().maxCoeff());
  }
  bool endpoints = true;
  double deriv_err = 0.0;
  for (double gamma : {0.001, 40.0}) {
    const ProjectionParams pp{gamma, 0.001};
    endpoints = endpoints && project(0.0, pp) == 0.0 && project(1.0, pp) == 1.0;
    const double eps = 1e-6;
    for (double s = 0.05; s < 1.0; s += 0.1) {
      const double fd = (project(s + eps, pp) - project(s - eps, pp)) / (2.0 * eps);
      deriv_err = std::max(deriv_err, std::abs(project_derivative(s, pp) - fd));
    }
  }
  report(2, row_err <= 1e-12 && endpoints && deriv_err <= 1e-7,
         fmt("row-sum err %.2g <= 1e-12, endpoints exact %s, dproj FD err %.2g <= 1e-7",
             row_err, endpoints ? "yes" : "no", deriv_err));
}

// ---- criterion 3: geometry oracles ----------------------------------------

void criterion_3() {
  const StructuredGrid g = build_grid(64, 64, 1.0);
  const double R = 10.0;
  Vector phi(g.num_nodes());
  for (int n = 0; n < g.num_nodes(); ++n) {
    const auto x = g.node_coords(n);
    phi[n] = R - std::hypot(x.x() - 32.0, x.y() - 32.0);
  }
  const double length = perimeter(g, extract_interface(g, phi)).value * g.boundary_length();
  const double per_err = std::abs(length / (2.0 * std::numbers::pi * R) - 1.0);

  const StructuredGrid e = build_grid(1, 1, 1.0);
  Vector half(4), corner(4);
  half << 0.5, 0.5, -0.5, -0.5;
  corner << 0.75, -0.25, -0.25, -0.25;
  const double f_half = solid_fractions(e, half).f[0];
  const double f_corner = solid_fractions(e, corner).f[0];

  const StructuredGrid gl = build_grid(10, 6, 1.0);
  Vector lphi(gl.num_nodes());
  for (int n = 0; n < gl.num_nodes(); ++n) lphi[n] = 4.5 - gl.node_coords(n).x();
  const TargetLSF t = signed_distance_target(gl, extract_interface(gl, lphi), lphi, -3.0, 3.0);
  double sdf_err = 0.0;
  for (int n = 0; n < gl.num_nodes(); ++n) {
    const double d = std::clamp(4.5 - gl.node_coords(n).x(), -3.0, 3.0);
    sdf_err = std::max(sdf_err, std::abs(t.phi_tilde[n] - d));
  }
  report(3, per_err <= 0.02 && f_half == 0.5 && f_corner == 0.28125 && sdf_err <= 1e-10,
         fmt("perimeter err %.3g <= 2%%, fractions %.6g / %.6g exact, SDF err %.2g <= 1e-10",
             per_err, f_half, f_corner, sdf_err));
}

// ---- criterion 4: penalty corner values and constant-field quadrature -----

void criterion_4() {
  PenaltyParams p;
  p.xi = 0.1;
  p.phi_th_hs = -0.3;
  p.rho_th_hs = 0.1;
  p.phi_th_fs = -1.5;
  p.phi_up = 3.0;
  p.phi_low = -3.0;

  const bool corners = hole_seeding_density(p.phi_th_hs, 0.0, p) == 0.0 &&
                       hole_seeding_density(p.phi_th_hs - 1.0, 0.0, p) == 0.0 &&
                       hole_seeding_density(p.phi_up, 0.0, p) == 1.0 &&
                       hole_seeding_density(p.phi_up, 0.5, p) == 0.0;
  const bool vddr_branch = vddr_density(0.7, p.phi_th_fs, p) == 0.7 &&
                           vddr_density(0.7, p.phi_th_fs + 1e-9, p) == 0.0 &&
                           vddr_density(0.7, p.phi_th_fs - 1.0, p) == 0.7;

  const StructuredGrid g = build_grid(120, 40, 1.0);
  const Vector up = Vector::Constant(g.num_nodes(), p.phi_up);
  const Vector low = Vector::Constant(g.num_nodes(), p.phi_low);
  const Vector zero = Vector::Zero(g.num_nodes());
  const Vector one = Vector::Ones(g.num_nodes());
  const double hs_val = hole_seeding_penalty(g, up, zero, p).value;
  const double vddr_val = vddr_penalty(g, low, one, p).value;
  report(4,
         corners && vddr_branch && std::abs(hs_val - 15.0) <= 1e-10 &&
             std::abs(vddr_val - 15.0) <= 1e-10,
         fmt("corner values %s, branch %s, quadrature %.12g / %.12g vs 15",
             corners ? "exact" : "wrong", vddr_branch ? "exact" : "wrong", hs_val, vddr_val));
}

// ---- criteria 5-7: end-to-end beam runs -----------------------------------

struct BeamOutcome {
  bool converged = false;
  double g1 = 0.0;
  double psi = 0.0;
  double void_mean = 0.0;  // mean projected density over {phi < phi_th_fs}
  double feature = 0.0;
};

BeamOutcome run_beam(const RunConfig& cfg) {
  const ProblemSpec spec = build_problem(cfg);
  Driver driver(spec);
  const RunResult res = driver.run();
  Evaluation ev = driver.evaluate(res.design, static_cast<int>(res.history.size()));
  BeamOutcome out;
  out.converged = res.converged;
  out.g1 = res.history.back().g1;
  out.psi = ev.psi;
  double s = 0.0;
  int n = 0;
  for (int i = 0; i < ev.fields.phi.size(); ++i)
    if (ev.fields.phi[i] < spec.phi_th_fs) {
      s += ev.fields.rho_hat[i];
      ++n;
    }
  out.void_mean = n ? s / n : 0.0;
  Vector ind = ev.fields.rho_hat;
  for (int i = 0; i < ind.size(); ++i)
    if (ev.fields.phi[i] <= 0.0) ind[i] = 0.0;
  out.feature = minimum_feature_diameter(spec.grid, ind, 0.5, spec.measure_exclude);
  return out;
}

void criterion_5() {
  const double radii[3] = {3.0, 6.0, 12.0};
  BeamOutcome o[3];
  bool ok = true;
  std::string detail;
  for (int k = 0; k < 3; ++k) {
    RunConfig cfg;
    cfg.density_filter_radius = radii[k];
    o[k] = run_beam(cfg);
    const bool a = o[k].converged && o[k].g1 <= 1e-3;
    const bool b = o[k].void_mean <= 0.05;
    const bool c = o[k].feature >= 0.8 * radii[k];
    ok = ok && a && b && c;
    detail += fmt("r=%g: g1 %.1e%s, void mean %.4f%s, feature %.2f/%.2f%s; ", radii[k],
                  o[k].g1, a ? "" : " [a!]", o[k].void_mean, b ? "" : " [b!]", o[k].feature,
                  0.8 * radii[k], c ? "" : " [c!]");
  }
  const bool trend = o[0].psi <= 1.02 * o[1].psi && o[1].psi <= 1.02 * o[2].psi;
  ok = ok && trend;
  detail += fmt("Psi %.2f / %.2f / %.2f%s", o[0].psi, o[1].psi, o[2].psi,
                trend ? "" : " [d!]");
  report(5, ok, detail);
}

void criterion_6() {
  RunConfig cfg;
  cfg.density_filter_radius = 6.0;
  cfg.w4 = 0.0;
  cfg.hole_pattern_nx = 4;
  cfg.hole_pattern_ny = 2;
  const BeamOutcome o = run_beam(cfg);
  const bool ok = o.converged && o.void_mean <= 0.05 && o.feature >= 0.8 * 6.0;
  report(6, ok,
         fmt("converged %s, void mean %.4f <= 0.05, feature %.2f >= 4.8",
             o.converged ? "yes" : "no", o.void_mean, o.feature));
}

void criterion_7() {
  RunConfig cfg;
  cfg.beta_rho_initial = 2.0;
  cfg.beta_rho_final = 2.0;
  cfg.gamma_pr_initial = 1e-4;
  cfg.gamma_pr_final = 1e-4;
  cfg.w5 = 0.0;
  const BeamOutcome o = run_beam(cfg);
  report(7, o.void_mean > 0.1,
         fmt("void mean %.4f > 0.1 without projection/penalization/VDDR", o.void_mean));
}

// ---- criterion 8: optimizer vs independent oracles ------------------------

double toy_f(const Eigen::Vector3d& x) { return x.squaredNorm(); }
Eigen::Vector2d toy_g(const Eigen::Vector3d& x) {
  const Eigen::Vector3d c1(5.0, 2.0, 1.0), c2(3.0, 4.0, 3.0);
  return {(x - c1).squaredNorm() - 9.0, (x - c2).squaredNorm() - 9.0};
}

Eigen::Vector3d grid_oracle() {
  Eigen::Vector3d lo(0.0, 0.0, 0.0), hi(5.0, 5.0, 5.0), best = hi;
  double fbest = 1e30;
  for (int round = 0; round < 8; ++round) {
    const int m = 24;
    for (int a = 0; a <= m; ++a)
      for (int b = 0; b <= m; ++b)
        for (int c = 0; c <= m; ++c) {
          const Eigen::Vector3d x =
              lo.array() + (hi - lo).array() * Eigen::Vector3d(a, b, c).array() / m;
          if ((toy_g(x).array() > 1e-12).any()) continue;
          const double f = toy_f(x);
          if (f < fbest) {
            fbest = f;
            best = x;
          }
        }
    const Eigen::Vector3d span = 0.2 * (hi - lo);
    lo = (best - span).cwiseMax(0.0);
    hi = (best + span).cwiseMin(5.0);
  }
  return best;
}

Eigen::Vector2d projected_gradient_oracle() {
  Eigen::Vector2d x(0.0, 0.0);
  for (int it = 0; it < 20000; ++it) {
    const Eigen::Vector2d grad = 2.0 * (x - Eigen::Vector2d(1.0, 1.0));
    x -= 0.01 * grad;
    x = x.cwiseMax(0.0).cwiseMin(1.0);
    const double v = x.sum() - 1.0;
    if (v > 0.0) x -= (v / 2.0) * Eigen::Vector2d(1.0, 1.0);
  }
  return x;
}

void criterion_8() {
  // Two-sphere-constrained distance minimization vs refined grid search.
  MMAOptimizer mma3(3, 2);
  Vector x = Vector::Constant(3, 4.0);
  const Vector xmin3 = Vector::Zero(3), xmax3 = Vector::Constant(3, 5.0);
  const Vector move3 = Vector::Constant(3, 1.0);
  for (int it = 0; it < 80; ++it) {
    const Eigen::Vector3d xv(x[0], x[1], x[2]);
    Vector g(2);
    const Eigen::Vector2d gv = toy_g(xv);
    g << gv[0], gv[1];
    Eigen::MatrixXd dg(2, 3);
    const Eigen::Vector3d c1(5.0, 2.0, 1.0), c2(3.0, 4.0, 3.0);
    dg.row(0) = 2.0 * (xv - c1).transpose();
    dg.row(1) = 2.0 * (xv - c2).transpose();
    x = mma3.step(x, toy_f(xv), 2.0 * x, g, dg, xmin3, xmax3, move3);
  }
  const Eigen::Vector3d oracle3 = grid_oracle();
  const double err3 = (Eigen::Vector3d(x[0], x[1], x[2]) - oracle3).cwiseAbs().maxCoeff();

  // Active linear constraint quadratic vs projected gradient descent.
  MMAOptimizer mma2(2, 1);
  Vector y = Vector::Constant(2, 0.1);
  const Vector xmin2 = Vector::Zero(2), xmax2 = Vector::Constant(2, 1.0);
  const Vector move2 = Vector::Constant(2, 0.5);
  for (int it = 0; it < 120; ++it) {
    const Vector d = y - Vector::Constant(2, 1.0);
    Vector g(1);
    g[0] = y.sum() - 1.0;
    Eigen::MatrixXd dg = Eigen::MatrixXd::Ones(1, 2);
    y = mma2.step(y, d.squaredNorm(), 2.0 * d, g, dg, xmin2, xmax2, move2);
  }
  const Eigen::Vector2d oracle2 = projected_gradient_oracle();
  const double err2 = (Eigen::Vector2d(y[0], y[1]) - oracle2).cwiseAbs().maxCoeff();

  report(8, err3 <= 1e-3 && err2 <= 1e-3,
         fmt("two-sphere err %.2g, active-constraint err %.2g, both <= 1e-3", err3, err2));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::printf("%d of 8 criteria failed\n", n_failed);
  return n_failed;
}
