#pragma once

namespace lsto {

// Iteration-indexed continuation of the projection sharpness, SIMP exponent,
// hole-seeding density threshold and perimeter weight. Values are piecewise
// constant: the iteration index is snapped down to the last multiple of the
// step size before the power ramp is evaluated.
struct ContinuationSchedule {
  int step = 10;        // iterations between parameter updates
  int length = 100;     // iterations of active continuation
  int max_iters = 175;  // hard stop for the optimization loop

  double gamma0 = 0.001, gammaf = 40.0;
  double beta0 = 2.0, betaf = 12.0;
  double rho_th0 = 0.1, rho_thf = 0.36;  // defaults assume rho_0 = 0.4
  double eta_gamma = 2.0, eta_beta = 2.0, eta_rho = 2.0, eta_w2 = 2.0;
  double w2_0 = 0.005, w2_f = 0.01;

  // Iteration after which the hole-seeding penalty deactivates.
  int deactivation_iter() const { return length + step; }

  double gamma_pr_at(int iter) const;
  double beta_rho_at(int iter) const;
  double rho_th_hs_at(int iter) const;
  double w2_at(int iter) const;
};

}  // namespace lsto
