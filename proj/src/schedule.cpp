#include "lsto/schedule.hpp"

#include <cmath>

namespace lsto {

namespace {
double ramp(int iter, int step, int length, double v0, double vf, double eta) {
  if (iter >= length) return vf;
  const int snapped = (iter / step) * step;
  return v0 + (vf - v0) * std::pow(double(snapped) / double(length), eta);
}
}  // namespace

double ContinuationSchedule::gamma_pr_at(int iter) const {
  return ramp(iter, step, length, gamma0, gammaf, eta_gamma);
}

double ContinuationSchedule::beta_rho_at(int iter) const {
  return ramp(iter, step, length, beta0, betaf, eta_beta);
}

double ContinuationSchedule::rho_th_hs_at(int iter) const {
  if (iter > deactivation_iter()) return 0.0;
  if (iter > length) return rho_thf;
  return ramp(iter, step, length, rho_th0, rho_thf, eta_rho);
}

double ContinuationSchedule::w2_at(int iter) const {
  return ramp(iter, step, length, w2_0, w2_f, eta_w2);
}

}  // namespace lsto
