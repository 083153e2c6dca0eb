#pragma once

#include <cmath>

namespace lsto {

struct MaterialModel {
  double E_solid = 2.0e3;
  double E_void = 1.0e-8;
  double nu = 0.4;
  double theta_solid = 1.0;
  double theta_void = 0.0;
};

/// SIMP modulus blended with the level-set solid fraction (ersatz material):
// E_e = f_e * E_S * rho^beta + (1 - f_e) * E_V.
inline double element_modulus(double rho_hat_e, double f_e, double beta_rho,
                              const MaterialModel& mat) {
  return f_e * mat.E_solid * std::pow(rho_hat_e, beta_rho) + (1.0 - f_e) * mat.E_void;
}

// theta_e = f_e * theta_S * rho; the void phase carries no mass.
inline double element_material_density(double rho_hat_e, double f_e, const MaterialModel& mat) {
  return f_e * mat.theta_solid * rho_hat_e;
}

struct ModulusDerivatives {
  double d_rho;  // dE/d(rho_hat_e)
  double d_f;    // dE/d(f_e)
};

inline ModulusDerivatives modulus_derivatives(double rho_hat_e, double f_e, double beta_rho,
                                              const MaterialModel& mat) {
  ModulusDerivatives d;
  d.d_rho = (rho_hat_e > 0.0 || beta_rho <= 1.0)
                ? f_e * mat.E_solid * beta_rho * std::pow(rho_hat_e, beta_rho - 1.0)
                : 0.0;
  d.d_f = mat.E_solid * std::pow(rho_hat_e, beta_rho) - mat.E_void;
  return d;
}

}  // namespace lsto
