#pragma once

#include "lsto/geometry.hpp"
#include "lsto/grid.hpp"

namespace lsto {

struct PenaltyParams {
  double xi = 0.1;          // smoothing of the hole-seeding ramp
  double phi_th_hs = 0.0;   // level-set threshold for hole seeding (< 0)
  double rho_th_hs = 0.0;   // density threshold, supplied by the schedule
  double phi_th_fs = 0.0;   // level-set threshold of the VDDR penalty (< 0)
  double w_phi = 1.0;       // regularization value weight
  double w_grad_phi = 1.0;  // regularization gradient weight
  double phi_up = 0.0;
  double phi_low = 0.0;
};

// Pointwise hole-seeding coupling density, Fig. 2-style ramp in phi, active
// only where the projected density is below the moving threshold.
double hole_seeding_density(double phi, double rho_hat, const PenaltyParams& p);

// Pointwise VDDR density: the filtered (not projected) density, counted only
// in the deep void phase.
double vddr_density(double s_hat_rho, double phi, const PenaltyParams& p);

struct PenaltyValue {
  double value = 0.0;
  Vector d_phi;  // gradient w.r.t. nodal phi (empty when identically zero)
  Vector d_rho;  // gradient w.r.t. the penalized nodal density field
};

// Domain integrals by 2x2 Gauss quadrature on the bilinear interpolants,
// normalized by the design-domain boundary length. Branch indicators are
// characteristic functions and contribute no derivative.
PenaltyValue hole_seeding_penalty(const StructuredGrid& grid, const Vector& phi,
                                  const Vector& rho_hat, const PenaltyParams& p);

PenaltyValue vddr_penalty(const StructuredGrid& grid, const Vector& phi,
                          const Vector& s_hat_rho, const PenaltyParams& p);

PenaltyValue regularization_penalty(const StructuredGrid& grid, const Vector& phi,
                                    const TargetLSF& target, const PenaltyParams& p);

}  // namespace lsto
