#pragma once

#include "lsto/grid.hpp"

namespace lsto {

// Concatenated nodal level-set and density optimization variables.
struct DesignVector {
  Vector s_phi;  // in [phi_low, phi_up]
  Vector s_rho;  // in [0, 1]
  std::vector<bool> frozen;  // non-design nodes held at (phi_up, 1.0)

  int num_nodes() const { return static_cast<int>(s_phi.size()); }
};

struct DesignBounds {
  double phi_low = 0.0;
  double phi_up = 0.0;
};

struct ProjectionParams {
  double gamma_pr = 0.001;  // sharpness
  double tau_pr = 0.001;    // threshold
};

// All derived nodal/elemental fields of one design iterate.
struct FieldSet {
  Vector phi;        // filtered nodal level-set field
  Vector s_hat_rho;  // filtered nodal density design field
  Vector rho_hat;    // projected density, in [0, 1]
  Vector rho_bar;    // unfiltered unprojected density (diagnostic only)
  Vector elem_rho_hat;  // per-element mean of the 4 nodal rho_hat values
};

// tanh threshold projection; fixes the endpoints 0 -> 0, 1 -> 1 exactly.
// The denominator is tanh(g*(1 - tau)) + tanh(g*tau); the paper prints an
// unbalanced parenthesization, read here as the standard threshold-projection
// form (the only reading with rho_hat(1) = 1).
double project(double s_hat, const ProjectionParams& pp);
double project_derivative(double s_hat, const ProjectionParams& pp);

FieldSet evaluate_fields(const StructuredGrid& grid, const DesignVector& s,
                         const FilterOperator& F_phi, const FilterOperator& F_rho,
                         const ProjectionParams& pp);

DesignVector clamp_and_freeze(const DesignVector& s, const DesignBounds& bounds);

}  // namespace lsto
