#include "lsto/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lsto {

double project(double s_hat, const ProjectionParams& pp) {
  const double g = pp.gamma_pr;
  const double t = pp.tau_pr;
  const double den = std::tanh(g * (1.0 - t)) + std::tanh(g * t);
  return (std::tanh(g * (s_hat - t)) + std::tanh(g * t)) / den;
}

double project_derivative(double s_hat, const ProjectionParams& pp) {
  const double g = pp.gamma_pr;
  const double t = pp.tau_pr;
  const double den = std::tanh(g * (1.0 - t)) + std::tanh(g * t);
  const double c = std::cosh(g * (s_hat - t));
  return g / (c * c * den);
}

FieldSet evaluate_fields(const StructuredGrid& grid, const DesignVector& s,
                         const FilterOperator& F_phi, const FilterOperator& F_rho,
                         const ProjectionParams& pp) {
  const int n = grid.num_nodes();
  if (s.s_phi.size() != n || s.s_rho.size() != n)
    throw std::invalid_argument("evaluate_fields: design size does not match grid");
  if (F_phi.size() != n || F_rho.size() != n)
    throw std::invalid_argument("evaluate_fields: filter size does not match grid");

  FieldSet f;
  f.phi = apply_filter(F_phi, s.s_phi);
  f.s_hat_rho = apply_filter(F_rho, s.s_rho);
  f.rho_hat.resize(n);
  for (int i = 0; i < n; ++i) f.rho_hat[i] = project(f.s_hat_rho[i], pp);
  f.rho_bar = s.s_rho;

  f.elem_rho_hat.resize(grid.num_elements());
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto c = grid.elem_conn(e);
    f.elem_rho_hat[e] = 0.25 * (f.rho_hat[c[0]] + f.rho_hat[c[1]] + f.rho_hat[c[2]] + f.rho_hat[c[3]]);
  }
  return f;
}

DesignVector clamp_and_freeze(const DesignVector& s, const DesignBounds& bounds) {
  DesignVector out = s;
  const int n = out.num_nodes();
  for (int i = 0; i < n; ++i) {
    if (!out.frozen.empty() && out.frozen[i]) {
      out.s_phi[i] = bounds.phi_up;
      out.s_rho[i] = 1.0;
    } else {
      out.s_phi[i] = std::clamp(out.s_phi[i], bounds.phi_low, bounds.phi_up);
      out.s_rho[i] = std::clamp(out.s_rho[i], 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace lsto
