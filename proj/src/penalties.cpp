#include "lsto/penalties.hpp"

#include <cmath>

namespace lsto {

namespace {

double hs_ramp(double phi, const PenaltyParams& p) {
  const double q = std::max(0.0, (phi - p.phi_th_hs) / (p.phi_up - p.phi_th_hs));
  const double num = std::sqrt(q * q + p.xi * p.xi) - p.xi;
  const double den = std::sqrt(1.0 + p.xi * p.xi) - p.xi;
  return num / den;
}

double hs_ramp_dphi(double phi, const PenaltyParams& p) {
  const double scale = 1.0 / (p.phi_up - p.phi_th_hs);
  const double q = (phi - p.phi_th_hs) * scale;
  if (q <= 0.0) return 0.0;
  const double den = std::sqrt(1.0 + p.xi * p.xi) - p.xi;
  return q / std::sqrt(q * q + p.xi * p.xi) * scale / den;
}

struct GaussPoint {
  double N[4];
  double dN[4][2];  // physical derivatives, filled per grid
};

// 2x2 Gauss rule on the bilinear quad; detJ = h^2/4, unit weights.
std::array<GaussPoint, 4> gauss_points(double h) {
  const double gp = 1.0 / std::sqrt(3.0);
  const double xi_n[4] = {-1.0, 1.0, 1.0, -1.0};
  const double eta_n[4] = {-1.0, -1.0, 1.0, 1.0};
  std::array<GaussPoint, 4> pts;
  int idx = 0;
  for (double eta : {-gp, gp}) {
    for (double xi : {-gp, gp}) {
      auto& g = pts[idx++];
      for (int k = 0; k < 4; ++k) {
        g.N[k] = 0.25 * (1.0 + xi_n[k] * xi) * (1.0 + eta_n[k] * eta);
        g.dN[k][0] = 0.25 * xi_n[k] * (1.0 + eta_n[k] * eta) * 2.0 / h;
        g.dN[k][1] = 0.25 * eta_n[k] * (1.0 + xi_n[k] * xi) * 2.0 / h;
      }
    }
  }
  return pts;
}

}  // namespace

double hole_seeding_density(double phi, double rho_hat, const PenaltyParams& p) {
  if (rho_hat >= p.rho_th_hs) return 0.0;
  return hs_ramp(phi, p);
}

double vddr_density(double s_hat_rho, double phi, const PenaltyParams& p) {
  return phi <= p.phi_th_fs ? s_hat_rho : 0.0;
}

// Both branchy penalties use nodal (lumped) quadrature: the integrands switch
// on characteristic functions, and Gauss points would misalign the active
// region with the nodal fields that define it by up to half an element.
PenaltyValue hole_seeding_penalty(const StructuredGrid& grid, const Vector& phi,
                                  const Vector& rho_hat, const PenaltyParams& p) {
  PenaltyValue out;
  out.d_phi = Vector::Zero(grid.num_nodes());
  out.d_rho = Vector::Zero(grid.num_nodes());  // indicator only; no smooth dependence
  const double wq = 0.25 * grid.h * grid.h;    // corner weight of one element
  const double norm = 1.0 / grid.boundary_length();

  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto c = grid.elem_conn(e);
    for (int k = 0; k < 4; ++k) {
      if (rho_hat[c[k]] >= p.rho_th_hs) continue;
      out.value += hs_ramp(phi[c[k]], p) * wq * norm;
      out.d_phi[c[k]] += hs_ramp_dphi(phi[c[k]], p) * wq * norm;
    }
  }
  return out;
}

PenaltyValue vddr_penalty(const StructuredGrid& grid, const Vector& phi,
                          const Vector& s_hat_rho, const PenaltyParams& p) {
  PenaltyValue out;
  out.d_phi = Vector::Zero(grid.num_nodes());  // frozen characteristic function
  out.d_rho = Vector::Zero(grid.num_nodes());
  const double wq = 0.25 * grid.h * grid.h;
  const double norm = 1.0 / grid.boundary_length();

  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto c = grid.elem_conn(e);
    for (int k = 0; k < 4; ++k) {
      if (phi[c[k]] > p.phi_th_fs) continue;
      out.value += s_hat_rho[c[k]] * wq * norm;
      out.d_rho[c[k]] += wq * norm;
    }
  }
  return out;
}

PenaltyValue regularization_penalty(const StructuredGrid& grid, const Vector& phi,
                                    const TargetLSF& target, const PenaltyParams& p) {
  PenaltyValue out;
  out.d_phi = Vector::Zero(grid.num_nodes());
  const auto pts = gauss_points(grid.h);
  const double detJ = 0.25 * grid.h * grid.h;
  const double volume = grid.area();
  const double band = target.band();
  const double norm_val = p.w_phi / (band * band * volume);
  const double norm_grad = p.w_grad_phi / volume;

  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto c = grid.elem_conn(e);
    for (const auto& g : pts) {
      double diff = 0.0;
      Eigen::Vector2d gdiff = Eigen::Vector2d::Zero();
      for (int k = 0; k < 4; ++k) {
        const double dv = phi[c[k]] - target.phi_tilde[c[k]];
        diff += g.N[k] * dv;
        gdiff.x() += g.dN[k][0] * dv;
        gdiff.y() += g.dN[k][1] * dv;
      }
      out.value += (norm_val * diff * diff + norm_grad * gdiff.squaredNorm()) * detJ;
      for (int k = 0; k < 4; ++k) {
        out.d_phi[c[k]] += 2.0 * detJ *
                           (norm_val * diff * g.N[k] +
                            norm_grad * (gdiff.x() * g.dN[k][0] + gdiff.y() * g.dN[k][1]));
      }
    }
  }
  return out;
}

}  // namespace lsto
