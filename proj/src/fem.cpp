#include "lsto/fem.hpp"

#include <Eigen/SparseCholesky>
#include <sstream>
#include <stdexcept>

namespace lsto {

Eigen::Matrix<double, 8, 8> unit_element_stiffness(double nu, bool plane_strain) {
  Eigen::Matrix3d D;
  if (plane_strain) {
    const double c = 1.0 / ((1.0 + nu) * (1.0 - 2.0 * nu));
    D << (1.0 - nu) * c, nu * c, 0.0,
         nu * c, (1.0 - nu) * c, 0.0,
         0.0, 0.0, 0.5 / (1.0 + nu);
  } else {
    const double c = 1.0 / (1.0 - nu * nu);
    D << c, nu * c, 0.0,
         nu * c, c, 0.0,
         0.0, 0.0, 0.5 * (1.0 - nu) * c;
  }

  // Reference square [-1,1]^2; the Jacobian of a square element cancels the
  // edge length, so a unit-size map is used.
  Eigen::Matrix<double, 8, 8> ke = Eigen::Matrix<double, 8, 8>::Zero();
  const double gp = 1.0 / std::sqrt(3.0);
  const double xi_n[4] = {-1.0, 1.0, 1.0, -1.0};
  const double eta_n[4] = {-1.0, -1.0, 1.0, 1.0};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double xi = (a == 0 ? -gp : gp);
      const double eta = (b == 0 ? -gp : gp);
      Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
      for (int k = 0; k < 4; ++k) {
        // dN/dx = dN/dxi * 2/h; combined with detJ = h^2/4 this yields the
        // h-independent element matrix below (factor 2/h * 2/h * h^2/4 = 1).
        const double dNdx = 0.25 * xi_n[k] * (1.0 + eta_n[k] * eta);
        const double dNdy = 0.25 * eta_n[k] * (1.0 + xi_n[k] * xi);
        B(0, 2 * k) = dNdx;
        B(1, 2 * k + 1) = dNdy;
        B(2, 2 * k) = dNdy;
        B(2, 2 * k + 1) = dNdx;
      }
      ke += B.transpose() * D * B;  // unit weights; (2/h)^2 * detJ = 1
    }
  }
  return ke;
}

SolveResult assemble_and_solve(const StructuredGrid& grid, const Vector& elem_modulus,
                               const ElasticityProblem& problem, double nu,
                               double residual_tol) {
  const int n_nodes = grid.num_nodes();
  const int n_dofs = 2 * n_nodes;
  if (elem_modulus.size() != grid.num_elements())
    throw std::invalid_argument("assemble_and_solve: modulus field size mismatch");
  if (elem_modulus.minCoeff() <= 0.0)
    throw std::invalid_argument("assemble_and_solve: modulus must be strictly positive");

  const auto ke = unit_element_stiffness(nu, problem.plane_strain);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(grid.num_elements()) * 64);
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto conn = grid.elem_conn(e);
    const double scale = elem_modulus[e] * problem.thickness;
    int dofs[8];
    for (int k = 0; k < 4; ++k) {
      dofs[2 * k] = 2 * conn[k];
      dofs[2 * k + 1] = 2 * conn[k] + 1;
    }
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c)
        trips.emplace_back(dofs[r], dofs[c], scale * ke(r, c));
  }

  SolveResult res;
  res.thickness = problem.thickness;
  res.K.resize(n_dofs, n_dofs);
  res.K.setFromTriplets(trips.begin(), trips.end());
  res.K.makeCompressed();

  res.f = Vector::Zero(n_dofs);
  for (const auto& tr : problem.tractions) {
    const double half = 0.5 * grid.h * problem.thickness;
    for (int node : {tr.node_a, tr.node_b}) {
      res.f[2 * node] += half * tr.traction.x();
      res.f[2 * node + 1] += half * tr.traction.y();
    }
  }

  res.constrained.assign(n_dofs, 0);
  Vector prescribed = Vector::Zero(n_dofs);
  int n_constraints = 0;
  for (const auto& bc : problem.dirichlet) {
    for (int node : bc.nodes) {
      const int d = 2 * node + bc.comp;
      res.constrained[d] = 1;
      prescribed[d] = bc.value;
      ++n_constraints;
    }
  }
  if (n_constraints < 3)
    throw std::invalid_argument("assemble_and_solve: fewer than 3 Dirichlet constraints");

  std::vector<int> free_index(n_dofs, -1);
  int n_free = 0;
  for (int d = 0; d < n_dofs; ++d)
    if (!res.constrained[d]) free_index[d] = n_free++;

  const Vector lift = res.K * prescribed;
  Vector f_red(n_free);
  for (int d = 0; d < n_dofs; ++d)
    if (free_index[d] >= 0) f_red[free_index[d]] = res.f[d] - lift[d];

  std::vector<Eigen::Triplet<double>> red_trips;
  red_trips.reserve(trips.size());
  for (int col = 0; col < res.K.outerSize(); ++col) {
    for (SparseMat::InnerIterator it(res.K, col); it; ++it) {
      const int fr = free_index[it.row()];
      const int fc = free_index[it.col()];
      if (fr >= 0 && fc >= 0) red_trips.emplace_back(fr, fc, it.value());
    }
  }
  SparseMat K_red(n_free, n_free);
  K_red.setFromTriplets(red_trips.begin(), red_trips.end());
  K_red.makeCompressed();

  Eigen::SimplicialLDLT<SparseMat> solver(K_red);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("assemble_and_solve: factorization failed (singular system; "
                             "check that Dirichlet constraints remove all rigid-body modes)");
  Vector u_red = solver.solve(f_red);
  // one step of iterative refinement; the void/solid stiffness contrast can
  // leave the raw backward error a shade above the acceptance tolerance
  u_red += solver.solve(f_red - K_red * u_red);

  const double fnorm = f_red.norm();
  const double rnorm = (K_red * u_red - f_red).norm();
  if (fnorm > 0.0 && rnorm > residual_tol * fnorm) {
    std::ostringstream msg;
    msg << "assemble_and_solve: residual " << rnorm / fnorm << " exceeds tolerance " << residual_tol;
    throw std::runtime_error(msg.str());
  }

  res.u = prescribed;
  for (int d = 0; d < n_dofs; ++d)
    if (free_index[d] >= 0) res.u[d] = u_red[free_index[d]];
  res.psi = 0.5 * res.u.dot(res.K * res.u);
  return res;
}

double strain_energy(const SolveResult& res) { return res.psi; }

Vector strain_energy_modulus_gradient(const StructuredGrid& grid, const SolveResult& res,
                                      double nu, bool plane_strain) {
  const auto ke = unit_element_stiffness(nu, plane_strain);
  Vector g(grid.num_elements());
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto conn = grid.elem_conn(e);
    Eigen::Matrix<double, 8, 1> ue;
    for (int k = 0; k < 4; ++k) {
      ue[2 * k] = res.u[2 * conn[k]];
      ue[2 * k + 1] = res.u[2 * conn[k] + 1];
    }
    g[e] = -0.5 * res.thickness * ue.dot(ke * ue);
  }
  return g;
}

MassResult solid_mass(const StructuredGrid& grid, const Vector& elem_rho_hat,
                      const Vector& solid_fraction, const MaterialModel& mat,
                      double thickness) {
  const double cell = grid.h * grid.h * thickness;
  MassResult m;
  m.d_elem_rho.resize(grid.num_elements());
  m.d_elem_f.resize(grid.num_elements());
  for (int e = 0; e < grid.num_elements(); ++e) {
    m.value += element_material_density(elem_rho_hat[e], solid_fraction[e], mat) * cell;
    m.d_elem_rho[e] = mat.theta_solid * solid_fraction[e] * cell;
    m.d_elem_f[e] = mat.theta_solid * elem_rho_hat[e] * cell;
  }
  return m;
}

MassResult total_mass(const StructuredGrid& grid, const Vector& elem_rho_hat,
                      const MaterialModel& mat, double thickness) {
  const double cell = grid.h * grid.h * thickness;
  MassResult m;
  m.d_elem_rho = Vector::Constant(grid.num_elements(), mat.theta_solid * cell);
  m.d_elem_f = Vector::Zero(grid.num_elements());
  m.value = mat.theta_solid * cell * elem_rho_hat.sum();
  return m;
}

}  // namespace lsto
