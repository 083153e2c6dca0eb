#pragma once

#include "lsto/grid.hpp"
#include "lsto/material.hpp"

namespace lsto {

using SparseMat = Eigen::SparseMatrix<double>;

struct DirichletBC {
  std::vector<int> nodes;
  int comp = 0;  // 0 = x, 1 = y
  double value = 0.0;
};

// Boundary edge (node pair, length h) carrying a constant traction vector,
// applied as consistent nodal loads.
struct TractionEdge {
  int node_a = -1;
  int node_b = -1;
  Eigen::Vector2d traction = Eigen::Vector2d::Zero();
};

struct ElasticityProblem {
  std::vector<DirichletBC> dirichlet;
  std::vector<TractionEdge> tractions;
  double thickness = 1.0;
  bool plane_strain = false;
};

struct SolveResult {
  Vector u;                      // 2 dofs per node, [ux0, uy0, ux1, ...]
  SparseMat K;                   // unconstrained assembled stiffness
  Vector f;                      // consistent load vector
  double psi = 0.0;              // strain energy, 0.5 u^T K u
  std::vector<char> constrained; // per dof
  double thickness = 1.0;
};

// Unit-modulus stiffness of a square bilinear quad, 2x2 Gauss quadrature.
// Independent of the edge length in 2D; scale by E_e * thickness.
Eigen::Matrix<double, 8, 8> unit_element_stiffness(double nu, bool plane_strain);

SolveResult assemble_and_solve(const StructuredGrid& grid, const Vector& elem_modulus,
                               const ElasticityProblem& problem, double nu,
                               double residual_tol = 1e-10);

double strain_energy(const SolveResult& res);

// Self-adjoint sensitivity dPsi/dE_e = -1/2 u_e^T (t KE) u_e per element.
Vector strain_energy_modulus_gradient(const StructuredGrid& grid, const SolveResult& res,
                                      double nu, bool plane_strain);

struct MassResult {
  double value = 0.0;
  Vector d_elem_rho;  // dM / d(element rho_hat)
  Vector d_elem_f;    // dM / d(element solid fraction)
};

MassResult solid_mass(const StructuredGrid& grid, const Vector& elem_rho_hat,
                      const Vector& solid_fraction, const MaterialModel& mat,
                      double thickness = 1.0);

MassResult total_mass(const StructuredGrid& grid, const Vector& elem_rho_hat,
                      const MaterialModel& mat, double thickness = 1.0);

}  // namespace lsto
