#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "lsto/fem.hpp"
#include "lsto/fields.hpp"
#include "lsto/geometry.hpp"
#include "lsto/grid.hpp"
#include "lsto/material.hpp"
#include "lsto/mma.hpp"
#include "lsto/penalties.hpp"
#include "lsto/schedule.hpp"

namespace lsto {

enum class ProblemVariant { StrainEnergyMin, MassMinTotal, MassMinSolid };

struct ObjectiveWeights {
  double w1 = 0.8345;
  double w3 = 0.015;
  double w4 = 0.150;
  double w5 = 1.50;
  // w2 follows the continuation schedule.
};

struct ProblemSpec {
  ProblemVariant variant = ProblemVariant::StrainEnergyMin;
  StructuredGrid grid;
  FilterOperator filter_phi;
  FilterOperator filter_rho;
  DesignBounds bounds;
  MaterialModel material;
  ElasticityProblem elasticity;
  ContinuationSchedule schedule;
  ObjectiveWeights weights;

  double tau_pr = 0.001;
  double xi = 0.1;
  double phi_th_hs = 0.0;  // absolute thresholds (< 0)
  double phi_th_fs = 0.0;
  double w_phi = 1.0;
  double w_grad_phi = 1.0;

  double gamma_m = 0.40;   // mass fraction target (strain-energy variant)
  double psi_ref = 1.5e5;  // strain-energy bound (mass-min variants)
  double mass_ref = 0.0;   // normalization mass M_0

  double rho0 = 0.40;      // initial uniform density
  double phi0 = 0.0;       // initial uniform level-set value
  std::vector<Box2d> initial_holes;

  std::vector<bool> frozen;
  std::vector<Box2d> measure_exclude;  // load/support pads, skipped when measuring features

  double residual_tol = 1e-10;
  double move_phi = 0.1;  // fraction of the phi span per step
  double move_rho = 0.2;
  bool gcmma_inner = false;
  double kkt_tol = 1e-9;
  double convergence_tol = 1e-3;
  double constraint_tol = 1e-3;
};

struct IterationRecord {
  int iter = 0;
  double z = 0.0;
  double f_term = 0.0;  // unweighted performance term
  double p_per = 0.0;   // weighted penalty contributions
  double p_reg = 0.0;
  double p_hs = 0.0;
  double p_vddr = 0.0;
  double g1 = 0.0;
  double psi = 0.0;
  double mass = 0.0;
  double gamma_pr = 0.0;
  double beta_rho = 0.0;
  double rho_th_hs = 0.0;
  double w2 = 0.0;
  double wall_ms = 0.0;
};

struct Evaluation {
  double z = 0.0;
  Vector dz_phi, dz_rho;  // gradients w.r.t. the design blocks
  Vector g;               // constraint values
  Vector dg_phi, dg_rho;  // single-constraint gradients
  IterationRecord record;
  FieldSet fields;
  SolidFractionField fractions;
  TargetLSF target;
  Vector u;             // nodal displacements, 2 dofs per node
  Vector elem_modulus;  // ersatz Young's modulus per element
  double psi = 0.0;
  double mass = 0.0;
};

struct RunResult {
  DesignVector design;
  std::vector<IterationRecord> history;
  bool converged = false;
};

struct FDReport {
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  int samples = 0;
};

class Driver {
 public:
  explicit Driver(ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }

  DesignVector initial_design() const;

  // Full objective/constraint evaluation at one design iterate. The signed
  // distance target is rebuilt unless a frozen one is supplied (used by the
  // finite-difference verifier, which must hold the target fixed).
  Evaluation evaluate(const DesignVector& s, int iter,
                      const TargetLSF* frozen_target = nullptr);

  using IterationCallback =
      std::function<void(const IterationRecord&, const DesignVector&, const Evaluation&)>;
  RunResult run(const IterationCallback& on_iteration = {});

  FDReport fd_verify(const DesignVector& s, int iter, int n_samples, double eps,
                     uint64_t seed = 0);

 private:
  ProblemSpec spec_;
  std::optional<double> psi0_;
};

struct Beam2dConfigHooks {
  int load_patch_elems = 4;   // full-domain patch width, halved on the symmetry model
  int frozen_depth_elems = 3;
  int support_pad_elems = 1;
  double traction = -10.0;
};

ProblemSpec make_beam2d_spec(int nx, int ny, double h, double r_f_phi, double r_f_rho,
                             const Beam2dConfigHooks& hooks = {});

ProblemSpec make_massmin_spec(int nx, int ny, double h, double r_f_phi, double r_f_rho,
                              bool solid_mass_variant, double psi_ref,
                              const Beam2dConfigHooks& hooks = {});

}  // namespace lsto
