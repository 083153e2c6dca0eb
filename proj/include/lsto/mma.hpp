#pragma once

#include <functional>

#include "lsto/grid.hpp"

namespace lsto {

// Method of moving asymptotes (Svanberg), with an optional globally convergent
// inner loop. One instance owns the iterate history of one optimization run.
struct MMAOptions {
  double asyinit = 0.5;  // initial asymptote span factor
  double asyincr = 1.2;
  double asydecr = 0.7;
  double a0 = 1.0;
  double c_i = 1000.0;  // subproblem constraint penalty
  double kkt_tol = 1e-9;
  int max_inner = 15;  // GCMMA inner iterations
};

class MMAOptimizer {
 public:
  using Options = MMAOptions;

  MMAOptimizer(int n_vars, int n_cons, Options opts = {});

  // One MMA outer iteration (no inner loop). dg is n_cons x n_vars.
  // move is the per-variable move limit in absolute units.
  Vector step(const Vector& x, double f0, const Vector& df0, const Vector& g,
              const Eigen::MatrixXd& dg, const Vector& xmin, const Vector& xmax,
              const Vector& move);

  // GCMMA outer iteration: repeats the subproblem with increasingly
  // conservative approximations until they bound the true values at the
  // candidate point. `evaluate` returns (f0, g) at a trial design.
  using Evaluator = std::function<std::pair<double, Vector>(const Vector&)>;
  Vector step_gcmma(const Vector& x, double f0, const Vector& df0, const Vector& g,
                    const Eigen::MatrixXd& dg, const Vector& xmin, const Vector& xmax,
                    const Vector& move, const Evaluator& evaluate);

  int iteration() const { return iter_; }
  const Vector& lower_asymptotes() const { return low_; }
  const Vector& upper_asymptotes() const { return upp_; }
  double last_kkt_residual() const { return last_kkt_; }

 private:
  struct Subproblem {
    Vector p0, q0, alfa, beta;
    Eigen::MatrixXd P, Q;
    Vector b;
  };

  void update_asymptotes(const Vector& x, const Vector& xmin, const Vector& xmax);
  Subproblem build_subproblem(const Vector& x, const Vector& df0, const Vector& g,
                              const Eigen::MatrixXd& dg, const Vector& xmin,
                              const Vector& xmax, const Vector& move, double raa0,
                              const Vector& raa) const;
  Vector solve_subproblem(const Subproblem& sp);
  void approx_values(const Subproblem& sp, const Vector& x, double& f0app, Vector& gapp) const;
  void push_history(const Vector& x);

  int n_, m_;
  Options opts_;
  int iter_ = 0;
  Vector low_, upp_, xold1_, xold2_;
  double last_kkt_ = 0.0;
};

}  // namespace lsto
