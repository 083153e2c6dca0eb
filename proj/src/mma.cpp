#include "lsto/mma.hpp"

#include <cmath>
#include <stdexcept>

namespace lsto {

using Arr = Eigen::ArrayXd;

MMAOptimizer::MMAOptimizer(int n_vars, int n_cons, Options opts)
    : n_(n_vars), m_(n_cons), opts_(opts) {
  low_ = Vector::Zero(n_);
  upp_ = Vector::Zero(n_);
  xold1_ = Vector::Zero(n_);
  xold2_ = Vector::Zero(n_);
}

void MMAOptimizer::update_asymptotes(const Vector& x, const Vector& xmin, const Vector& xmax) {
  const Arr span = (xmax - xmin).array();
  if (iter_ < 2) {
    low_ = x.array() - opts_.asyinit * span;
    upp_ = x.array() + opts_.asyinit * span;
    return;
  }
  for (int i = 0; i < n_; ++i) {
    const double zzz = (x[i] - xold1_[i]) * (xold1_[i] - xold2_[i]);
    double factor = 1.0;
    if (zzz > 0.0) factor = opts_.asyincr;
    if (zzz < 0.0) factor = opts_.asydecr;
    double lo = x[i] - factor * (xold1_[i] - low_[i]);
    double up = x[i] + factor * (upp_[i] - xold1_[i]);
    lo = std::max(lo, x[i] - 10.0 * span[i]);
    lo = std::min(lo, x[i] - 0.01 * span[i]);
    up = std::min(up, x[i] + 10.0 * span[i]);
    up = std::max(up, x[i] + 0.01 * span[i]);
    low_[i] = lo;
    upp_[i] = up;
  }
}

MMAOptimizer::Subproblem MMAOptimizer::build_subproblem(
    const Vector& x, const Vector& df0, const Vector& g, const Eigen::MatrixXd& dg,
    const Vector& xmin, const Vector& xmax, const Vector& move, double raa0,
    const Vector& raa) const {
  const double albefa = 0.1;
  Subproblem sp;
  sp.alfa.resize(n_);
  sp.beta.resize(n_);
  for (int i = 0; i < n_; ++i) {
    sp.alfa[i] = std::max({xmin[i], low_[i] + albefa * (x[i] - low_[i]), x[i] - move[i]});
    sp.beta[i] = std::min({xmax[i], upp_[i] - albefa * (upp_[i] - x[i]), x[i] + move[i]});
  }

  const Arr xmami = (xmax - xmin).array().max(1e-5);
  const Arr ux2 = (upp_ - x).array().square();
  const Arr xl2 = (x - low_).array().square();

  const Arr dfp = df0.array().max(0.0);
  const Arr dfm = (-df0.array()).max(0.0);
  const Arr pq0 = 0.001 * (dfp + dfm) + raa0 / xmami;
  sp.p0 = (ux2 * (dfp + pq0)).matrix();
  sp.q0 = (xl2 * (dfm + pq0)).matrix();

  sp.P.resize(m_, n_);
  sp.Q.resize(m_, n_);
  sp.b.resize(m_);
  for (int j = 0; j < m_; ++j) {
    const Arr gp = dg.row(j).transpose().array().max(0.0);
    const Arr gm = (-dg.row(j).transpose().array()).max(0.0);
    const Arr pq = 0.001 * (gp + gm) + raa[j] / xmami;
    sp.P.row(j) = (ux2 * (gp + pq)).matrix();
    sp.Q.row(j) = (xl2 * (gm + pq)).matrix();
    sp.b[j] = sp.P.row(j).dot((upp_ - x).cwiseInverse()) +
              sp.Q.row(j).dot((x - low_).cwiseInverse()) - g[j];
  }
  return sp;
}

void MMAOptimizer::approx_values(const Subproblem& sp, const Vector& x, double& f0app,
                                 Vector& gapp) const {
  const Vector uxinv = (upp_ - x).cwiseInverse();
  const Vector xlinv = (x - low_).cwiseInverse();
  f0app = sp.p0.dot(uxinv) + sp.q0.dot(xlinv);
  gapp = sp.P * uxinv + sp.Q * xlinv - sp.b;
}

// Primal-dual interior point solver for the separable MMA subproblem.
Vector MMAOptimizer::solve_subproblem(const Subproblem& sp) {
  const Arr alfa = sp.alfa.array();
  const Arr beta = sp.beta.array();
  const Arr low = low_.array();
  const Arr upp = upp_.array();
  const Arr p0 = sp.p0.array();
  const Arr q0 = sp.q0.array();
  const Vector a = Vector::Zero(m_);
  const Vector c = Vector::Constant(m_, opts_.c_i);
  const Vector d = Vector::Zero(m_);
  const double a0 = opts_.a0;

  Arr x = 0.5 * (alfa + beta);
  Arr y = Arr::Ones(m_);
  double z = 1.0;
  Arr lam = Arr::Ones(m_);
  Arr xsi = (1.0 / (x - alfa)).max(1.0);
  Arr eta = (1.0 / (beta - x)).max(1.0);
  Arr mu = (0.5 * c.array()).max(1.0);
  double zet = 1.0;
  Arr s = Arr::Ones(m_);

  const double epsimin = 0.1 * opts_.kkt_tol;
  double epsi = 1.0;

  auto residuals = [&](double eps, Arr& res_all) {
    const Arr ux1 = upp - x;
    const Arr xl1 = x - low;
    const Arr plam = p0 + (sp.P.transpose() * lam.matrix()).array();
    const Arr qlam = q0 + (sp.Q.transpose() * lam.matrix()).array();
    const Arr gvec = (sp.P * ux1.inverse().matrix() + sp.Q * xl1.inverse().matrix()).array();
    const Arr dpsidx = plam / ux1.square() - qlam / xl1.square();

    res_all.resize(2 * n_ + 4 * m_ + 2 + n_);
    int o = 0;
    res_all.segment(o, n_) = dpsidx - xsi + eta; o += n_;
    res_all.segment(o, m_) = c.array() + d.array() * y - mu - lam; o += m_;
    res_all[o++] = a0 - zet - a.dot(lam.matrix());
    res_all.segment(o, m_) = gvec - a.array() * z - y + s - sp.b.array(); o += m_;
    res_all.segment(o, n_) = xsi * (x - alfa) - eps; o += n_;
    res_all.segment(o, n_) = eta * (beta - x) - eps; o += n_;
    res_all.segment(o, m_) = mu * y - eps; o += m_;
    res_all[o++] = zet * z - eps;
    res_all.segment(o, m_) = lam * s - eps;
  };

  Arr residu;
  while (true) {
    residuals(epsi, residu);
    double residunorm = residu.matrix().norm();
    double residumax = residu.abs().maxCoeff();

    for (int ittt = 0; ittt < 250 && residumax > 0.9 * epsi; ++ittt) {
      const Arr ux1 = upp - x;
      const Arr xl1 = x - low;
      const Arr ux2 = ux1.square();
      const Arr xl2 = xl1.square();
      const Arr ux3 = ux1 * ux2;
      const Arr xl3 = xl1 * xl2;
      const Arr plam = p0 + (sp.P.transpose() * lam.matrix()).array();
      const Arr qlam = q0 + (sp.Q.transpose() * lam.matrix()).array();
      const Arr gvec = (sp.P * ux1.inverse().matrix() + sp.Q * xl1.inverse().matrix()).array();
      Eigen::MatrixXd GG(m_, n_);
      for (int j = 0; j < m_; ++j)
        GG.row(j) = (sp.P.row(j).transpose().array() / ux2 -
                     sp.Q.row(j).transpose().array() / xl2).matrix();

      const Arr dpsidx = plam / ux2 - qlam / xl2;
      const Arr delx = dpsidx - epsi / (x - alfa) + epsi / (beta - x);
      const Arr dely = c.array() + d.array() * y - lam - epsi / y;
      const double delz = a0 - a.dot(lam.matrix()) - epsi / z;
      const Arr dellam = gvec - a.array() * z - y - sp.b.array() + epsi / lam;

      Arr diagx = 2.0 * (plam / ux3 + qlam / xl3) + xsi / (x - alfa) + eta / (beta - x);
      const Arr diagy = d.array() + mu / y;
      const Arr diaglamyi = s / lam + 1.0 / diagy;

      // Reduce to an (m+1)x(m+1) system in (dlam, dz).
      Eigen::MatrixXd AA(m_ + 1, m_ + 1);
      Eigen::VectorXd bb(m_ + 1);
      const Arr delx_over = delx / diagx;
      Eigen::MatrixXd GDG = GG * (GG.transpose().array().colwise() / diagx).matrix();
      AA.topLeftCorner(m_, m_) = GDG;
      AA.topLeftCorner(m_, m_).diagonal() += diaglamyi.matrix();
      AA.topRightCorner(m_, 1) = a;
      AA.bottomLeftCorner(1, m_) = a.transpose();
      AA(m_, m_) = -zet / z;
      bb.head(m_) = (dellam + dely / diagy).matrix() - GG * delx_over.matrix();
      bb[m_] = delz;
      const Eigen::VectorXd solut = AA.fullPivLu().solve(bb);
      const Arr dlam = solut.head(m_).array();
      const double dz = solut[m_];

      const Arr dx = -delx_over - (GG.transpose() * dlam.matrix()).array() / diagx;
      const Arr dy = -dely / diagy + dlam / diagy;
      const Arr dxsi = -xsi + epsi / (x - alfa) - (xsi * dx) / (x - alfa);
      const Arr deta = -eta + epsi / (beta - x) + (eta * dx) / (beta - x);
      const Arr dmu = -mu + epsi / y - (mu * dy) / y;
      const double dzet = -zet + epsi / z - zet * dz / z;
      const Arr ds = -s + epsi / lam - (s * dlam) / lam;

      double stmxx = 0.0;
      auto upd = [&](const Arr& v, const Arr& dv) {
        for (int i = 0; i < v.size(); ++i) stmxx = std::max(stmxx, -1.01 * dv[i] / v[i]);
      };
      upd(y, dy);
      upd(lam, dlam);
      upd(xsi, dxsi);
      upd(eta, deta);
      upd(mu, dmu);
      upd(s, ds);
      stmxx = std::max(stmxx, -1.01 * dz / z);
      stmxx = std::max(stmxx, -1.01 * dzet / zet);
      for (int i = 0; i < n_; ++i) {
        stmxx = std::max(stmxx, -1.01 * dx[i] / (x[i] - alfa[i]));
        stmxx = std::max(stmxx, 1.01 * dx[i] / (beta[i] - x[i]));
      }
      double steg = 1.0 / std::max(stmxx, 1.0);

      const Arr xold = x, yold = y, lamold = lam, xsiold = xsi, etaold = eta, muold = mu,
                sold = s;
      const double zold = z, zetold = zet;

      double resinew = 2.0 * residunorm;
      for (int itto = 0; itto < 50 && resinew > residunorm; ++itto) {
        x = xold + steg * dx;
        y = yold + steg * dy;
        z = zold + steg * dz;
        lam = lamold + steg * dlam;
        xsi = xsiold + steg * dxsi;
        eta = etaold + steg * deta;
        mu = muold + steg * dmu;
        zet = zetold + steg * dzet;
        s = sold + steg * ds;
        residuals(epsi, residu);
        resinew = residu.matrix().norm();
        steg *= 0.5;
      }
      residunorm = resinew;
      residumax = residu.abs().maxCoeff();
    }

    last_kkt_ = residumax;
    if (epsi <= epsimin) break;
    epsi *= 0.1;
  }
  return x.matrix();
}

void MMAOptimizer::push_history(const Vector& x) {
  xold2_ = xold1_;
  xold1_ = x;
  ++iter_;
}

Vector MMAOptimizer::step(const Vector& x, double /*f0*/, const Vector& df0, const Vector& g,
                          const Eigen::MatrixXd& dg, const Vector& xmin, const Vector& xmax,
                          const Vector& move) {
  if (!df0.allFinite() || !g.allFinite() || !dg.allFinite())
    throw std::invalid_argument("mma_step: non-finite inputs");
  if (x.size() != n_ || df0.size() != n_ || g.size() != m_)
    throw std::invalid_argument("mma_step: dimension mismatch");

  update_asymptotes(x, xmin, xmax);
  const Vector raa = Vector::Constant(m_, 1e-5);
  Subproblem sp = build_subproblem(x, df0, g, dg, xmin, xmax, move, 1e-5, raa);
  Vector xnew = solve_subproblem(sp);
  if (last_kkt_ > 1e-4)
    throw std::runtime_error("mma_step: subproblem solver stalled, KKT residual " +
                             std::to_string(last_kkt_));
  push_history(x);
  return xnew;
}

Vector MMAOptimizer::step_gcmma(const Vector& x, double f0, const Vector& df0, const Vector& g,
                                const Eigen::MatrixXd& dg, const Vector& xmin,
                                const Vector& xmax, const Vector& move,
                                const Evaluator& evaluate) {
  if (!df0.allFinite() || !g.allFinite() || !dg.allFinite())
    throw std::invalid_argument("mma_step: non-finite inputs");
  update_asymptotes(x, xmin, xmax);

  const Arr xmami = (xmax - xmin).array().max(1e-5);
  double raa0 = std::max(1e-6, 0.1 * (df0.array().abs() * xmami).sum() / n_);
  Vector raa(m_);
  for (int j = 0; j < m_; ++j)
    raa[j] = std::max(1e-6, 0.1 * (dg.row(j).transpose().array().abs() * xmami).sum() / n_);

  Vector xnew;
  for (int inner = 0; inner < opts_.max_inner; ++inner) {
    Subproblem sp = build_subproblem(x, df0, g, dg, xmin, xmax, move, raa0, raa);
    xnew = solve_subproblem(sp);
    double f0app;
    Vector gapp;
    approx_values(sp, xnew, f0app, gapp);
    auto [f0new, gnew] = evaluate(xnew);

    const double tol0 = 1e-9 * (1.0 + std::abs(f0));
    bool conservative = f0app + tol0 >= f0new;
    for (int j = 0; j < m_ && conservative; ++j)
      conservative = gapp[j] + tol0 >= gnew[j];
    if (conservative) break;

    // raa update (Svanberg 2002): grow the curvature where the approximation
    // underestimated the true value.
    const Arr xx = ((xnew - x).array() / (upp_ - xnew).array()) *
                   ((xnew - x).array() / (xnew.array() - low_.array())) *
                   ((upp_ - low_).array() / xmami);
    const double raacof = std::max(xx.sum(), 1e-12);
    if (f0new > f0app + tol0) {
      const double delta = (f0new - f0app) / raacof;
      raa0 = std::min(std::max(1.1 * (raa0 + delta), raa0), 10.0 * raa0);
    }
    for (int j = 0; j < m_; ++j) {
      if (gnew[j] > gapp[j] + tol0) {
        const double delta = (gnew[j] - gapp[j]) / raacof;
        raa[j] = std::min(std::max(1.1 * (raa[j] + delta), raa[j]), 10.0 * raa[j]);
      }
    }
  }
  push_history(x);
  return xnew;
}

}  // namespace lsto
