#include "codebound/solver.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace codebound {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct DenseBlock {
  int size;
  MatrixXd C;                                   // constant part of value(x)
  std::vector<std::pair<int, MatrixXd>> terms;  // (variable, coefficient matrix)
};

// Strictly-interior test: all LDLT pivots clear a relative floor, so iterates
// never land on the numerical boundary of the cone.
bool is_strictly_pd(const MatrixXd& M) {
  if (M.rows() == 1) return M(0, 0) > 1e-300;
  Eigen::LDLT<MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success) return false;
  const auto& d = ldlt.vectorD();
  const double dmax = d.maxCoeff();
  if (dmax <= 0) return false;
  return d.minCoeff() > 1e-14 * dmax;
}

// Largest alpha in (0,1] with M + alpha*dM strictly PD, by bisection.
double max_step(const MatrixXd& M, const MatrixXd& dM) {
  if (is_strictly_pd(M + dM)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (is_strictly_pd(M + mid * dM))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

SolveResult solve(const SdpModel& model, const SolverSettings& settings) {
  const int nvars = static_cast<int>(model.variables.size());
  if (settings.tol_gap <= 0 || settings.tol_feas <= 0)
    throw std::invalid_argument("solve: tolerances must be positive");
  if (settings.step_fraction <= 0 || settings.step_fraction >= 1)
    throw std::invalid_argument("solve: step_fraction must lie in (0,1)");

  // Internal min form.
  const double sense_sign = model.sense == Sense::Max ? -1.0 : 1.0;
  VectorXd c(nvars);
  for (int i = 0; i < nvars; ++i)
    c(i) = sense_sign * to_double(model.objective[static_cast<size_t>(i)]);

  // Lower the model: dense blocks, then equality pairs relaxed by tol_feas/10.
  std::vector<DenseBlock> blocks;
  blocks.reserve(model.blocks.size() + 2 * model.equalities.size());
  for (const auto& b : model.blocks) {
    DenseBlock db;
    db.size = b.size;
    db.C = block_matrix(b, -1);
    for (const auto& [vi, coords] : b.terms) {
      (void)coords;
      db.terms.emplace_back(vi, block_matrix(b, vi));
    }
    blocks.push_back(std::move(db));
  }
  const double eq_eps = settings.tol_feas / 10.0;
  for (const auto& e : model.equalities) {
    DenseBlock ge, le;
    ge.size = le.size = 1;
    const double h = to_double(e.rhs);
    ge.C = MatrixXd::Constant(1, 1, -h + eq_eps);
    le.C = MatrixXd::Constant(1, 1, h + eq_eps);
    for (const auto& [vi, coef] : e.coeffs) {
      const double g = to_double(coef);
      ge.terms.emplace_back(vi, MatrixXd::Constant(1, 1, g));
      le.terms.emplace_back(vi, MatrixXd::Constant(1, 1, -g));
    }
    blocks.push_back(std::move(ge));
    blocks.push_back(std::move(le));
  }

  int total_dim = 0;
  for (const auto& b : blocks) total_dim += b.size;
  if (total_dim > settings.max_total_dim)
    throw std::invalid_argument("solve: total block dimension exceeds max_total_dim");
  const int nblocks = static_cast<int>(blocks.size());

  double cmax = 1.0;
  for (const auto& b : blocks) {
    if (b.C.size() > 0) cmax = std::max(cmax, b.C.cwiseAbs().maxCoeff());
  }
  double objmax = 1.0;
  for (int i = 0; i < nvars; ++i) objmax = std::max(objmax, std::abs(c(i)));

  // State.
  VectorXd x = VectorXd::Zero(nvars);
  std::vector<MatrixXd> X(static_cast<size_t>(nblocks)), Y(static_cast<size_t>(nblocks));
  for (int b = 0; b < nblocks; ++b) {
    const int nb = blocks[static_cast<size_t>(b)].size;
    X[static_cast<size_t>(b)] = settings.initial_scale * MatrixXd::Identity(nb, nb);
    Y[static_cast<size_t>(b)] = X[static_cast<size_t>(b)];
  }

  auto block_value = [&](int b) {
    const DenseBlock& db = blocks[static_cast<size_t>(b)];
    MatrixXd V = db.C;
    for (const auto& [vi, A] : db.terms) V += x(vi) * A;
    return V;
  };

  std::vector<MatrixXd> Rp(static_cast<size_t>(nblocks));
  VectorXd dres(nvars);
  double feas_p = 0.0, feas_d = 0.0;
  auto compute_residuals = [&] {
    feas_p = 0.0;
    for (int b = 0; b < nblocks; ++b) {
      Rp[static_cast<size_t>(b)] = block_value(b) - X[static_cast<size_t>(b)];
      feas_p = std::max(feas_p, Rp[static_cast<size_t>(b)].cwiseAbs().maxCoeff() / (1.0 + cmax));
    }
    dres = c;
    for (int b = 0; b < nblocks; ++b)
      for (const auto& [vi, A] : blocks[static_cast<size_t>(b)].terms)
        dres(vi) -= (A.cwiseProduct(Y[static_cast<size_t>(b)])).sum();
    feas_d = dres.cwiseAbs().maxCoeff() / (1.0 + objmax);
  };
  compute_residuals();

  auto objectives = [&](double& pobj, double& dobj, double& relgap) {
    pobj = c.dot(x);
    dobj = 0.0;
    for (int b = 0; b < nblocks; ++b)
      dobj -= (blocks[static_cast<size_t>(b)].C.cwiseProduct(Y[static_cast<size_t>(b)])).sum();
    relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  };

  SolveResult out;
  out.x.assign(static_cast<size_t>(nvars), 0.0);
  out.status = SolveStatus::NumericalLimit;

  // Best iterate seen so far (restored on a numerical exit).
  struct Snapshot {
    VectorXd x;
    std::vector<MatrixXd> Y;
    double gap = std::numeric_limits<double>::infinity();
    double merit = std::numeric_limits<double>::infinity();
    int iter = 0;
  } best;

  auto finish = [&](SolveStatus status, int iters, bool restore_best) {
    if (restore_best && best.merit < std::numeric_limits<double>::infinity()) {
      x = best.x;
      Y = best.Y;
      out.duality_gap = best.gap;
    } else {
      double p, d, g;
      objectives(p, d, g);
      out.duality_gap = g;
    }
    out.status = status;
    for (int i = 0; i < nvars; ++i) out.x[static_cast<size_t>(i)] = x(i);
    out.objective = sense_sign * c.dot(x);
    out.iterations = iters;
    out.dual.assign(Y.begin(), Y.begin() + static_cast<long>(model.blocks.size()));
    out.eq_multipliers.clear();
    size_t eqb = model.blocks.size();
    for (size_t e = 0; e < model.equalities.size(); ++e, eqb += 2)
      out.eq_multipliers.push_back(Y[eqb](0, 0) - Y[eqb + 1](0, 0));
    return out;
  };

  const int ntot = total_dim;
  constexpr double kInteriorSnapshotGap = 3e-7;
  bool have_snapshot = false;
  int stall = 0;

  std::vector<MatrixXd> Xinv(static_cast<size_t>(nblocks));
  std::vector<std::vector<MatrixXd>> P(static_cast<size_t>(nblocks)),
      Q(static_cast<size_t>(nblocks));

  for (int iter = 1; iter <= settings.max_iter; ++iter) {
    // Factor X, form X^{-1}, and assemble the Schur complement
    // B(i,j) = sum_b Tr(F_i X^{-1} F_j Y).
    MatrixXd B = MatrixXd::Zero(nvars, nvars);
    VectorXd trFXinv = VectorXd::Zero(nvars);
    for (int b = 0; b < nblocks; ++b) {
      const DenseBlock& db = blocks[static_cast<size_t>(b)];
      Eigen::LLT<MatrixXd> llt(X[static_cast<size_t>(b)]);
      if (llt.info() != Eigen::Success) {
        X[static_cast<size_t>(b)] += 1e-12 * (1.0 + X[static_cast<size_t>(b)].diagonal().maxCoeff()) *
                                     MatrixXd::Identity(db.size, db.size);
        llt.compute(X[static_cast<size_t>(b)]);
        if (llt.info() != Eigen::Success)
          return finish(SolveStatus::NumericalLimit, iter, true);
      }
      Xinv[static_cast<size_t>(b)] = llt.solve(MatrixXd::Identity(db.size, db.size));
      const size_t nv = db.terms.size();
      P[static_cast<size_t>(b)].resize(nv);
      Q[static_cast<size_t>(b)].resize(nv);
      for (size_t i = 0; i < nv; ++i) {
        P[static_cast<size_t>(b)][i] = Xinv[static_cast<size_t>(b)] * db.terms[i].second;
        Q[static_cast<size_t>(b)][i] = db.terms[i].second * Y[static_cast<size_t>(b)];
        trFXinv(db.terms[i].first) +=
            (db.terms[i].second.cwiseProduct(Xinv[static_cast<size_t>(b)])).sum();
      }
      for (size_t i = 0; i < nv; ++i)
        for (size_t j = i; j < nv; ++j) {
          const double v =
              (P[static_cast<size_t>(b)][i].cwiseProduct(Q[static_cast<size_t>(b)][j])).sum();
          const int gi = db.terms[i].first, gj = db.terms[j].first;
          B(gi, gj) += v;
          if (gi != gj) B(gj, gi) += v;
        }
    }
    B = 0.5 * (B + B.transpose()).eval();

    // Jacobi scaling plus iterative refinement keeps the Schur solve accurate
    // when B is badly conditioned near the optimum.
    VectorXd bscale(nvars);
    for (int i = 0; i < nvars; ++i) bscale(i) = std::sqrt(std::max(B(i, i), 1e-150));
    MatrixXd Bs = B;
    for (int i = 0; i < nvars; ++i)
      for (int j = 0; j < nvars; ++j) Bs(i, j) /= bscale(i) * bscale(j);
    Eigen::LDLT<MatrixXd> bfac(Bs);
    double ridge = 1e-14;
    while ((bfac.info() != Eigen::Success || !bfac.isPositive()) && ridge <= 1.0) {
      Bs += ridge * MatrixXd::Identity(nvars, nvars);
      bfac.compute(Bs);
      ridge *= 100.0;
    }
    auto schur_solve = [&](const VectorXd& rhs) {
      VectorXd r = rhs.cwiseQuotient(bscale);
      VectorXd z = bfac.solve(r);
      for (int ref = 0; ref < 2; ++ref) z += bfac.solve(r - Bs * z);
      return z.cwiseQuotient(bscale).eval();
    };

    const double mu = [&] {
      double s = 0.0;
      for (int b = 0; b < nblocks; ++b)
        s += (X[static_cast<size_t>(b)].cwiseProduct(Y[static_cast<size_t>(b)])).sum();
      return s / ntot;
    }();

    // Direction for target mu_hat with optional corrector matrices K.
    auto direction = [&](double mu_hat, const std::vector<MatrixXd>* K, VectorXd& dx,
                         std::vector<MatrixXd>& dX, std::vector<MatrixXd>& dY) {
      VectorXd rhs = mu_hat * trFXinv - c;
      for (int b = 0; b < nblocks; ++b) {
        const DenseBlock& db = blocks[static_cast<size_t>(b)];
        MatrixXd E = Rp[static_cast<size_t>(b)] * Y[static_cast<size_t>(b)];
        if (K) E += (*K)[static_cast<size_t>(b)];
        const MatrixXd M = Xinv[static_cast<size_t>(b)] * E;
        for (const auto& [vi, A] : db.terms) rhs(vi) -= (A.cwiseProduct(M.transpose())).sum();
      }
      dx = schur_solve(rhs);
      dX.resize(static_cast<size_t>(nblocks));
      dY.resize(static_cast<size_t>(nblocks));
      for (int b = 0; b < nblocks; ++b) {
        const DenseBlock& db = blocks[static_cast<size_t>(b)];
        MatrixXd dXb = Rp[static_cast<size_t>(b)];
        for (const auto& [vi, A] : db.terms) dXb += dx(vi) * A;
        MatrixXd Z = mu_hat * MatrixXd::Identity(db.size, db.size) -
                     X[static_cast<size_t>(b)] * Y[static_cast<size_t>(b)];
        if (K) Z -= (*K)[static_cast<size_t>(b)];
        MatrixXd dYb = Xinv[static_cast<size_t>(b)] * (Z - dXb * Y[static_cast<size_t>(b)]);
        dYb = 0.5 * (dYb + dYb.transpose()).eval();
        dX[static_cast<size_t>(b)] = 0.5 * (dXb + dXb.transpose()).eval();
        dY[static_cast<size_t>(b)] = std::move(dYb);
      }
    };

    // Predictor.
    VectorXd dx_a;
    std::vector<MatrixXd> dX_a, dY_a;
    direction(0.0, nullptr, dx_a, dX_a, dY_a);
    double ap_a = 1.0, ad_a = 1.0;
    for (int b = 0; b < nblocks; ++b) {
      ap_a = std::min(ap_a, max_step(X[static_cast<size_t>(b)], dX_a[static_cast<size_t>(b)]));
      ad_a = std::min(ad_a, max_step(Y[static_cast<size_t>(b)], dY_a[static_cast<size_t>(b)]));
    }
    double mu_aff = 0.0;
    for (int b = 0; b < nblocks; ++b)
      mu_aff += ((X[static_cast<size_t>(b)] + ap_a * dX_a[static_cast<size_t>(b)])
                     .cwiseProduct(Y[static_cast<size_t>(b)] + ad_a * dY_a[static_cast<size_t>(b)]))
                    .sum();
    mu_aff /= ntot;
    double sigma = std::pow(std::max(mu_aff, 0.0) / std::max(mu, 1e-300), 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // Corrector; the second-order term is scaled by the achievable affine
    // steps so a distant iterate cannot be swamped by it.
    std::vector<MatrixXd> K(static_cast<size_t>(nblocks));
    for (int b = 0; b < nblocks; ++b)
      K[static_cast<size_t>(b)] =
          (ap_a * ad_a) * dX_a[static_cast<size_t>(b)] * dY_a[static_cast<size_t>(b)];
    VectorXd dx;
    std::vector<MatrixXd> dX, dY;
    direction(sigma * mu, &K, dx, dX, dY);

    double ap = 1.0, ad = 1.0;
    for (int b = 0; b < nblocks; ++b) {
      ap = std::min(ap, max_step(X[static_cast<size_t>(b)], dX[static_cast<size_t>(b)]));
      ad = std::min(ad, max_step(Y[static_cast<size_t>(b)], dY[static_cast<size_t>(b)]));
    }
    ap = std::min(1.0, settings.step_fraction * ap);
    ad = std::min(1.0, settings.step_fraction * ad);

    x += ap * dx;
    for (int b = 0; b < nblocks; ++b) {
      X[static_cast<size_t>(b)] += ap * dX[static_cast<size_t>(b)];
      Y[static_cast<size_t>(b)] += ad * dY[static_cast<size_t>(b)];
    }

    compute_residuals();
    double pobj, dobj, relgap;
    objectives(pobj, dobj, relgap);

    if (settings.iteration_log) {
      double mineig = std::numeric_limits<double>::infinity();
      for (int b = 0; b < nblocks; ++b) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(X[static_cast<size_t>(b)],
                                                   Eigen::EigenvaluesOnly);
        mineig = std::min(mineig, es.eigenvalues().minCoeff());
      }
      (*settings.iteration_log) << iter << " " << std::setprecision(12) << sense_sign * pobj
                                << " " << sense_sign * dobj << " " << relgap << " " << mineig
                                << "\n";
    }

    const double merit = std::max({relgap, feas_p, feas_d});
    if (merit < best.merit) {
      best.x = x;
      best.Y = Y;
      best.gap = relgap;
      best.merit = merit;
      best.iter = iter;
      stall = 0;
    } else if (++stall > 15 || (best.merit < 1e-6 && merit > 1e3 * best.merit)) {
      // no further progress possible at this precision
      return finish(SolveStatus::NumericalLimit, iter, true);
    }

    if (!have_snapshot && relgap <= kInteriorSnapshotGap && feas_d <= 1e3 * settings.tol_feas &&
        feas_p <= 1e3 * settings.tol_feas) {
      out.interior_dual.assign(Y.begin(), Y.begin() + static_cast<long>(model.blocks.size()));
      out.interior_eq_multipliers.clear();
      size_t eqb = model.blocks.size();
      for (size_t e = 0; e < model.equalities.size(); ++e, eqb += 2)
        out.interior_eq_multipliers.push_back(Y[eqb](0, 0) - Y[eqb + 1](0, 0));
      have_snapshot = true;
    }

    if (relgap <= settings.tol_gap && feas_p <= settings.tol_feas && feas_d <= settings.tol_feas)
      return finish(SolveStatus::Optimal, iter, false);

    if (dobj > 1e12 && feas_p > 100.0 * settings.tol_feas)
      return finish(SolveStatus::PrimalInfeasible, iter, false);
    if (pobj < -1e12) return finish(SolveStatus::DualUnbounded, iter, false);

    // Steps collapsed: the iterate cannot move any further.
    if (ap < 1e-10 && ad < 1e-10) return finish(SolveStatus::NumericalLimit, iter, true);
  }
  return finish(SolveStatus::NumericalLimit, settings.max_iter, true);
}

}  // namespace codebound
