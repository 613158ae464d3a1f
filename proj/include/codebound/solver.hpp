#ifndef CODEBOUND_SOLVER_HPP
#define CODEBOUND_SOLVER_HPP

#include <iosfwd>

#include "codebound/sdpmodel.hpp"

namespace codebound {

struct SolverSettings {
  double tol_gap = 1e-9;    // relative duality-gap target
  double tol_feas = 1e-9;   // primal/dual feasibility tolerance
  int max_iter = 200;
  double step_fraction = 0.98;  // fraction-to-boundary
  double initial_scale = 10.0;  // X = Y = initial_scale * I, x = 0
  int max_total_dim = 200;      // guard: sum of block sizes the solver accepts
  std::ostream* iteration_log = nullptr;
};

/// Primal-dual path-following solve (HKM direction, Mehrotra
/// predictor-corrector, dense per-iteration Schur complement).
///
/// Solves min c'x s.t. constant_b + sum_i x_i terms_b[i] >= 0 per block, with
/// equalities lowered to inequality pairs relaxed by tol_feas/10. Max-sense
/// models are negated internally; reported objective is in the model's sense,
/// dual matrices correspond to the internal min form.
SolveResult solve(const SdpModel& model, const SolverSettings& settings = {});

}  // namespace codebound

#endif
