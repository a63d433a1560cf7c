#pragma once

#include <string>

#include "grcv/mpec.hpp"
#include "grcv/types.hpp"

namespace grcv {

/// The Scholtes-relaxed subproblem: min F(v) over G(v) >= 0, H(v) >= 0 and
/// the bilinear caps G_i(v) H_i(v) <= t.
struct RelaxedProblem {
  const MpecProblem* mpec = nullptr;
  double t = 1.0;
};

struct SolverOptions {
  double stat_tol = 1e-6;
  double feas_tol = 1e-8;
  Index max_iters = 500;
  // Barrier schedule and step-control parameters.
  double mu0 = 1e-1;          // initial complementarity target
  double mu_shrink = 0.1;     // centrality fraction per iteration
  double mu_min = 1e-13;
  double tau = 0.995;         // fraction-to-boundary
  double interior_margin = 1e-12;  // boundary lift floor (max'd with feas_tol)
  double slack_floor = 1e-2;      // initial slack level on a cold start
  double safeguard_bound = 1e4;   // solver box on C, loss duals and slacks
  double c_lower = 1e-4;          // lower box on C (the usual grid bottom);
                                  // the relaxation admits a trivial global
                                  // minimizer with C <= t that this excludes
  Vector warm_multipliers;        // reuse duals from a previous solve
  double dual_ceiling = 1e5;      // hard bound on multiplier estimates; the
                                  // constraint qualification keeps true
                                  // subproblem multipliers bounded
  double reg_min = 1e-10;
  double reg_max = 1e8;
  std::string trace_path;     // per-iteration JSON lines when nonempty
};

enum class SolveStatus { converged, iteration_limit, numerical_failure };

struct SolverResult {
  MpecPoint point;
  SolveStatus status = SolveStatus::numerical_failure;
  double kkt_residual = 0.0;
  Index iterations = 0;
  double objective = 0.0;
  Vector multipliers;  // 3*mbar, ordered [G rows, H rows, cap rows]
  Vector slacks;       // 3*mbar
};

// Pushes a point strictly inside G >= 0, H >= 0 (the standard cold start
// [1, 0...] sits on the boundary and needs this).
MpecPoint interior_lift(const MpecProblem& p, const MpecPoint& pt, double margin);

// Damped-Newton interior-point solve of the relaxed subproblem from the
// given start; slack variables make infeasible warm starts acceptable.
SolverResult solve_relaxed(const RelaxedProblem& rp, const MpecPoint& warm_start,
                           const SolverOptions& opts = {});

// Sup-norm KKT residual of the smooth NLP at (point, multipliers):
// Lagrangian gradient, feasibility and complementarity violations.
double kkt_residual_nlp(const RelaxedProblem& rp, const MpecPoint& point,
                        const Vector& multipliers);

}  // namespace grcv
