#pragma once

#include <Eigen/Cholesky>

#include "grcv/mpec.hpp"
#include "grcv/types.hpp"

namespace grcv {

/// Constraint values of the relaxed subproblem at one point:
/// g stacks [G; H; t - G.*H].
struct ConstraintEval {
  Vector G, H;
  Vector g;
};

ConstraintEval eval_relaxed_constraints(const MpecProblem& p, double t, const Vector& v);

// Products with the stacked constraint Jacobian [P; Q; -(diag(H)P + diag(G)Q)].
Vector relaxed_jacobian_apply(const MpecProblem& p, const ConstraintEval& ce, const Vector& x);
Vector relaxed_jacobian_apply_T(const MpecProblem& p, const ConstraintEval& ce, const Vector& y);

/// The condensed Newton matrix K = W + J' diag(sigma) J of the barrier KKT
/// system, held and factored per fold with a Schur complement on the shared
/// C column. W is the multiplier-weighted Hessian of the bilinear caps.
class CondensedKkt {
 public:
  explicit CondensedKkt(const MpecProblem& p);

  // sigma = lambda ./ s per constraint row, cap_lambda the cap multipliers,
  // extra_diag an optional per-coordinate diagonal addition (barrier bound
  // weights); returns false when a fold block or the Schur scalar fails to
  // be SPD.
  bool factor(const ConstraintEval& ce, const Vector& sigma, const Vector& cap_lambda,
              double reg, const Vector& extra_diag = Vector());
  Vector solve(const Vector& rhs) const;

 private:
  struct FoldSystem {
    Matrix K;
    Vector c_col;
    Eigen::LLT<Matrix> llt;
  };

  Vector gather(const Vector& x, int t) const;
  void scatter(const Vector& f, int t, Vector& x) const;

  const MpecProblem& p_;
  std::vector<FoldSystem> folds_;
  double kcc_ = 0.0;
  double schur_ = 0.0;
};

}  // namespace grcv
