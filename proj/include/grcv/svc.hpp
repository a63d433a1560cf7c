#pragma once

#include <string>

#include "grcv/dataset.hpp"
#include "grcv/types.hpp"

namespace grcv {

struct SvcTrainOptions {
  double tol = 1e-10;       // sup-norm of the projected dual gradient
  Index max_sweeps = 50000;
  unsigned shuffle_seed = 1;
};

enum class TrainStatus { converged, iteration_limit };

/// Primal/dual solution of the hinge-loss SVC without bias term:
///   min 0.5*|w|^2 + C * sum_i max(0, 1 - (Bw)_i).
/// Stored with w = B^T alpha and mu = C*1 - alpha exactly.
struct SvcSolution {
  Vector w;      // n
  Vector xi;     // m2, slacks
  Vector alpha;  // m2, duals of Bw >= 1 - xi
  Vector mu;     // m2, duals of xi >= 0
  double C = 0;
  TrainStatus status = TrainStatus::converged;
  Index sweeps = 0;
};

// Random-permutation dual coordinate ascent on the box-constrained dual
//   min 0.5*a'BB'a - 1'a  s.t.  0 <= a <= C.
SvcSolution train_l1_svc(const Eigen::Ref<const Matrix>& B, double C,
                         const SvcTrainOptions& opts = {});

// Same ascent expressed on a precomputed Gram matrix; returns the duals.
Vector solve_box_qp_dual(const Eigen::Ref<const Matrix>& gram, double C,
                         const SvcTrainOptions& opts = {});

// Sup-norm residual of the reduced KKT system:
//   0 <= alpha  _|_  BB'alpha - 1 + xi >= 0,   0 <= xi  _|_  C1 - alpha >= 0.
double lower_kkt_residual(const SvcSolution& sol, const Eigen::Ref<const Matrix>& B);

double svc_primal_objective(const Eigen::Ref<const Matrix>& B, const Eigen::Ref<const Vector>& w,
                            double C);
double svc_dual_objective(const Eigen::Ref<const Matrix>& B, const Eigen::Ref<const Vector>& alpha);

/// Geometric classes of training points at a KKT point, by the sign pattern
/// of (alpha_i, (BB'alpha - 1 + xi)_i, xi_i). Disjoint; they cover all rows.
struct TrainingPartition {
  IndexList on_margin_free;        // alpha=0, margin residual 0, xi=0
  IndexList outside_margin;        // alpha=0, margin residual >0, xi=0
  IndexList on_margin_sv_interior; // 0<alpha<C, margin residual 0, xi=0
  IndexList on_margin_sv_bound;    // alpha=C, margin residual 0, xi=0
  IndexList inside_margin;         // alpha=C, 0<xi<1
  IndexList on_hyperplane;         // alpha=C, xi=1
  IndexList misclassified;         // alpha=C, xi>1
  IndexList ambiguous;             // fit no pattern at eps; assigned above by nearest
  double eps = 1e-6;

  IndexList on_margin_sv() const;  // interior + bound
  IndexList bound_sv() const;      // inside_margin + on_hyperplane + misclassified
};

// Core pattern classifier over (alpha, comp, xi) triples, where
// comp = BB'alpha - 1 + xi. Used both per fold and on stacked MPEC slices.
TrainingPartition classify_training_pattern(const Eigen::Ref<const Vector>& alpha,
                                            const Eigen::Ref<const Vector>& comp,
                                            const Eigen::Ref<const Vector>& xi, double C,
                                            double eps);

TrainingPartition classify_training_points(const SvcSolution& sol,
                                           const Eigen::Ref<const Matrix>& B, double eps = 1e-6);

// sign(w'x) with sign(0) = +1.
int predict(const Eigen::Ref<const Vector>& w, const Sample& x);
Index misclassification_count(const Eigen::Ref<const Vector>& w, const Dataset& ds,
                              const IndexList& idx);

std::string solution_json(const SvcSolution& sol);

}  // namespace grcv
