#pragma once

#include <array>
#include <string>

#include "grcv/dataset.hpp"
#include "grcv/svc.hpp"
#include "grcv/types.hpp"

namespace grcv {

struct MpecDims {
  int T = 0;
  Index m1 = 0, m2 = 0, n = 0;

  Index qu() const { return T * m1; }           // total validation points
  Index ql() const { return T * m2; }           // total training points
  Index mbar() const { return 2 * (qu() + ql()); }
  Index nv() const { return mbar() + 1; }       // decision vector length
};

/// Decision vector v = [C, loss, loss_dual, alpha, slack] with named slices.
/// loss holds the per-validation-point 0-1 loss indicators, loss_dual the
/// multipliers of their upper bounds, alpha/slack the per-fold SVC variables.
struct MpecPoint {
  MpecDims dims;
  Vector v;

  MpecPoint() = default;
  explicit MpecPoint(const MpecDims& d) : dims(d), v(Vector::Zero(d.nv())) {}

  static MpecPoint from_parts(const MpecDims& d, double C, const Vector& loss,
                              const Vector& loss_dual, const Vector& alpha, const Vector& slack);
  // The conventional cold start [1, 0, ..., 0].
  static MpecPoint default_start(const MpecDims& d);

  double& hyper_c() { return v[0]; }
  double hyper_c() const { return v[0]; }
  auto loss() { return v.segment(1, dims.qu()); }
  auto loss() const { return v.segment(1, dims.qu()); }
  auto loss_dual() { return v.segment(1 + dims.qu(), dims.qu()); }
  auto loss_dual() const { return v.segment(1 + dims.qu(), dims.qu()); }
  auto alpha() { return v.segment(1 + 2 * dims.qu(), dims.ql()); }
  auto alpha() const { return v.segment(1 + 2 * dims.qu(), dims.ql()); }
  auto slack() { return v.segment(1 + 2 * dims.qu() + dims.ql(), dims.ql()); }
  auto slack() const { return v.segment(1 + 2 * dims.qu() + dims.ql(), dims.ql()); }

  auto fold_loss(int t) const { return v.segment(1 + t * dims.m1, dims.m1); }
  auto fold_alpha(int t) const { return v.segment(1 + 2 * dims.qu() + t * dims.m2, dims.m2); }
};

/// Compact complementarity program
///   min F(v) = M'v   s.t.   0 <= H(v) _|_ G(v) >= 0
/// with G(v) = Pv + a and H(v) = Qv. P is never materialized; all products
/// go through the per-fold Gram blocks A_t B_t' and B_t B_t'.
class MpecProblem {
 public:
  MpecProblem() = default;
  MpecProblem(MpecDims dims, std::vector<Matrix> gram_AB, std::vector<Matrix> gram_BB);

  const MpecDims& dims() const { return dims_; }
  const Matrix& gram_AB(int t) const { return gram_AB_[static_cast<std::size_t>(t)]; }
  const Matrix& gram_BB(int t) const { return gram_BB_[static_cast<std::size_t>(t)]; }

  // Constraint row offsets; parts 1..4 pair (loss, lp residual),
  // (loss_dual, upper bound), (alpha, margin surplus), (slack, dual headroom).
  Index part_offset(int part) const;  // part in {0,1,2,3}
  Index part_size(int part) const { return part < 2 ? dims_.m1 : dims_.m2; }  // per fold

  double eval_F(const Vector& v) const;
  const Vector& grad_F() const { return grad_f_; }
  Vector eval_G(const Vector& v) const;
  Vector eval_H(const Vector& v) const { return v.tail(dims_.mbar()); }

  // y := P x and y := P' x without forming P.
  Vector apply_P(const Vector& x) const;
  Vector apply_PT(const Vector& y) const;
  Vector p_row(Index constraint_row) const;  // dense gradient of G_row

  double vio(const Vector& v) const;
  // The two ingredients of vio reported separately: worst negative entry of
  // (G, H) and worst positive componentwise min (complementarity slack).
  std::pair<double, double> vio_components(const Vector& v) const;

 private:
  MpecDims dims_;
  std::vector<Matrix> gram_AB_;  // m1 x m2 per fold
  std::vector<Matrix> gram_BB_;  // m2 x m2 per fold
  Vector grad_f_;
};

MpecProblem assemble_mpec(const FoldMatrices& fm);

// 0-1 loss vector from validation margins r = -A w: 1 where r_i > 0, else 0.
// Solves min -u'r over 0 <= u <= 1, taking the tie r_i = 0 to 0 so that the
// sum counts misclassified points only.
Vector zero_one_loss_lp(const Eigen::Ref<const Vector>& r);

// Builds the feasible point determined by C and per-fold dual coefficients:
// the loss indicators follow the 0-1 rule, their duals and the slacks are
// the complementary residuals. Feasible up to the lower-level solve accuracy.
MpecPoint feasible_point_from_duals(const MpecProblem& p, double C,
                                    const std::vector<Vector>& fold_alpha);

/// Classes of validation points at a feasible point, by the sign pattern of
/// (loss_i, (A B' alpha + loss_dual)_i, loss_dual_i).
struct ValidationPartition {
  IndexList on_hyperplane_zero;  // loss 0, lp residual 0, dual 0
  IndexList on_hyperplane_frac;  // loss in (0,1), lp residual 0, dual 0
  IndexList correct;             // loss 0, lp residual > 0, dual 0
  IndexList misclassified;       // loss 1, lp residual 0, dual > 0
  IndexList ambiguous;
  double eps = 1e-6;

  IndexList on_hyperplane() const;  // zero + frac
};

ValidationPartition classify_validation_points(const MpecProblem& p, const MpecPoint& pt,
                                               double eps = 1e-6);

// Training-point classes over all folds, from the stacked MPEC slices.
TrainingPartition classify_training_points(const MpecProblem& p, const MpecPoint& pt,
                                           double eps = 1e-6);

/// Active-set partition of each complementarity part: rows where only H
/// vanishes, only G vanishes, or both (biactive).
struct ActiveSets {
  std::array<IndexList, 4> h_active;  // within-part indices
  std::array<IndexList, 4> g_active;
  std::array<IndexList, 4> biactive;
  IndexList unclassified;  // global rows with neither factor near zero
  std::vector<std::string> cross_check_failures;
  double eps = 1e-6;
};

// Classifies and cross-checks the twelve active-set identities against the
// validation/training partitions; any mismatch lands in
// cross_check_failures.
ActiveSets active_sets(const MpecProblem& p, const MpecPoint& pt, double eps = 1e-6);

struct MfcqResult {
  bool independent = false;
  Vector certificate;            // nonneg combination proving dependence
  std::vector<Index> rows;       // global constraint row per gradient
  std::vector<bool> is_h_side;   // gradient taken from H (else G)
};

// Tests positive-linear independence of the active constraint gradients by
// the feasibility LP: exists d >= 0, sum d = 1, Gamma' d = 0.
MfcqResult mfcq_diagnostic(const MpecProblem& p, const MpecPoint& pt, double eps = 1e-6);

struct CStationarity {
  double residual = 0.0;           // stationarity sup-norm + sign-pairing penalty
  double stationarity = 0.0;
  double pairing_violation = 0.0;  // sum of max(0, -gamma_i nu_i) over biactive rows
  Vector gamma;                    // m̄, zero outside I_G plus biactive
  Vector nu;                       // m̄, zero outside I_H plus biactive
};

// Least-squares multipliers for grad F = sum gamma_i grad G_i + nu_i grad H_i
// with the C-stationarity support conditions.
CStationarity c_stationarity_residual(const MpecProblem& p, const MpecPoint& pt,
                                      double eps = 1e-6);

// Active-set sizes, vio split, stationarity and MFCQ verdict as JSON.
std::string diagnostics_json(const MpecProblem& p, const MpecPoint& pt, double eps = 1e-6);

}  // namespace grcv
