#include "grcv/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace grcv {

GridSpec GridSpec::standard() {
  GridSpec g;
  for (int e = -4; e <= 4; ++e) g.C_values.push_back(std::pow(10.0, e));
  return g;
}

void GridSpec::validate() const {
  if (C_values.empty()) throw std::invalid_argument("empty grid");
  for (std::size_t i = 0; i < C_values.size(); ++i) {
    if (C_values[i] < 0) throw std::invalid_argument("grid values must be nonnegative");
    if (i > 0 && C_values[i] <= C_values[i - 1])
      throw std::invalid_argument("grid values must be strictly increasing");
  }
}

GridSearchResult grid_search(const Dataset& ds, const SplitSpec& spec, const GridSpec& grid,
                             bool rescale) {
  grid.validate();
  HoldoutSplit split = split_holdout(ds, spec);
  FoldPartition fp = make_folds(split.cv, spec.T, spec.seed);
  FoldMatrices fm = build_fold_matrices(ds, fp);

  GridSearchResult out;
  out.cv_errors.reserve(grid.C_values.size());
  const double denom = static_cast<double>(spec.T) * static_cast<double>(fp.m1);

  double best_err = std::numeric_limits<double>::infinity();
  for (double C : grid.C_values) {
    double miscount = 0.0;
    for (int t = 0; t < spec.T; ++t) {
      SvcSolution sol = train_l1_svc(fm.B[t], C);
      out.it += sol.sweeps;
      ++out.k;
      // 0-1 loss of the validation fold; ties on the hyperplane count correct.
      Vector margins = -(fm.A[t] * sol.w);
      miscount += zero_one_loss_lp(margins).sum();
    }
    double err = miscount / denom;
    out.cv_errors.push_back(err);
    if (err < best_err) {  // strict: ties keep the smaller C
      best_err = err;
      out.C_best = C;
    }
  }
  out.E_C = best_err;

  const double factor = rescale ? static_cast<double>(spec.T) / (spec.T - 1) : 1.0;
  FinalFit fit = fit_final_classifier(ds, split, out.C_best * factor);
  out.w_final = fit.w;
  out.E_t = fit.E_t;
  return out;
}

InexactCvResult inexact_cv(const Dataset& ds, const SplitSpec& spec, double tol,
                           const SolverOptions& nlp, bool rescale) {
  if (tol <= 0) throw std::invalid_argument("tol must be positive");
  HoldoutSplit split = split_holdout(ds, spec);
  FoldPartition fp = make_folds(split.cv, spec.T, spec.seed);
  FoldMatrices fm = build_fold_matrices(ds, fp);
  MpecProblem p = assemble_mpec(fm);

  RelaxedProblem rp{&p, tol};
  SolverResult res = solve_relaxed(rp, MpecPoint::default_start(p.dims()), nlp);

  InexactCvResult out;
  out.status = res.status;
  out.C_hat = res.point.v[0];
  out.E_C = p.eval_F(res.point.v);
  out.vio = p.vio(res.point.v);
  out.k = 1;
  out.it = res.iterations;

  const double factor = rescale ? static_cast<double>(spec.T) / (spec.T - 1) : 1.0;
  FinalFit fit = fit_final_classifier(ds, split, out.C_hat * factor);
  out.C_final = fit.C_final;
  out.w_final = fit.w;
  out.E_t = fit.E_t;
  return out;
}

}  // namespace grcv
