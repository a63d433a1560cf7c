#pragma once

#include "grcv/dataset.hpp"
#include "grcv/grm.hpp"
#include "grcv/types.hpp"

namespace grcv {

struct GridSpec {
  std::vector<double> C_values;

  // The usual nine log-spaced values 1e-4 .. 1e4.
  static GridSpec standard();
  void validate() const;
};

struct GridSearchResult {
  double C_best = 0.0;
  double E_t = 0.0;
  double E_C = 0.0;  // best mean CV error over the grid
  int k = 0;         // lower-level trainings
  Index it = 0;      // coordinate-descent sweeps summed over trainings
  Vector w_final;
  std::vector<double> cv_errors;  // per grid value, same order as C_values
};

// Classic grid search: trains each fold at each C, scores validation folds
// with the 0-1 loss rule, picks the smallest C among ties.
GridSearchResult grid_search(const Dataset& ds, const SplitSpec& spec, const GridSpec& grid,
                             bool rescale = false);

struct InexactCvResult {
  double C_hat = 0.0;
  double C_final = 0.0;
  double E_t = 0.0;
  double E_C = 0.0;
  double vio = 0.0;
  int k = 1;
  Index it = 0;
  Vector w_final;
  SolveStatus status = SolveStatus::converged;
};

// One relaxed solve at fixed t = tol from the cold start, then the same
// post-processing as the full pipeline.
InexactCvResult inexact_cv(const Dataset& ds, const SplitSpec& spec, double tol = 1e-4,
                           const SolverOptions& nlp = {}, bool rescale = true);

}  // namespace grcv
