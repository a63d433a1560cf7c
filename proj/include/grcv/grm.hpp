#pragma once

#include <optional>
#include <string>

#include "grcv/dataset.hpp"
#include "grcv/mpec.hpp"
#include "grcv/nlp.hpp"
#include "grcv/svc.hpp"
#include "grcv/types.hpp"

namespace grcv {

struct GrmOptions {
  std::optional<MpecPoint> v0;  // defaults to [1, 0, ..., 0]
  double t0 = 1.0;
  double sigma = 0.01;   // relaxation shrink factor, in (0,1)
  double t_min = 1e-8;
  SolverOptions nlp;

  void validate() const;
};

struct GrmStage {
  double t = 0.0;
  SolveStatus status = SolveStatus::converged;
  Index iterations = 0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  double vio = 0.0;
  MpecPoint point;  // iterate returned by this stage
};

struct GrmTrace {
  std::vector<GrmStage> stages;
  MpecPoint v_opt;
  double objective = 0.0;
  double vio = 0.0;
  int k = 0;                  // number of subproblem solves
  Index total_iterations = 0; // Newton iterations summed over stages
  bool any_failure = false;
};

// Outer relaxation loop: solve the subproblem at t, shrink t by sigma,
// warm-starting each stage at the previous iterate, while t > t_min.
GrmTrace run_grm(const MpecProblem& p, const GrmOptions& opts = {});

std::string trace_json(const GrmTrace& trace);

struct GrCvResult {
  double C_hat = 0.0;        // from the MPEC iterate
  double C_final = 0.0;      // after the T/(T-1) rescale (if enabled)
  Vector w_final;
  double E_t = 0.0;          // test error on the hold-out set, NaN when l2 = 0
  double E_C = 0.0;          // cross-validation error F(v_opt)
  double vio = 0.0;
  int k = 0;
  Index it = 0;
  GrmTrace trace;
  SvcSolution final_model;
};

// Full pipeline: split, fold, assemble, relax, then rescale C by T/(T-1)
// and train the final classifier on the whole CV subset.
GrCvResult gr_cv(const Dataset& ds, const SplitSpec& spec, const GrmOptions& opts = {},
                 bool rescale = true);

// Shared post-processing for any method that produces a hyperparameter:
// final training on the CV subset and test error on the hold-out set.
struct FinalFit {
  double C_final = 0.0;
  Vector w;
  double E_t = 0.0;
  SvcSolution model;
};
FinalFit fit_final_classifier(const Dataset& ds, const HoldoutSplit& split, double C);

}  // namespace grcv
