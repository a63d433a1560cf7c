#include "grcv/grm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace grcv {

void GrmOptions::validate() const {
  if (t0 <= 0) throw std::invalid_argument("t0 must be positive");
  if (sigma <= 0 || sigma >= 1) throw std::invalid_argument("sigma must lie in (0,1)");
  if (t_min <= 0) throw std::invalid_argument("t_min must be positive");
}

GrmTrace run_grm(const MpecProblem& p, const GrmOptions& opts) {
  opts.validate();
  GrmTrace trace;
  MpecPoint current = opts.v0 ? *opts.v0 : MpecPoint::default_start(p.dims());
  if (current.v.size() != p.dims().nv())
    throw std::invalid_argument("starting point has wrong dimension");

  double t = opts.t0;
  SolverOptions stage_opts = opts.nlp;
  while (t > opts.t_min) {
    RelaxedProblem rp{&p, t};
    SolverResult res = solve_relaxed(rp, current, stage_opts);
    stage_opts.warm_multipliers = res.multipliers;

    GrmStage stage;
    stage.t = t;
    stage.status = res.status;
    stage.iterations = res.iterations;
    stage.objective = res.objective;
    stage.kkt_residual = res.kkt_residual;
    stage.vio = p.vio(res.point.v);
    stage.point = res.point;
    trace.stages.push_back(stage);

    trace.total_iterations += res.iterations;
    if (res.status == SolveStatus::numerical_failure) trace.any_failure = true;
    // Even a failed stage leaves its best iterate as the next warm start.
    current = res.point;
    t *= opts.sigma;
  }

  trace.k = static_cast<int>(trace.stages.size());
  trace.v_opt = current;
  trace.objective = p.eval_F(current.v);
  trace.vio = p.vio(current.v);
  return trace;
}

std::string trace_json(const GrmTrace& trace) {
  nlohmann::json j;
  j["k"] = trace.k;
  j["total_iterations"] = trace.total_iterations;
  j["objective"] = trace.objective;
  j["vio"] = trace.vio;
  j["any_failure"] = trace.any_failure;
  j["C_hat"] = trace.v_opt.v.size() > 0 ? trace.v_opt.v[0] : 0.0;
  for (const GrmStage& s : trace.stages) {
    j["stages"].push_back({{"t", s.t},
                           {"status", s.status == SolveStatus::converged        ? "converged"
                                      : s.status == SolveStatus::iteration_limit ? "iteration_limit"
                                                                                 : "numerical_failure"},
                           {"iterations", s.iterations},
                           {"objective", s.objective},
                           {"kkt_residual", s.kkt_residual},
                           {"vio", s.vio}});
  }
  return j.dump(2);
}

FinalFit fit_final_classifier(const Dataset& ds, const HoldoutSplit& split, double C) {
  FinalFit fit;
  fit.C_final = C;

  Matrix B(static_cast<Index>(split.cv.size()), ds.dim);
  for (std::size_t r = 0; r < split.cv.size(); ++r)
    B.row(static_cast<Index>(r)) = ds.labelled_row(split.cv[r]).transpose();

  fit.model = train_l1_svc(B, C);
  fit.w = fit.model.w;
  if (split.test.empty()) {
    fit.E_t = std::numeric_limits<double>::quiet_NaN();
  } else {
    fit.E_t = static_cast<double>(misclassification_count(fit.w, ds, split.test)) /
              static_cast<double>(split.test.size());
  }
  return fit;
}

GrCvResult gr_cv(const Dataset& ds, const SplitSpec& spec, const GrmOptions& opts, bool rescale) {
  HoldoutSplit split = split_holdout(ds, spec);
  FoldPartition fp = make_folds(split.cv, spec.T, spec.seed);
  FoldMatrices fm = build_fold_matrices(ds, fp);
  MpecProblem p = assemble_mpec(fm);

  GrCvResult out;
  out.trace = run_grm(p, opts);
  out.C_hat = out.trace.v_opt.v[0];
  out.E_C = out.trace.objective;
  out.vio = out.trace.vio;
  out.k = out.trace.k;
  out.it = out.trace.total_iterations;

  const double factor = rescale ? static_cast<double>(spec.T) / (spec.T - 1) : 1.0;
  FinalFit fit = fit_final_classifier(ds, split, out.C_hat * factor);
  out.C_final = fit.C_final;
  out.w_final = fit.w;
  out.E_t = fit.E_t;
  out.final_model = fit.model;
  return out;
}

}  // namespace grcv
