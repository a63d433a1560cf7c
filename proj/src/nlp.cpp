#include "grcv/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include "grcv/condensed.hpp"

namespace grcv {

namespace {

ConstraintEval eval_constraints(const RelaxedProblem& rp, const Vector& v) {
  return eval_relaxed_constraints(*rp.mpec, rp.t, v);
}

Vector jac_apply(const MpecProblem& p, const ConstraintEval& ce, const Vector& x) {
  return relaxed_jacobian_apply(p, ce, x);
}

Vector jac_apply_T(const MpecProblem& p, const ConstraintEval& ce, const Vector& y) {
  return relaxed_jacobian_apply_T(p, ce, y);
}

struct TraceWriter {
  std::ofstream out;
  explicit TraceWriter(const std::string& path) {
    if (!path.empty()) out.open(path, std::ios::app);
  }
  void line(Index iter, double mu, double theta, double stat, double feas, double comp,
            double step, double reg) {
    if (!out.is_open()) return;
    nlohmann::json j{{"iter", iter}, {"mu", mu},   {"theta", theta}, {"stat", stat},
                     {"feas", feas}, {"comp", comp}, {"step", step},  {"reg", reg}};
    out << j.dump() << '\n';
  }
};

// The hyperparameter, the loss duals and the slacks have no upper bound in
// the problem itself; the solver boxes them below `bound` so every barrier
// subproblem has a minimizer (the feasible set otherwise contains unbounded
// faces along which the barrier has no stationary point). Everything else is
// already compact: the loss lies in [0,1] and alpha below C.
struct BoxedCoords {
  const MpecDims* dims;
  double bound;
  double c_lower;  // keeps the hyperparameter out of the trivial basin C <= t

  template <typename F>
  void for_each(F&& f) const {
    f(Index{0});
    for (Index i = 0; i < dims->qu(); ++i) f(1 + dims->qu() + i);
    for (Index i = 0; i < dims->ql(); ++i) f(1 + 2 * dims->qu() + dims->ql() + i);
  }

  double log_sum(const Vector& v) const {
    double acc = std::log(v[0] - c_lower);
    for_each([&](Index j) { acc += std::log(bound - v[j]); });
    return acc;
  }
  // gradient of -mu [log(v_0 - c_lower) + sum log(bound - v_j)]
  void add_gradient(const Vector& v, double mu, Vector& out) const {
    out[0] -= mu / (v[0] - c_lower);
    for_each([&](Index j) { out[j] += mu / (bound - v[j]); });
  }
  void add_weights(const Vector& v, double mu, Vector& diag) const {
    diag[0] += mu / ((v[0] - c_lower) * (v[0] - c_lower));
    for_each([&](Index j) { diag[j] += mu / ((bound - v[j]) * (bound - v[j])); });
  }
  double max_step(const Vector& v, const Vector& dv, double tau) const {
    double a = 1.0;
    if (dv[0] < 0) a = std::min(a, -tau * (v[0] - c_lower) / dv[0]);
    for_each([&](Index j) {
      if (dv[j] > 0) a = std::min(a, tau * (bound - v[j]) / dv[j]);
    });
    return a;
  }
};

double kkt_components(const RelaxedProblem& rp, const Vector& v, const Vector& lambda,
                      const BoxedCoords& box, double mu, double* stat, double* feas,
                      double* comp) {
  ConstraintEval ce = eval_constraints(rp, v);
  Vector rd = rp.mpec->grad_F() - jac_apply_T(*rp.mpec, ce, lambda);
  box.add_gradient(v, mu, rd);  // safeguard-bound multiplier estimates
  *stat = rd.cwiseAbs().maxCoeff();
  *feas = std::max(0.0, -ce.g.minCoeff());
  *comp = lambda.cwiseProduct(ce.g).cwiseAbs().maxCoeff();
  double neg = std::max(0.0, -lambda.minCoeff());
  return std::max({*stat, *feas, *comp, neg});
}

}  // namespace

MpecPoint interior_lift(const MpecProblem& p, const MpecPoint& pt, double margin) {
  const MpecDims& d = p.dims();
  MpecPoint out = pt;

  // The standard cold start [C, 0, ..., 0] carries no primal structure; its
  // operative content is the hyperparameter. Complete it by solving the
  // lower-level duals at that C (the Gram blocks suffice) so the relaxation
  // path opens on the branch with genuine classifier structure.
  if (pt.v.tail(d.mbar()).cwiseAbs().maxCoeff() == 0.0 && pt.hyper_c() > 0.0) {
    SvcTrainOptions qp;
    qp.tol = 1e-10;
    std::vector<Vector> alphas;
    for (int t = 0; t < d.T; ++t)
      alphas.push_back(solve_box_qp_dual(p.gram_BB(t), pt.hyper_c(), qp));
    out = feasible_point_from_duals(p, pt.hyper_c(), alphas);
  }

  out.hyper_c() = std::max(out.hyper_c(), 4 * margin);
  const double C = out.hyper_c();
  for (Index i = 0; i < d.qu(); ++i) {
    out.loss()[i] = std::clamp(out.loss()[i], margin, 1.0 - margin);
    out.loss_dual()[i] = std::max(out.loss_dual()[i], margin);
  }
  for (Index i = 0; i < d.ql(); ++i)
    out.alpha()[i] = std::clamp(out.alpha()[i], margin, C - margin);

  for (int t = 0; t < d.T; ++t) {
    Vector ab = p.gram_AB(t) * out.fold_alpha(t);
    Vector bb = p.gram_BB(t) * out.fold_alpha(t);
    for (Index i = 0; i < d.m1; ++i) {
      Index gi = 1 + d.qu() + t * d.m1 + i;
      out.v[gi] = std::max(out.v[gi], margin - ab[i]);  // keeps lp residual positive
    }
    for (Index i = 0; i < d.m2; ++i) {
      Index xi = 1 + 2 * d.qu() + d.ql() + t * d.m2 + i;
      out.v[xi] = std::max(out.v[xi], 1.0 + margin - bb[i]);  // margin surplus positive
    }
  }
  return out;
}

namespace {

SolverResult& finish(SolverResult& res, const MpecProblem& p) {
  res.objective = p.eval_F(res.point.v);
  return res;
}

}  // namespace

SolverResult solve_relaxed(const RelaxedProblem& rp, const MpecPoint& warm_start,
                           const SolverOptions& opts) {
  const MpecProblem& p = *rp.mpec;
  const Index mbar = p.dims().mbar();
  const Index nc = 3 * mbar;
  TraceWriter trace(opts.trace_path);
  BoxedCoords box{&p.dims(), opts.safeguard_bound, opts.c_lower};

  // A cold default start gets completed on the complementarity boundary by
  // the lift; give the barrier room there. Warm iterates stay where they are.
  double lift_margin = std::max(opts.feas_tol, opts.interior_margin);
  const bool cold = warm_start.v.tail(mbar).cwiseAbs().maxCoeff() == 0.0;
  if (cold) lift_margin = std::max(lift_margin, 1e-2 * std::min(1.0, std::sqrt(rp.t)));
  MpecPoint pt = interior_lift(p, warm_start, lift_margin);
  // Pull safeguarded coordinates strictly inside their box.
  box.for_each([&](Index j) { pt.v[j] = std::min(pt.v[j], 0.9 * box.bound); });
  pt.v[0] = std::max(pt.v[0], 2.0 * box.c_lower);

  const bool warm_duals = opts.warm_multipliers.size() == nc;

  // Internal continuation: when the start violates the caps by more than an
  // order of magnitude (the usual situation after the outer method shrinks
  // t), walk t down in digestible hops instead of asking one barrier solve
  // to traverse the whole complementarity squeeze.
  std::vector<double> t_path;
  {
    Vector products = p.eval_G(pt.v).cwiseProduct(p.eval_H(pt.v));
    const double max_gh = products.size() > 0 ? products.maxCoeff() : 0.0;
    if (max_gh > 10.0 * rp.t) {
      std::vector<double> hops;
      for (double th = 0.5 * max_gh; th > rp.t; th *= 0.05) hops.push_back(th);
      t_path = hops;
    }
    t_path.push_back(rp.t);
  }

  RelaxedProblem rp_eff{rp.mpec, t_path.front()};
  ConstraintEval ce = eval_constraints(rp_eff, pt.v);

  // Rows violated at the start get slacks proportional to their violation so
  // their barrier weights stay sane.
  Vector s = warm_duals || t_path.size() > 1
                 ? ce.g.cwiseMax((1e-2 * ce.g.cwiseAbs()).cwiseMax(1e-8)).eval()
                 : ce.g.cwiseMax(opts.slack_floor).eval();
  const double mu_open = std::clamp(0.1 * rp_eff.t, opts.mu_min, opts.mu0);
  Vector lambda =
      warm_duals
          ? opts.warm_multipliers.cwiseMax(1e-12).cwiseMin(opts.dual_ceiling).eval()
          : (mu_open / s.array()).cwiseMax(1e-10).cwiseMin(1e3).matrix().eval();

  SolverResult res;
  res.point = pt;
  res.multipliers = lambda;
  res.slacks = s;
  res.status = SolveStatus::iteration_limit;

  CondensedKkt kkt(p);
  double best_kkt = std::numeric_limits<double>::infinity();
  double reg_carry = 0.0;
  double rho = 1.0;
  Index iter = 0;

  // Monotone barrier loop over mu with damped Newton inside each stage.
  // Globalization is an Armijo line search on the exact-penalty barrier merit
  //   M(v, s) = c'v - mu [sum log s + sum log(B - v_boxed)] + rho |g(v) - s|_1;
  // inertia-corrected directions are descent directions for M, whereas a raw
  // residual-norm search can wedge in nonroot local minima of the residual.
  for (std::size_t hop = 0; hop < t_path.size() && iter < opts.max_iters; ++hop) {
    rp_eff.t = t_path[hop];
    const bool final_hop = hop + 1 == t_path.size();
    ce = eval_constraints(rp_eff, pt.v);
    // Freshly tightened caps may be violated; re-floor their slacks.
    s = s.cwiseMin(ce.g.cwiseAbs().cwiseMax(1e-8) * 2.0)
            .cwiseMax((1e-2 * ce.g.cwiseAbs()).cwiseMax(1e-10));

    double mu;
    {
      const double avg0 = s.dot(lambda) / nc;
      const double rp0 = (ce.g - s).cwiseAbs().maxCoeff();
      mu = std::clamp(std::max(avg0, std::min(0.1 * rp_eff.t, 10.0 * rp0)), opts.mu_min,
                      opts.mu0);
      // Keep every product inside the usual band so no stale dual dominates.
      const double kappa = 1e10;
      for (Index i = 0; i < nc; ++i)
        lambda[i] = std::clamp(lambda[i], mu / (kappa * s[i]),
                               std::min(kappa * mu / s[i], opts.dual_ceiling));
    }
    // Intermediate hops only need a mildly centered point near their t.
    const double mu_floor = final_hop ? opts.mu_min : std::max(opts.mu_min, 1e-2 * rp_eff.t);
    const Index budget = final_hop ? opts.max_iters : std::min<Index>(opts.max_iters, 150);

    Index stage_iters = 0, hop_iters = 0;
    int stalled = 0;
    int floored_exits = 0;
    double stage_best_stat = std::numeric_limits<double>::infinity();
    double stat_at_last_exit = std::numeric_limits<double>::infinity();
    bool give_up = false;
    while (iter < opts.max_iters && hop_iters < budget && !give_up) {
      double stat, feas, comp;
      double kkt0 = kkt_components(rp_eff, pt.v, lambda, box, mu, &stat, &feas, &comp);
      if (final_hop) {
        if (kkt0 < best_kkt) {
          best_kkt = kkt0;
          res.point = pt;
          res.multipliers = lambda;
          res.slacks = s;
          res.kkt_residual = kkt0;
        }
        if (stat <= opts.stat_tol && feas <= opts.feas_tol && comp <= opts.stat_tol) {
          res.status = SolveStatus::converged;
          res.point = pt;
          res.multipliers = lambda;
          res.slacks = s;
          res.kkt_residual = kkt0;
          return finish(res, p);
        }
      }

      // Stage test on the barrier-natural duals mu/s, whose centering
      // residual vanishes identically: the stage ends when the primal
      // equality and the dual residual at mu/s are both O(mu). Re-syncing
      // lambda there keeps dual wobble from accumulating across stages.
      Vector lambda_hat = Vector::Constant(nc, mu).cwiseQuotient(s);
      Vector rd_hat = p.grad_F() - jac_apply_T(p, ce, lambda_hat);
      box.add_gradient(pt.v, mu, rd_hat);
      const double theta_hat =
          std::max(rd_hat.cwiseAbs().maxCoeff(), (ce.g - s).cwiseAbs().maxCoeff());

      // Stationarity along the central path decays only like sqrt(mu) when
      // the limit is degenerate (biactive complementarity rows), so a stage
      // also ends once it is centered but stationarity stops improving.
      stalled = stat > 0.97 * stage_best_stat ? stalled + 1 : 0;
      stage_best_stat = std::min(stage_best_stat, stat);
      const bool centered = comp <= 10.0 * mu + 1e-12 && feas <= opts.feas_tol;
      const bool degenerate_floor = centered && (stalled >= 25 || stage_iters >= 120);
      if (theta_hat <= 50.0 * mu || degenerate_floor) {
        if (theta_hat <= 50.0 * mu) lambda = lambda_hat.cwiseMin(opts.dual_ceiling);
        if (mu <= mu_floor) break;  // this hop is as centered as needed
        // Successive floored exits with frozen stationarity, at a mu already
        // orders below that floor, mean smaller mu cannot help any more;
        // stop burning iterations on this hop.
        if (degenerate_floor && mu <= 1e-3 * stat) {
          floored_exits = stat > 0.9 * stat_at_last_exit ? floored_exits + 1 : 0;
          stat_at_last_exit = stat;
          if (floored_exits >= 2) break;
        }
        mu = std::max(mu_floor, opts.mu_shrink * mu);
        stage_iters = 0;
        stalled = 0;
        stage_best_stat = std::numeric_limits<double>::infinity();
        continue;
      }

      Vector sigma = lambda.cwiseQuotient(s);
      // y_i = (lambda_i g_i - mu)/s_i collapses the slack and dual rows; the
      // box terms enter the reduced gradient and the diagonal weights.
      Vector y = (lambda.cwiseProduct(ce.g) - Vector::Constant(nc, mu)).cwiseQuotient(s);
      Vector rhs = jac_apply_T(p, ce, lambda - y) - p.grad_F();
      box.add_gradient(pt.v, -mu, rhs);  // minus the bound gradient

      const double tau = std::max(opts.tau, 1.0 - 10.0 * mu);
      bool accepted = false;
      double step_taken = 0.0;
      double reg = std::max({opts.reg_min, 1e-2 * mu, reg_carry});
      for (int attempt = 0; attempt < 8 && !accepted; ++attempt, reg *= 100.0) {
        if (reg > opts.reg_max) break;
        Vector box_diag = Vector::Zero(p.dims().nv());
        box.add_weights(pt.v, mu, box_diag);
        if (!kkt.factor(ce, sigma, lambda.tail(mbar), reg, box_diag)) continue;
        Vector dv = kkt.solve(rhs);
        Vector ds = jac_apply(p, ce, dv) + (ce.g - s);
        Vector dl =
            -(lambda - Vector::Constant(nc, mu).cwiseQuotient(s)) - sigma.cwiseProduct(ds);

        // Penalty weight dominating the dual estimates keeps M exact.
        const double lam_scale = std::max((lambda + dl).cwiseAbs().maxCoeff(),
                                          lambda.cwiseAbs().maxCoeff());
        rho = std::max(rho, 2.0 * lam_scale + 1.0);

        // Directional derivative of M; require genuine descent, else damp.
        const double rp1 = (ce.g - s).lpNorm<1>();
        Vector phi_grad = p.grad_F();
        box.add_gradient(pt.v, mu, phi_grad);
        const double dphi = phi_grad.dot(dv) - mu * ds.cwiseQuotient(s).sum();
        const double dmerit = dphi - rho * rp1;
        if (dmerit > -1e-14 && attempt < 7) continue;

        double ap = box.max_step(pt.v, dv, tau);
        double ad = 1.0;
        for (Index i = 0; i < nc; ++i) {
          if (ds[i] < 0) ap = std::min(ap, -tau * s[i] / ds[i]);
          if (dl[i] < 0) ad = std::min(ad, -tau * lambda[i] / dl[i]);
        }

        const double m0 = p.grad_F().dot(pt.v) -
                          mu * (s.array().log().sum() + box.log_sum(pt.v)) + rho * rp1;
        double back = 1.0;
        MpecPoint trial = pt;
        ConstraintEval ce_trial;
        for (int bt = 0; bt < 25; ++bt) {
          const double a = ap * back;
          trial.v = pt.v + a * dv;
          Vector s_trial = s + a * ds;
          ce_trial = eval_constraints(rp_eff, trial.v);
          const double m_trial =
              p.grad_F().dot(trial.v) -
              mu * (s_trial.array().log().sum() + box.log_sum(trial.v)) +
              rho * (ce_trial.g - s_trial).lpNorm<1>();
          if (m_trial <= m0 + 1e-4 * a * dmerit) {
            pt = trial;
            s = s_trial;
            // Dual step consistent with the primal fraction, with a growth
            // guard: heavily infeasible stretches otherwise ratchet the
            // multipliers while the merit looks only at v and s.
            Vector l_trial = lambda + (ad * back) * dl;
            const double before = s.cwiseProduct(lambda).maxCoeff();
            const double after = s_trial.cwiseProduct(l_trial).maxCoeff();
            // Growth budget proportional to the primal progress actually
            // made: crawling steps may not pump the multipliers.
            const double allowed = std::max(100.0 * mu, before * (1.0 + a));
            const double shrink_dual = after > allowed ? allowed / after : 1.0;
            lambda += (shrink_dual * ad * back) * dl;
            ce = ce_trial;
            accepted = true;
            step_taken = a;
            break;
          }
          back *= 0.5;
        }
        if (accepted) {
          // Dual safeguard keeps every product within a wide band of mu and
          // every multiplier below the ceiling.
          const double kappa = 1e10;
          for (Index i = 0; i < nc; ++i)
            lambda[i] = std::clamp(
                lambda[i], mu / (kappa * s[i]),
                std::min(kappa * mu / s[i], opts.dual_ceiling));
          // Marquardt-style damping update: long steps relax it, deep
          // backtracks raise it in proportion, killing the reg sawtooth.
          reg_carry = back >= 0.5 ? reg * std::pow(back, 1.5) / 3.0
                                  : std::min(reg * 0.5 / back, opts.reg_max);
          if (reg_carry <= std::max(opts.reg_min, 1e-2 * mu)) reg_carry = 0.0;
        }
      }
      trace.line(iter, mu, theta_hat, stat, feas, comp, step_taken, reg_carry);
      ++iter;
      ++stage_iters;
      ++hop_iters;
      res.iterations = iter;
      if (!accepted) {
        if (mu > mu_floor) {
          // No digestible step at this mu: the stage is as solved as the
          // geometry allows; shrink and retry from the same point.
          mu = std::max(mu_floor, opts.mu_shrink * mu);
          stage_iters = 0;
          stalled = 0;
          stage_best_stat = std::numeric_limits<double>::infinity();
          reg_carry = 0.0;
        } else if (!final_hop) {
          break;  // move to the next hop with what we have
        } else {
          give_up = true;
          res.status = SolveStatus::numerical_failure;
        }
      }
    }
    if (res.status == SolveStatus::numerical_failure) break;
  }

  // Keep the best final-target iterate seen, falling back to the last one.
  {
    double stat, feas, comp;
    RelaxedProblem rp_final{rp.mpec, rp.t};
    double kkt0 = kkt_components(rp_final, pt.v, lambda, box, opts.mu_min, &stat, &feas, &comp);
    if (kkt0 < best_kkt) {
      res.point = pt;
      res.multipliers = lambda;
      res.slacks = s;
      res.kkt_residual = kkt0;
    }
  }
  return finish(res, p);
}

double kkt_residual_nlp(const RelaxedProblem& rp, const MpecPoint& point,
                        const Vector& multipliers) {
  ConstraintEval ce = eval_constraints(rp, point.v);
  Vector rd = rp.mpec->grad_F() - jac_apply_T(*rp.mpec, ce, multipliers);
  double stat = rd.cwiseAbs().maxCoeff();
  double feas = std::max(0.0, -ce.g.minCoeff());
  double comp = multipliers.cwiseProduct(ce.g).cwiseAbs().maxCoeff();
  double neg = std::max(0.0, -multipliers.minCoeff());
  return std::max({stat, feas, comp, neg});
}

}  // namespace grcv
