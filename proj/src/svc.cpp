#include "grcv/svc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "grcv/random.hpp"

namespace grcv {

SvcSolution train_l1_svc(const Eigen::Ref<const Matrix>& B, double C,
                         const SvcTrainOptions& opts) {
  const Index m = B.rows();
  const Index n = B.cols();
  if (m == 0) throw std::invalid_argument("empty training matrix");
  if (C < 0) throw std::invalid_argument("C must be nonnegative");

  SvcSolution sol;
  sol.C = C;
  sol.alpha = Vector::Zero(m);
  sol.w = Vector::Zero(n);
  sol.status = TrainStatus::iteration_limit;

  Vector qdiag(m);
  for (Index i = 0; i < m; ++i) qdiag[i] = B.row(i).squaredNorm();

  IndexList order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937 rng(opts.shuffle_seed);

  if (C == 0.0) {
    sol.status = TrainStatus::converged;
  } else {
    for (Index sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      deterministic_shuffle(order, rng);
      double worst = 0.0;
      for (Index i : order) {
        const double grad = B.row(i).dot(sol.w) - 1.0;
        double pg = grad;
        if (sol.alpha[i] <= 0.0)
          pg = std::min(grad, 0.0);
        else if (sol.alpha[i] >= C)
          pg = std::max(grad, 0.0);
        worst = std::max(worst, std::abs(pg));
        if (pg == 0.0) continue;
        double next;
        if (qdiag[i] > 0.0)
          next = std::clamp(sol.alpha[i] - grad / qdiag[i], 0.0, C);
        else
          next = grad < 0.0 ? C : 0.0;  // zero row: hinge never affected by w
        const double delta = next - sol.alpha[i];
        if (delta != 0.0) {
          sol.alpha[i] = next;
          sol.w.noalias() += delta * B.row(i).transpose();
        }
      }
      sol.sweeps = sweep + 1;
      if (worst <= opts.tol) {
        sol.status = TrainStatus::converged;
        break;
      }
    }
  }

  sol.w.noalias() = B.transpose() * sol.alpha;  // kill incremental drift
  sol.xi = (Vector::Ones(m) - B * sol.w).cwiseMax(0.0);
  sol.mu = Vector::Constant(m, C) - sol.alpha;
  return sol;
}

Vector solve_box_qp_dual(const Eigen::Ref<const Matrix>& gram, double C,
                         const SvcTrainOptions& opts) {
  const Index m = gram.rows();
  Vector alpha = Vector::Zero(m);
  if (C <= 0.0) return alpha;
  Vector q_alpha = Vector::Zero(m);  // gram * alpha, kept incrementally

  IndexList order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937 rng(opts.shuffle_seed);
  for (Index sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    deterministic_shuffle(order, rng);
    double worst = 0.0;
    for (Index i : order) {
      const double grad = q_alpha[i] - 1.0;
      double pg = grad;
      if (alpha[i] <= 0.0)
        pg = std::min(grad, 0.0);
      else if (alpha[i] >= C)
        pg = std::max(grad, 0.0);
      worst = std::max(worst, std::abs(pg));
      if (pg == 0.0) continue;
      double next;
      if (gram(i, i) > 0.0)
        next = std::clamp(alpha[i] - grad / gram(i, i), 0.0, C);
      else
        next = grad < 0.0 ? C : 0.0;
      const double delta = next - alpha[i];
      if (delta != 0.0) {
        alpha[i] = next;
        q_alpha.noalias() += delta * gram.col(i);
      }
    }
    if (worst <= opts.tol) break;
  }
  return alpha;
}

double lower_kkt_residual(const SvcSolution& sol, const Eigen::Ref<const Matrix>& B) {
  Vector comp = B * (B.transpose() * sol.alpha) - Vector::Ones(B.rows()) + sol.xi;
  Vector bound = Vector::Constant(B.rows(), sol.C) - sol.alpha;
  double r = sol.alpha.cwiseMin(comp).cwiseAbs().maxCoeff();
  r = std::max(r, sol.xi.cwiseMin(bound).cwiseAbs().maxCoeff());
  return r;
}

double svc_primal_objective(const Eigen::Ref<const Matrix>& B, const Eigen::Ref<const Vector>& w,
                            double C) {
  Vector hinge = (Vector::Ones(B.rows()) - B * w).cwiseMax(0.0);
  return 0.5 * w.squaredNorm() + C * hinge.sum();
}

double svc_dual_objective(const Eigen::Ref<const Matrix>& B,
                          const Eigen::Ref<const Vector>& alpha) {
  Vector w = B.transpose() * alpha;
  return alpha.sum() - 0.5 * w.squaredNorm();
}

namespace {

// Distance of one (alpha, comp, xi) triple to each sign pattern; smaller is
// a better fit, 0 means on the pattern's closure.
double pattern_distance(int pattern, double a, double s, double x, double C) {
  auto zero = [](double u) { return std::abs(u); };
  auto pos = [](double u) { return std::max(0.0, -u); };
  switch (pattern) {
    case 0: return std::max({zero(a), zero(s), zero(x)});                   // on_margin_free
    case 1: return std::max({zero(a), pos(s), zero(x)});                    // outside_margin
    case 2: return std::max({pos(a), pos(C - a), zero(s), zero(x)});        // on-margin sv, interior
    case 3: return std::max({zero(C - a), pos(a), zero(s), zero(x)});       // on-margin sv, at bound
    case 4: return std::max({zero(C - a), zero(s), pos(x), pos(1.0 - x)});  // inside_margin
    case 5: return std::max({zero(C - a), zero(s), zero(x - 1.0)});         // on_hyperplane
    case 6: return std::max({zero(C - a), zero(s), pos(x - 1.0)});          // misclassified
    default: return std::numeric_limits<double>::infinity();
  }
}

// Exact pattern at tolerance eps, or -1. Bound patterns take precedence over
// strict-interior ones so that alpha within eps of C lands at the bound.
int exact_pattern(double a, double s, double x, double C, double eps) {
  auto z = [eps](double u) { return std::abs(u) <= eps; };
  auto p = [eps](double u) { return u > eps; };
  if (z(a) && z(s) && z(x)) return 0;
  if (z(a) && p(s) && z(x)) return 1;
  if (z(C - a) && p(a) && z(s) && z(x)) return 3;
  if (p(a) && a < C - eps && z(s) && z(x)) return 2;
  if (z(C - a) && z(s) && z(x - 1.0)) return 5;
  if (z(C - a) && z(s) && p(x) && x < 1.0 - eps) return 4;
  if (z(C - a) && z(s) && x > 1.0 + eps) return 6;
  return -1;
}

}  // namespace

TrainingPartition classify_training_pattern(const Eigen::Ref<const Vector>& alpha,
                                            const Eigen::Ref<const Vector>& comp,
                                            const Eigen::Ref<const Vector>& xi, double C,
                                            double eps) {
  TrainingPartition part;
  part.eps = eps;
  IndexList* buckets[7] = {&part.on_margin_free,  &part.outside_margin,
                           &part.on_margin_sv_interior, &part.on_margin_sv_bound,
                           &part.inside_margin,   &part.on_hyperplane,
                           &part.misclassified};
  for (Index i = 0; i < alpha.size(); ++i) {
    int best = exact_pattern(alpha[i], comp[i], xi[i], C, eps);
    if (best < 0) {
      part.ambiguous.push_back(i);
      double best_d = std::numeric_limits<double>::infinity();
      for (int p = 0; p < 7; ++p) {
        double d = pattern_distance(p, alpha[i], comp[i], xi[i], C);
        if (d < best_d) {
          best_d = d;
          best = p;
        }
      }
    }
    buckets[best]->push_back(i);
  }
  return part;
}

TrainingPartition classify_training_points(const SvcSolution& sol,
                                           const Eigen::Ref<const Matrix>& B, double eps) {
  Vector comp = B * (B.transpose() * sol.alpha) - Vector::Ones(B.rows()) + sol.xi;
  return classify_training_pattern(sol.alpha, comp, sol.xi, sol.C, eps);
}

IndexList TrainingPartition::on_margin_sv() const {
  IndexList out = on_margin_sv_interior;
  out.insert(out.end(), on_margin_sv_bound.begin(), on_margin_sv_bound.end());
  std::sort(out.begin(), out.end());
  return out;
}

IndexList TrainingPartition::bound_sv() const {
  IndexList out = inside_margin;
  out.insert(out.end(), on_hyperplane.begin(), on_hyperplane.end());
  out.insert(out.end(), misclassified.begin(), misclassified.end());
  std::sort(out.begin(), out.end());
  return out;
}

int predict(const Eigen::Ref<const Vector>& w, const Sample& x) {
  return x.dot(w) >= 0.0 ? +1 : -1;
}

Index misclassification_count(const Eigen::Ref<const Vector>& w, const Dataset& ds,
                              const IndexList& idx) {
  Index count = 0;
  for (Index i : idx)
    if (predict(w, ds.samples[static_cast<std::size_t>(i)]) !=
        ds.samples[static_cast<std::size_t>(i)].label)
      ++count;
  return count;
}

std::string solution_json(const SvcSolution& sol) {
  nlohmann::json j;
  j["C"] = sol.C;
  j["w"] = std::vector<double>(sol.w.begin(), sol.w.end());
  j["xi"] = std::vector<double>(sol.xi.begin(), sol.xi.end());
  j["alpha"] = std::vector<double>(sol.alpha.begin(), sol.alpha.end());
  j["mu"] = std::vector<double>(sol.mu.begin(), sol.mu.end());
  j["status"] = sol.status == TrainStatus::converged ? "converged" : "iteration_limit";
  j["sweeps"] = sol.sweeps;
  return j.dump();
}

}  // namespace grcv
