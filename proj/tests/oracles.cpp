#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace grcv::testing {

QpOracleResult qp_enumeration_oracle(const Matrix& B, double C) {
  const Index m = B.rows();
  if (m > 12) throw std::invalid_argument("oracle limited to 12 rows");
  const Matrix Q = B * B.transpose();
  const double tol = 1e-9;

  QpOracleResult best;
  best.objective = std::numeric_limits<double>::infinity();

  std::vector<int> pattern(static_cast<std::size_t>(m), 0);
  long total = 1;
  for (Index i = 0; i < m; ++i) total *= 3;

  for (long code = 0; code < total; ++code) {
    long c = code;
    for (Index i = 0; i < m; ++i) {
      pattern[static_cast<std::size_t>(i)] = static_cast<int>(c % 3);
      c /= 3;
    }

    std::vector<Index> free_set, upper_set;
    for (Index i = 0; i < m; ++i) {
      if (pattern[static_cast<std::size_t>(i)] == 1) free_set.push_back(i);
      if (pattern[static_cast<std::size_t>(i)] == 2) upper_set.push_back(i);
    }

    Vector alpha = Vector::Zero(m);
    for (Index i : upper_set) alpha[i] = C;
    if (!free_set.empty()) {
      const Index f = static_cast<Index>(free_set.size());
      Matrix Qff(f, f);
      Vector rhs(f);
      for (Index a = 0; a < f; ++a) {
        rhs[a] = 1.0;
        for (Index i : upper_set) rhs[a] -= Q(free_set[a], i) * C;
        for (Index b = 0; b < f; ++b) Qff(a, b) = Q(free_set[a], free_set[b]);
      }
      Eigen::FullPivLU<Matrix> lu(Qff);
      if (!lu.isInvertible()) continue;
      Vector af = lu.solve(rhs);
      for (Index a = 0; a < f; ++a) alpha[free_set[a]] = af[a];
    }

    // KKT check: box membership plus sign of the gradient Q a - 1.
    Vector grad = Q * alpha - Vector::Ones(m);
    bool ok = true;
    for (Index i = 0; i < m && ok; ++i) {
      switch (pattern[static_cast<std::size_t>(i)]) {
        case 0: ok = grad[i] >= -tol; break;
        case 1: ok = alpha[i] > -tol && alpha[i] < C + tol && std::abs(grad[i]) <= 1e-7; break;
        case 2: ok = grad[i] <= tol; break;
      }
    }
    if (!ok) continue;

    Vector w = B.transpose() * alpha;
    double obj = 0.5 * w.squaredNorm() +
                 C * (Vector::Ones(m) - B * w).cwiseMax(0.0).sum();
    if (obj < best.objective) {
      best.objective = obj;
      best.alpha = alpha;
      best.w = w;
      best.found = true;
    }
  }
  return best;
}

double projected_gradient_dual_objective(const Matrix& B, double C, Index iters) {
  const Index m = B.rows();
  const Matrix Q = B * B.transpose();
  const double L = std::max(Q.norm(), 1e-12);  // Frobenius bounds the spectral norm
  Vector a = Vector::Zero(m);
  for (Index k = 0; k < iters; ++k) {
    Vector grad = Q * a - Vector::Ones(m);
    a = (a - grad / L).cwiseMax(0.0).cwiseMin(C);
  }
  return a.sum() - 0.5 * (B.transpose() * a).squaredNorm();
}

double primal_grid_objective(const Matrix& B, double C, double half_width, Index points) {
  if (B.cols() != 2) throw std::invalid_argument("grid oracle needs n == 2");
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i <= points; ++i) {
    for (Index j = 0; j <= points; ++j) {
      Vector w(2);
      w[0] = -half_width + 2.0 * half_width * i / points;
      w[1] = -half_width + 2.0 * half_width * j / points;
      double obj = 0.5 * w.squaredNorm() +
                   C * (Vector::Ones(B.rows()) - B * w).cwiseMax(0.0).sum();
      best = std::min(best, obj);
    }
  }
  return best;
}

double vertex_enum_loss_min(const Vector& r) {
  const Index m = r.size();
  if (m > 20) throw std::invalid_argument("enumeration limited to 20 components");
  double best = std::numeric_limits<double>::infinity();
  for (long mask = 0; mask < (1L << m); ++mask) {
    double val = 0.0;
    for (Index i = 0; i < m; ++i)
      if (mask & (1L << i)) val -= r[i];
    best = std::min(best, val);
  }
  return best;
}

}  // namespace grcv::testing
