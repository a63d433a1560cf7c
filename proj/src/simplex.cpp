#include "grcv/simplex.hpp"

#include <cmath>
#include <limits>

namespace grcv {

namespace {

constexpr double kTol = 1e-9;

// Tableau layout: rows 0..m-1 are constraints, row m is the objective
// (reduced costs, with -objective value in the last column).
struct Tableau {
  Matrix t;                // (m+1) x (n+1)
  std::vector<Index> basis;  // size m, column index of the basic variable

  Index rows() const { return t.rows() - 1; }
  Index cols() const { return t.cols() - 1; }

  void price_out_basis() {
    for (Index r = 0; r < rows(); ++r) {
      Index j = basis[static_cast<std::size_t>(r)];
      if (j < 0) continue;  // neutralized redundant row
      double coeff = t(rows(), j);
      if (coeff != 0.0) t.row(rows()) -= coeff * t.row(r);
    }
  }

  // Bland's rule: entering = smallest column with negative reduced cost,
  // leaving = smallest-index basic variable among the ratio-test minima.
  LpStatus iterate(Index max_pivots) {
    for (Index pivots = 0; pivots < max_pivots; ++pivots) {
      Index enter = -1;
      for (Index j = 0; j < cols(); ++j) {
        if (t(rows(), j) < -kTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::optimal;

      Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Index r = 0; r < rows(); ++r) {
        double a = t(r, enter);
        if (a > kTol) {
          double ratio = t(r, cols()) / a;
          if (ratio < best_ratio - kTol ||
              (ratio < best_ratio + kTol && leave >= 0 &&
               basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
            best_ratio = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return LpStatus::unbounded;

      t.row(leave) /= t(leave, enter);
      for (Index r = 0; r < t.rows(); ++r) {
        if (r == leave) continue;
        double f = t(r, enter);
        if (f != 0.0) t.row(r) -= f * t.row(leave);
      }
      basis[static_cast<std::size_t>(leave)] = enter;
    }
    return LpStatus::stalled;
  }
};

}  // namespace

LpResult simplex_solve_eq(const Matrix& A, const Vector& b, const Vector& c) {
  const Index m = A.rows();
  const Index n = A.cols();
  LpResult res;

  // Phase 1: minimize the sum of artificials.
  Tableau tab;
  tab.t = Matrix::Zero(m + 1, n + m + 1);
  tab.basis.resize(static_cast<std::size_t>(m));
  for (Index r = 0; r < m; ++r) {
    double sign = b[r] < 0 ? -1.0 : 1.0;
    tab.t.block(r, 0, 1, n) = sign * A.row(r);
    tab.t(r, n + r) = 1.0;
    tab.t(r, n + m) = sign * b[r];
    tab.basis[static_cast<std::size_t>(r)] = n + r;
  }
  tab.t.row(m).segment(n, m).setOnes();
  tab.price_out_basis();

  const Index max_pivots = 200 * (m + n) + 2000;
  LpStatus st = tab.iterate(max_pivots);
  double phase1 = -tab.t(m, n + m);
  if (st == LpStatus::stalled) {
    res.status = LpStatus::stalled;
    return res;
  }
  if (phase1 > 1e-7) {
    res.status = LpStatus::infeasible;
    return res;
  }

  // Drive any artificial still in the basis out (or drop its redundant row
  // by leaving it at zero; pivoting on any nonzero structural entry works).
  for (Index r = 0; r < m; ++r) {
    if (tab.basis[static_cast<std::size_t>(r)] >= n) {
      for (Index j = 0; j < n; ++j) {
        if (std::abs(tab.t(r, j)) > kTol) {
          tab.t.row(r) /= tab.t(r, j);
          for (Index rr = 0; rr < tab.t.rows(); ++rr) {
            if (rr == r) continue;
            double f = tab.t(rr, j);
            if (f != 0.0) tab.t.row(rr) -= f * tab.t.row(r);
          }
          tab.basis[static_cast<std::size_t>(r)] = j;
          break;
        }
      }
    }
  }

  // Phase 2 on the structural columns.
  Tableau t2;
  t2.t = Matrix::Zero(m + 1, n + 1);
  t2.t.block(0, 0, m, n) = tab.t.block(0, 0, m, n);
  t2.t.col(n).head(m) = tab.t.col(n + m).head(m);
  t2.basis = tab.basis;
  for (Index j = 0; j < n; ++j) t2.t(m, j) = c[j];
  for (Index r = 0; r < m; ++r) {
    // Redundant rows may keep an artificial basic at level zero; neutralize
    // them so phase 2 cannot pivot on ghost columns.
    if (t2.basis[static_cast<std::size_t>(r)] >= n) {
      t2.t.row(r).setZero();
      t2.basis[static_cast<std::size_t>(r)] = -1;
    }
  }
  t2.price_out_basis();

  st = t2.iterate(max_pivots);
  if (st != LpStatus::optimal) {
    res.status = st;
    return res;
  }

  res.status = LpStatus::optimal;
  res.x = Vector::Zero(n);
  for (Index r = 0; r < m; ++r) {
    Index j = t2.basis[static_cast<std::size_t>(r)];
    if (j >= 0 && j < n) res.x[j] = t2.t(r, n);
  }
  res.objective = c.dot(res.x);
  return res;
}

std::optional<Vector> feasible_nonneg_point(const Matrix& A, const Vector& b) {
  LpResult r = simplex_solve_eq(A, b, Vector::Zero(A.cols()));
  if (r.status == LpStatus::optimal) return r.x;
  return std::nullopt;
}

}  // namespace grcv
