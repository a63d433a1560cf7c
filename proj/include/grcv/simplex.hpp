#pragma once

#include <optional>

#include "grcv/types.hpp"

namespace grcv {

enum class LpStatus { optimal, infeasible, unbounded, stalled };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector x;            // size n, valid for optimal
  double objective = 0.0;
};

// min c'x  s.t.  A x = b, x >= 0, via a dense two-phase tableau simplex with
// Bland's rule. Meant for small diagnostic problems, not production LPs.
LpResult simplex_solve_eq(const Matrix& A, const Vector& b, const Vector& c);

// Convenience: any x >= 0 with A x = b, or nullopt if none exists.
std::optional<Vector> feasible_nonneg_point(const Matrix& A, const Vector& b);

}  // namespace grcv
