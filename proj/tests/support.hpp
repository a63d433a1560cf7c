#pragma once

#include <cmath>
#include <random>

#include "grcv/dataset.hpp"
#include "grcv/mpec.hpp"
#include "grcv/svc.hpp"
#include "grcv/types.hpp"

namespace grcv::testing {

// Cross-platform deterministic standard normal (Box-Muller on raw draws).
inline double normal_draw(std::mt19937& rng) {
  double u1 = (static_cast<double>(rng()) + 0.5) / 4294967296.0;
  double u2 = (static_cast<double>(rng()) + 0.5) / 4294967296.0;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double uniform_draw(std::mt19937& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng()) / 4294967296.0);
}

// Two Gaussian blobs centred at +-(separation/2) on the first axis.
inline Dataset make_blobs(Index n_per_class, Index dim, double separation, unsigned seed) {
  std::mt19937 rng(seed);
  Dataset ds;
  ds.dim = dim;
  for (int cls = 0; cls < 2; ++cls) {
    const int label = cls == 0 ? +1 : -1;
    for (Index i = 0; i < n_per_class; ++i) {
      Sample s;
      s.label = label;
      for (Index f = 0; f < dim; ++f) {
        double mean = f == 0 ? label * separation / 2.0 : 0.0;
        s.features.emplace_back(f + 1, mean + normal_draw(rng));
      }
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

// Interleaves the classes so seeded splits stay balanced, then pushes them
// far enough apart that any positive C separates them.
inline Dataset make_separable(Index n_per_class, Index dim, unsigned seed, double gap = 6.0) {
  Dataset ds = make_blobs(n_per_class, dim, gap, seed);
  for (Sample& s : ds.samples) {
    double& x0 = s.features[0].second;
    if (s.label > 0 && x0 < 1.0) x0 = 1.0 + std::abs(x0);
    if (s.label < 0 && x0 > -1.0) x0 = -1.0 - std::abs(x0);
  }
  return ds;
}

// Dense C-grid oracle for the CV error: exact lower-level training plus the
// 0-1 loss rule, minimized over a fine log grid. Independent of the MPEC
// solution path it is used to check.
inline double grid_cv_error_oracle(const FoldMatrices& fm, Index grid_points = 120,
                                   double* best_c = nullptr) {
  SvcTrainOptions topts;
  topts.tol = 1e-12;
  double best = std::numeric_limits<double>::infinity();
  for (Index g = 0; g <= grid_points; ++g) {
    double C = std::pow(10.0, -3.0 + 6.0 * static_cast<double>(g) / grid_points);
    double loss = 0.0;
    for (int t = 0; t < fm.T; ++t) {
      SvcSolution sol = train_l1_svc(fm.B[t], C, topts);
      loss += zero_one_loss_lp(-(fm.A[t] * sol.w)).sum();
    }
    double err = loss / static_cast<double>(fm.T * fm.m1);
    if (err < best) {
      best = err;
      if (best_c) *best_c = C;
    }
  }
  return best;
}

}  // namespace grcv::testing
