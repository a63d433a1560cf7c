#include <doctest.h>

#include "grcv/baselines.hpp"
#include "support.hpp"

using namespace grcv;

TEST_CASE("standard grid has the nine log-spaced values") {
  GridSpec grid = GridSpec::standard();
  REQUIRE(grid.C_values.size() == 9);
  CHECK(grid.C_values.front() == doctest::Approx(1e-4));
  CHECK(grid.C_values.back() == doctest::Approx(1e4));
  grid.validate();

  GridSpec bad;
  bad.C_values = {1.0, 0.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec{}.validate(), std::invalid_argument);
}

TEST_CASE("grid accounting: nine values and three folds give 27 trainings") {
  Dataset ds = testing::make_blobs(15, 2, 1.2, 5);
  SplitSpec spec{24, 6, 5, 3};
  GridSearchResult res = grid_search(ds, spec, GridSpec::standard());
  CHECK(res.k == 27);
  CHECK(res.it > 0);
  CHECK(res.cv_errors.size() == 9);
}

TEST_CASE("single-value grid returns that value") {
  Dataset ds = testing::make_blobs(10, 2, 1.2, 6);
  SplitSpec spec{16, 4, 6, 2};
  GridSpec grid;
  grid.C_values = {0.7};
  GridSearchResult res = grid_search(ds, spec, grid);
  CHECK(res.C_best == 0.7);
  CHECK(res.k == 2);
}

TEST_CASE("ties pick the smallest C; separable data reaches zero error") {
  Dataset ds = testing::make_separable(20, 2, 11);
  SplitSpec spec{30, 10, 11, 3};
  GridSearchResult res = grid_search(ds, spec, GridSpec::standard());
  CHECK(res.E_C == 0.0);
  CHECK(res.E_t == 0.0);
  // The tie rule depends only on values: C_best is the smallest minimizer.
  double best = *std::min_element(res.cv_errors.begin(), res.cv_errors.end());
  for (std::size_t i = 0; i < res.cv_errors.size(); ++i) {
    if (res.cv_errors[i] == best) {
      CHECK(res.C_best == GridSpec::standard().C_values[i]);
      break;
    }
  }
}

TEST_CASE("grid CV error equals the predictor count when no point is on the hyperplane") {
  Dataset ds = testing::make_blobs(12, 2, 1.0, 21);
  SplitSpec spec{20, 4, 21, 2};
  HoldoutSplit split = split_holdout(ds, spec);
  FoldPartition fp = make_folds(split.cv, 2, 21);
  FoldMatrices fm = build_fold_matrices(ds, fp);

  GridSpec grid;
  grid.C_values = {0.5};
  GridSearchResult res = grid_search(ds, spec, grid);

  SvcTrainOptions topts;
  topts.tol = 1e-12;
  Index count = 0;
  bool tie = false;
  for (int t = 0; t < 2; ++t) {
    SvcSolution sol = train_l1_svc(fm.B[t], 0.5, topts);
    for (Index i : fp.validation_idx[t])
      tie = tie || std::abs(ds.samples[static_cast<std::size_t>(i)].label *
                            ds.labelled_row(i).dot(sol.w) / ds.samples[0].label) < 1e-12;
    count += misclassification_count(sol.w, ds, fp.validation_idx[t]);
  }
  REQUIRE(!tie);
  CHECK(res.E_C == doctest::Approx(static_cast<double>(count) / (2.0 * fp.m1)).epsilon(1e-12));
}

TEST_CASE("inexact cv solves once and matches the one-stage relaxation") {
  Dataset ds = testing::make_blobs(10, 2, 1.3, 8);
  SplitSpec spec{16, 4, 8, 2};
  InexactCvResult in_cv = inexact_cv(ds, spec, /*tol=*/1.0);
  CHECK(in_cv.k == 1);

  // Same instance, same start: the first subproblem of the relaxation chain
  // at t0 = tol is the identical deterministic computation.
  GrmOptions opts;
  opts.t0 = 1.0;
  opts.sigma = 0.5;
  opts.t_min = 0.6;  // single stage
  GrCvResult grcv = gr_cv(ds, spec, opts);
  REQUIRE(grcv.k == 1);
  CHECK(in_cv.C_hat == grcv.C_hat);
  CHECK(in_cv.E_C == grcv.E_C);
  CHECK(in_cv.vio == grcv.vio);
}

TEST_CASE("inexact cv rejects a nonpositive tolerance") {
  Dataset ds = testing::make_blobs(8, 2, 1.3, 9);
  CHECK_THROWS_AS(inexact_cv(ds, SplitSpec{12, 4, 9, 2}, 0.0), std::invalid_argument);
}

TEST_CASE("relaxation chain ends tighter than the single inexact solve") {
  Dataset ds = testing::make_blobs(12, 2, 1.0, 10);
  SplitSpec spec{20, 4, 10, 2};
  InexactCvResult in_cv = inexact_cv(ds, spec);  // tol = 1e-4
  GrCvResult grcv = gr_cv(ds, spec);
  CHECK(grcv.vio <= in_cv.vio + 1e-12);
}
