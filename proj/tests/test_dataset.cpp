#include <doctest.h>

#include <set>

#include "grcv/dataset.hpp"
#include "support.hpp"

using namespace grcv;

TEST_CASE("parse_libsvm basic format") {
  Dataset ds = parse_libsvm("+1 1:0.5 3:-1.2\n-1 2:2.0\n");
  REQUIRE(ds.size() == 2);
  CHECK(ds.dim == 3);
  CHECK(ds.samples[0].label == +1);
  CHECK(ds.samples[0].features ==
        std::vector<std::pair<Index, double>>{{1, 0.5}, {3, -1.2}});
  CHECK(ds.samples[1].label == -1);
}

TEST_CASE("parse_libsvm maps the smaller raw label to -1") {
  Dataset ds = parse_libsvm("0 1:1\n1 1:2\n");
  CHECK(ds.samples[0].label == -1);
  CHECK(ds.samples[1].label == +1);
}

TEST_CASE("parse_libsvm rejects malformed input with a line number") {
  CHECK_THROWS_WITH_AS(parse_libsvm("+1 1:0.5\n-1 oops\n"),
                       doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_AS(parse_libsvm("+1 2:1 1:2\n-1 1:1\n"), ParseError);   // non-increasing
  CHECK_THROWS_AS(parse_libsvm("+1 1:1\n-1 1:1\n2 1:1\n"), ParseError);  // three labels
  CHECK_THROWS_AS(parse_libsvm("+1 1:1\n+1 2:1\n"), ParseError);       // single label
  CHECK_THROWS_AS(parse_libsvm(""), ParseError);
}

TEST_CASE("libsvm round-trip preserves samples") {
  Dataset ds = testing::make_blobs(13, 4, 2.0, 7);
  Dataset again = parse_libsvm(to_libsvm(ds));
  REQUIRE(again.size() == ds.size());
  CHECK(again.dim == ds.dim);
  for (Index i = 0; i < ds.size(); ++i)
    CHECK(again.samples[static_cast<std::size_t>(i)] ==
          ds.samples[static_cast<std::size_t>(i)]);
}

TEST_CASE("split_holdout is deterministic and sized") {
  Dataset ds = testing::make_blobs(50, 3, 2.0, 3);
  SplitSpec spec{70, 30, 42, 3};
  HoldoutSplit a = split_holdout(ds, spec);
  HoldoutSplit b = split_holdout(ds, spec);
  CHECK(a.cv == b.cv);
  CHECK(a.test == b.test);
  CHECK(a.cv.size() == 70);
  CHECK(a.test.size() == 30);

  std::set<Index> seen(a.cv.begin(), a.cv.end());
  seen.insert(a.test.begin(), a.test.end());
  CHECK(seen.size() == 100);  // disjoint

  SplitSpec other{70, 30, 43, 3};
  CHECK(split_holdout(ds, other).cv != a.cv);
}

TEST_CASE("split_holdout validates sizes") {
  Dataset ds = testing::make_blobs(10, 2, 2.0, 1);
  CHECK_THROWS_AS(split_holdout(ds, SplitSpec{15, 10, 0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(split_holdout(ds, SplitSpec{10, 0, 0, 1}), std::invalid_argument);
  // l2 = 0 leaves the test set empty but is allowed.
  HoldoutSplit s = split_holdout(ds, SplitSpec{20, 0, 0, 2});
  CHECK(s.test.empty());
}

TEST_CASE("make_folds partitions evenly and drops the remainder") {
  IndexList cv(189);
  std::iota(cv.begin(), cv.end(), Index{0});
  FoldPartition fp = make_folds(cv, 3, 42);
  CHECK(fp.m1 == 63);
  CHECK(fp.m2 == 126);
  CHECK(fp.dropped.empty());

  IndexList cv10(10);
  std::iota(cv10.begin(), cv10.end(), Index{0});
  FoldPartition fp10 = make_folds(cv10, 3, 42);
  CHECK(fp10.m1 == 3);
  CHECK(fp10.m2 == 6);
  CHECK(fp10.dropped.size() == 1);

  for (int t = 0; t < 3; ++t) {
    std::set<Index> val(fp10.validation_idx[t].begin(), fp10.validation_idx[t].end());
    for (Index i : fp10.training_idx[t]) CHECK(val.count(i) == 0);
    CHECK(fp10.validation_idx[t].size() == 3);
    CHECK(fp10.training_idx[t].size() == 6);
  }

  // Validation folds are pairwise disjoint and cover the used indices.
  std::set<Index> all;
  for (int t = 0; t < 3; ++t) all.insert(fp10.validation_idx[t].begin(),
                                         fp10.validation_idx[t].end());
  CHECK(all.size() == 9);
}

TEST_CASE("build_fold_matrices rows are label-scaled samples") {
  Dataset ds;
  ds.dim = 2;
  ds.samples = {{{{1, 1.0}}, -1}, {{{2, 2.0}}, +1}, {{{1, 3.0}}, +1},
                {{{2, -1.0}}, -1}, {{{1, 0.5}, {2, 0.5}}, +1}, {{{1, -2.0}}, -1}};
  IndexList cv{0, 1, 2, 3, 4, 5};
  FoldPartition fp = make_folds(cv, 3, 1);
  FoldMatrices fm = build_fold_matrices(ds, fp);
  REQUIRE(fm.A.size() == 3);
  CHECK(fm.A[0].rows() == 2);
  CHECK(fm.B[0].rows() == 4);
  CHECK(fm.A[0].cols() == 2);

  // sample (1,0) with label -1 gives the row (-1, 0)
  Dataset single;
  single.dim = 2;
  single.samples = {{{{1, 1.0}}, -1}};
  Vector expected(2);
  expected << -1.0, 0.0;
  CHECK(single.labelled_row(0) == expected);
}

TEST_CASE("fold matrices stack to the full CV multiset") {
  Dataset ds = testing::make_blobs(12, 3, 2.0, 11);
  SplitSpec spec{18, 6, 5, 3};
  HoldoutSplit split = split_holdout(ds, spec);
  FoldPartition fp = make_folds(split.cv, 3, 5);
  FoldMatrices fm = build_fold_matrices(ds, fp);

  std::multiset<std::string> rows_fold, rows_direct;
  auto key = [](const Vector& v) {
    std::string k;
    for (Index i = 0; i < v.size(); ++i) k += std::to_string(v[i]) + ",";
    return k;
  };
  for (int t = 0; t < 3; ++t) {
    for (Index r = 0; r < fm.m1; ++r) rows_fold.insert(key(fm.A[t].row(r).transpose()));
  }
  IndexList used;
  for (int t = 0; t < 3; ++t)
    used.insert(used.end(), fp.validation_idx[t].begin(), fp.validation_idx[t].end());
  for (Index i : used) rows_direct.insert(key(ds.labelled_row(i)));
  CHECK(rows_fold == rows_direct);

  // |Q_u| = T*m1 and |Q_l| = T*m2 exactly.
  CHECK(static_cast<Index>(used.size()) == 3 * fm.m1);
  Index ql = 0;
  for (int t = 0; t < 3; ++t) ql += static_cast<Index>(fp.training_idx[t].size());
  CHECK(ql == 3 * fm.m2);
}

TEST_CASE("feature scaling maps every column into [-1, 1]") {
  Dataset ds = parse_libsvm("+1 1:4 2:-10\n-1 1:-2 2:40\n+1 2:20\n");
  scale_features(ds);
  CHECK(ds.samples[0].features[0].second == doctest::Approx(1.0));    // 4 / 4
  CHECK(ds.samples[0].features[1].second == doctest::Approx(-0.25));  // -10 / 40
  CHECK(ds.samples[1].features[0].second == doctest::Approx(-0.5));
  CHECK(ds.samples[1].features[1].second == doctest::Approx(1.0));
  double worst = 0;
  for (const Sample& s : ds.samples)
    for (auto& [idx, val] : s.features) worst = std::max(worst, std::abs(val));
  CHECK(worst <= 1.0);
}

TEST_CASE("fold metadata serializes to JSON") {
  Dataset ds = testing::make_blobs(10, 2, 2.0, 9);
  SplitSpec spec{12, 8, 3, 2};
  HoldoutSplit split = split_holdout(ds, spec);
  FoldPartition fp = make_folds(split.cv, spec.T, spec.seed);
  std::string j = fold_metadata_json(spec, split, fp);
  CHECK(j.find("\"m1\": 6") != std::string::npos);
  CHECK(j.find("\"validation\"") != std::string::npos);
}
