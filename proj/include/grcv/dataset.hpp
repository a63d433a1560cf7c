#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grcv/types.hpp"

namespace grcv {

/// One labelled point in sparse form. Feature indices are 1-based and
/// strictly increasing, the label is normalized to {-1, +1}.
struct Sample {
  std::vector<std::pair<Index, double>> features;
  int label = 0;

  double dot(const Eigen::Ref<const Vector>& w) const;
  bool operator==(const Sample&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  Index dim = 0;  // number of features n (>= max index seen)

  Index size() const { return static_cast<Index>(samples.size()); }
  // y_i * x_i as a dense row of length dim.
  Vector labelled_row(Index i) const;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// LIBSVM sparse text: `label idx:val idx:val ...` per nonempty line.
// Exactly two distinct raw labels are required; the smaller maps to -1.
Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm(const std::string& text);
Dataset parse_libsvm_file(const std::string& path);

// Round-trips through parse_libsvm bit-exactly.
std::string to_libsvm(const Dataset& ds);

// Rescales every feature column by its max absolute value (in place).
void scale_features(Dataset& ds);

struct SplitSpec {
  Index l1 = 0;       // cross-validation points
  Index l2 = 0;       // hold-out test points
  unsigned seed = 42;
  int T = 3;          // fold count

  void validate(Index dataset_size) const;  // throws std::invalid_argument
};

struct HoldoutSplit {
  IndexList cv;    // size l1
  IndexList test;  // size l2
};

// Seeded shuffle of [0, |ds|); first l1 indices go to CV, next l2 to test.
HoldoutSplit split_holdout(const Dataset& ds, const SplitSpec& spec);

struct FoldPartition {
  std::vector<IndexList> validation_idx;  // per fold, size m1 each
  std::vector<IndexList> training_idx;    // per fold, size m2 each
  Index m1 = 0;
  Index m2 = 0;
  IndexList dropped;  // CV indices not used when T does not divide l1

  int folds() const { return static_cast<int>(validation_idx.size()); }
};

// Shuffles cv_indices with the given seed and deals the first T*floor(l1/T)
// of them into T equal chunks; fold t validates on chunk t and trains on the
// rest. The remainder is dropped so all folds share m1.
FoldPartition make_folds(const IndexList& cv_indices, int T, unsigned seed);

struct FoldMatrices {
  std::vector<Matrix> A;  // m1 x n, rows y_i x_i^T over validation_idx[t]
  std::vector<Matrix> B;  // m2 x n, rows y_i x_i^T over training_idx[t]
  int T = 0;
  Index m1 = 0, m2 = 0, n = 0;
};

FoldMatrices build_fold_matrices(const Dataset& ds, const FoldPartition& fp);

// Split/fold metadata as a JSON string (indices, sizes, dropped list).
std::string fold_metadata_json(const SplitSpec& spec, const HoldoutSplit& split,
                               const FoldPartition& fp);

}  // namespace grcv
