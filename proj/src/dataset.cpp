#include "grcv/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "grcv/random.hpp"

namespace grcv {

double Sample::dot(const Eigen::Ref<const Vector>& w) const {
  double acc = 0.0;
  for (const auto& [idx, val] : features) {
    if (idx - 1 < w.size()) acc += w[idx - 1] * val;
  }
  return acc;
}

Vector Dataset::labelled_row(Index i) const {
  const Sample& s = samples.at(static_cast<std::size_t>(i));
  Vector row = Vector::Zero(dim);
  for (const auto& [idx, val] : s.features) row[idx - 1] = s.label * val;
  return row;
}

namespace {

[[noreturn]] void fail_line(Index line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& tok, Index line_no, const char* what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) fail_line(line_no, std::string("bad ") + what + " '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    fail_line(line_no, std::string("bad ") + what + " '" + tok + "'");
  }
}

}  // namespace

Dataset parse_libsvm(std::istream& in) {
  Dataset ds;
  std::vector<double> raw_labels;
  std::map<double, int> distinct;
  std::string line;
  Index line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) fail_line(line_no, "missing label");
    double raw = parse_double(tok, line_no, "label");
    distinct.emplace(raw, 0);
    if (distinct.size() > 2) fail_line(line_no, "more than two distinct labels");

    Sample s;
    Index prev_idx = 0;
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        fail_line(line_no, "malformed feature '" + tok + "'");
      Index idx = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
      if (ec != std::errc() || p != tok.data() + colon || idx < 1)
        fail_line(line_no, "bad feature index in '" + tok + "'");
      if (idx <= prev_idx) fail_line(line_no, "feature indices not strictly increasing");
      prev_idx = idx;
      double val = parse_double(tok.substr(colon + 1), line_no, "feature value");
      s.features.emplace_back(idx, val);
      ds.dim = std::max(ds.dim, idx);
    }
    ds.samples.push_back(std::move(s));
    raw_labels.push_back(raw);
  }

  if (ds.samples.empty()) throw ParseError("empty dataset");
  if (distinct.size() != 2) throw ParseError("need exactly two distinct labels, got " +
                                             std::to_string(distinct.size()));
  const double low = distinct.begin()->first;
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    ds.samples[i].label = raw_labels[i] == low ? -1 : +1;
  return ds;
}

Dataset parse_libsvm(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

Dataset parse_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_libsvm(in);
}

std::string to_libsvm(const Dataset& ds) {
  std::string out;
  char buf[64];
  for (const Sample& s : ds.samples) {
    out += s.label > 0 ? "+1" : "-1";
    for (const auto& [idx, val] : s.features) {
      std::snprintf(buf, sizeof(buf), " %lld:%.17g", static_cast<long long>(idx), val);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void scale_features(Dataset& ds) {
  Vector scale = Vector::Zero(ds.dim);
  for (const Sample& s : ds.samples)
    for (const auto& [idx, val] : s.features)
      scale[idx - 1] = std::max(scale[idx - 1], std::abs(val));
  for (Sample& s : ds.samples)
    for (auto& [idx, val] : s.features)
      if (scale[idx - 1] > 0) val /= scale[idx - 1];
}

void SplitSpec::validate(Index dataset_size) const {
  if (T < 2) throw std::invalid_argument("T must be >= 2");
  if (l1 < T) throw std::invalid_argument("l1 must be >= T");
  if (l2 < 0) throw std::invalid_argument("l2 must be >= 0");
  if (l1 + l2 > dataset_size)
    throw std::invalid_argument("l1 + l2 exceeds dataset size " + std::to_string(dataset_size));
}

HoldoutSplit split_holdout(const Dataset& ds, const SplitSpec& spec) {
  spec.validate(ds.size());
  IndexList order(static_cast<std::size_t>(ds.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937 rng(spec.seed);
  deterministic_shuffle(order, rng);

  HoldoutSplit split;
  split.cv.assign(order.begin(), order.begin() + spec.l1);
  split.test.assign(order.begin() + spec.l1, order.begin() + spec.l1 + spec.l2);
  return split;
}

FoldPartition make_folds(const IndexList& cv_indices, int T, unsigned seed) {
  if (T < 2) throw std::invalid_argument("T must be >= 2");
  if (static_cast<Index>(cv_indices.size()) < T)
    throw std::invalid_argument("fewer CV indices than folds");

  IndexList order = cv_indices;
  std::mt19937 rng(seed);
  deterministic_shuffle(order, rng);

  FoldPartition fp;
  fp.m1 = static_cast<Index>(order.size()) / T;
  fp.m2 = (T - 1) * fp.m1;
  fp.dropped.assign(order.begin() + T * fp.m1, order.end());
  fp.validation_idx.resize(T);
  fp.training_idx.resize(T);
  for (int t = 0; t < T; ++t) {
    fp.validation_idx[t].assign(order.begin() + t * fp.m1, order.begin() + (t + 1) * fp.m1);
    fp.training_idx[t].reserve(fp.m2);
    for (int u = 0; u < T; ++u) {
      if (u == t) continue;
      fp.training_idx[t].insert(fp.training_idx[t].end(), order.begin() + u * fp.m1,
                                order.begin() + (u + 1) * fp.m1);
    }
  }
  return fp;
}

FoldMatrices build_fold_matrices(const Dataset& ds, const FoldPartition& fp) {
  FoldMatrices fm;
  fm.T = fp.folds();
  fm.m1 = fp.m1;
  fm.m2 = fp.m2;
  fm.n = ds.dim;
  fm.A.resize(fm.T);
  fm.B.resize(fm.T);
  for (int t = 0; t < fm.T; ++t) {
    fm.A[t].resize(fm.m1, fm.n);
    for (Index r = 0; r < fm.m1; ++r)
      fm.A[t].row(r) = ds.labelled_row(fp.validation_idx[t][r]).transpose();
    fm.B[t].resize(fm.m2, fm.n);
    for (Index r = 0; r < fm.m2; ++r)
      fm.B[t].row(r) = ds.labelled_row(fp.training_idx[t][r]).transpose();
  }
  return fm;
}

std::string fold_metadata_json(const SplitSpec& spec, const HoldoutSplit& split,
                               const FoldPartition& fp) {
  nlohmann::json j;
  j["l1"] = spec.l1;
  j["l2"] = spec.l2;
  j["seed"] = spec.seed;
  j["T"] = spec.T;
  j["cv"] = split.cv;
  j["test"] = split.test;
  j["m1"] = fp.m1;
  j["m2"] = fp.m2;
  j["dropped"] = fp.dropped;
  j["validation"] = fp.validation_idx;
  j["training"] = fp.training_idx;
  return j.dump(2);
}

}  // namespace grcv
