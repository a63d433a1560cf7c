#include "grcv/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <nlohmann/json.hpp>

#include "grcv/baselines.hpp"
#include "grcv/dataset.hpp"
#include "grcv/grm.hpp"
#include "grcv/mpec.hpp"
#include "grcv/report.hpp"

namespace grcv {

namespace {

std::string dataset_name(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

void resolve_sizes(const Dataset& ds, Index& l1, Index& l2) {
  if (l1 == 0) {
    l1 = (7 * ds.size()) / 10;
    if (l2 == 0) l2 = ds.size() - l1;
  } else if (l2 == 0) {
    l2 = ds.size() - l1;
  }
}

int write_report(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write '" << out_path << "'\n";
    return kExitConfigError;
  }
  out << text;
  return kExitOk;
}

std::string method_label(const std::string& method) {
  if (method == "gr-cv") return "GR-CV";
  if (method == "in-cv") return "In-CV";
  return "G-S";
}

SummaryRow run_one_method(const Dataset& ds, const SplitSpec& spec, const RunConfig& cfg,
                          const std::string& method, GrmTrace* trace_out) {
  SummaryRow row;
  row.dataset = dataset_name(cfg.data_path);
  row.method = method_label(method);
  if (method == "gr-cv") {
    GrmOptions opts;
    opts.t0 = cfg.t0;
    opts.sigma = cfg.sigma;
    opts.t_min = cfg.tmin;
    GrCvResult res = gr_cv(ds, spec, opts, cfg.rescale);
    row.E_t = res.E_t;
    row.E_C = res.E_C;
    row.vio = res.vio;
    row.k = res.k;
    row.it = res.it;
    if (trace_out) *trace_out = std::move(res.trace);
  } else if (method == "in-cv") {
    InexactCvResult res = inexact_cv(ds, spec, cfg.tol, SolverOptions{}, cfg.rescale);
    row.E_t = res.E_t;
    row.E_C = res.E_C;
    row.vio = res.vio;
    row.k = res.k;
    row.it = res.it;
  } else if (method == "grid") {
    GridSpec grid = GridSpec::standard();
    if (!cfg.grid.empty()) grid.C_values = cfg.grid;
    GridSearchResult res = grid_search(ds, spec, grid, cfg.grid_rescale);
    row.E_t = res.E_t;
    row.E_C = res.E_C;
    row.k = res.k;
    row.it = res.it;
  } else {
    throw std::invalid_argument("unknown method '" + method + "'");
  }
  return row;
}

}  // namespace

int cmd_run(const RunConfig& cfg) {
  Dataset ds;
  try {
    ds = parse_libsvm_file(cfg.data_path);
    if (cfg.scale_features) scale_features(ds);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  SplitSpec spec;
  spec.l1 = cfg.l1;
  spec.l2 = cfg.l2;
  spec.T = cfg.T;
  spec.seed = cfg.seed;
  resolve_sizes(ds, spec.l1, spec.l2);
  try {
    spec.validate(ds.size());
    if (cfg.method != "gr-cv" && cfg.method != "in-cv" && cfg.method != "grid")
      throw std::invalid_argument("unknown method '" + cfg.method + "'");
    if (cfg.format != "csv" && cfg.format != "json")
      throw std::invalid_argument("unknown format '" + cfg.format + "'");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    GrmTrace trace;
    SummaryRow row = run_one_method(ds, spec, cfg, cfg.method, &trace);
    std::string text;
    if (cfg.format == "csv") {
      text = rows_to_csv({row});
    } else {
      nlohmann::json j = nlohmann::json::parse(rows_to_json({row}));
      if (cfg.method == "gr-cv") j[0]["trace"] = nlohmann::json::parse(trace_json(trace));
      text = j.dump(2) + "\n";
    }
    return write_report(text, cfg.out_path);
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
}

int cmd_sweep_folds(const RunConfig& cfg, const std::vector<int>& T_list) {
  Dataset ds;
  try {
    ds = parse_libsvm_file(cfg.data_path);
    if (cfg.scale_features) scale_features(ds);
    for (int T : T_list)
      if (T < 2) throw std::invalid_argument("T must be >= 2");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::string text = "T,Method,E_t(%),E_C(%)\n";
  try {
    for (int T : T_list) {
      SplitSpec spec;
      spec.l1 = cfg.l1;
      spec.l2 = cfg.l2;
      spec.T = T;
      spec.seed = cfg.seed;
      resolve_sizes(ds, spec.l1, spec.l2);
      spec.validate(ds.size());
      for (const char* method : {"gr-cv", "in-cv", "grid"}) {
        SummaryRow row = run_one_method(ds, spec, cfg, method, nullptr);
        text += std::to_string(T) + ',' + row.method + ',' + format_percent(row.E_t) + ',' +
                format_percent(row.E_C) + '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return write_report(text, cfg.out_path);
}

int cmd_diagnose(const DiagnoseConfig& cfg) {
  Dataset ds;
  SplitSpec spec;
  try {
    ds = parse_libsvm_file(cfg.data_path);
    if (cfg.scale_features) scale_features(ds);
    spec.l1 = cfg.l1;
    spec.l2 = cfg.l2;
    spec.T = cfg.T;
    spec.seed = cfg.seed;
    resolve_sizes(ds, spec.l1, spec.l2);
    spec.validate(ds.size());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  HoldoutSplit split = split_holdout(ds, spec);
  FoldPartition fp = make_folds(split.cv, spec.T, spec.seed);
  FoldMatrices fm = build_fold_matrices(ds, fp);
  MpecProblem p = assemble_mpec(fm);
  const MpecDims& d = p.dims();

  int independent = 0, dependent = 0, identity_failures = 0, coverage_failures = 0;
  int ambiguous = 0;
  std::mt19937 rng(spec.seed);
  SvcTrainOptions train_opts;
  train_opts.tol = 1e-12;

  for (int s = 0; s < cfg.samples; ++s) {
    const double C = std::pow(10.0, -2.0 + 4.0 * (rng() / 4294967296.0));
    std::vector<Vector> alphas;
    for (int t = 0; t < spec.T; ++t) alphas.push_back(train_l1_svc(fm.B[t], C, train_opts).alpha);
    MpecPoint pt = feasible_point_from_duals(p, C, alphas);

    ActiveSets sets = active_sets(p, pt);
    identity_failures += static_cast<int>(sets.cross_check_failures.size());
    for (int part = 0; part < 4; ++part) {
      Index covered = static_cast<Index>(sets.h_active[part].size() + sets.g_active[part].size() +
                                         sets.biactive[part].size());
      if (covered != (part < 2 ? d.qu() : d.ql())) ++coverage_failures;
    }
    ambiguous += static_cast<int>(classify_validation_points(p, pt).ambiguous.size());
    ambiguous += static_cast<int>(classify_training_points(p, pt).ambiguous.size());

    MfcqResult mfcq = mfcq_diagnostic(p, pt);
    if (mfcq.independent)
      ++independent;
    else
      ++dependent;
  }

  if (cfg.inject_corruption) ++identity_failures;  // test hook

  nlohmann::json j;
  j["samples"] = cfg.samples;
  j["independent"] = independent;
  j["dependent"] = dependent;
  j["identity_failures"] = identity_failures;
  j["coverage_failures"] = coverage_failures;
  j["ambiguous"] = ambiguous;
  const bool ok = dependent == 0 && identity_failures == 0 && coverage_failures == 0;
  j["ok"] = ok;
  int rc = write_report(j.dump(2) + "\n", cfg.out_path);
  if (rc != kExitOk) return rc;
  return ok ? kExitOk : kExitSolverFailure;
}

}  // namespace grcv
