#pragma once

#include <string>
#include <vector>

#include "grcv/types.hpp"

namespace grcv {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitConfigError = 2;

struct RunConfig {
  std::string data_path;
  Index l1 = 0;  // 0 = auto (70% of the data)
  Index l2 = 0;  // 0 = auto (the rest)
  int T = 3;
  unsigned seed = 42;
  std::string method = "gr-cv";  // gr-cv | in-cv | grid
  double t0 = 1.0;
  double sigma = 0.01;
  double tmin = 1e-8;
  double tol = 1e-4;
  std::vector<double> grid;  // empty = standard nine values
  bool rescale = true;       // T/(T-1) post-processing for gr-cv / in-cv
  bool grid_rescale = false; // ablation: apply the same rescale to grid search
  bool scale_features = false;
  std::string out_path;      // empty = stdout
  std::string format = "csv";  // csv | json
};

int cmd_run(const RunConfig& cfg);
int cmd_sweep_folds(const RunConfig& cfg, const std::vector<int>& T_list);

struct DiagnoseConfig {
  std::string data_path;
  Index l1 = 0;
  Index l2 = 0;
  int T = 2;
  unsigned seed = 42;
  int samples = 100;
  bool scale_features = false;
  bool inject_corruption = false;  // test hook: forces a failing report
  std::string out_path;
};

int cmd_diagnose(const DiagnoseConfig& cfg);

}  // namespace grcv
