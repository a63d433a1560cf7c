#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grcv/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"SVC hyperparameter selection by relaxed cross-validation MPECs"};
  app.require_subcommand(1);

  grcv::RunConfig cfg;
  std::vector<int> t_list{2, 3, 4, 5};
  grcv::DiagnoseConfig diag;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--data", cfg.data_path, "LIBSVM-format data file")
        ->required()
        ->envname("GRCV_DATA");
    cmd->add_option("--l1", cfg.l1, "CV subset size (0 = 70% of the data)")->envname("GRCV_L1");
    cmd->add_option("--l2", cfg.l2, "hold-out test size (0 = remainder)")->envname("GRCV_L2");
    cmd->add_option("--seed", cfg.seed, "split/fold shuffle seed")->envname("GRCV_SEED");
    cmd->add_flag("--scale-features", cfg.scale_features,
                  "rescale every feature to [-1, 1] before splitting");
    cmd->add_option("--out", cfg.out_path, "report file (default: stdout)");
  };

  CLI::App* run = app.add_subcommand("run", "run one method and emit a summary row");
  add_common(run);
  run->add_option("--folds,-T", cfg.T, "fold count")->envname("GRCV_FOLDS");
  run->add_option("--method", cfg.method, "gr-cv | in-cv | grid")->envname("GRCV_METHOD");
  run->add_option("--t0", cfg.t0, "initial relaxation parameter");
  run->add_option("--sigma", cfg.sigma, "relaxation shrink factor");
  run->add_option("--tmin", cfg.tmin, "relaxation stopping threshold");
  run->add_option("--tol", cfg.tol, "fixed relaxation for in-cv");
  run->add_option("--grid", cfg.grid, "explicit grid of C values")->delimiter(',');
  run->add_flag("!--no-rescale", cfg.rescale, "skip the T/(T-1) rescale of C");
  run->add_flag("--grid-rescale", cfg.grid_rescale, "apply the rescale to grid search too");
  run->add_option("--format", cfg.format, "csv | json");

  CLI::App* sweep = app.add_subcommand("sweep-folds", "run all methods across fold counts");
  add_common(sweep);
  sweep->add_option("--T-list", t_list, "fold counts to sweep")->delimiter(',');
  sweep->add_option("--tol", cfg.tol, "fixed relaxation for in-cv");

  CLI::App* diagnose =
      app.add_subcommand("diagnose", "verify constraint-qualification and active-set theory "
                                     "on random feasible points");
  diagnose->add_option("--data", diag.data_path, "LIBSVM-format data file")
      ->required()
      ->envname("GRCV_DATA");
  diagnose->add_option("--l1", diag.l1, "CV subset size (0 = 70% of the data)");
  diagnose->add_option("--l2", diag.l2, "hold-out test size (0 = remainder)");
  diagnose->add_option("--folds,-T", diag.T, "fold count");
  diagnose->add_option("--seed", diag.seed, "shuffle seed");
  diagnose->add_option("--samples", diag.samples, "number of random feasible points");
  diagnose->add_flag("--scale-features", diag.scale_features, "rescale features first");
  diagnose->add_option("--out", diag.out_path, "report file (default: stdout)");
  diagnose->add_flag("--self-test-corrupt", diag.inject_corruption)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : grcv::kExitConfigError;
  }

  if (run->parsed()) return grcv::cmd_run(cfg);
  if (sweep->parsed()) return grcv::cmd_sweep_folds(cfg, t_list);
  return grcv::cmd_diagnose(diag);
}
