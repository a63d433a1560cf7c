#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "grcv/cli.hpp"
#include "grcv/dataset.hpp"
#include "grcv/report.hpp"
#include "support.hpp"

using namespace grcv;

namespace {

std::string write_temp_dataset(const Dataset& ds, const std::string& name) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << to_libsvm(ds);
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("summary rows format like the comparison table") {
  SummaryRow row{"heart", "GR-CV", 0.0988, 0.1746, 1.51e-6, 5, 24165};
  std::string csv = rows_to_csv({row});
  CHECK(csv == "Dataset,Method,E_t(%),E_C(%),Vio,k,it\n"
               "heart,GR-CV,9.88,17.46,1.51e-06,5,24165\n");

  SummaryRow grid{"heart", "G-S", 0.1358, 0.1746, std::nullopt, 27, 425};
  CHECK(rows_to_csv({grid}).find("13.58,17.46,-,27,425") != std::string::npos);

  SummaryRow undefined{"x", "GR-CV", std::numeric_limits<double>::quiet_NaN(), 0.5,
                       std::nullopt, 1, 2};
  CHECK(rows_to_csv({undefined}).find("x,GR-CV,-,50.00,-,1,2") != std::string::npos);

  std::string json = rows_to_json({row});
  CHECK(json.find("\"E_t\": 0.0988") != std::string::npos);
}

TEST_CASE("cmd_run grid produces the 27-training row") {
  Dataset ds = testing::make_blobs(15, 2, 1.5, 40);
  RunConfig cfg;
  cfg.data_path = write_temp_dataset(ds, "grcv_cli_grid.libsvm");
  cfg.l1 = 24;
  cfg.l2 = 6;
  cfg.T = 3;
  cfg.method = "grid";
  cfg.out_path = (std::filesystem::temp_directory_path() / "grcv_grid.csv").string();
  REQUIRE(cmd_run(cfg) == kExitOk);
  std::string csv = slurp(cfg.out_path);
  CHECK(csv.find(",G-S,") != std::string::npos);
  CHECK(csv.find(",27,") != std::string::npos);
  CHECK(csv.find("grcv_cli_grid,") != std::string::npos);  // dataset stem
}

TEST_CASE("cmd_run validates configuration") {
  Dataset ds = testing::make_blobs(8, 2, 1.5, 41);
  RunConfig cfg;
  cfg.data_path = write_temp_dataset(ds, "grcv_cli_val.libsvm");
  cfg.T = 1;
  CHECK(cmd_run(cfg) == kExitConfigError);

  cfg.T = 2;
  cfg.method = "nonsense";
  CHECK(cmd_run(cfg) == kExitConfigError);

  cfg.method = "grid";
  cfg.format = "yaml";
  CHECK(cmd_run(cfg) == kExitConfigError);

  cfg.format = "csv";
  cfg.data_path = "/nonexistent/file.libsvm";
  CHECK(cmd_run(cfg) == kExitConfigError);
}

TEST_CASE("identical config and seed give byte-identical reports") {
  Dataset ds = testing::make_blobs(10, 2, 1.2, 42);
  RunConfig cfg;
  cfg.data_path = write_temp_dataset(ds, "grcv_cli_det.libsvm");
  cfg.l1 = 16;
  cfg.l2 = 4;
  cfg.T = 2;
  cfg.seed = 7;
  cfg.method = "gr-cv";
  auto out1 = std::filesystem::temp_directory_path() / "grcv_det1.csv";
  auto out2 = std::filesystem::temp_directory_path() / "grcv_det2.csv";
  cfg.out_path = out1.string();
  REQUIRE(cmd_run(cfg) == kExitOk);
  cfg.out_path = out2.string();
  REQUIRE(cmd_run(cfg) == kExitOk);
  CHECK(slurp(out1.string()) == slurp(out2.string()));
  CHECK(!slurp(out1.string()).empty());
}

TEST_CASE("json format embeds the relaxation trace") {
  Dataset ds = testing::make_blobs(10, 2, 1.2, 43);
  RunConfig cfg;
  cfg.data_path = write_temp_dataset(ds, "grcv_cli_json.libsvm");
  cfg.l1 = 16;
  cfg.l2 = 4;
  cfg.T = 2;
  cfg.method = "gr-cv";
  cfg.format = "json";
  cfg.out_path = (std::filesystem::temp_directory_path() / "grcv_json.json").string();
  REQUIRE(cmd_run(cfg) == kExitOk);
  std::string json = slurp(cfg.out_path);
  CHECK(json.find("\"trace\"") != std::string::npos);
  CHECK(json.find("\"stages\"") != std::string::npos);
}

TEST_CASE("sweep-folds emits one row per fold count and method") {
  Dataset ds = testing::make_separable(12, 2, 44);
  RunConfig cfg;
  cfg.data_path = write_temp_dataset(ds, "grcv_cli_sweep.libsvm");
  cfg.l1 = 18;
  cfg.l2 = 6;
  cfg.out_path = (std::filesystem::temp_directory_path() / "grcv_sweep.csv").string();
  REQUIRE(cmd_sweep_folds(cfg, {2, 3}) == kExitOk);
  std::string csv = slurp(cfg.out_path);
  // header + 2 fold counts x 3 methods
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(csv.find("2,GR-CV") != std::string::npos);
  CHECK(csv.find("3,G-S") != std::string::npos);
  // separable data: E_t = 0 for every method and fold count
  CHECK(csv.find(",0.00,") != std::string::npos);
}

TEST_CASE("diagnose passes on sound data and honors the corruption hook") {
  Dataset ds = testing::make_blobs(10, 2, 1.5, 45);
  DiagnoseConfig cfg;
  cfg.data_path = write_temp_dataset(ds, "grcv_cli_diag.libsvm");
  cfg.l1 = 20;
  cfg.l2 = 0;
  cfg.T = 2;
  cfg.samples = 10;
  cfg.out_path = (std::filesystem::temp_directory_path() / "grcv_diag.json").string();
  REQUIRE(cmd_diagnose(cfg) == kExitOk);
  std::string json = slurp(cfg.out_path);
  CHECK(json.find("\"independent\": 10") != std::string::npos);
  CHECK(json.find("\"ok\": true") != std::string::npos);

  cfg.inject_corruption = true;
  CHECK(cmd_diagnose(cfg) == kExitSolverFailure);
}
