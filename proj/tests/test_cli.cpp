#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "karst/data.hpp"
#include "karst/mlp.hpp"
#include "karst/model_io.hpp"
#include "karst/rng.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace karst;

#ifndef KARST_CLI_BIN
#error "KARST_CLI_BIN must point at the built karst binary"
#endif

namespace {

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "karst_cli_tests";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(KARST_CLI_BIN) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("generate writes the CSV and a manifest first") {
  fs::path dir = work_dir();
  fs::path csv = dir / "gen.csv";
  CHECK(run_cli("generate --months 48 --seed 7 --out " + csv.string()) == 0);
  REQUIRE(fs::exists(csv));
  CHECK(fs::exists(dir / "gen.csv.manifest.json"));

  TimeSeriesTable t = load_csv(csv);
  CHECK(t.rows() == 48);

  SUBCASE("same seed reruns are byte identical") {
    fs::path csv2 = dir / "gen2.csv";
    CHECK(run_cli("generate --months 48 --seed 7 --out " + csv2.string()) == 0);
    CHECK(slurp(csv) == slurp(csv2));
  }
  SUBCASE("invalid spec exits 1") {
    CHECK(run_cli("generate --months 5 --out " + (dir / "bad.csv").string()) == 1);
  }
  SUBCASE("unknown flag exits 1") {
    CHECK(run_cli("generate --frobnicate --out x.csv") == 1);
  }
}

TEST_CASE("train then evaluate a saved model") {
  fs::path dir = work_dir();
  fs::path csv = dir / "data.csv";
  REQUIRE(run_cli("generate --months 72 --seed 3 --out " + csv.string()) == 0);

  fs::path run = dir / "train_run";
  fs::remove_all(run);
  CHECK(run_cli("train --method mlp --hidden 4 --epochs 3 --data " +
                csv.string() + " --train-len 50 --out " + run.string()) == 0);
  CHECK(fs::exists(run / "manifest.json"));
  CHECK(fs::exists(run / "model.txt"));
  CHECK(fs::exists(run / "history.csv"));
  CHECK(fs::exists(run / "eval.json"));

  // history rows = epochs + header
  std::ifstream hist(run / "history.csv");
  int lines = 0;
  std::string line;
  while (std::getline(hist, line)) ++lines;
  CHECK(lines == 4);

  fs::path eval_run = dir / "eval_run";
  fs::remove_all(eval_run);
  CHECK(run_cli("evaluate --model " + (run / "model.txt").string() +
                " --data " + csv.string() + " --train-len 50 --out " +
                eval_run.string()) == 0);
  CHECK(fs::exists(eval_run / "eval.csv"));

  SUBCASE("a never-trained model file is rejected with exit 1") {
    RngStream rng(1);
    MlpModel fresh = MlpModel::init(10, 4, rng);  // trained stays false
    fs::path untrained = dir / "untrained.txt";
    save_model(fresh, untrained);
    CHECK(run_cli("evaluate --model " + untrained.string() + " --data " +
                  csv.string() + " --train-len 50 --out " +
                  (dir / "eval_untrained").string()) == 1);
  }
  SUBCASE("missing model file exits 1") {
    CHECK(run_cli("evaluate --model /no/such/model.txt --data " + csv.string() +
                  " --train-len 50 --out " + (dir / "eval_miss").string()) == 1);
  }
}

TEST_CASE("svr training failure surfaces as exit 2") {
  fs::path dir = work_dir();
  fs::path csv = dir / "data2.csv";
  REQUIRE(run_cli("generate --months 72 --seed 4 --out " + csv.string()) == 0);
  CHECK(run_cli("train --method svr --max-passes 1 --svr-tol 1e-14 --data " +
                csv.string() + " --train-len 50 --out " +
                (dir / "svr_fail").string()) == 2);
}

TEST_CASE("sweep from a synthetic config produces reports and a manifest") {
  fs::path dir = work_dir();
  fs::path cfg = dir / "synth.toml";
  {
    std::ofstream out(cfg);
    out << "# tiny dataset\n";
    out << "months = 60\n";
    out << "seed = 9\n";
  }
  fs::path run1 = dir / "sweep1";
  fs::path run2 = dir / "sweep2";
  fs::remove_all(run1);
  fs::remove_all(run2);

  std::string args = "sweep --method mlp --hidden 4,8 --epochs 4 --data " +
                     cfg.string() + " --train-len 40 --seed 7 --out ";
  CHECK(run_cli(args + run1.string()) == 0);
  CHECK(fs::exists(run1 / "manifest.json"));
  CHECK(fs::exists(run1 / "report.csv"));
  CHECK(fs::exists(run1 / "report.json"));
  CHECK(fs::exists(run1 / "report.md"));

  SUBCASE("reruns are byte identical") {
    CHECK(run_cli(args + run2.string()) == 0);
    CHECK(slurp(run1 / "report.csv") == slurp(run2 / "report.csv"));
    CHECK(slurp(run1 / "report.json") == slurp(run2 / "report.json"));
  }
  SUBCASE("report re-export and comparison") {
    CHECK(run_cli("report --table " + (run1 / "report.json").string() +
                  " --format markdown --out " + (dir / "t.md").string()) == 0);
    CHECK(slurp(dir / "t.md").find("| Structure |") == 0);

    fs::path svr_run = dir / "sweep_svr";
    fs::remove_all(svr_run);
    CHECK(run_cli("sweep --method svr --data " + cfg.string() +
                  " --train-len 40 --out " + svr_run.string()) == 0);
    CHECK(run_cli("report --compare " + (run1 / "report.json").string() + "," +
                  (svr_run / "report.json").string() + " --out " +
                  (dir / "cmp.txt").string()) == 0);
    CHECK(slurp(dir / "cmp.txt").find("ranking") != std::string::npos);
  }
  SUBCASE("plot data from a trained model") {
    fs::path train_run = dir / "plot_train";
    fs::remove_all(train_run);
    REQUIRE(run_cli("train --method mlp --hidden 4 --epochs 3 --data " +
                    cfg.string() + " --train-len 40 --out " +
                    train_run.string()) == 0);
    fs::path plot_run = dir / "plot_out";
    fs::remove_all(plot_run);
    CHECK(run_cli("report --plot-data --model " +
                  (train_run / "model.txt").string() + " --data " +
                  cfg.string() + " --train-len 40 --split test --out " +
                  plot_run.string()) == 0);
    CHECK(fs::exists(plot_run / "test_hydrograph.csv"));
    CHECK(fs::exists(plot_run / "test_scatter.csv"));
    CHECK(fs::exists(plot_run / "manifest.json"));
  }
}
