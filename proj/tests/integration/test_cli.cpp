// End-to-end checks of the command-line surface: runs the built binary
// against generated data and inspects artifacts and exit codes.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string g_cli;
int g_failures = 0;

void check(bool ok, const std::string& what) {
  if (ok) {
    std::cout << "[ok] " << what << "\n";
  } else {
    std::cout << "[FAIL] " << what << "\n";
    ++g_failures;
  }
}

int run(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " >/dev/null 2>cli_stderr_tmp.txt";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: fgnam_cli_tests <path-to-fgnam-binary>\n";
    return 2;
  }
  g_cli = argv[1];
  fs::remove_all("cli_work");
  fs::create_directories("cli_work");

  write_file("cli_work/schema.cfg",
             "time_col = time\nevent_col = event\nnum_risks = 2\n");
  write_file("cli_work/train.cfg",
             "[train]\nmax_epochs = 8\npatience = 4\nwidths = 8,8\nbatch_size = 128\n"
             "[cv]\nmax_epochs = 6\npatience = 3\nwidths = 8\nbatch_size = 128\n");

  check(run("simulate --out cli_work --seed 4 --config cli_work/sim.cfg") == 2,
        "simulate with a missing config file exits 2");

  write_file("cli_work/sim.cfg", "[simulate]\nn = 500\ncensoring_rate = 0.2\n");
  check(run("simulate --out cli_work --seed 4 --config cli_work/sim.cfg") == 0, "simulate runs");
  check(fs::exists("cli_work/synth_data.csv"), "simulate writes the dataset CSV");
  check(fs::exists("cli_work/synth_truth.csv"), "simulate writes the ground-truth CSV");
  {
    std::string truth = slurp("cli_work/synth_truth.csv");
    check(truth.rfind("subject,true_eta1,true_eta2\n", 0) == 0, "truth CSV header");
    check(std::count(truth.begin(), truth.end(), '\n') == 501, "truth CSV row count");
  }

  check(run("simulate --out cli_work2 --seed 4 --config cli_work/sim.cfg") == 0,
        "second simulate runs");
  check(slurp("cli_work/synth_data.csv") == slurp("cli_work2/synth_data.csv"),
        "simulate output is seed-deterministic");

  check(run("train --data cli_work/synth_data.csv --schema cli_work/missing.cfg "
            "--out cli_work/model") == 2,
        "train with missing schema exits 2");

  check(run("train --data cli_work/synth_data.csv --schema cli_work/schema.cfg "
            "--config cli_work/train.cfg --out cli_work/model --seed 11") == 0,
        "train runs");
  check(fs::exists("cli_work/model/checkpoint.json"), "train writes the checkpoint");
  check(fs::exists("cli_work/model/baseline.csv"), "train writes the baseline CSV");
  check(fs::exists("cli_work/model/train_report.json"), "train writes the report");
  {
    int artifacts = 0;
    for (const auto& entry : fs::directory_iterator("cli_work/model")) {
      (void)entry;
      ++artifacts;
    }
    check(artifacts == 3, "train writes exactly three artifacts");
  }

  check(run("train --data cli_work/synth_data.csv --schema cli_work/schema.cfg "
            "--config cli_work/train.cfg --out cli_work/model_b --seed 11") == 0,
        "train reruns");
  check(slurp("cli_work/model/checkpoint.json") == slurp("cli_work/model_b/checkpoint.json"),
        "checkpoints are byte-identical across identical runs");

  check(run("predict --checkpoint cli_work/model/checkpoint.json "
            "--data cli_work/synth_data.csv --times 0.2,0.5,1.0 --out cli_work/pred") == 0,
        "predict runs");
  {
    std::string cif = slurp("cli_work/pred/cif.csv");
    check(cif.rfind("subject_id,cause,time,cif,extrapolated\n", 0) == 0, "cif CSV header");
    check(std::count(cif.begin(), cif.end(), '\n') == 1 + 500 * 2 * 3, "cif CSV row count");
  }

  check(run("predict --checkpoint cli_work/model/checkpoint.json "
            "--data cli_work/schema.cfg --times 1 --out cli_work/predx") != 0,
        "predict on a non-CSV input fails");

  check(run("evaluate --checkpoint cli_work/model/checkpoint.json "
            "--data cli_work/synth_data.csv --schema cli_work/schema.cfg "
            "--out cli_work/eval") == 0,
        "evaluate runs");
  {
    std::string metrics = slurp("cli_work/eval/metrics.csv");
    check(metrics.rfind("cause,horizon,horizon_time,metric,value,n\n", 0) == 0,
          "metrics CSV header");
    check(std::count(metrics.begin(), metrics.end(), '\n') == 1 + 2 * 3 * 3,
          "metrics CSV covers 2 causes x 3 horizons x 3 metrics");
  }

  check(run("explain --checkpoint cli_work/model/checkpoint.json "
            "--data cli_work/synth_data.csv --out cli_work/exp --grid-size 40 --seed 3") == 0,
        "explain runs");
  check(fs::exists("cli_work/exp/shape.csv"), "explain writes shape CSV");
  check(fs::exists("cli_work/exp/importance.csv"), "explain writes importance CSV");
  check(fs::exists("cli_work/exp/shapes_risk1.svg") && fs::exists("cli_work/exp/shapes_risk2.svg"),
        "explain writes shape SVGs per risk");
  check(fs::exists("cli_work/exp/importance_risk1.svg") &&
            fs::exists("cli_work/exp/importance_risk2.svg"),
        "explain writes importance SVGs per risk");
  {
    // p = 3 features, K = 2 risks -> importance has p*K rows
    std::string imp = slurp("cli_work/exp/importance.csv");
    check(std::count(imp.begin(), imp.end(), '\n') == 1 + 3 * 2, "importance CSV row count");
  }

  check(run("explain --checkpoint cli_work/model/checkpoint.json "
            "--data cli_work/synth_data.csv --out cli_work/exp_b --grid-size 40 --seed 3") == 0,
        "explain reruns");
  check(slurp("cli_work/exp/shapes_risk1.svg") == slurp("cli_work/exp_b/shapes_risk1.svg"),
        "shape SVG bytes are deterministic");

  check(run("cv --data cli_work/synth_data.csv --schema cli_work/schema.cfg "
            "--config cli_work/train.cfg --out cli_work/cv --folds 3 --seed 21") == 0,
        "cv runs");
  check(fs::exists("cli_work/cv/cv_folds.csv"), "cv writes per-fold metrics");
  check(fs::exists("cli_work/cv/cv_aggregate.csv"), "cv writes the aggregate");
  check(fs::exists("cli_work/cv/cv_fold_assignments.csv"), "cv exports fold assignments");
  {
    std::string agg = slurp("cli_work/cv/cv_aggregate.csv");
    check(std::count(agg.begin(), agg.end(), '\n') == 1 + 2 * 3 * 3,
          "aggregate has one row per cause, horizon and metric");
    std::string assign = slurp("cli_work/cv/cv_fold_assignments.csv");
    check(std::count(assign.begin(), assign.end(), '\n') == 501, "assignment covers every row");
  }

  check(run("cv --data cli_work/synth_data.csv --schema cli_work/schema.cfg "
            "--config cli_work/train.cfg --out cli_work/cv_b --folds 3 --seed 21") == 0,
        "cv reruns");
  check(slurp("cli_work/cv/cv_folds.csv") == slurp("cli_work/cv_b/cv_folds.csv"),
        "cv fold metrics are byte-identical across identical runs");

  check(run("nonsense") == 2, "unknown subcommand exits 2");
  check(run("train") == 2, "train without inputs exits 2");

  // inputs are never mutated
  check(slurp("cli_work/synth_data.csv") == slurp("cli_work2/synth_data.csv"),
        "input files stay untouched");

  fs::remove_all("cli_work");
  fs::remove_all("cli_work2");
  fs::remove("cli_stderr_tmp.txt");

  if (g_failures) {
    std::cout << g_failures << " cli checks failed\n";
    return 1;
  }
  std::cout << "all cli checks passed\n";
  return 0;
}
