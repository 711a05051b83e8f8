#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>

#include "tracesift/tracesift.hpp"

namespace fs = std::filesystem;

namespace {

tsift::synthetic_params small_params() {
  tsift::synthetic_params p;
  p.base_cycle_length = 12;
  p.alphabet_size = 24;
  p.trace_length = 120;
  p.n_normal = 25;
  p.n_abnormal = 12;
  p.noise_rate = 0.02;
  p.injection_rate = 0.25;
  return p;
}

tsift::pipeline_config small_config(std::size_t jobs) {
  tsift::pipeline_config cfg;
  cfg.n_max = 5;
  cfg.nu_grid = {0.2, 0.05};
  cfg.jobs = jobs;
  return cfg;
}

fs::path scratch_dir() {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("tracesift_pipe_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("the full pipeline produces a coherent result") {
  auto corpus = tsift::generate_synthetic(small_params(), 11);
  auto cfg = small_config(1);
  auto result = tsift::run_pipeline(corpus, cfg);

  REQUIRE(result.n_train == 25);
  REQUIRE(result.n_eval_normal == 25);
  REQUIRE(result.n_eval_abnormal == 12);
  REQUIRE_FALSE(result.validation_split_used);

  REQUIRE(result.probe.ks == std::vector<std::size_t>{1, 2, 3, 4, 5});
  REQUIRE(result.probe.nus == std::vector<double>{0.2, 0.05});
  REQUIRE(result.probe.cells.size() == 10);
  for (const auto& cell : result.probe.cells) REQUIRE(cell.ok);

  REQUIRE(result.deltas.size() == 4);
  REQUIRE(result.kmax.chosen_nu == 0.05);
  REQUIRE(result.kmax.k_max >= 2);
  REQUIRE(result.kmax.k_max <= 5);

  // combos cover every subset of {1..k_max} with >= 2 elements, per nu
  const std::size_t subsets = (std::size_t(1) << result.kmax.k_max) - result.kmax.k_max - 1;
  REQUIRE(result.combos.size() == subsets * 2);

  // ranked is a permutation of the combo indices
  auto ranked = result.ranked;
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::size_t> iota(result.combos.size());
  std::iota(iota.begin(), iota.end(), 0);
  REQUIRE(ranked == iota);

  const auto& win = result.combos[result.selection.winner];
  REQUIRE(win.ok);
  REQUIRE(win.f1 >= result.selection.best_f1 - cfg.epsilon);
  REQUIRE_FALSE(result.selection.shortlist.empty());
  REQUIRE(result.final_model.dim == win.ks.size());
  REQUIRE(result.family.size() == cfg.n_max);

  const std::string report = tsift::render_report(result);
  const char* sections[] = {"== probe grid ==", "== delta table ==", "== kmax ==",
                            "== combinations ==", "== shortlist ==", "== winner =="};
  std::size_t last = 0;
  for (const char* section : sections) {
    auto pos = report.find(section, last);
    REQUIRE(pos != std::string::npos);
    last = pos;
  }
}

TEST_CASE("reports are byte-identical at any parallelism") {
  auto corpus = tsift::generate_synthetic(small_params(), 29);
  auto serial = tsift::run_pipeline(corpus, small_config(1));
  auto threaded = tsift::run_pipeline(corpus, small_config(4));

  REQUIRE(tsift::render_report(serial) == tsift::render_report(threaded));
  REQUIRE(tsift::render_probe_tsv(serial.probe) == tsift::render_probe_tsv(threaded.probe));
  REQUIRE(tsift::render_combinations_tsv(serial) == tsift::render_combinations_tsv(threaded));
  REQUIRE(tsift::serialize_model(serial.final_model) ==
          tsift::serialize_model(threaded.final_model));
}

TEST_CASE("validation split holds out part of the training normals") {
  auto params = small_params();
  params.n_normal = 30;
  auto corpus = tsift::generate_synthetic(params, 3);
  auto cfg = small_config(2);
  cfg.validation_split = true;
  cfg.train_fraction = 0.7;

  auto result = tsift::run_pipeline(corpus, cfg);
  REQUIRE(result.validation_split_used);
  REQUIRE(result.n_train == 21);
  REQUIRE(result.n_eval_normal == 9);
  REQUIRE(result.n_eval_abnormal == 12);
}

// --- command-line runs ------------------------------------------------------

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TRACESIFT_BIN) + " " + args;
  int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

const char* spec_text =
    "# compact corpus for command-line runs\n"
    "base_cycle_length = 12\n"
    "alphabet_size = 24\n"
    "trace_length = 120\n"
    "n_normal = 25\n"
    "n_abnormal = 12\n"
    "noise_rate = 0.02\n"
    "injection_rate = 0.25\n"
    "seed = 7\n";

} // namespace

TEST_CASE("cli: help and usage errors") {
  REQUIRE(run_cli("--help > /dev/null 2>&1") == 0);
  REQUIRE(run_cli("> /dev/null 2>&1") == 2);          // a subcommand is required
  REQUIRE(run_cli("stats > /dev/null 2>&1") == 2);    // no corpus given
  REQUIRE(run_cli("frobnicate > /dev/null 2>&1") == 2);
}

TEST_CASE("cli: stats, train, predict round trip") {
  const fs::path dir = scratch_dir();
  const fs::path spec = dir / "spec.txt";
  std::ofstream(spec) << spec_text;

  REQUIRE(run_cli("stats --synthetic \"" + spec.string() + "\" > /dev/null") == 0);

  const fs::path out = dir / "out";
  REQUIRE(run_cli("train --synthetic \"" + spec.string() + "\" --out \"" + out.string() +
                  "\" --ks 2,3 --nu 0.05 > /dev/null") == 0);
  REQUIRE(fs::exists(out / "model.txt"));
  REQUIRE(fs::exists(out / "clusters_k2.txt"));
  REQUIRE(fs::exists(out / "clusters_k3.txt"));

  // pick a held-out normal the saved model actually accepts, going through
  // the very files the command-line run will read
  auto model = tsift::load_model(out / "model.txt");
  tsift::cluster_family family;
  family.emplace(2, tsift::load_cluster(out / "clusters_k2.txt"));
  family.emplace(3, tsift::load_cluster(out / "clusters_k3.txt"));
  auto spec_corpus = tsift::generate_synthetic(tsift::parse_synthetic_spec(spec_text).params, 7);
  const tsift::syscall_trace* accepted = nullptr;
  for (const auto& trace : spec_corpus.test_normals) {
    auto row = tsift::featurize(trace, family, {2, 3});
    if (tsift::decision_value(model, row.values) >= 0.0) {
      accepted = &trace;
      break;
    }
  }
  REQUIRE(accepted != nullptr);
  const fs::path normal_file = dir / "normal.txt";
  std::ofstream(normal_file) << tsift::serialize_trace(*accepted) << '\n';

  tsift::syscall_trace foreign;
  foreign.syscalls.assign(120, 500); // ids the generator never emits
  const fs::path abnormal_file = dir / "abnormal.txt";
  std::ofstream(abnormal_file) << tsift::serialize_trace(foreign) << '\n';

  const std::string model_args = "--model \"" + (out / "model.txt").string() + "\" --clusters \"" +
                                 (out / "clusters_k2.txt").string() + "\" --clusters \"" +
                                 (out / "clusters_k3.txt").string() + "\"";

  const fs::path verdicts = dir / "verdicts.txt";
  REQUIRE(run_cli("predict " + model_args + " \"" + normal_file.string() + "\" > \"" +
                  verdicts.string() + "\"") == 0);
  {
    std::string line = slurp(verdicts);
    auto cols = tsift::tokenize(line);
    REQUIRE(cols.size() == 3);
    REQUIRE(cols[0] == normal_file.string());
    REQUIRE(cols[1] == "+1");
  }

  REQUIRE(run_cli("predict " + model_args + " \"" + abnormal_file.string() + "\" \"" +
                  normal_file.string() + "\" > \"" + verdicts.string() + "\"") == 1);
  {
    const std::string text = slurp(verdicts);
    auto lines = tsift::split(text, '\n');
    REQUIRE(lines.size() >= 2);
    auto abnormal_cols = tsift::tokenize(lines[0]);
    REQUIRE(abnormal_cols[1] == "-1");
    REQUIRE(tsift::tokenize(lines[1])[1] == "+1");
  }

  REQUIRE(run_cli("eval --synthetic \"" + spec.string() + "\" " + model_args + " > /dev/null") == 0);
  REQUIRE(run_cli("kfold --synthetic \"" + spec.string() +
                  "\" --ks 2 --nu 0.2 --folds 3 > /dev/null") == 0);
}

TEST_CASE("cli: select writes the report bundle") {
  const fs::path dir = scratch_dir();
  const fs::path spec = dir / "spec.txt";
  std::ofstream(spec) << spec_text;
  const fs::path out = dir / "out";

  REQUIRE(run_cli("select --synthetic \"" + spec.string() + "\" --out \"" + out.string() +
                  "\" --kmax-probe 4 --nu-grid 0.2,0.05 --jobs 2 > /dev/null") == 0);
  REQUIRE(fs::exists(out / "probe.tsv"));
  REQUIRE(fs::exists(out / "combinations.tsv"));
  REQUIRE(fs::exists(out / "model.txt"));

  const std::string report = slurp(out / "report.txt");
  REQUIRE(report.find("== winner ==") != std::string::npos);
  REQUIRE(report.find("ks=") != std::string::npos);

  const std::string probe = slurp(out / "probe.tsv");
  REQUIRE(probe.rfind("k\tnu\tfar\tdr\tf1\n", 0) == 0);

  REQUIRE(run_cli("select --synthetic \"" + spec.string() + "\" --out \"" + out.string() +
                  "\" --nu-grid 0.2,oops > /dev/null 2>&1") == 2);
}

TEST_CASE("cli: roc and feature export") {
  const fs::path dir = scratch_dir();
  const fs::path spec = dir / "spec.txt";
  std::ofstream(spec) << spec_text;
  const fs::path out = dir / "out";

  REQUIRE(run_cli("roc --synthetic \"" + spec.string() + "\" --out \"" + out.string() +
                  "\" --ks 2,3 --nu 0.05 > /dev/null") == 0);
  const std::string roc = slurp(out / "roc.tsv");
  REQUIRE(roc.rfind("threshold\tfar\tdr\n", 0) == 0);

  REQUIRE(run_cli("roc --synthetic \"" + spec.string() + "\" --out \"" + out.string() +
                  "\" --ks 2 --nu-sweep --nu-grid 0.2,0.1 > /dev/null") == 0);
  REQUIRE(slurp(out / "nu_sweep.tsv").rfind("nu\tfar\tdr\n", 0) == 0);

  REQUIRE(run_cli("export-features --synthetic \"" + spec.string() + "\" --out \"" + out.string() +
                  "\" --ks 1,2 > /dev/null") == 0);
  const std::string train_rows = slurp(out / "features_train.txt");
  REQUIRE(train_rows.rfind("+1 1:", 0) == 0);
  const std::string test_rows = slurp(out / "features_test.txt");
  REQUIRE(test_rows.find("-1 1:") != std::string::npos);
}
