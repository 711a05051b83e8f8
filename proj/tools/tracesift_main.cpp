// Command-line front end for the trace anomaly toolkit. Exit codes: 0 on
// success (and when `predict` finds nothing), 1 when `predict` flags at least
// one trace, 2 for usage or data errors.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tracesift/tracesift.hpp"

namespace fs = std::filesystem;

namespace {

struct common_opts {
  std::string root;
  std::string synthetic_file;
  std::string config_file;
  std::string out_dir = "out";
  tsift::corpus_layout layout;
};

void add_corpus_opts(CLI::App* sub, common_opts& opts) {
  sub->add_option("--root", opts.root, "corpus root holding the three trace directories");
  sub->add_option("--synthetic", opts.synthetic_file,
                  "generate the corpus from a synthetic spec file instead of --root");
  sub->add_option("--training-dir", opts.layout.training_dir, "training subdirectory name");
  sub->add_option("--validation-dir", opts.layout.validation_dir, "validation subdirectory name");
  sub->add_option("--attack-dir", opts.layout.attack_dir, "attack subdirectory name");
  sub->add_option("--alphabet-bound", opts.layout.alphabet_bound, "largest accepted syscall id");
}

void add_out_opt(CLI::App* sub, common_opts& opts) {
  sub->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
}

tsift::trace_corpus acquire_corpus(const common_opts& opts) {
  if (!opts.synthetic_file.empty() && !opts.root.empty())
    throw tsift::error(tsift::errc::invalid_params, "--root and --synthetic are mutually exclusive");
  if (!opts.synthetic_file.empty()) return tsift::load_synthetic(opts.synthetic_file);
  if (opts.root.empty())
    throw tsift::error(tsift::errc::invalid_params, "either --root or --synthetic is required");
  return tsift::load_corpus(opts.root, opts.layout);
}

struct pipeline_opts {
  tsift::pipeline_config cfg;
  std::string nu_grid_text;
};

void add_pipeline_opts(CLI::App* sub, pipeline_opts& p) {
  sub->add_option("--kmax-probe", p.cfg.n_max, "largest window length probed")->capture_default_str();
  sub->add_option("--nu-grid", p.nu_grid_text, "comma-separated nu values (default 0.5,0.2,0.1,0.05,0.01)");
  sub->add_option("--gamma", p.cfg.gamma, "kernel width; 0 means 1/dim");
  sub->add_option("--epsilon", p.cfg.epsilon, "shortlist slack below the best F1")->capture_default_str();
  sub->add_option("--kkt-tolerance", p.cfg.kkt_tolerance, "solver stopping tolerance")->capture_default_str();
  sub->add_option("--max-iterations", p.cfg.max_iterations, "solver iteration budget");
  sub->add_flag("--validation-split", p.cfg.validation_split,
                "tune on a held-out slice of the training normals instead of the test normals");
  sub->add_option("--train-fraction", p.cfg.train_fraction, "training share under --validation-split")
      ->capture_default_str();
  sub->add_option("--seed", p.cfg.seed, "seed for any randomized step")->capture_default_str();
  sub->add_option("--jobs", p.cfg.jobs, "worker threads")->capture_default_str();
}

// Flags beat the config file; the file beats built-in defaults. Subcommands
// without pipeline options simply keep the defaults.
void finalize_config(CLI::App* sub, pipeline_opts& p, const std::string& config_file) {
  auto given = [sub](const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (!config_file.empty()) {
    tsift::pipeline_config file_cfg;
    tsift::apply_config_file(file_cfg, config_file);
    if (!given("--kmax-probe")) p.cfg.n_max = file_cfg.n_max;
    if (!given("--nu-grid")) p.cfg.nu_grid = file_cfg.nu_grid;
    if (!given("--gamma")) p.cfg.gamma = file_cfg.gamma;
    if (!given("--epsilon")) p.cfg.epsilon = file_cfg.epsilon;
    if (!given("--kkt-tolerance")) p.cfg.kkt_tolerance = file_cfg.kkt_tolerance;
    if (!given("--max-iterations")) p.cfg.max_iterations = file_cfg.max_iterations;
    if (!given("--validation-split")) p.cfg.validation_split = file_cfg.validation_split;
    if (!given("--train-fraction")) p.cfg.train_fraction = file_cfg.train_fraction;
    if (!given("--seed")) p.cfg.seed = file_cfg.seed;
    if (!given("--jobs")) p.cfg.jobs = file_cfg.jobs;
  }
  if (given("--nu-grid")) p.cfg.nu_grid = tsift::parse_nu_list(p.nu_grid_text);
}

std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> ks;
  for (auto piece : tsift::split(text, ',')) {
    piece = tsift::trim(piece);
    if (piece.empty()) continue;
    const long long v = tsift::parse_int(piece);
    if (v <= 0) throw tsift::error(tsift::errc::invalid_params, "window lengths must be positive");
    ks.push_back(static_cast<std::size_t>(v));
  }
  if (ks.empty()) throw tsift::error(tsift::errc::invalid_params, "--ks needs at least one window length");
  return ks;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tsift::error(tsift::errc::io_error, "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw tsift::error(tsift::errc::io_error, "failed writing " + path.string());
}

void print_set(const char* name, const tsift::set_stats& s) {
  std::cout << name << ": " << s.count << " traces, " << s.total_syscalls << " syscalls";
  if (auto mean = s.mean_length()) std::cout << ", mean length " << tsift::format_fixed(*mean, 1);
  std::cout << '\n';
}

tsift::ocsvm_params solver_params(const tsift::pipeline_config& cfg, double nu) {
  tsift::ocsvm_params params;
  params.nu = nu;
  params.gamma = cfg.gamma;
  params.kkt_tolerance = cfg.kkt_tolerance;
  params.max_iterations = cfg.max_iterations;
  return params;
}

tsift::cluster_family load_family(const std::vector<std::string>& cluster_files) {
  if (cluster_files.empty())
    throw tsift::error(tsift::errc::invalid_params, "at least one --clusters file is required");
  tsift::cluster_family family;
  for (const auto& file : cluster_files) {
    tsift::lk_cluster c = tsift::load_cluster(file);
    if (family.count(c.k()))
      throw tsift::error(tsift::errc::invalid_params,
                         "two cluster files share k=" + std::to_string(c.k()));
    family.emplace(c.k(), std::move(c));
  }
  return family;
}

std::vector<std::size_t> family_ks(const tsift::cluster_family& family) {
  std::vector<std::size_t> ks;
  for (const auto& [k, cluster] : family) ks.push_back(k);
  return ks;
}

int run_stats(const common_opts& opts) {
  const tsift::trace_corpus corpus = acquire_corpus(opts);
  const tsift::corpus_stats_report report = tsift::corpus_stats(corpus);
  print_set("training normals", report.training_normals);
  print_set("test normals", report.test_normals);
  print_set("test abnormals", report.test_abnormals);
  return 0;
}

int run_extract(const common_opts& opts, const std::vector<std::size_t>& ks, unsigned jobs) {
  const tsift::trace_corpus corpus = acquire_corpus(opts);
  fs::create_directories(opts.out_dir);
  std::vector<tsift::lk_cluster> clusters(ks.size());
  tsift::parallel_for(ks.size(), jobs, [&](std::size_t i) {
    clusters[i] = tsift::build_cluster(corpus.training_normals, ks[i]);
  });
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const fs::path path = fs::path(opts.out_dir) / ("clusters_k" + std::to_string(ks[i]) + ".txt");
    tsift::save_cluster(clusters[i], path);
    std::cout << "k=" << ks[i] << ": " << clusters[i].size() << " patterns -> " << path.string()
              << '\n';
  }
  return 0;
}

int run_probe(const common_opts& opts, const tsift::pipeline_config& cfg) {
  tsift::validate_config(cfg);
  const tsift::trace_corpus corpus = acquire_corpus(opts);
  if (corpus.training_normals.empty() || corpus.test_normals.empty() || corpus.test_abnormals.empty())
    throw tsift::error(tsift::errc::empty_class, "probing needs all three trace sets");

  std::vector<std::size_t> ks(cfg.n_max);
  for (std::size_t i = 0; i < cfg.n_max; ++i) ks[i] = i + 1;

  tsift::stopwatch clock;
  std::vector<tsift::lk_cluster> clusters(ks.size());
  tsift::parallel_for(ks.size(), cfg.jobs, [&](std::size_t i) {
    clusters[i] = tsift::build_cluster(corpus.training_normals, ks[i]);
  });
  std::vector<tsift::feature_column> train_cols(ks.size()), normal_cols(ks.size()),
      abnormal_cols(ks.size());
  tsift::parallel_for(ks.size() * 3, cfg.jobs, [&](std::size_t idx) {
    const std::size_t i = idx / 3;
    switch (idx % 3) {
      case 0: train_cols[i] = tsift::eval_column(clusters[i], corpus.training_normals); break;
      case 1: normal_cols[i] = tsift::eval_column(clusters[i], corpus.test_normals); break;
      default: abnormal_cols[i] = tsift::eval_column(clusters[i], corpus.test_abnormals); break;
    }
  });
  tsift::detail::eval_sets sets{&train_cols,
                                &normal_cols,
                                &abnormal_cols,
                                &corpus.training_normals,
                                &corpus.test_normals,
                                &corpus.test_abnormals};
  const tsift::probe_result grid = tsift::probe_single_clusters(sets, ks, cfg);

  fs::create_directories(opts.out_dir);
  const fs::path tsv = fs::path(opts.out_dir) / "probe.tsv";
  write_text(tsv, tsift::render_probe_tsv(grid));
  std::cout << "probe grid -> " << tsv.string() << '\n';

  const double chosen_nu = *std::min_element(cfg.nu_grid.begin(), cfg.nu_grid.end());
  const auto deltas = tsift::compute_deltas(grid, chosen_nu);
  const auto kmax = tsift::determine_kmax(deltas, cfg.n_max, chosen_nu);
  std::cout << "deltas at nu=" << tsift::format_double(chosen_nu) << " (percentage points):\n";
  for (const auto& row : deltas)
    std::cout << "  k=" << row.k << " ddr=" << tsift::format_percent(row.d_dr)
              << " dfar=" << tsift::format_percent(row.d_far)
              << " delta=" << tsift::format_percent(row.delta) << '\n';
  std::cout << "k_max=" << kmax.k_max
            << (kmax.no_negative_delta ? " (no degrading step; probe ceiling)" : "") << '\n';
  std::cout << "elapsed: " << tsift::format_fixed(clock.seconds(), 2) << "s\n";
  return 0;
}

int run_select(const common_opts& opts, const tsift::pipeline_config& cfg) {
  const tsift::trace_corpus corpus = acquire_corpus(opts);
  const tsift::pipeline_result result = tsift::run_pipeline(corpus, cfg);

  fs::create_directories(opts.out_dir);
  const fs::path out(opts.out_dir);
  write_text(out / "report.txt", tsift::render_report(result));
  write_text(out / "probe.tsv", tsift::render_probe_tsv(result.probe));
  write_text(out / "combinations.tsv", tsift::render_combinations_tsv(result));
  tsift::save_model(result.final_model, out / "model.txt");
  const tsift::combo_result& win = result.combos[result.selection.winner];
  for (std::size_t k : win.ks)
    tsift::save_cluster(result.family.at(k), out / ("clusters_k" + std::to_string(k) + ".txt"));

  std::cout << "winner: ks={" << tsift::join_ks(win.ks) << "} nu=" << tsift::format_double(win.nu)
            << " far=" << tsift::format_percent(win.far) << "% dr=" << tsift::format_percent(win.dr)
            << "% f1=" << tsift::format_fixed(win.f1, 4) << '\n';
  std::cout << "k_max=" << result.kmax.k_max << " combinations=" << result.combos.size()
            << " shortlist=" << result.selection.shortlist.size() << '\n';
  if (result.validation_split_used)
    std::cout << "tuned on a held-out split of the training normals\n";
  std::cout << "report -> " << (out / "report.txt").string() << '\n';
  std::cout << "timings: extract " << tsift::format_fixed(result.timings.extract_s, 2) << "s, probe "
            << tsift::format_fixed(result.timings.probe_s, 2) << "s, combinations "
            << tsift::format_fixed(result.timings.combos_s, 2) << "s, total "
            << tsift::format_fixed(result.timings.total_s, 2) << "s\n";
  return 0;
}

int run_train(const common_opts& opts, const tsift::pipeline_config& cfg,
              const std::vector<std::size_t>& ks, double nu) {
  const tsift::trace_corpus corpus = acquire_corpus(opts);
  const tsift::cluster_family family = tsift::build_family(corpus.training_normals, ks);
  const tsift::feature_matrix train =
      tsift::featurize_rows(corpus.training_normals, family, ks, +1, cfg.jobs);
  const tsift::ocsvm_model model = tsift::train_ocsvm(train, solver_params(cfg, nu));

  fs::create_directories(opts.out_dir);
  const fs::path out(opts.out_dir);
  tsift::save_model(model, out / "model.txt");
  for (std::size_t k : ks)
    tsift::save_cluster(family.at(k), out / ("clusters_k" + std::to_string(k) + ".txt"));

  std::cout << "trained on " << train.size() << " traces, dim=" << model.dim
            << ", support vectors=" << model.support_vectors.size()
            << ", rho=" << tsift::format_double(model.rho) << ", iterations=" << model.iterations
            << (model.converged ? "" : " (not converged)") << '\n';
  std::cout << "model -> " << (out / "model.txt").string() << '\n';
  return 0;
}

int run_predict(const std::string& model_file, const std::vector<std::string>& cluster_files,
                const std::vector<std::string>& trace_files, tsift::syscall_id alphabet_bound) {
  const tsift::ocsvm_model model = tsift::load_model(model_file);
  const tsift::cluster_family family = load_family(cluster_files);
  const std::vector<std::size_t> ks = family_ks(family);
  if (ks.size() != model.dim)
    throw tsift::error(tsift::errc::dimension_mismatch,
                       "model expects " + std::to_string(model.dim) + " features but " +
                           std::to_string(ks.size()) + " cluster files were given");
  if (trace_files.empty())
    throw tsift::error(tsift::errc::invalid_params, "no trace files to classify");

  bool any_abnormal = false;
  for (const auto& file : trace_files) {
    const tsift::syscall_trace trace =
        tsift::parse_trace(tsift::detail::read_file(file), file, alphabet_bound);
    const tsift::feature_vector row = tsift::featurize(trace, family, ks, +1);
    const double value = tsift::decision_value(model, row.values);
    const bool abnormal = value < 0.0;
    any_abnormal = any_abnormal || abnormal;
    std::cout << file << ' ' << (abnormal ? "-1" : "+1") << ' ' << tsift::format_double(value)
              << '\n';
  }
  return any_abnormal ? 1 : 0;
}

int run_eval(const common_opts& opts, const std::string& model_file,
             const std::vector<std::string>& cluster_files, unsigned jobs) {
  const tsift::trace_corpus corpus = acquire_corpus(opts);
  const tsift::ocsvm_model model = tsift::load_model(model_file);
  const tsift::cluster_family family = load_family(cluster_files);
  const std::vector<std::size_t> ks = family_ks(family);
  if (ks.size() != model.dim)
    throw tsift::error(tsift::errc::dimension_mismatch,
                       "model expects " + std::to_string(model.dim) + " features but " +
                           std::to_string(ks.size()) + " cluster files were given");

  tsift::feature_matrix test = tsift::featurize_rows(corpus.test_normals, family, ks, +1, jobs);
  tsift::append_rows(test, tsift::featurize_rows(corpus.test_abnormals, family, ks, -1, jobs));
  const tsift::confusion c = tsift::evaluate_model(model, test);
  const tsift::class_rates r = tsift::rates(c);
  const double f1 = tsift::f1_measure(r.detection_rate, r.false_alarm_rate, c.normals(), c.abnormals());

  std::cout << "tp=" << c.tp << " fp=" << c.fp << " tn=" << c.tn << " fn=" << c.fn << '\n';
  std::cout << "detection rate: " << tsift::format_percent(r.detection_rate) << "%\n";
  std::cout << "false alarm rate: " << tsift::format_percent(r.false_alarm_rate) << "%\n";
  if (r.precision) std::cout << "precision: " << tsift::format_percent(*r.precision) << "%\n";
  std::cout << "f1: " << tsift::format_fixed(f1, 4) << '\n';
  return 0;
}

int run_roc(const common_opts& opts, const tsift::pipeline_config& cfg,
            const std::vector<std::size_t>& ks, double nu, bool nu_sweep) {
  const tsift::trace_corpus corpus = acquire_corpus(opts);
  const tsift::cluster_family family = tsift::build_family(corpus.training_normals, ks);
  const tsift::feature_matrix train =
      tsift::featurize_rows(corpus.training_normals, family, ks, +1, cfg.jobs);
  tsift::feature_matrix test = tsift::featurize_rows(corpus.test_normals, family, ks, +1, cfg.jobs);
  tsift::append_rows(test, tsift::featurize_rows(corpus.test_abnormals, family, ks, -1, cfg.jobs));
  fs::create_directories(opts.out_dir);

  if (nu_sweep) {
    // One operating point per nu instead of a threshold sweep.
    std::string tsv = "nu\tfar\tdr\n";
    for (double sweep_nu : cfg.nu_grid) {
      const tsift::ocsvm_model model = tsift::train_ocsvm(train, solver_params(cfg, sweep_nu));
      const tsift::confusion c = tsift::evaluate_model(model, test);
      const tsift::class_rates r = tsift::rates(c);
      tsv += tsift::format_double(sweep_nu) + '\t' + tsift::format_double(r.false_alarm_rate) + '\t' +
             tsift::format_double(r.detection_rate) + '\n';
    }
    const fs::path path = fs::path(opts.out_dir) / "nu_sweep.tsv";
    write_text(path, tsv);
    std::cout << "operating points -> " << path.string() << '\n';
    return 0;
  }

  const tsift::ocsvm_model model = tsift::train_ocsvm(train, solver_params(cfg, nu));
  std::vector<int> labels(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) labels[i] = test.rows[i].label;
  const tsift::roc_result roc = tsift::sweep_roc(tsift::decision_values(model, test), labels);

  std::string tsv = "threshold\tfar\tdr\n";
  for (const auto& p : roc.points)
    tsv += tsift::format_double(p.threshold) + '\t' + tsift::format_double(p.far) + '\t' +
           tsift::format_double(p.dr) + '\n';
  const fs::path path = fs::path(opts.out_dir) / "roc.tsv";
  write_text(path, tsv);
  std::cout << "roc (" << roc.points.size() << " points) -> " << path.string() << '\n';
  std::cout << "auc: " << tsift::format_fixed(roc.auc, 4) << '\n';
  return 0;
}

int run_export_features(const common_opts& opts, const std::vector<std::size_t>& ks, unsigned jobs) {
  const tsift::trace_corpus corpus = acquire_corpus(opts);
  const tsift::cluster_family family = tsift::build_family(corpus.training_normals, ks);
  const tsift::feature_matrix train =
      tsift::featurize_rows(corpus.training_normals, family, ks, +1, jobs);
  tsift::feature_matrix test = tsift::featurize_rows(corpus.test_normals, family, ks, +1, jobs);
  tsift::append_rows(test, tsift::featurize_rows(corpus.test_abnormals, family, ks, -1, jobs));

  fs::create_directories(opts.out_dir);
  const fs::path out(opts.out_dir);
  tsift::save_features(train, out / "features_train.txt");
  tsift::save_features(test, out / "features_test.txt");
  std::cout << train.size() << " training rows -> " << (out / "features_train.txt").string() << '\n';
  std::cout << test.size() << " test rows -> " << (out / "features_test.txt").string() << '\n';
  return 0;
}

int run_kfold(const common_opts& opts, const tsift::pipeline_config& cfg,
              const std::vector<std::size_t>& ks, double nu, std::size_t folds) {
  const tsift::trace_corpus corpus = acquire_corpus(opts);
  const tsift::cluster_family family = tsift::build_family(corpus.training_normals, ks);
  const tsift::feature_matrix train =
      tsift::featurize_rows(corpus.training_normals, family, ks, +1, cfg.jobs);
  const tsift::kfold_result result = tsift::kfold_far(train, solver_params(cfg, nu), folds, cfg.seed);
  for (std::size_t f = 0; f < result.fold_far.size(); ++f)
    std::cout << "fold " << f << ": far=" << tsift::format_percent(result.fold_far[f]) << "%\n";
  std::cout << "mean far: " << tsift::format_percent(result.mean_far) << "%\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"n-gram cluster features + one-class SVM for syscall trace anomaly detection"};
  app.require_subcommand(1);

  common_opts opts;
  pipeline_opts pipeline;
  std::string ks_text;
  double nu = 0.1;
  std::string model_file;
  std::vector<std::string> cluster_files;
  std::vector<std::string> trace_files;
  bool nu_sweep = false;
  std::size_t folds = 5;

  CLI::App* stats = app.add_subcommand("stats", "count traces and mean lengths");
  add_corpus_opts(stats, opts);

  CLI::App* extract = app.add_subcommand("extract", "build pattern clusters from the training traces");
  add_corpus_opts(extract, opts);
  add_out_opt(extract, opts);
  extract->add_option("--ks", ks_text, "comma-separated window lengths (default 1..--kmax-probe)");
  add_pipeline_opts(extract, pipeline);
  extract->add_option("--config", opts.config_file, "pipeline config file");

  CLI::App* probe = app.add_subcommand("probe", "score each window length alone across the nu grid");
  add_corpus_opts(probe, opts);
  add_out_opt(probe, opts);
  add_pipeline_opts(probe, pipeline);
  probe->add_option("--config", opts.config_file, "pipeline config file");

  CLI::App* select = app.add_subcommand("select", "full probe + combination search, emits the report");
  add_corpus_opts(select, opts);
  add_out_opt(select, opts);
  add_pipeline_opts(select, pipeline);
  select->add_option("--config", opts.config_file, "pipeline config file");

  CLI::App* train = app.add_subcommand("train", "train one detector with fixed window lengths");
  add_corpus_opts(train, opts);
  add_out_opt(train, opts);
  add_pipeline_opts(train, pipeline);
  train->add_option("--config", opts.config_file, "pipeline config file");
  train->add_option("--ks", ks_text, "comma-separated window lengths")->required();
  train->add_option("--nu", nu, "outlier budget")->capture_default_str();

  CLI::App* predict = app.add_subcommand("predict", "classify trace files with a saved model");
  predict->add_option("--model", model_file, "model file")->required();
  // one value per occurrence, so bare trace-file arguments stay positional
  predict->add_option("--clusters", cluster_files, "cluster dump files, one per window length")
      ->required()
      ->type_size(1)
      ->allow_extra_args(false);
  predict->add_option("traces", trace_files, "trace files to classify");
  predict->add_option("--alphabet-bound", opts.layout.alphabet_bound, "largest accepted syscall id");

  CLI::App* eval = app.add_subcommand("eval", "score a saved model on the corpus test sets");
  add_corpus_opts(eval, opts);
  add_pipeline_opts(eval, pipeline);
  eval->add_option("--model", model_file, "model file")->required();
  eval->add_option("--clusters", cluster_files, "cluster dump files, one per window length")
      ->required();

  CLI::App* roc = app.add_subcommand("roc", "decision-value sweep (or --nu-sweep operating points)");
  add_corpus_opts(roc, opts);
  add_out_opt(roc, opts);
  add_pipeline_opts(roc, pipeline);
  roc->add_option("--config", opts.config_file, "pipeline config file");
  roc->add_option("--ks", ks_text, "comma-separated window lengths")->required();
  roc->add_option("--nu", nu, "outlier budget")->capture_default_str();
  roc->add_flag("--nu-sweep", nu_sweep, "one operating point per nu in the grid");

  CLI::App* export_features = app.add_subcommand("export-features", "write feature matrices as text");
  add_corpus_opts(export_features, opts);
  add_out_opt(export_features, opts);
  add_pipeline_opts(export_features, pipeline);
  export_features->add_option("--ks", ks_text, "comma-separated window lengths")->required();

  CLI::App* kfold = app.add_subcommand("kfold", "k-fold false-alarm estimate on the training normals");
  add_corpus_opts(kfold, opts);
  add_pipeline_opts(kfold, pipeline);
  kfold->add_option("--ks", ks_text, "comma-separated window lengths")->required();
  kfold->add_option("--nu", nu, "outlier budget")->capture_default_str();
  kfold->add_option("--folds", folds, "number of folds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    finalize_config(sub, pipeline, opts.config_file);

    if (sub == stats) return run_stats(opts);
    if (sub == extract) {
      std::vector<std::size_t> ks;
      if (!ks_text.empty())
        ks = parse_k_list(ks_text);
      else
        for (std::size_t k = 1; k <= pipeline.cfg.n_max; ++k) ks.push_back(k);
      return run_extract(opts, ks, pipeline.cfg.jobs);
    }
    if (sub == probe) return run_probe(opts, pipeline.cfg);
    if (sub == select) return run_select(opts, pipeline.cfg);
    if (sub == train) return run_train(opts, pipeline.cfg, parse_k_list(ks_text), nu);
    if (sub == predict)
      return run_predict(model_file, cluster_files, trace_files, opts.layout.alphabet_bound);
    if (sub == eval) return run_eval(opts, model_file, cluster_files, pipeline.cfg.jobs);
    if (sub == roc) return run_roc(opts, pipeline.cfg, parse_k_list(ks_text), nu, nu_sweep);
    if (sub == export_features)
      return run_export_features(opts, parse_k_list(ks_text), pipeline.cfg.jobs);
    if (sub == kfold) return run_kfold(opts, pipeline.cfg, parse_k_list(ks_text), nu, folds);
  } catch (const tsift::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
