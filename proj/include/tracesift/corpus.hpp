#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tracesift/errors.hpp"
#include "tracesift/rng.hpp"
#include "tracesift/text.hpp"
#include "tracesift/trace.hpp"

namespace tsift {

struct trace_corpus {
  std::vector<syscall_trace> training_normals;
  std::vector<syscall_trace> test_normals;
  std::vector<syscall_trace> test_abnormals;
};

// On-disk layout: three subdirectories of the corpus root. Defaults follow the
// ADFA-LD distribution; the attack directory nests one subdirectory per attack
// whose files are all flattened into the abnormal pool.
struct corpus_layout {
  std::string training_dir = "Training_Data_Master";
  std::string validation_dir = "Validation_Data_Master";
  std::string attack_dir = "Attack_Data_Master";
  bool attack_recursive = true;
  syscall_id alphabet_bound = default_alphabet_bound;
};

namespace detail {

inline std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir, bool recursive) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (recursive) {
    for (const auto& entry : fs::recursive_directory_iterator(dir))
      if (entry.is_regular_file()) files.push_back(entry.path());
  } else {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });
  return files;
}

inline std::vector<syscall_trace> load_trace_dir(const std::filesystem::path& dir, bool recursive,
                                                 syscall_id alphabet_bound) {
  std::vector<syscall_trace> traces;
  for (const auto& path : list_files(dir, recursive))
    traces.push_back(parse_trace(read_file(path), path.string(), alphabet_bound));
  return traces;
}

} // namespace detail

// Loads a corpus from the three-directory layout. File order within each set
// is lexicographic by path, so repeated loads are identical.
inline trace_corpus load_corpus(const std::filesystem::path& root, const corpus_layout& layout = {}) {
  namespace fs = std::filesystem;
  const fs::path train_dir = root / layout.training_dir;
  const fs::path valid_dir = root / layout.validation_dir;
  const fs::path attack_dir = root / layout.attack_dir;
  for (const auto& dir : {train_dir, valid_dir, attack_dir})
    if (!fs::is_directory(dir)) throw error(errc::missing_directory, dir.string());

  trace_corpus corpus;
  corpus.training_normals = detail::load_trace_dir(train_dir, false, layout.alphabet_bound);
  corpus.test_normals = detail::load_trace_dir(valid_dir, false, layout.alphabet_bound);
  corpus.test_abnormals = detail::load_trace_dir(attack_dir, layout.attack_recursive, layout.alphabet_bound);
  return corpus;
}

// Writes a corpus back out in the same three-directory layout, one file per
// trace, named after a zero-padded index.
inline void write_corpus(const trace_corpus& corpus, const std::filesystem::path& root,
                         const corpus_layout& layout = {}) {
  namespace fs = std::filesystem;
  auto write_set = [](const std::vector<syscall_trace>& traces, const fs::path& dir) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < traces.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "trace_%05zu.txt", i);
      std::ofstream out(dir / name, std::ios::binary);
      if (!out) throw error(errc::io_error, "cannot write " + (dir / name).string());
      out << serialize_trace(traces[i]) << '\n';
    }
  };
  write_set(corpus.training_normals, root / layout.training_dir);
  write_set(corpus.test_normals, root / layout.validation_dir);
  write_set(corpus.test_abnormals, root / layout.attack_dir);
}

// Deterministic seeded shuffle, then |train| = round(fraction * n).
inline std::pair<std::vector<syscall_trace>, std::vector<syscall_trace>> split_normals(
    std::vector<syscall_trace> traces, double train_fraction, std::uint64_t seed) {
  if (traces.empty()) throw error(errc::degenerate_split, "cannot split an empty trace list");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw error(errc::invalid_params, "train_fraction must lie in (0,1)");
  det_rng rng(seed);
  rng.shuffle(traces);
  const std::size_t n = traces.size();
  const std::size_t n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n)
    throw error(errc::degenerate_split, "split would leave an empty side (n=" + std::to_string(n) + ")");
  std::vector<syscall_trace> train(traces.begin(), traces.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<syscall_trace> test(traces.begin() + static_cast<std::ptrdiff_t>(n_train), traces.end());
  return {std::move(train), std::move(test)};
}

struct set_stats {
  std::size_t count = 0;
  std::uint64_t total_syscalls = 0;

  // Mean trace length; absent when the set is empty.
  std::optional<double> mean_length() const {
    if (count == 0) return std::nullopt;
    return static_cast<double>(total_syscalls) / static_cast<double>(count);
  }
};

struct corpus_stats_report {
  set_stats training_normals;
  set_stats test_normals;
  set_stats test_abnormals;
};

inline corpus_stats_report corpus_stats(const trace_corpus& corpus) {
  auto tally = [](const std::vector<syscall_trace>& traces) {
    set_stats s;
    s.count = traces.size();
    for (const auto& t : traces) s.total_syscalls += t.size();
    return s;
  };
  return {tally(corpus.training_normals), tally(corpus.test_normals), tally(corpus.test_abnormals)};
}

} // namespace tsift
