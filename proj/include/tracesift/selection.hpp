#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tracesift/config.hpp"
#include "tracesift/corpus.hpp"
#include "tracesift/errors.hpp"
#include "tracesift/features.hpp"
#include "tracesift/metrics.hpp"
#include "tracesift/ngram.hpp"
#include "tracesift/ocsvm.hpp"
#include "tracesift/parallel.hpp"
#include "tracesift/text.hpp"

namespace tsift {

struct probe_cell {
  std::size_t k = 0;
  double nu = 0.0;
  bool ok = false;
  bool converged = true;
  double far = 0.0;
  double dr = 0.0;
  double f1 = 0.0;
  std::string note; // failure reason when !ok
};

struct probe_result {
  std::vector<std::size_t> ks;
  std::vector<double> nus; // in grid order
  std::vector<probe_cell> cells; // row-major: ks.size() x nus.size()

  const probe_cell& at(std::size_t k_idx, std::size_t nu_idx) const {
    return cells[k_idx * nus.size() + nu_idx];
  }
};

struct delta_row {
  std::size_t k = 0; // compared against k-1
  double d_dr = 0.0;
  double d_far = 0.0;
  double delta = 0.0; // d_dr - d_far
};

struct kmax_decision {
  std::size_t k_max = 0;
  double chosen_nu = 0.0;
  bool no_negative_delta = false; // fell back to the probe ceiling
};

struct combo_result {
  std::vector<std::size_t> ks;
  double nu = 0.0;
  std::size_t length = 0; // sum of ks
  bool ok = false;
  bool converged = true;
  double far = 0.0;
  double dr = 0.0;
  double f1 = 0.0;
  std::string note;
};

struct selection_outcome {
  std::vector<std::size_t> shortlist; // indices into the combo list, report order
  std::size_t winner = 0;             // index into the combo list
  double best_f1 = 0.0;
};

struct phase_timings {
  double extract_s = 0.0;
  double probe_s = 0.0;
  double combos_s = 0.0;
  double total_s = 0.0;
};

struct pipeline_result {
  probe_result probe;
  std::vector<delta_row> deltas;
  kmax_decision kmax;
  std::vector<combo_result> combos;   // enumeration order: size, then lex, then nu
  std::vector<std::size_t> ranked;    // combo indices in report order
  selection_outcome selection;
  ocsvm_model final_model;
  cluster_family family;              // all probed window lengths
  std::size_t n_train = 0;
  std::size_t n_eval_normal = 0;
  std::size_t n_eval_abnormal = 0;
  bool validation_split_used = false;
  phase_timings timings; // console-only; never serialized
};

namespace detail {

struct eval_sets {
  const std::vector<feature_column>* train_cols;
  const std::vector<feature_column>* normal_cols;
  const std::vector<feature_column>* abnormal_cols;
  const std::vector<syscall_trace>* train;
  const std::vector<syscall_trace>* normals;
  const std::vector<syscall_trace>* abnormals;
};

struct cell_eval {
  bool ok = false;
  bool converged = true;
  double far = 0.0, dr = 0.0, f1 = 0.0;
  std::string note;
};

// Train on the k-columns of the training set, measure FAR on the normal
// evaluation set and DR on the abnormal one.
inline cell_eval evaluate_cell(const eval_sets& sets, const std::vector<std::size_t>& k_indices,
                               double nu, const pipeline_config& cfg) {
  cell_eval out;
  try {
    std::vector<const feature_column*> train_cols, normal_cols, abnormal_cols;
    for (std::size_t idx : k_indices) {
      train_cols.push_back(&(*sets.train_cols)[idx]);
      normal_cols.push_back(&(*sets.normal_cols)[idx]);
      abnormal_cols.push_back(&(*sets.abnormal_cols)[idx]);
    }
    feature_matrix train = matrix_from_columns(train_cols, *sets.train, +1);
    feature_matrix normals = matrix_from_columns(normal_cols, *sets.normals, +1);
    feature_matrix abnormals = matrix_from_columns(abnormal_cols, *sets.abnormals, -1);

    ocsvm_params params;
    params.nu = nu;
    params.gamma = cfg.gamma;
    params.kkt_tolerance = cfg.kkt_tolerance;
    params.max_iterations = cfg.max_iterations;
    ocsvm_model model = train_ocsvm(train, params);
    out.converged = model.converged;
    if (!model.converged) out.note = "nonconverged";

    std::size_t alarms = 0, detected = 0;
    for (const auto& row : normals.rows)
      if (predict(model, row.values) < 0) ++alarms;
    for (const auto& row : abnormals.rows)
      if (predict(model, row.values) < 0) ++detected;
    out.far = normals.size() == 0 ? 0.0
                                  : static_cast<double>(alarms) / static_cast<double>(normals.size());
    out.dr = abnormals.size() == 0
                 ? 0.0
                 : static_cast<double>(detected) / static_cast<double>(abnormals.size());
    out.f1 = f1_measure(out.dr, out.far, normals.size(), abnormals.size());
    out.ok = true;
  } catch (const error& e) {
    out.ok = false;
    out.note = e.what();
  }
  return out;
}

} // namespace detail

// One model per window length and nu; each grid cell records its own outcome
// so a single infeasible nu does not abort the whole probe.
inline probe_result probe_single_clusters(const detail::eval_sets& sets,
                                          const std::vector<std::size_t>& ks,
                                          const pipeline_config& cfg) {
  probe_result grid;
  grid.ks = ks;
  grid.nus = cfg.nu_grid;
  grid.cells.resize(ks.size() * cfg.nu_grid.size());
  parallel_for(grid.cells.size(), cfg.jobs, [&](std::size_t idx) {
    const std::size_t k_idx = idx / cfg.nu_grid.size();
    const std::size_t nu_idx = idx % cfg.nu_grid.size();
    probe_cell cell;
    cell.k = ks[k_idx];
    cell.nu = cfg.nu_grid[nu_idx];
    auto eval = detail::evaluate_cell(sets, {k_idx}, cell.nu, cfg);
    cell.ok = eval.ok;
    cell.converged = eval.converged;
    cell.far = eval.far;
    cell.dr = eval.dr;
    cell.f1 = eval.f1;
    cell.note = eval.note;
    grid.cells[idx] = std::move(cell);
  });
  return grid;
}

// Successive differences down one nu column of the probe grid.
inline std::vector<delta_row> compute_deltas(const probe_result& grid, double chosen_nu) {
  std::size_t nu_idx = grid.nus.size();
  for (std::size_t j = 0; j < grid.nus.size(); ++j)
    if (grid.nus[j] == chosen_nu) nu_idx = j;
  if (nu_idx == grid.nus.size())
    throw error(errc::invalid_params, "chosen nu is not a probe grid column");
  std::vector<delta_row> rows;
  for (std::size_t i = 1; i < grid.ks.size(); ++i) {
    const probe_cell& prev = grid.at(i - 1, nu_idx);
    const probe_cell& cur = grid.at(i, nu_idx);
    if (!prev.ok || !cur.ok)
      throw error(errc::incomplete_grid,
                  "probe column nu=" + format_double(chosen_nu) + " has failed cells");
    delta_row row;
    row.k = grid.ks[i];
    row.d_dr = cur.dr - prev.dr;
    row.d_far = cur.far - prev.far;
    row.delta = row.d_dr - row.d_far;
    rows.push_back(row);
  }
  return rows;
}

// The ceiling is the window length whose step degraded the trade-off the
// most; with no degrading step anywhere, the probe ceiling itself is used.
inline kmax_decision determine_kmax(const std::vector<delta_row>& deltas, std::size_t n_max,
                                    double chosen_nu) {
  kmax_decision decision;
  decision.chosen_nu = chosen_nu;
  double best = 0.0;
  std::size_t best_k = 0;
  for (const auto& row : deltas) {
    if (row.delta < 0.0 && (best_k == 0 || row.delta < best)) {
      best = row.delta;
      best_k = row.k; // ties keep the earlier (smaller) k
    }
  }
  if (best_k == 0) {
    decision.k_max = n_max;
    decision.no_negative_delta = true;
  } else {
    decision.k_max = best_k;
  }
  return decision;
}

// Every subset of {1..k_max} with at least two elements, sized-then-lex order.
inline std::vector<std::vector<std::size_t>> enumerate_combinations(std::size_t k_max) {
  if (k_max < 2) throw error(errc::invalid_params, "combinations need k_max >= 2");
  std::vector<std::vector<std::size_t>> combos;
  for (std::size_t size = 2; size <= k_max; ++size) {
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i + 1;
    while (true) {
      combos.push_back(pick);
      // advance to the next lexicographic combination
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == k_max - size + i) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return combos;
}

inline std::vector<combo_result> evaluate_combinations(
    const detail::eval_sets& sets, const std::vector<std::vector<std::size_t>>& combos,
    const std::vector<std::size_t>& ks, const pipeline_config& cfg) {
  // map window length -> column index
  std::vector<std::size_t> index_of(ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end()) + 1,
                                    ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) index_of[ks[i]] = i;

  std::vector<combo_result> results(combos.size() * cfg.nu_grid.size());
  parallel_for(results.size(), cfg.jobs, [&](std::size_t idx) {
    const std::size_t c_idx = idx / cfg.nu_grid.size();
    const std::size_t nu_idx = idx % cfg.nu_grid.size();
    combo_result r;
    r.ks = combos[c_idx];
    r.nu = cfg.nu_grid[nu_idx];
    for (std::size_t k : r.ks) r.length += k;
    std::vector<std::size_t> col_indices;
    for (std::size_t k : r.ks) {
      if (k >= index_of.size() || index_of[k] == ks.size())
        throw error(errc::unknown_cluster, "no feature column for k=" + std::to_string(k));
      col_indices.push_back(index_of[k]);
    }
    auto eval = detail::evaluate_cell(sets, col_indices, r.nu, cfg);
    r.ok = eval.ok;
    r.converged = eval.converged;
    r.far = eval.far;
    r.dr = eval.dr;
    r.f1 = eval.f1;
    r.note = eval.note;
    results[idx] = std::move(r);
  });
  return results;
}

namespace detail {

inline bool ranks_before(const combo_result& a, const combo_result& b) {
  if (a.f1 != b.f1) return a.f1 > b.f1;
  if (a.length != b.length) return a.length < b.length;
  if (a.ks != b.ks) return a.ks < b.ks;
  return a.nu < b.nu;
}

} // namespace detail

// Shortlist everything within epsilon of the best F1, then prefer the
// cheapest detector: smallest summed window length, then higher F1, then
// lexicographically smaller window set, then smaller nu.
inline selection_outcome select_best(const std::vector<combo_result>& results, double epsilon) {
  double best_f1 = -1.0;
  for (const auto& r : results)
    if (r.ok) best_f1 = std::max(best_f1, r.f1);
  if (best_f1 < 0.0)
    throw error(errc::incomplete_grid, "no combination evaluated successfully");

  selection_outcome outcome;
  outcome.best_f1 = best_f1;
  for (std::size_t i = 0; i < results.size(); ++i)
    if (results[i].ok && results[i].f1 >= best_f1 - epsilon) outcome.shortlist.push_back(i);

  auto better = [&](std::size_t a, std::size_t b) {
    const combo_result& ra = results[a];
    const combo_result& rb = results[b];
    if (ra.length != rb.length) return ra.length < rb.length;
    if (ra.f1 != rb.f1) return ra.f1 > rb.f1;
    if (ra.ks != rb.ks) return ra.ks < rb.ks;
    return ra.nu < rb.nu;
  };
  outcome.winner = outcome.shortlist.front();
  for (std::size_t i : outcome.shortlist)
    if (better(i, outcome.winner)) outcome.winner = i;

  std::sort(outcome.shortlist.begin(), outcome.shortlist.end(),
            [&](std::size_t a, std::size_t b) { return detail::ranks_before(results[a], results[b]); });
  return outcome;
}

inline pipeline_result run_pipeline(const trace_corpus& corpus, const pipeline_config& cfg) {
  validate_config(cfg);
  stopwatch total;

  pipeline_result result;
  result.validation_split_used = cfg.validation_split;

  // Evaluation sets: either the corpus' own split, or a held-out slice of the
  // training normals so selection never sees the test normals.
  std::vector<syscall_trace> train = corpus.training_normals;
  std::vector<syscall_trace> eval_normals = corpus.test_normals;
  if (cfg.validation_split) {
    auto [tr, held_out] = split_normals(corpus.training_normals, cfg.train_fraction, cfg.seed);
    train = std::move(tr);
    eval_normals = std::move(held_out);
  }
  const std::vector<syscall_trace>& abnormals = corpus.test_abnormals;
  if (train.empty()) throw error(errc::degenerate_split, "no training traces");
  if (eval_normals.empty()) throw error(errc::empty_class, "no normal evaluation traces");
  if (abnormals.empty()) throw error(errc::empty_class, "no abnormal evaluation traces");
  result.n_train = train.size();
  result.n_eval_normal = eval_normals.size();
  result.n_eval_abnormal = abnormals.size();

  std::vector<std::size_t> ks(cfg.n_max);
  for (std::size_t i = 0; i < cfg.n_max; ++i) ks[i] = i + 1;

  stopwatch extract;
  std::vector<lk_cluster> clusters(ks.size());
  parallel_for(ks.size(), cfg.jobs, [&](std::size_t i) { clusters[i] = build_cluster(train, ks[i]); });

  std::vector<feature_column> train_cols(ks.size()), normal_cols(ks.size()), abnormal_cols(ks.size());
  parallel_for(ks.size() * 3, cfg.jobs, [&](std::size_t idx) {
    const std::size_t i = idx / 3;
    switch (idx % 3) {
      case 0: train_cols[i] = eval_column(clusters[i], train); break;
      case 1: normal_cols[i] = eval_column(clusters[i], eval_normals); break;
      default: abnormal_cols[i] = eval_column(clusters[i], abnormals); break;
    }
  });
  result.timings.extract_s = extract.seconds();

  detail::eval_sets sets{&train_cols, &normal_cols, &abnormal_cols,
                         &train,      &eval_normals, &abnormals};

  stopwatch probe;
  result.probe = probe_single_clusters(sets, ks, cfg);
  result.timings.probe_s = probe.seconds();

  const double chosen_nu = *std::min_element(cfg.nu_grid.begin(), cfg.nu_grid.end());
  result.deltas = compute_deltas(result.probe, chosen_nu);
  result.kmax = determine_kmax(result.deltas, cfg.n_max, chosen_nu);

  stopwatch combos_clock;
  auto combos = enumerate_combinations(result.kmax.k_max);
  result.combos = evaluate_combinations(sets, combos, ks, cfg);
  result.timings.combos_s = combos_clock.seconds();

  result.ranked.resize(result.combos.size());
  for (std::size_t i = 0; i < result.ranked.size(); ++i) result.ranked[i] = i;
  std::sort(result.ranked.begin(), result.ranked.end(), [&](std::size_t a, std::size_t b) {
    const combo_result& ra = result.combos[a];
    const combo_result& rb = result.combos[b];
    if (ra.ok != rb.ok) return ra.ok; // failures sink to the bottom
    if (!ra.ok) return std::pair(ra.ks, ra.nu) < std::pair(rb.ks, rb.nu);
    return detail::ranks_before(ra, rb);
  });

  result.selection = select_best(result.combos, cfg.epsilon);

  // Final detector: the winning combination retrained on the training side.
  const combo_result& win = result.combos[result.selection.winner];
  {
    std::vector<const feature_column*> cols;
    for (std::size_t k : win.ks) cols.push_back(&train_cols[k - 1]);
    feature_matrix final_train = matrix_from_columns(cols, train, +1);
    ocsvm_params params;
    params.nu = win.nu;
    params.gamma = cfg.gamma;
    params.kkt_tolerance = cfg.kkt_tolerance;
    params.max_iterations = cfg.max_iterations;
    result.final_model = train_ocsvm(final_train, params);
  }

  for (std::size_t i = 0; i < ks.size(); ++i) result.family.emplace(ks[i], std::move(clusters[i]));
  result.timings.total_s = total.seconds();
  return result;
}

// --- report rendering ------------------------------------------------------
// The serialized report is fully determined by the pipeline inputs: fractions
// are printed in shortest round-trip form and wall-clock timings stay out.

inline std::string join_ks(const std::vector<std::size_t>& ks) {
  std::string out;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ks[i]);
  }
  return out;
}

namespace detail {

inline void append_combo_line(std::string& out, const combo_result& r) {
  out += join_ks(r.ks) + ' ' + format_double(r.nu) + ' ' + std::to_string(r.length);
  if (r.ok) {
    out += ' ' + format_double(r.far) + ' ' + format_double(r.dr) + ' ' + format_double(r.f1);
    if (!r.converged) out += " nonconverged";
  } else {
    out += " - - - " + r.note;
  }
  out += '\n';
}

} // namespace detail

inline std::string render_report(const pipeline_result& result) {
  std::string out;

  out += "== probe grid ==\n";
  out += "k nu far dr f1\n";
  for (std::size_t i = 0; i < result.probe.ks.size(); ++i)
    for (std::size_t j = 0; j < result.probe.nus.size(); ++j) {
      const probe_cell& c = result.probe.at(i, j);
      out += std::to_string(c.k) + ' ' + format_double(c.nu);
      if (c.ok) {
        out += ' ' + format_double(c.far) + ' ' + format_double(c.dr) + ' ' + format_double(c.f1);
        if (!c.converged) out += " nonconverged";
      } else {
        out += " - - - " + c.note;
      }
      out += '\n';
    }

  out += "== delta table ==\n";
  out += "k ddr dfar delta\n";
  for (const auto& row : result.deltas)
    out += std::to_string(row.k) + ' ' + format_double(row.d_dr) + ' ' + format_double(row.d_far) +
           ' ' + format_double(row.delta) + '\n';

  out += "== kmax ==\n";
  out += "kmax=" + std::to_string(result.kmax.k_max) + " nu=" + format_double(result.kmax.chosen_nu) +
         (result.kmax.no_negative_delta ? " warning=no_negative_delta" : "") + '\n';

  out += "== combinations ==\n";
  out += "ks nu length far dr f1\n";
  for (std::size_t idx : result.ranked) detail::append_combo_line(out, result.combos[idx]);

  out += "== shortlist ==\n";
  out += "ks nu length far dr f1\n";
  for (std::size_t idx : result.selection.shortlist)
    detail::append_combo_line(out, result.combos[idx]);

  out += "== winner ==\n";
  const combo_result& win = result.combos[result.selection.winner];
  out += "ks=" + join_ks(win.ks) + " nu=" + format_double(win.nu) +
         " length=" + std::to_string(win.length) + " far=" + format_double(win.far) +
         " dr=" + format_double(win.dr) + " f1=" + format_double(win.f1) + '\n';
  return out;
}

inline std::string render_probe_tsv(const probe_result& grid) {
  std::string out = "k\tnu\tfar\tdr\tf1\n";
  for (std::size_t i = 0; i < grid.ks.size(); ++i)
    for (std::size_t j = 0; j < grid.nus.size(); ++j) {
      const probe_cell& c = grid.at(i, j);
      out += std::to_string(c.k) + '\t' + format_double(c.nu) + '\t';
      if (c.ok)
        out += format_double(c.far) + '\t' + format_double(c.dr) + '\t' + format_double(c.f1);
      else
        out += "-\t-\t-";
      out += '\n';
    }
  return out;
}

inline std::string render_combinations_tsv(const pipeline_result& result) {
  std::string out = "ks\tnu\tlength\tfar\tdr\tf1\n";
  for (std::size_t idx : result.ranked) {
    const combo_result& r = result.combos[idx];
    out += join_ks(r.ks) + '\t' + format_double(r.nu) + '\t' + std::to_string(r.length) + '\t';
    if (r.ok)
      out += format_double(r.far) + '\t' + format_double(r.dr) + '\t' + format_double(r.f1);
    else
      out += "-\t-\t-";
    out += '\n';
  }
  return out;
}

} // namespace tsift
