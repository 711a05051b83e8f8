#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tracesift/corpus.hpp"
#include "tracesift/errors.hpp"
#include "tracesift/ngram.hpp"
#include "tracesift/parallel.hpp"
#include "tracesift/text.hpp"
#include "tracesift/trace.hpp"

namespace tsift {

// Matching-window frequency as an exact rational: hits / trace length.
// Kept exact so equality checks and serialized values do not depend on the
// order operations happened to run in.
struct frequency {
  std::uint64_t hits = 0;
  std::uint64_t length = 1;

  double to_double() const {
    return length == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(length);
  }
  friend bool operator==(const frequency& a, const frequency& b) {
    return static_cast<unsigned __int128>(a.hits) * b.length ==
           static_cast<unsigned __int128>(b.hits) * a.length;
  }
};

// Fraction of window positions of t whose k-gram belongs to the cluster,
// with the trace length as denominator. Traces shorter than k score 0.
inline frequency eval_trace(const lk_cluster& cluster, const syscall_trace& t) {
  frequency f;
  f.length = std::max<std::uint64_t>(t.size(), 1);
  f.hits = t.size() < cluster.k() ? 0 : cluster.count_hits(t);
  return f;
}

struct feature_vector {
  std::vector<double> values;
  int label = +1; // +1 normal, -1 abnormal
  std::string trace_id;
};

struct feature_matrix {
  std::vector<std::size_t> column_keys; // window lengths, strictly ascending
  std::vector<feature_vector> rows;

  std::size_t dim() const { return column_keys.size(); }
  std::size_t size() const { return rows.size(); }
};

namespace detail {

inline std::vector<std::size_t> checked_keys(const std::vector<std::size_t>& ks) {
  if (ks.empty()) throw error(errc::invalid_params, "at least one window length is required");
  std::vector<std::size_t> sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw error(errc::invalid_params, "duplicate window length requested");
  return sorted;
}

inline const lk_cluster& cluster_for(const cluster_family& family, std::size_t k) {
  auto it = family.find(k);
  if (it == family.end())
    throw error(errc::unknown_cluster, "no cluster built for k=" + std::to_string(k));
  return it->second;
}

} // namespace detail

inline feature_vector featurize(const syscall_trace& t, const cluster_family& family,
                                const std::vector<std::size_t>& ks, int label = +1) {
  feature_vector row;
  row.label = label;
  row.trace_id = t.source_id;
  for (std::size_t k : detail::checked_keys(ks))
    row.values.push_back(eval_trace(detail::cluster_for(family, k), t).to_double());
  return row;
}

inline feature_matrix featurize_rows(const std::vector<syscall_trace>& traces,
                                     const cluster_family& family,
                                     const std::vector<std::size_t>& ks, int label = +1,
                                     unsigned jobs = 1) {
  feature_matrix m;
  m.column_keys = detail::checked_keys(ks);
  std::vector<const lk_cluster*> clusters;
  for (std::size_t k : m.column_keys) clusters.push_back(&detail::cluster_for(family, k));
  m.rows.resize(traces.size());
  parallel_for(traces.size(), jobs, [&](std::size_t i) {
    feature_vector row;
    row.label = label;
    row.trace_id = traces[i].source_id;
    row.values.reserve(clusters.size());
    for (const lk_cluster* c : clusters) row.values.push_back(eval_trace(*c, traces[i]).to_double());
    m.rows[i] = std::move(row);
  });
  return m;
}

// One window length evaluated over one trace set, kept exact. Selection reuses
// these columns across cluster combinations instead of rescanning traces.
struct feature_column {
  std::size_t k = 0;
  std::vector<frequency> values;
};

inline feature_column eval_column(const lk_cluster& cluster, const std::vector<syscall_trace>& traces,
                                  unsigned jobs = 1) {
  feature_column col;
  col.k = cluster.k();
  col.values.resize(traces.size());
  parallel_for(traces.size(), jobs, [&](std::size_t i) { col.values[i] = eval_trace(cluster, traces[i]); });
  return col;
}

inline feature_matrix matrix_from_columns(const std::vector<const feature_column*>& columns,
                                          const std::vector<syscall_trace>& traces, int label) {
  if (columns.empty()) throw error(errc::invalid_params, "at least one feature column is required");
  feature_matrix m;
  for (const feature_column* c : columns) {
    if (c->values.size() != traces.size())
      throw error(errc::row_count_mismatch, "feature column and trace set differ in size");
    m.column_keys.push_back(c->k);
  }
  if (!std::is_sorted(m.column_keys.begin(), m.column_keys.end()) ||
      std::adjacent_find(m.column_keys.begin(), m.column_keys.end()) != m.column_keys.end())
    throw error(errc::invalid_params, "feature columns must have strictly ascending window lengths");
  m.rows.resize(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    m.rows[i].label = label;
    m.rows[i].trace_id = traces[i].source_id;
    m.rows[i].values.reserve(columns.size());
    for (const feature_column* c : columns) m.rows[i].values.push_back(c->values[i].to_double());
  }
  return m;
}

// Row-wise concatenation of two matrices over the same trace set.
inline feature_matrix concat_columns(const feature_matrix& a, const feature_matrix& b) {
  if (a.size() != b.size())
    throw error(errc::row_count_mismatch, "matrices differ in row count");
  feature_matrix m;
  m.column_keys = a.column_keys;
  m.column_keys.insert(m.column_keys.end(), b.column_keys.begin(), b.column_keys.end());
  std::vector<std::size_t> sorted = m.column_keys;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw error(errc::invalid_params, "matrices share a window length");
  m.rows = a.rows;
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    m.rows[i].values.insert(m.rows[i].values.end(), b.rows[i].values.begin(), b.rows[i].values.end());
  return m;
}

inline void append_rows(feature_matrix& dst, const feature_matrix& src) {
  if (dst.column_keys != src.column_keys)
    throw error(errc::dimension_mismatch, "matrices have different feature columns");
  dst.rows.insert(dst.rows.end(), src.rows.begin(), src.rows.end());
}

// Dense text form: "<label> 1:<v1> 2:<v2> ..." per row, indices 1-based,
// labels written with an explicit sign.
inline std::string serialize_features(const feature_matrix& m) {
  std::string out;
  for (const auto& row : m.rows) {
    out += row.label < 0 ? "-1" : "+1";
    for (std::size_t j = 0; j < row.values.size(); ++j)
      out += ' ' + std::to_string(j + 1) + ':' + format_double(row.values[j]);
    out += '\n';
  }
  return out;
}

inline feature_matrix parse_features(std::string_view text) {
  feature_matrix m;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    auto fields = tokenize(line);
    feature_vector row;
    std::string_view label = fields[0];
    if (label.starts_with('+')) label.remove_prefix(1); // from_chars rejects '+'
    row.label = static_cast<int>(parse_int(label));
    for (std::size_t j = 1; j < fields.size(); ++j) {
      auto colon = fields[j].find(':');
      if (colon == std::string_view::npos)
        throw error(errc::malformed_token,
                    "feature line " + std::to_string(line_no) + " has a value without an index");
      auto idx = static_cast<std::size_t>(parse_int(fields[j].substr(0, colon)));
      if (idx != j)
        throw error(errc::malformed_token,
                    "feature line " + std::to_string(line_no) + " indices must be dense and 1-based");
      row.values.push_back(parse_double(fields[j].substr(colon + 1)));
    }
    if (m.rows.empty())
      dim = row.values.size();
    else if (row.values.size() != dim)
      throw error(errc::dimension_mismatch,
                  "feature line " + std::to_string(line_no) + " has a different dimension");
    m.rows.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < dim; ++j) m.column_keys.push_back(j + 1);
  return m;
}

inline void save_features(const feature_matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::io_error, "cannot open " + path.string() + " for writing");
  out << serialize_features(m);
  if (!out) throw error(errc::io_error, "failed writing " + path.string());
}

inline feature_matrix load_features(const std::filesystem::path& path) {
  return parse_features(detail::read_file(path));
}

} // namespace tsift
