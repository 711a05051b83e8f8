#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tracesift/errors.hpp"
#include "tracesift/features.hpp"
#include "tracesift/rng.hpp"
#include "tracesift/text.hpp"

namespace tsift {

inline double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size())
    throw error(errc::dimension_mismatch, "kernel arguments differ in dimension");
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sq += d * d;
  }
  return std::exp(-gamma * sq);
}

inline double default_gamma(std::size_t dim) {
  return dim == 0 ? 1.0 : 1.0 / static_cast<double>(dim);
}

struct ocsvm_params {
  double nu = 0.1;
  double gamma = 0.0; // <= 0 means 1/dim
  double kkt_tolerance = 1e-3;
  std::size_t max_iterations = 1'000'000;
  std::size_t cache_rows = 256;
  bool record_objective = false;
};

struct ocsvm_model {
  double nu = 0.0;
  double gamma = 0.0;
  double rho = 0.0;
  std::size_t dim = 0;
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> alphas; // parallel to support_vectors
  bool converged = true;
  std::size_t iterations = 0;
  std::vector<double> objective_history; // per-iteration 0.5*a'Qa when recorded
};

namespace detail {

// LRU cache of kernel matrix rows; the matrix itself is never materialized.
class kernel_cache {
 public:
  kernel_cache(const std::vector<feature_vector>& rows, double gamma, std::size_t capacity)
      : rows_(rows), gamma_(gamma), capacity_(std::max<std::size_t>(capacity, 2)) {}

  const std::vector<double>& row(std::size_t i) {
    auto it = index_.find(i);
    if (it != index_.end()) {
      order_.splice(order_.begin(), order_, it->second.first);
      return it->second.second;
    }
    if (index_.size() >= capacity_) {
      index_.erase(order_.back());
      order_.pop_back();
    }
    order_.push_front(i);
    auto [pos, inserted] = index_.emplace(i, std::pair{order_.begin(), std::vector<double>{}});
    auto& values = pos->second.second;
    values.resize(rows_.size());
    const auto& xi = rows_[i].values;
    for (std::size_t t = 0; t < rows_.size(); ++t) values[t] = rbf_kernel(xi, rows_[t].values, gamma_);
    return values;
  }

 private:
  const std::vector<feature_vector>& rows_;
  double gamma_;
  std::size_t capacity_;
  std::list<std::size_t> order_;
  std::unordered_map<std::size_t, std::pair<std::list<std::size_t>::iterator, std::vector<double>>> index_;
};

} // namespace detail

// Trains on normal-only rows by solving
//   min 0.5 a'Qa  s.t.  0 <= a_i <= 1/(nu*n),  sum a = 1,  Q_ij = K(x_i, x_j)
// with pairwise updates on the most violating pair. Non-convergence within the
// iteration budget is reported through model.converged, not an exception.
inline ocsvm_model train_ocsvm(const feature_matrix& data, const ocsvm_params& params) {
  const std::size_t n = data.size();
  if (n < 2) throw error(errc::too_few_rows, "training requires at least two rows");
  const std::size_t dim = data.rows.front().values.size();
  for (const auto& row : data.rows) {
    if (row.values.size() != dim)
      throw error(errc::dimension_mismatch, "training rows differ in dimension");
    if (row.label != +1)
      throw error(errc::invalid_params, "training rows must all be labeled normal (+1)");
  }
  if (!(params.nu > 0.0 && params.nu <= 1.0))
    throw error(errc::invalid_params, "nu must lie in (0,1]");
  if (params.kkt_tolerance <= 0.0)
    throw error(errc::invalid_params, "kkt_tolerance must be positive");
  const double nu_n = params.nu * static_cast<double>(n);
  if (nu_n < 1.0)
    throw error(errc::infeasible,
                "nu*n = " + format_double(nu_n) + " < 1: no row may carry the whole mass");
  const double gamma = params.gamma > 0.0 ? params.gamma : default_gamma(dim);
  const double C = 1.0 / nu_n;

  std::vector<double> alpha(n, 0.0);
  const std::size_t m0 =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(nu_n)), 1, n);
  for (std::size_t i = 0; i < m0; ++i) alpha[i] = 1.0 / static_cast<double>(m0);

  detail::kernel_cache cache(data.rows, gamma, params.cache_rows);

  // G = Q a, maintained incrementally.
  std::vector<double> grad(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == 0.0) continue;
    const auto& qi = cache.row(i);
    for (std::size_t t = 0; t < n; ++t) grad[t] += alpha[i] * qi[t];
  }

  constexpr double TAU = 1e-12;
  ocsvm_model model;
  model.nu = params.nu;
  model.gamma = gamma;
  model.dim = dim;
  model.converged = false;

  std::size_t iter = 0;
  for (; iter < params.max_iterations; ++iter) {
    if (params.record_objective) {
      double obj = 0.0;
      for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * grad[t];
      model.objective_history.push_back(0.5 * obj);
    }

    // Most violating pair: the best direction moves mass from the highest
    // gradient among movable-down rows to the lowest among movable-up rows.
    std::size_t i_up = n, j_dn = n;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (alpha[t] < C && grad[t] < g_min) {
        g_min = grad[t];
        i_up = t;
      }
      if (alpha[t] > 0.0 && grad[t] > g_max) {
        g_max = grad[t];
        j_dn = t;
      }
    }
    if (i_up == n || j_dn == n) {
      model.converged = true;
      break;
    }
    const double gap = g_max - g_min;
    if (gap <= params.kkt_tolerance) {
      model.converged = true;
      break;
    }

    const auto& qi = cache.row(i_up);
    double eta = qi[i_up] + cache.row(j_dn)[j_dn] - 2.0 * qi[j_dn];
    if (eta < TAU) eta = TAU;
    const double room_i = C - alpha[i_up];
    const double room_j = alpha[j_dn];
    double d = gap / eta;
    if (d > room_i) d = room_i;
    if (d > room_j) d = room_j;
    alpha[i_up] += d;
    alpha[j_dn] -= d;
    if (d == room_i) alpha[i_up] = C;
    if (d == room_j) alpha[j_dn] = 0.0;

    const auto& qj = cache.row(j_dn);
    const auto& qi2 = cache.row(i_up);
    for (std::size_t t = 0; t < n; ++t) grad[t] += d * (qi2[t] - qj[t]);
  }
  model.iterations = iter;

  // rho from the KKT conditions: free support vectors sit on the boundary, so
  // their gradient equals rho; with none free, any value between the bounded
  // sides' gradients is consistent and the midpoint is taken. Pair updates
  // conserve mass, so a step that mathematically lands on a bound can leave
  // roundoff dust behind; classify within a relative tolerance of the bounds.
  const double bound_tol = 1e-8 * C;
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double lower = -std::numeric_limits<double>::infinity(); // max G over a = C
  double upper = std::numeric_limits<double>::infinity();  // min G over a = 0
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > bound_tol && alpha[t] < C - bound_tol) {
      free_sum += grad[t];
      ++free_count;
    } else if (alpha[t] >= C - bound_tol) {
      lower = std::max(lower, grad[t]);
    } else {
      upper = std::min(upper, grad[t]);
    }
  }
  if (free_count > 0)
    model.rho = free_sum / static_cast<double>(free_count);
  else if (std::isfinite(lower) && std::isfinite(upper))
    model.rho = 0.5 * (lower + upper);
  else if (std::isfinite(lower))
    model.rho = lower;
  else
    model.rho = upper;

  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > bound_tol) {
      model.support_vectors.push_back(data.rows[t].values);
      model.alphas.push_back(alpha[t]);
    }
  }
  return model;
}

inline double decision_value(const ocsvm_model& model, std::span<const double> x) {
  if (x.size() != model.dim)
    throw error(errc::dimension_mismatch, "input dimension does not match the model");
  double sum = 0.0;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
    sum += model.alphas[i] * rbf_kernel(model.support_vectors[i], x, model.gamma);
  return sum - model.rho;
}

// Normal (+1) when the decision value is non-negative, abnormal (-1) otherwise.
inline int predict(const ocsvm_model& model, std::span<const double> x) {
  return decision_value(model, x) >= 0.0 ? +1 : -1;
}

struct kfold_result {
  std::vector<double> fold_far;
  double mean_far = 0.0;
};

// Mean false-alarm rate over k folds of a normal-only matrix: train on k-1
// folds, count the held-out rows predicted abnormal. Fold membership comes
// from a seeded shuffle cut into contiguous near-equal chunks.
inline kfold_result kfold_far(const feature_matrix& normals, const ocsvm_params& params,
                              std::size_t folds, std::uint64_t seed) {
  const std::size_t n = normals.size();
  if (folds < 2) throw error(errc::invalid_params, "k-fold evaluation needs at least two folds");
  if (n < folds * 2)
    throw error(errc::too_few_rows, "each training side needs at least two rows per fold");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  det_rng rng(seed);
  rng.shuffle(order);

  kfold_result result;
  std::size_t begin = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t len = n / folds + (f < n % folds ? 1 : 0);
    const std::size_t end = begin + len;

    feature_matrix train;
    train.column_keys = normals.column_keys;
    for (std::size_t i = 0; i < n; ++i)
      if (i < begin || i >= end) train.rows.push_back(normals.rows[order[i]]);
    ocsvm_model model = train_ocsvm(train, params);

    std::size_t alarms = 0;
    for (std::size_t i = begin; i < end; ++i)
      if (predict(model, normals.rows[order[i]].values) < 0) ++alarms;
    result.fold_far.push_back(len == 0 ? 0.0 : static_cast<double>(alarms) / static_cast<double>(len));
    begin = end;
  }
  double sum = 0.0;
  for (double v : result.fold_far) sum += v;
  result.mean_far = sum / static_cast<double>(folds);
  return result;
}

// Model file: five "key=value" header lines, then nsv lines of
// "<alpha> <v1> ... <vdim>".
inline std::string serialize_model(const ocsvm_model& model) {
  std::string out;
  out += "nu=" + format_double(model.nu) + '\n';
  out += "gamma=" + format_double(model.gamma) + '\n';
  out += "rho=" + format_double(model.rho) + '\n';
  out += "dim=" + std::to_string(model.dim) + '\n';
  out += "nsv=" + std::to_string(model.support_vectors.size()) + '\n';
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    out += format_double(model.alphas[i]);
    for (double v : model.support_vectors[i]) out += ' ' + format_double(v);
    out += '\n';
  }
  return out;
}

inline ocsvm_model parse_model(std::string_view text) {
  ocsvm_model model;
  std::size_t nsv = 0;
  std::size_t header_seen = 0;
  bool have_nsv = false;
  for (std::string_view line : split(text, '\n')) {
    line = trim(line);
    if (line.empty()) continue;
    if (header_seen < 5) {
      auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw error(errc::malformed_token, "model header line lacks '='");
      auto key = line.substr(0, eq);
      auto value = line.substr(eq + 1);
      if (key == "nu")
        model.nu = parse_double(value);
      else if (key == "gamma")
        model.gamma = parse_double(value);
      else if (key == "rho")
        model.rho = parse_double(value);
      else if (key == "dim")
        model.dim = static_cast<std::size_t>(parse_int(value));
      else if (key == "nsv") {
        nsv = static_cast<std::size_t>(parse_int(value));
        have_nsv = true;
      } else
        throw error(errc::malformed_token, "unknown model header key");
      ++header_seen;
      continue;
    }
    auto fields = tokenize(line);
    if (fields.size() != model.dim + 1)
      throw error(errc::malformed_token, "support vector line has the wrong field count");
    model.alphas.push_back(parse_double(fields[0]));
    std::vector<double> sv;
    sv.reserve(model.dim);
    for (std::size_t j = 1; j < fields.size(); ++j) sv.push_back(parse_double(fields[j]));
    model.support_vectors.push_back(std::move(sv));
  }
  if (header_seen < 5 || !have_nsv)
    throw error(errc::malformed_token, "model file is missing header lines");
  if (model.support_vectors.size() != nsv)
    throw error(errc::malformed_token, "model file support vector count does not match header");
  return model;
}

inline void save_model(const ocsvm_model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::io_error, "cannot open " + path.string() + " for writing");
  out << serialize_model(model);
  if (!out) throw error(errc::io_error, "failed writing " + path.string());
}

inline ocsvm_model load_model(const std::filesystem::path& path) {
  return parse_model(detail::read_file(path));
}

} // namespace tsift
