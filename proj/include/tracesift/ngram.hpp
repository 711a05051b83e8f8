#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tracesift/errors.hpp"
#include "tracesift/text.hpp"
#include "tracesift/trace.hpp"

namespace tsift {

// Set of distinct length-k windows harvested from a trace collection.
// Patterns live in one flat buffer (size() * k ids, lexicographically sorted)
// so membership tests are a binary search over contiguous chunks.
class lk_cluster {
 public:
  lk_cluster() = default;

  lk_cluster(std::size_t k, std::vector<syscall_id> flat_sorted)
      : k_(k), flat_(std::move(flat_sorted)) {
    if (k_ == 0) throw error(errc::invalid_params, "window length k must be positive");
    if (flat_.size() % k_ != 0)
      throw error(errc::invalid_params, "pattern buffer is not a multiple of k");
  }

  std::size_t k() const { return k_; }
  std::size_t size() const { return k_ == 0 ? 0 : flat_.size() / k_; }
  bool empty() const { return flat_.empty(); }

  std::span<const syscall_id> pattern(std::size_t idx) const {
    return {flat_.data() + idx * k_, k_};
  }

  bool contains(std::span<const syscall_id> window) const {
    if (window.size() != k_ || flat_.empty()) return false;
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      const syscall_id* p = flat_.data() + mid * k_;
      int cmp = 0;
      for (std::size_t i = 0; i < k_; ++i) {
        if (p[i] != window[i]) {
          cmp = p[i] < window[i] ? -1 : 1;
          break;
        }
      }
      if (cmp == 0) return true;
      if (cmp < 0)
        lo = mid + 1;
      else
        hi = mid;
    }
    return false;
  }

  // Number of window positions of t whose k-gram is a member. Windows overlap;
  // traces shorter than k have no windows.
  std::size_t count_hits(const syscall_trace& t) const {
    if (t.size() < k_) return 0;
    std::size_t hits = 0;
    for (std::size_t pos = 0; pos + k_ <= t.size(); ++pos)
      if (contains(t.window(pos, k_))) ++hits;
    return hits;
  }

 private:
  std::size_t k_ = 0;
  std::vector<syscall_id> flat_;
};

// Keyed by k; std::map keeps iteration in ascending k order.
using cluster_family = std::map<std::size_t, lk_cluster>;

inline lk_cluster build_cluster(const std::vector<syscall_trace>& traces, std::size_t k) {
  if (k == 0) throw error(errc::invalid_params, "window length k must be positive");

  std::vector<syscall_id> flat;
  std::size_t windows = 0;
  for (const auto& t : traces)
    if (t.size() >= k) windows += t.size() - k + 1;
  flat.reserve(windows * k);
  for (const auto& t : traces)
    for (std::size_t pos = 0; pos + k <= t.size(); ++pos) {
      auto w = t.window(pos, k);
      flat.insert(flat.end(), w.begin(), w.end());
    }

  const std::size_t count = flat.size() / std::max<std::size_t>(k, 1);
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto chunk_less = [&](std::size_t a, std::size_t b) {
    const syscall_id* pa = flat.data() + a * k;
    const syscall_id* pb = flat.data() + b * k;
    return std::lexicographical_compare(pa, pa + k, pb, pb + k);
  };
  std::sort(order.begin(), order.end(), chunk_less);

  std::vector<syscall_id> unique_flat;
  unique_flat.reserve(flat.size());
  const syscall_id* prev = nullptr;
  for (std::size_t idx : order) {
    const syscall_id* p = flat.data() + idx * k;
    if (prev != nullptr && std::equal(p, p + k, prev)) continue;
    unique_flat.insert(unique_flat.end(), p, p + k);
    prev = unique_flat.data() + unique_flat.size() - k;
  }
  unique_flat.shrink_to_fit();
  return lk_cluster(k, std::move(unique_flat));
}

inline cluster_family build_family(const std::vector<syscall_trace>& traces,
                                   const std::vector<std::size_t>& ks) {
  cluster_family family;
  for (std::size_t k : ks) {
    if (family.count(k)) throw error(errc::invalid_params, "duplicate window length in family");
    family.emplace(k, build_cluster(traces, k));
  }
  return family;
}

// Dump format: header "k=<k> count=<n>" followed by n lines of k ids.
inline std::string serialize_cluster(const lk_cluster& cluster) {
  std::string out = "k=" + std::to_string(cluster.k()) + " count=" + std::to_string(cluster.size()) + "\n";
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    auto p = cluster.pattern(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out += ' ';
      out += std::to_string(p[j]);
    }
    out += '\n';
  }
  return out;
}

inline lk_cluster parse_cluster(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t k = 0, count = 0;
  std::vector<syscall_id> flat;
  bool seen_header = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!seen_header) {
      auto fields = tokenize(line);
      if (fields.size() != 2 || !fields[0].starts_with("k=") || !fields[1].starts_with("count="))
        throw error(errc::malformed_token, "cluster header must be 'k=<k> count=<n>'");
      k = static_cast<std::size_t>(parse_int(fields[0].substr(2)));
      count = static_cast<std::size_t>(parse_int(fields[1].substr(6)));
      if (k == 0) throw error(errc::malformed_token, "cluster header has k=0");
      flat.reserve(count * k);
      seen_header = true;
      continue;
    }
    auto fields = tokenize(line);
    if (fields.size() != k)
      throw error(errc::malformed_token,
                  "pattern line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " ids, expected " + std::to_string(k));
    for (auto f : fields) {
      long long v = parse_int(f);
      if (v < 0) throw error(errc::malformed_token, "pattern ids must be non-negative");
      flat.push_back(static_cast<syscall_id>(v));
    }
  }
  if (!seen_header) throw error(errc::malformed_token, "cluster dump is missing its header");
  if (flat.size() != count * k)
    throw error(errc::malformed_token, "cluster dump pattern count does not match header");

  // Normalize: accept unsorted dumps, store sorted unique.
  const std::size_t n = count;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto chunk_less = [&](std::size_t a, std::size_t b) {
    const syscall_id* pa = flat.data() + a * k;
    const syscall_id* pb = flat.data() + b * k;
    return std::lexicographical_compare(pa, pa + k, pb, pb + k);
  };
  std::sort(order.begin(), order.end(), chunk_less);
  std::vector<syscall_id> unique_flat;
  unique_flat.reserve(flat.size());
  const syscall_id* prev = nullptr;
  for (std::size_t idx : order) {
    const syscall_id* p = flat.data() + idx * k;
    if (prev != nullptr && std::equal(p, p + k, prev)) continue;
    unique_flat.insert(unique_flat.end(), p, p + k);
    prev = unique_flat.data() + unique_flat.size() - k;
  }
  return lk_cluster(k, std::move(unique_flat));
}

inline void save_cluster(const lk_cluster& cluster, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::io_error, "cannot open " + path.string() + " for writing");
  out << serialize_cluster(cluster);
  if (!out) throw error(errc::io_error, "failed writing " + path.string());
}

inline lk_cluster load_cluster(const std::filesystem::path& path) {
  return parse_cluster(detail::read_file(path));
}

} // namespace tsift
