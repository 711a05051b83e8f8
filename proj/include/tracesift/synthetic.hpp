#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tracesift/corpus.hpp"
#include "tracesift/errors.hpp"
#include "tracesift/rng.hpp"
#include "tracesift/text.hpp"
#include "tracesift/trace.hpp"

namespace tsift {

// Cycle-plus-noise generator. Normal traces repeat a fixed base cycle over the
// id range [0, alphabet_size) with per-position substitution noise; abnormal
// traces additionally carry one contiguous segment of foreign ids drawn from
// [alphabet_size, 2*alphabet_size), so every abnormal trace contains windows
// no normal trace can contain.
struct synthetic_params {
  std::size_t base_cycle_length = 20;
  std::size_t alphabet_size = 40;
  std::size_t trace_length = 400;
  std::size_t n_normal = 100;
  std::size_t n_abnormal = 50;
  double noise_rate = 0.01;
  double injection_rate = 0.2;
};

inline trace_corpus generate_synthetic(const synthetic_params& params, std::uint64_t seed) {
  if (params.base_cycle_length == 0 || params.trace_length == 0 || params.alphabet_size == 0 ||
      params.n_normal == 0)
    throw error(errc::invalid_params, "lengths, alphabet size and n_normal must be positive");
  if (!(params.noise_rate >= 0.0 && params.noise_rate <= 1.0) ||
      !(params.injection_rate >= 0.0 && params.injection_rate <= 1.0))
    throw error(errc::invalid_params, "rates must lie in [0,1]");

  det_rng rng(seed);

  std::vector<syscall_id> cycle(params.base_cycle_length);
  for (auto& id : cycle) id = static_cast<syscall_id>(rng.next_below(params.alphabet_size));

  auto make_normal = [&](const std::string& tag) {
    syscall_trace t;
    t.source_id = tag;
    t.syscalls.resize(params.trace_length);
    for (std::size_t i = 0; i < params.trace_length; ++i) {
      syscall_id id = cycle[i % params.base_cycle_length];
      if (params.noise_rate > 0.0 && rng.next_unit() < params.noise_rate)
        id = static_cast<syscall_id>(rng.next_below(params.alphabet_size));
      t.syscalls[i] = id;
    }
    return t;
  };

  auto inject = [&](syscall_trace& t) {
    if (params.injection_rate <= 0.0) return;
    const std::size_t len = std::min(
        params.trace_length,
        static_cast<std::size_t>(std::ceil(params.injection_rate * static_cast<double>(params.trace_length))));
    const std::size_t offset = static_cast<std::size_t>(rng.next_below(params.trace_length - len + 1));
    for (std::size_t i = 0; i < len; ++i)
      t.syscalls[offset + i] =
          static_cast<syscall_id>(params.alphabet_size + rng.next_below(params.alphabet_size));
  };

  trace_corpus corpus;
  for (std::size_t i = 0; i < params.n_normal; ++i)
    corpus.training_normals.push_back(make_normal("synthetic/train/" + std::to_string(i)));
  for (std::size_t i = 0; i < params.n_normal; ++i)
    corpus.test_normals.push_back(make_normal("synthetic/normal/" + std::to_string(i)));
  for (std::size_t i = 0; i < params.n_abnormal; ++i) {
    syscall_trace t = make_normal("synthetic/abnormal/" + std::to_string(i));
    inject(t);
    corpus.test_abnormals.push_back(t);
  }
  return corpus;
}

// "key = value" description of a generated corpus; '#' starts a comment.
// Recognized keys are the synthetic_params fields plus "seed".
struct synthetic_spec {
  synthetic_params params;
  std::uint64_t seed = 1;
};

inline synthetic_spec parse_synthetic_spec(std::string_view text) {
  synthetic_spec spec;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw error(errc::malformed_token,
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (key == "base_cycle_length")
      spec.params.base_cycle_length = static_cast<std::size_t>(parse_int(value));
    else if (key == "alphabet_size")
      spec.params.alphabet_size = static_cast<std::size_t>(parse_int(value));
    else if (key == "trace_length")
      spec.params.trace_length = static_cast<std::size_t>(parse_int(value));
    else if (key == "n_normal")
      spec.params.n_normal = static_cast<std::size_t>(parse_int(value));
    else if (key == "n_abnormal")
      spec.params.n_abnormal = static_cast<std::size_t>(parse_int(value));
    else if (key == "noise_rate")
      spec.params.noise_rate = parse_double(value);
    else if (key == "injection_rate")
      spec.params.injection_rate = parse_double(value);
    else if (key == "seed")
      spec.seed = static_cast<std::uint64_t>(parse_int(value));
    else
      throw error(errc::invalid_params,
                  "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return spec;
}

inline trace_corpus load_synthetic(const std::filesystem::path& path) {
  const synthetic_spec spec = parse_synthetic_spec(detail::read_file(path));
  return generate_synthetic(spec.params, spec.seed);
}

} // namespace tsift

