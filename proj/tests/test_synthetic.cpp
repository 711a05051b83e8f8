#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tracesift/synthetic.hpp"

using tsift::errc;
using tsift::error;

namespace {

bool identical(const tsift::trace_corpus& a, const tsift::trace_corpus& b) {
  auto same = [](const std::vector<tsift::syscall_trace>& x, const std::vector<tsift::syscall_trace>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].syscalls != y[i].syscalls) return false;
    return true;
  };
  return same(a.training_normals, b.training_normals) && same(a.test_normals, b.test_normals) &&
         same(a.test_abnormals, b.test_abnormals);
}

} // namespace

TEST_CASE("generate_synthetic is reproducible per seed") {
  tsift::synthetic_params params;
  params.n_normal = 10;
  params.n_abnormal = 5;
  REQUIRE(identical(tsift::generate_synthetic(params, 3), tsift::generate_synthetic(params, 3)));
  REQUIRE_FALSE(identical(tsift::generate_synthetic(params, 3), tsift::generate_synthetic(params, 4)));
}

TEST_CASE("generate_synthetic produces the requested counts and lengths") {
  tsift::synthetic_params params;
  params.n_normal = 7;
  params.n_abnormal = 4;
  params.trace_length = 123;
  auto corpus = tsift::generate_synthetic(params, 1);
  REQUIRE(corpus.training_normals.size() == 7);
  REQUIRE(corpus.test_normals.size() == 7);
  REQUIRE(corpus.test_abnormals.size() == 4);
  for (const auto& t : corpus.training_normals) REQUIRE(t.size() == 123);
  for (const auto& t : corpus.test_abnormals) REQUIRE(t.size() == 123);
}

TEST_CASE("normal traces stay inside the alphabet, abnormal ones leave it") {
  tsift::synthetic_params params;
  params.alphabet_size = 16;
  params.n_normal = 20;
  params.n_abnormal = 20;
  auto corpus = tsift::generate_synthetic(params, 11);

  for (const auto& t : corpus.training_normals)
    for (auto id : t.syscalls) REQUIRE(id < 16);
  for (const auto& t : corpus.test_normals)
    for (auto id : t.syscalls) REQUIRE(id < 16);

  for (const auto& t : corpus.test_abnormals) {
    std::size_t foreign = 0;
    for (auto id : t.syscalls) {
      REQUIRE(id < 32);
      if (id >= 16) ++foreign;
    }
    // exactly one contiguous injected run of ceil(rate * length) foreign ids
    const auto expected =
        static_cast<std::size_t>(std::ceil(params.injection_rate * double(params.trace_length)));
    REQUIRE(foreign == expected);
    std::size_t first = t.size(), last = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t.syscalls[i] >= 16) {
        first = std::min(first, i);
        last = i;
      }
    REQUIRE(last - first + 1 == expected);
  }
}

TEST_CASE("zero noise and zero injection reduce to the bare cycle") {
  tsift::synthetic_params params;
  params.noise_rate = 0.0;
  params.injection_rate = 0.0;
  params.base_cycle_length = 5;
  params.trace_length = 50;
  params.n_normal = 3;
  params.n_abnormal = 3;
  auto corpus = tsift::generate_synthetic(params, 9);
  const auto& cycle_src = corpus.training_normals[0].syscalls;
  for (const auto& t : corpus.training_normals)
    for (std::size_t i = 0; i < t.size(); ++i) REQUIRE(t.syscalls[i] == cycle_src[i % 5]);
  // without injection, abnormal traces are indistinguishable from normal ones
  for (const auto& t : corpus.test_abnormals)
    for (std::size_t i = 0; i < t.size(); ++i) REQUIRE(t.syscalls[i] == cycle_src[i % 5]);
}

TEST_CASE("generate_synthetic validates its parameters") {
  tsift::synthetic_params params;
  params.noise_rate = 1.5;
  REQUIRE_THROWS_AS(tsift::generate_synthetic(params, 1), error);
  params = {};
  params.trace_length = 0;
  REQUIRE_THROWS_AS(tsift::generate_synthetic(params, 1), error);
  params = {};
  params.n_normal = 0;
  REQUIRE_THROWS_AS(tsift::generate_synthetic(params, 1), error);
  params = {};
  params.injection_rate = -0.1;
  try {
    tsift::generate_synthetic(params, 1);
    FAIL("expected invalid_params");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::invalid_params);
  }
}

TEST_CASE("parse_synthetic_spec reads keys and rejects unknown ones") {
  auto spec = tsift::parse_synthetic_spec(
      "base_cycle_length = 8\nalphabet_size = 12\ntrace_length = 90 # short\n"
      "n_normal = 30\nn_abnormal = 15\nnoise_rate = 0.02\ninjection_rate = 0.3\nseed = 77\n");
  REQUIRE(spec.params.base_cycle_length == 8);
  REQUIRE(spec.params.alphabet_size == 12);
  REQUIRE(spec.params.trace_length == 90);
  REQUIRE(spec.params.n_normal == 30);
  REQUIRE(spec.params.n_abnormal == 15);
  REQUIRE(spec.params.noise_rate == 0.02);
  REQUIRE(spec.params.injection_rate == 0.3);
  REQUIRE(spec.seed == 77);

  REQUIRE_THROWS_AS(tsift::parse_synthetic_spec("cycle = 8\n"), error);
  REQUIRE_THROWS_AS(tsift::parse_synthetic_spec("n_normal 30\n"), error);
}
