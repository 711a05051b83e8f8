#pragma once

#include <charconv>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracesift/errors.hpp"

namespace tsift {

using syscall_id = std::uint32_t;

inline constexpr syscall_id default_alphabet_bound = 1023;

// Time-ordered sequence of kernel syscall numbers, exactly as read.
struct syscall_trace {
  std::vector<syscall_id> syscalls;
  std::string source_id;

  std::size_t size() const noexcept { return syscalls.size(); }
  std::span<const syscall_id> window(std::size_t pos, std::size_t k) const {
    return std::span<const syscall_id>(syscalls.data() + pos, k);
  }
};

// Parses a whitespace-separated list of decimal syscall numbers. Offsets in
// errors are byte positions into `text`.
inline syscall_trace parse_trace(std::string_view text, std::string source_id,
                                 syscall_id alphabet_bound = default_alphabet_bound) {
  syscall_trace trace;
  trace.source_id = std::move(source_id);
  auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; };
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ws(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t start = i;
    while (i < text.size() && !is_ws(text[i])) ++i;
    std::string_view token = text.substr(start, i - start);

    std::int64_t value = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size() || value < 0)
      throw error(errc::malformed_token, "in " + trace.source_id + " at byte " + std::to_string(start) +
                                             ": '" + std::string(token) + "'");
    if (value > static_cast<std::int64_t>(alphabet_bound))
      throw error(errc::malformed_token, "in " + trace.source_id + " at byte " + std::to_string(start) +
                                             ": syscall id " + std::to_string(value) + " exceeds alphabet bound " +
                                             std::to_string(alphabet_bound));
    trace.syscalls.push_back(static_cast<syscall_id>(value));
  }
  if (trace.syscalls.empty())
    throw error(errc::empty_trace, "no syscall tokens in " + trace.source_id);
  return trace;
}

inline std::string serialize_trace(const syscall_trace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.syscalls.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(trace.syscalls[i]);
  }
  return out;
}

} // namespace tsift
