#pragma once

#include <stdexcept>
#include <string>

namespace tsift {

enum class errc {
  empty_trace,
  malformed_token,
  missing_directory,
  degenerate_split,
  invalid_params,
  unknown_cluster,
  row_count_mismatch,
  dimension_mismatch,
  infeasible,
  too_few_rows,
  length_mismatch,
  empty_class,
  single_class,
  incomplete_grid,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::empty_trace: return "empty_trace";
    case errc::malformed_token: return "malformed_token";
    case errc::missing_directory: return "missing_directory";
    case errc::degenerate_split: return "degenerate_split";
    case errc::invalid_params: return "invalid_params";
    case errc::unknown_cluster: return "unknown_cluster";
    case errc::row_count_mismatch: return "row_count_mismatch";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::infeasible: return "infeasible";
    case errc::too_few_rows: return "too_few_rows";
    case errc::length_mismatch: return "length_mismatch";
    case errc::empty_class: return "empty_class";
    case errc::single_class: return "single_class";
    case errc::incomplete_grid: return "incomplete_grid";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

} // namespace tsift
