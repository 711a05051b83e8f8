#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tracesift/corpus.hpp"
#include "tracesift/errors.hpp"
#include "tracesift/text.hpp"

namespace tsift {

struct pipeline_config {
  std::size_t n_max = 15; // probe window lengths 1..n_max
  std::vector<double> nu_grid = {0.5, 0.2, 0.1, 0.05, 0.01};
  double gamma = 0.0; // <= 0: 1/dim at train time
  double kkt_tolerance = 1e-3;
  std::size_t max_iterations = 1'000'000;
  double epsilon = 0.001; // shortlist slack below the best F1
  bool validation_split = false;
  double train_fraction = 0.7; // used only with validation_split
  std::uint64_t seed = 42;
  unsigned jobs = 1;
};

inline void validate_config(const pipeline_config& cfg) {
  if (cfg.n_max < 2)
    throw error(errc::invalid_params, "probe range must reach at least k=2");
  if (cfg.nu_grid.empty()) throw error(errc::invalid_params, "nu grid is empty");
  for (double nu : cfg.nu_grid)
    if (!(nu > 0.0 && nu <= 1.0))
      throw error(errc::invalid_params, "nu values must lie in (0,1]");
  std::vector<double> sorted = cfg.nu_grid;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw error(errc::invalid_params, "nu grid contains duplicates");
  if (cfg.epsilon < 0.0) throw error(errc::invalid_params, "epsilon must be non-negative");
  if (cfg.kkt_tolerance <= 0.0)
    throw error(errc::invalid_params, "kkt_tolerance must be positive");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
    throw error(errc::invalid_params, "train_fraction must lie in (0,1)");
}

inline std::vector<double> parse_nu_list(std::string_view text) {
  std::vector<double> grid;
  for (auto piece : split(text, ','))
    if (!trim(piece).empty()) grid.push_back(parse_double(trim(piece)));
  return grid;
}

// "key = value" lines; '#' starts a comment; unknown keys are rejected so a
// typo cannot silently fall back to a default.
inline void apply_config_file(pipeline_config& cfg, const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw error(errc::malformed_token,
                  path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (key == "kmax_probe")
      cfg.n_max = static_cast<std::size_t>(parse_int(value));
    else if (key == "nu_grid")
      cfg.nu_grid = parse_nu_list(value);
    else if (key == "gamma")
      cfg.gamma = parse_double(value);
    else if (key == "kkt_tolerance")
      cfg.kkt_tolerance = parse_double(value);
    else if (key == "max_iterations")
      cfg.max_iterations = static_cast<std::size_t>(parse_int(value));
    else if (key == "epsilon")
      cfg.epsilon = parse_double(value);
    else if (key == "validation_split")
      cfg.validation_split = value == "true" || value == "1" || value == "yes";
    else if (key == "train_fraction")
      cfg.train_fraction = parse_double(value);
    else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(parse_int(value));
    else if (key == "jobs")
      cfg.jobs = static_cast<unsigned>(parse_int(value));
    else
      throw error(errc::invalid_params,
                  path.string() + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
}

} // namespace tsift
