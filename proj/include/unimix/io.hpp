#pragma once

// File formats and output plumbing: observation files, density CSVs,
// shortest round-trip number formatting, grid specs, and results-directory
// resolution. All parsing is locale-independent.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "unimix/posterior.hpp"

namespace unimix {

// Full-string parse via from_chars; throws std::runtime_error on anything
// but one complete finite-or-infinite decimal number.
double parse_double(const std::string& text);

// One observation per line; blank lines and lines whose first
// non-whitespace character is # are skipped. Throws std::runtime_error
// naming origin and line number on the first malformed line.
std::vector<double> parse_observations(const std::string& text,
                                       const std::string& origin);
std::vector<double> read_observations(const std::filesystem::path& file);

// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

// Header "t,estimate", one row per grid point.
std::string density_csv(const DensityGrid& grid);

void write_text_file(const std::filesystem::path& file,
                     const std::string& content);
void write_density_csv(const std::filesystem::path& file,
                       const DensityGrid& grid);

// "lo:hi:step" with step > 0 and hi >= lo.
struct GridSpec {
  double lo = -10.0;
  double hi = 10.0;
  double step = 0.01;

  static GridSpec parse(const std::string& text);
  std::vector<double> points() const;
};

// Explicit flag beats the UNIMIX_RESULTS_DIR environment variable beats the
// working directory; the directory is created when missing.
std::filesystem::path resolve_results_dir(
    const std::optional<std::string>& out_flag);

}  // namespace unimix
