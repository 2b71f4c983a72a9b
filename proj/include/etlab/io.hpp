#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "etlab/grid.hpp"
#include "etlab/scheme.hpp"
#include "etlab/thermo.hpp"

namespace etlab::io {

/// Shortest round-trip-safe text form used in every output file ("%.17g").
std::string fmt17(double x);

/// Parse a number written by fmt17; throws std::invalid_argument.
double parse_double(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws std::out_of_range.
  std::size_t column(std::string_view name) const;
};

/// Comma separated, header first, LF line endings, no quoting (fields never
/// contain commas).
std::string write_csv(const CsvTable& table);

/// Inverse of write_csv; throws std::invalid_argument on ragged rows.
CsvTable parse_csv(std::string_view text);

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

inline constexpr std::string_view kTrajectoryHeader =
    "t,mass,energy,entropy,diss_total,min_theta,max_rho,fp_iters";
inline constexpr std::string_view kSnapshotHeader = "x,rho,theta,E,phi,w";

struct TrajectoryRow {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
  double diss_total = 0.0;
  double min_theta = 0.0;
  double max_rho = 0.0;
  int fp_iters = 0;
};

/// Row for a state; diss_total and fp_iters come from the step that produced it
/// (zero for the initial state).
TrajectoryRow trajectory_row(const Grid1D& grid, double t, const EntropicState& state,
                             const StepReport* report);

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);
std::vector<TrajectoryRow> parse_trajectory_csv(std::string_view text);

std::string snapshot_csv(const Grid1D& grid, const EntropicState& state);

struct Snapshot {
  std::vector<double> x;
  EntropicState state;
};

/// Reads the x, phi and w columns (rho, theta, E are derived views).
Snapshot parse_snapshot_csv(std::string_view text);

}  // namespace etlab::io
