#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "etlab/experiments.hpp"
#include "etlab/kinetic.hpp"
#include "etlab/scheme.hpp"

namespace etlab {

inline const std::vector<std::string> kModes{"macro", "kinetic", "compare",
                                             "sweep", "mms",     "audit"};

struct KineticConfig {
  double eps = 0.1;
  double v_max = 0.0;  ///< 0 selects 8·sqrt(max θ⁰)
  std::size_t n_v = 64;
  KineticOptions options;
  std::vector<double> eps_values{0.4, 0.2, 0.1, 0.05};
  std::size_t refine = 2;
  double macro_tau = 1e-4;
};

struct InitConfig {
  std::string preset = "gauss-bump";
  std::optional<std::vector<double>> rho0;
  std::optional<std::vector<double>> theta0;

  InitFunction function() const;
};

struct OutputConfig {
  std::string directory = "etlab_out";
  std::size_t snapshot_stride = 0;  ///< 0: initial and final snapshots only
};

struct SweepConfig {
  StudyParam param = StudyParam::delta;
  std::vector<double> values{1e-2, 1e-3, 1e-4};
};

struct AuditConfig {
  std::string input_directory;  ///< empty: output.directory
};

struct RunConfig {
  std::string mode;
  std::size_t n_cells = 64;
  double length = 1.0;
  SchemeParams scheme;
  KineticConfig kinetic;
  InitConfig init;
  OutputConfig output;
  SweepConfig sweep;
  MmsSpec mms;
  AuditConfig audit;
};

/// Parse and validate a JSON configuration with dotted `key=value` overrides
/// applied first (values are read as JSON, falling back to a plain string).
/// `mode` names the subcommand; a conflicting "mode" field is an error.
/// Throws ConfigError with the dotted path of the offending field.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {},
                       std::string_view mode = {});

}  // namespace etlab
