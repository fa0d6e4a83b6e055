#pragma once

// Run configuration for the command-line front end: strict JSON parsing,
// a resolved echo that re-parses to the same configuration, and the
// command dispatcher.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "fading/experiments.hpp"
#include "fading/gaussian_state.hpp"
#include "fading/pdt.hpp"
#include "fading/serialize.hpp"

namespace fading {

enum class Command {
  witness,
  channel_moments,
  adaptive,
  sweep_squeezing,
  contour_displacement,
  region_phase,
  identity_suite,
};

std::string to_string(Command c);
Command command_from_string(const std::string& name);  // throws ConfigError

enum class OutputFormat { csv, json };

struct StateSpec {
  std::string family{"tmsv"};  // tmsv | asymmetric-tmsv | explicit
  double xi{1.0};
  double t2{0.5};
  std::complex<double> alpha{};
  std::complex<double> beta{};
  std::optional<GaussianState<double>> explicit_state;

  GaussianState<double> build() const;
};

struct OutputSpec {
  std::string path;  // empty: standard output only (or a default file for sweeps)
  OutputFormat format{OutputFormat::json};
};

struct Tolerances {
  double witness_rel{1e-9};
  double witness_abs{1e-12};
  double bisection{1e-6};
  double verify_fraction{0.01};
};

struct SqueezingSection {
  double xi_min{0.0};
  double xi_max{5.0};
  std::size_t n_points{201};
};

struct IdentitySection {
  std::size_t instances{10000};
  std::size_t psd_instances{1000};
};

struct RunConfig {
  Command command{Command::witness};
  StateSpec state;
  PdtModel channel;
  OutputSpec output;
  std::uint64_t seed{1};
  Tolerances tolerances;
  bool gamma_check{false};
  SqueezingSection squeezing;
  PolarGrid contour;
  PhaseGrid region;
  IdentitySection identity;
};

/// Defaults for a command with no configuration file: the figure
/// reproductions use the bundled channels.
RunConfig default_config(Command command);

/// Bundled channels: "144km", "1.6km", "gamma-0.9", "144km-correlated",
/// "1.6km-correlated", "uniform-independent".
PdtModel preset_channel(const std::string& name);

/// Parses a configuration object. Missing sections take the defaults of the
/// command. Relative file references resolve against base_dir.
RunConfig parse_config(const json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& file);

/// Resolved configuration: every field explicit, channel inline.
json to_json(const RunConfig& config);

/// Writes text to path through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// Directory that relative output paths resolve against
/// ($FADING_OUTPUT_DIR, else the working directory).
std::filesystem::path output_directory();

/// Executes the configured command. Reports go to `out`; files are written
/// for an output path or for sweeps. Returns 0 on success and 1 when a
/// check performed by the command fails. Errors propagate as exceptions.
int run(const RunConfig& config, std::ostream& out);

}  // namespace fading
