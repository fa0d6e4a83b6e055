#pragma once

// Parameter sweeps over squeezing and coherent displacement with
// bisection-refined entanglement boundaries.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fading/channel.hpp"
#include "fading/witness.hpp"

namespace fading {

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

/// A located root of w_atm along one axis, with the certified bracket.
struct BoundaryRoot {
  std::vector<double> fixed;  // coordinates of the other axes
  double root{0};
  double lo{0};
  double hi{0};
  double w_lo{0};
  double w_hi{0};
};

struct Verification {
  std::size_t checked{0};
  std::size_t failed{0};
  double max_abs_error{0};
  double max_rel_error{0};
};

struct SweepOptions {
  std::uint64_t seed{1};
  double verify_fraction{0.01};
  double bisection_tol{1e-6};
  WitnessTolerance tolerance{};
  double display_scale{1.0};  // recorded in metadata only
};

struct SweepResult {
  std::string name;
  std::vector<SweepAxis> axes;
  std::vector<std::string> columns;  // axis names first, then values
  std::vector<std::vector<double>> rows;
  std::vector<std::string> boundary_columns;
  std::vector<BoundaryRoot> boundary;
  std::string status;
  Verification verification;
  nlohmann::json metadata = nlohmann::json::object();
  double runtime_seconds{0};  // not written to output files

  std::vector<double> column(const std::string& name) const;
  std::size_t grid_size() const;
};

struct Bracket {
  double lo{0};
  double hi{0};
  double f_lo{0};
  double f_hi{0};
  double root() const { return 0.5 * (lo + hi); }
};

/// Bisection on [lo, hi] with f(lo), f(hi) of opposite sign until
/// hi - lo <= tol. The returned bracket still has opposite-sign ends.
Bracket bisect_sign_change(const std::function<double(double)>& f, double lo,
                           double hi, double tol);

/// TMSV witness through the channel as a function of squeezing xi.
SweepResult squeezing_sweep(const ChannelMoments<double>& channel,
                            double xi_lo, double xi_hi, std::size_t n_points,
                            std::complex<double> alpha = {},
                            std::complex<double> beta = {},
                            const SweepOptions& options = {});

struct PolarGrid {
  std::size_t n_rays{64};
  std::size_t n_radial{400};
  double r_max{8.0};
};

/// Radial roots of w_atm(alpha) for the displaced (asymmetric) TMSV family,
/// one per phase ray of alpha = r e^{i theta}.
SweepResult displacement_contour(double xi, double t2,
                                 const ChannelMoments<double>& channel,
                                 const PolarGrid& grid = {},
                                 const SweepOptions& options = {});

struct PhaseGrid {
  double total_power{50.0};  // |<a>|^2 + |<b>|^2
  std::size_t n_power{101};
  std::size_t n_phase{101};
};

/// Entanglement map over |<a>|^2 in [0, P] and phase sum phi + chi in
/// [-pi, pi] for a displaced TMSV through a perfectly correlated channel,
/// with phi = chi = (phi + chi)/2. Also carries the Duan persistent-region
/// layer.
SweepResult phase_region_map(double xi, const ChannelMoments<double>& channel,
                             const PhaseGrid& grid = {},
                             const SweepOptions& options = {});

/// Number of entangled cells in the map column closest to phase_sum.
std::size_t entangled_count_at_phase(const SweepResult& map, double phase_sum);

/// CSV text: one header row then one row per grid point; metadata lines are
/// prefixed with "# " and precede the header.
std::string to_csv(const SweepResult& result);
std::string boundary_to_csv(const SweepResult& result);
nlohmann::json to_json(const SweepResult& result);

}  // namespace fading
