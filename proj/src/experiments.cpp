#include "fading/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "fading/errors.hpp"
#include "fading/gaussian_state.hpp"
#include "fading/serialize.hpp"

namespace fading {

namespace {

using Clock = std::chrono::steady_clock;
using State = GaussianState<double>;
using Report = WitnessReport<double>;

const std::vector<std::string> kTermColumns = {"w_atm", "loss", "N", "F", "S",
                                               "entangled"};

void append_report(std::vector<double>& row, const Report& r) {
  row.insert(row.end(), {r.w_atm, r.term_loss, r.term_N, r.term_F, r.term_S,
                         r.entangled() ? 1.0 : 0.0});
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                    static_cast<double>(n - 1);
  return out;
}

bool agrees(double a, double b, const WitnessTolerance& tol) {
  return std::abs(a - b) <=
         std::max(tol.abs, tol.rel * std::max(std::abs(a), std::abs(b)));
}

// Re-evaluates a seeded random subset of grid points on the direct route
// det(PT(apply_channel(state))).
Verification verify_subset(std::size_t n_rows,
                           const std::function<State(std::size_t)>& state_of,
                           const std::function<double(std::size_t)>& w_of,
                           const ChannelMoments<double>& channel,
                           const SweepOptions& options) {
  Verification v;
  if (n_rows == 0 || options.verify_fraction <= 0.0) return v;
  const auto count = std::clamp<std::size_t>(
      static_cast<std::size_t>(
          std::ceil(options.verify_fraction * static_cast<double>(n_rows))),
      1, n_rows);
  std::vector<std::size_t> all(n_rows);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> picked;
  std::mt19937_64 rng(options.seed);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), count, rng);
  for (std::size_t i : picked) {
    const double direct = witness_direct(state_of(i), channel);
    const double expanded = w_of(i);
    const double err = std::abs(direct - expanded);
    ++v.checked;
    v.max_abs_error = std::max(v.max_abs_error, err);
    if (std::abs(direct) > options.tolerance.abs)
      v.max_rel_error = std::max(v.max_rel_error, err / std::abs(direct));
    if (!agrees(direct, expanded, options.tolerance)) ++v.failed;
  }
  return v;
}

// Sign changes between consecutive non-boundary samples, refined by
// bisection.
std::vector<Bracket> locate_roots(const std::vector<double>& x,
                                  const std::vector<Report>& reports,
                                  const std::function<double(double)>& f,
                                  double tol, bool first_only = false) {
  std::vector<Bracket> out;
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (reports[i].verdict == Verdict::boundary) continue;
    if (prev && reports[*prev].entangled() != reports[i].entangled()) {
      out.push_back(bisect_sign_change(f, x[*prev], x[i], tol));
      if (first_only) break;
    }
    prev = i;
  }
  return out;
}

BoundaryRoot to_root(const Bracket& b, std::vector<double> fixed) {
  return {std::move(fixed), b.root(), b.lo, b.hi, b.f_lo, b.f_hi};
}

nlohmann::json tolerance_json(const SweepOptions& o) {
  return {{"witness_rel", o.tolerance.rel},
          {"witness_abs", o.tolerance.abs},
          {"bisection", o.bisection_tol},
          {"verify_fraction", o.verify_fraction}};
}

nlohmann::json channel_json(const ChannelMoments<double>& m) {
  const auto k = correlation_coefficients(m);
  return {{"moments", to_json(m)}, {"gamma", k.gamma}, {"delta_gamma", k.delta_gamma}};
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join_row(const std::vector<double>& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += format_number(row[i]);
  }
  return out;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  return out;
}

}  // namespace

std::vector<double> SweepResult::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw MisuseError("no column named " + name);
  const auto idx = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

std::size_t SweepResult::grid_size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

Bracket bisect_sign_change(const std::function<double(double)>& f, double lo,
                           double hi, double tol) {
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (!(f_lo * f_hi < 0.0))
    throw MisuseError("bisection needs a bracket with a sign change");
  auto done = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, done, max_iter);
  return {a, b, f(a), f(b)};
}

SweepResult squeezing_sweep(const ChannelMoments<double>& channel, double xi_lo,
                            double xi_hi, std::size_t n_points,
                            std::complex<double> alpha, std::complex<double> beta,
                            const SweepOptions& options) {
  const auto start = Clock::now();
  if (!(xi_lo >= 0.0 && xi_hi <= 10.0 && xi_lo < xi_hi) || n_points < 2)
    throw DomainError(
        "invalid squeezing range: need 0 <= xi_lo < xi_hi <= 10 and >= 2 points");
  const auto k = correlation_coefficients(channel);

  auto state_at = [&](double xi) { return displace(tmsv_state(xi), alpha, beta); };
  auto w_at = [&](double xi) {
    return witness_expansion(state_at(xi), channel, options.tolerance).w_atm;
  };

  SweepResult out;
  out.name = "squeezing_sweep";
  out.axes = {{"xi", linspace(xi_lo, xi_hi, n_points)}};
  const auto& xs = out.axes[0].values;
  out.columns = {"xi"};
  out.columns.insert(out.columns.end(), kTermColumns.begin(), kTermColumns.end());

  std::vector<Report> reports;
  reports.reserve(xs.size());
  for (double xi : xs) {
    reports.push_back(witness_expansion(state_at(xi), channel, options.tolerance));
    std::vector<double> row{xi};
    append_report(row, reports.back());
    out.rows.push_back(std::move(row));
  }

  out.boundary_columns = {"xi", "xi_lo", "xi_hi", "w_lo", "w_hi"};
  for (const auto& b : locate_roots(xs, reports, w_at, options.bisection_tol))
    out.boundary.push_back(to_root(b, {}));

  const bool any_entangled = std::any_of(reports.begin(), reports.end(),
                                         [](const Report& r) { return r.entangled(); });
  const bool any_separable =
      std::any_of(reports.begin(), reports.end(),
                  [](const Report& r) { return r.verdict == Verdict::separable; });
  if (!out.boundary.empty())
    out.status = "sign-change";
  else if (any_entangled && !any_separable)
    out.status = "entangled on full range";
  else if (!any_entangled)
    out.status = "no entanglement anywhere";
  else
    out.status = "mixed without resolved sign change";

  out.verification = verify_subset(
      xs.size(), [&](std::size_t i) { return state_at(xs[i]); },
      [&](std::size_t i) { return reports[i].w_atm; }, channel, options);

  out.metadata = {
      {"experiment", out.name},
      {"state",
       {{"family", "tmsv"}, {"alpha", to_json(alpha)}, {"beta", to_json(beta)}}},
      {"channel", channel_json(channel)},
      {"xi_range", {xi_lo, xi_hi}},
      {"n_points", n_points},
      {"tolerances", tolerance_json(options)},
      {"seed", options.seed},
      {"display_scale_w_atm", options.display_scale},
      {"status", out.status},
      {"analytic_threshold_symmetric_uncorrelated",
       k.gamma < 1.0 ? std::atanh(k.gamma) : std::numeric_limits<double>::infinity()},
  };
  out.runtime_seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

SweepResult displacement_contour(double xi, double t2,
                                 const ChannelMoments<double>& channel,
                                 const PolarGrid& grid,
                                 const SweepOptions& options) {
  const auto start = Clock::now();
  if (grid.n_rays == 0 || grid.n_radial == 0 || !(grid.r_max > 0.0))
    throw DomainError("invalid polar grid");
  correlation_coefficients(channel);
  const State base = asymmetric_tmsv(xi, t2);

  SweepResult out;
  out.name = "displacement_contour";
  std::vector<double> thetas(grid.n_rays);
  for (std::size_t k = 0; k < grid.n_rays; ++k)
    thetas[k] = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(grid.n_rays);
  const std::vector<double> radii = linspace(0.0, grid.r_max, grid.n_radial + 1);
  out.axes = {{"theta", thetas}, {"r", radii}};
  out.columns = {"theta", "r", "re_alpha", "im_alpha"};
  out.columns.insert(out.columns.end(), kTermColumns.begin(), kTermColumns.end());
  out.boundary_columns = {"theta", "radius", "r_lo", "r_hi", "w_lo", "w_hi"};

  std::vector<double> ws;
  std::vector<std::size_t> unbounded;
  double r_min = std::numeric_limits<double>::infinity();
  double r_max = 0.0;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const std::complex<double> dir = std::polar(1.0, thetas[k]);
    auto w_at = [&](double r) {
      return witness_expansion(base.with_means(r * dir, 0.0), channel,
                               options.tolerance)
          .w_atm;
    };
    std::vector<Report> reports;
    reports.reserve(radii.size());
    for (double r : radii) {
      const std::complex<double> alpha = r * dir;
      reports.push_back(
          witness_expansion(base.with_means(alpha, 0.0), channel, options.tolerance));
      std::vector<double> row{thetas[k], r, alpha.real(), alpha.imag()};
      append_report(row, reports.back());
      out.rows.push_back(std::move(row));
      ws.push_back(reports.back().w_atm);
    }
    const auto roots = locate_roots(radii, reports, w_at, options.bisection_tol,
                                    /*first_only=*/true);
    if (roots.empty()) {
      unbounded.push_back(k);
      continue;
    }
    out.boundary.push_back(to_root(roots.front(), {thetas[k]}));
    r_min = std::min(r_min, roots.front().root());
    r_max = std::max(r_max, roots.front().root());
  }
  out.status = unbounded.empty()
                   ? "closed contour"
                   : std::to_string(unbounded.size()) + " unbounded rays";

  const std::size_t per_ray = radii.size();
  out.verification = verify_subset(
      out.rows.size(),
      [&](std::size_t i) {
        return base.with_means(std::polar(radii[i % per_ray], thetas[i / per_ray]), 0.0);
      },
      [&](std::size_t i) { return ws[i]; }, channel, options);

  out.metadata = {
      {"experiment", out.name},
      {"state", {{"family", "asymmetric-tmsv"}, {"xi", xi}, {"t2", t2}}},
      {"channel", channel_json(channel)},
      {"grid", {{"n_rays", grid.n_rays}, {"n_radial", grid.n_radial}, {"r_max", grid.r_max}}},
      {"tolerances", tolerance_json(options)},
      {"seed", options.seed},
      {"status", out.status},
      {"radius_min", out.boundary.empty() ? 0.0 : r_min},
      {"radius_max", r_max},
      {"unbounded_rays", unbounded},
  };
  out.runtime_seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

SweepResult phase_region_map(double xi, const ChannelMoments<double>& channel,
                             const PhaseGrid& grid, const SweepOptions& options) {
  const auto start = Clock::now();
  validate(channel);
  const auto k = correlation_coefficients(channel);
  if (!perfectly_correlated(channel) ||
      (channel.var_a() > kZeroVariance && std::abs(k.delta_gamma - 1.0) > 1e-9))
    throw MisuseError(
        "phase_region_map requires a perfectly correlated channel "
        "(Gamma = DeltaGamma = 1)");
  if (!(grid.total_power >= 0.0) || grid.n_power < 2 || grid.n_phase < 2)
    throw DomainError("invalid phase grid");
  const State base = tmsv_state(xi);

  SweepResult out;
  out.name = "phase_region_map";
  const auto powers = linspace(0.0, grid.total_power, grid.n_power);
  const auto phases = linspace(-M_PI, M_PI, grid.n_phase);
  out.axes = {{"power_a", powers}, {"phase_sum", phases}};
  out.columns = {"power_a", "phase_sum"};
  out.columns.insert(out.columns.end(), kTermColumns.begin(), kTermColumns.end());
  out.columns.insert(out.columns.end(),
                     {"w_correlated", "duan_value", "duan_persistent", "persistent_region"});
  out.boundary_columns = {"phase_sum", "power_a", "power_lo", "power_hi", "w_lo", "w_hi"};

  auto state_at = [&](double power_a, double phase_sum) {
    // phi = chi = (phi + chi)/2
    const double half = 0.5 * phase_sum;
    const double power_b = std::max(0.0, grid.total_power - power_a);
    return base.with_means(std::polar(std::sqrt(power_a), half),
                           std::polar(std::sqrt(power_b), half));
  };

  // reports[j][i]: phase column j, power row i
  std::vector<std::vector<Report>> by_phase(phases.size());
  std::vector<double> ws;
  for (double p : powers) {
    for (std::size_t j = 0; j < phases.size(); ++j) {
      const State s = state_at(p, phases[j]);
      const Report r = witness_expansion(s, channel, options.tolerance);
      const Report rc = witness_correlated(s, channel, options.tolerance);
      const DuanReport<double> d = duan_witness_correlated(s, channel);
      std::vector<double> row{p, phases[j]};
      append_report(row, r);
      row.insert(row.end(),
                 {rc.w_atm, d.value, d.persistent_region_value,
                  d.persistent_region_value < -options.tolerance.abs ? 1.0 : 0.0});
      out.rows.push_back(std::move(row));
      by_phase[j].push_back(r);
      ws.push_back(r.w_atm);
    }
  }

  for (std::size_t j = 0; j < phases.size(); ++j) {
    auto w_at = [&](double p) {
      return witness_expansion(state_at(p, phases[j]), channel, options.tolerance).w_atm;
    };
    for (const auto& b : locate_roots(powers, by_phase[j], w_at, options.bisection_tol))
      out.boundary.push_back(to_root(b, {phases[j]}));
  }

  std::size_t entangled = 0;
  std::size_t persistent = 0;
  for (const auto& row : out.rows) {
    entangled += row[7] > 0.5 ? 1 : 0;
    persistent += row[11] > 0.5 ? 1 : 0;
  }
  out.status = std::to_string(entangled) + " of " + std::to_string(out.rows.size()) +
               " cells entangled";

  const std::size_t n_phase = phases.size();
  out.verification = verify_subset(
      out.rows.size(),
      [&](std::size_t i) { return state_at(powers[i / n_phase], phases[i % n_phase]); },
      [&](std::size_t i) { return ws[i]; }, channel, options);

  out.metadata = {
      {"experiment", out.name},
      {"state", {{"family", "tmsv"}, {"xi", xi}}},
      {"channel", channel_json(channel)},
      {"grid",
       {{"total_power", grid.total_power},
        {"n_power", grid.n_power},
        {"n_phase", grid.n_phase}}},
      {"assumption", "phi = chi = (phi + chi)/2"},
      {"tolerances", tolerance_json(options)},
      {"seed", options.seed},
      {"entangled_cells", entangled},
      {"persistent_region_cells", persistent},
      {"status", out.status},
  };
  out.runtime_seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

std::size_t entangled_count_at_phase(const SweepResult& map, double phase_sum) {
  const auto phase = map.column("phase_sum");
  const auto ent = map.column("entangled");
  double best = std::numeric_limits<double>::infinity();
  for (double p : phase) best = std::min(best, std::abs(p - phase_sum));
  std::size_t count = 0;
  for (std::size_t i = 0; i < phase.size(); ++i)
    if (std::abs(std::abs(phase[i] - phase_sum) - best) <= 1e-12 && ent[i] > 0.5)
      ++count;
  return count;
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "# experiment: " << result.name << '\n';
  out << "# metadata: " << result.metadata.dump() << '\n';
  out << join_names(result.columns) << '\n';
  for (const auto& row : result.rows) out << join_row(row) << '\n';
  return out.str();
}

std::string boundary_to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << join_names(result.boundary_columns) << '\n';
  for (const auto& b : result.boundary) {
    std::vector<double> row = b.fixed;
    row.insert(row.end(), {b.root, b.lo, b.hi, b.w_lo, b.w_hi});
    out << join_row(row) << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json boundary = nlohmann::json::array();
  for (const auto& b : result.boundary) {
    std::vector<double> row = b.fixed;
    row.insert(row.end(), {b.root, b.lo, b.hi, b.w_lo, b.w_hi});
    boundary.push_back(row);
  }
  return {{"experiment", result.name},
          {"metadata", result.metadata},
          {"columns", result.columns},
          {"rows", result.rows},
          {"boundary_columns", result.boundary_columns},
          {"boundary", boundary},
          {"status", result.status},
          {"verification",
           {{"checked", result.verification.checked},
            {"failed", result.verification.failed},
            {"max_abs_error", result.verification.max_abs_error},
            {"max_rel_error", result.verification.max_rel_error}}}};
}

}  // namespace fading
