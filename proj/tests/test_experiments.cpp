#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fading/errors.hpp"
#include "fading/experiments.hpp"

using namespace fading;

namespace {

const ChannelMoments<double> k144 = uncorrelated_moments(0.027, 0.001, 0.027, 0.001);
const ChannelMoments<double> k16 = uncorrelated_moments(0.398, 0.163, 0.398, 0.163);
const ChannelMoments<double> g09{0.9, 0.9, 0.9, 0.9, 0.81};

double radius_spread(const SweepResult& r) {
  double lo = 1e300, hi = 0;
  for (const auto& b : r.boundary) {
    lo = std::min(lo, b.root);
    hi = std::max(hi, b.root);
  }
  return hi - lo;
}

}  // namespace

TEST_CASE("bisection keeps an opposite-sign bracket") {
  const auto b = bisect_sign_change([](double x) { return x * x - 2.0; }, 0.0, 3.0, 1e-10);
  CHECK(b.hi - b.lo <= 1e-10);
  CHECK(b.f_lo * b.f_hi < 0.0);
  CHECK(b.root() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(bisect_sign_change([](double x) { return x + 1.0; }, 0.0, 1.0, 1e-6),
                  MisuseError);
}

TEST_CASE("squeezing sweep finds the single threshold at artanh(Gamma)") {
  for (const auto& m : {k144, k16}) {
    const auto r = squeezing_sweep(m, 0.0, 5.0, 201);
    const double want = std::atanh(correlation_coefficients(m).gamma);
    REQUIRE(r.boundary.size() == 1);
    CHECK(r.status == "sign-change");
    CHECK(std::abs(r.boundary[0].root - want) <= 1e-6);
    CHECK(r.boundary[0].w_lo * r.boundary[0].w_hi < 0.0);
    CHECK(r.boundary[0].hi - r.boundary[0].lo <= 1e-6);
    CHECK(r.metadata.at("analytic_threshold_symmetric_uncorrelated").get<double>() ==
          doctest::Approx(want));
  }
  CHECK(std::abs(squeezing_sweep(k144, 0.0, 5.0, 201).boundary[0].root - 0.92659) <= 1e-5);
  CHECK(std::abs(squeezing_sweep(k16, 0.0, 5.0, 201).boundary[0].root - 2.1237560) <= 1e-6);
}

TEST_CASE("sweep rows match the axes") {
  const auto r = squeezing_sweep(k16, 0.0, 5.0, 201);
  CHECK(r.grid_size() == 201);
  CHECK(r.rows.size() == 201);
  for (const auto& row : r.rows) REQUIRE(row.size() == r.columns.size());
  CHECK(r.columns.front() == "xi");
  CHECK(std::find(r.columns.begin(), r.columns.end(), "w_atm") != r.columns.end());
  const auto xi = r.column("xi");
  CHECK(xi.front() == 0.0);
  CHECK(xi.back() == 5.0);
  CHECK_THROWS_AS(r.column("nope"), MisuseError);
}

TEST_CASE("deterministic loss keeps the tmsv entangled on the full range") {
  const auto r = squeezing_sweep(deterministic_moments(0.5, 0.5), 0.01, 5.0, 201);
  CHECK(r.boundary.empty());
  CHECK(r.status == "entangled on full range");
  for (double w : r.column("w_atm")) REQUIRE(w < 0.0);
}

TEST_CASE("sweep status when nothing is entangled") {
  const auto r = squeezing_sweep(k144, 2.0, 5.0, 50);
  CHECK(r.status == "no entanglement anywhere");
  CHECK(r.boundary.empty());
}

TEST_CASE("sweep rejects invalid ranges") {
  CHECK_THROWS_AS(squeezing_sweep(k16, 1.0, 0.5, 10), DomainError);
  CHECK_THROWS_AS(squeezing_sweep(k16, -1.0, 0.5, 10), DomainError);
  CHECK_THROWS_AS(squeezing_sweep(k16, 0.0, 11.0, 10), DomainError);
  CHECK_THROWS_AS(squeezing_sweep(k16, 0.0, 1.0, 1), DomainError);
}

TEST_CASE("every boundary point brackets a sign change") {
  const auto sweeps = {squeezing_sweep(k16, 0.0, 5.0, 201), displacement_contour(1.0, 0.95, g09),
                       phase_region_map(0.5, correlated_moments(0.398, 0.163))};
  for (const auto& r : sweeps)
    for (const auto& b : r.boundary) {
      REQUIRE(b.w_lo * b.w_hi < 0.0);
      REQUIRE(b.lo <= b.root);
      REQUIRE(b.root <= b.hi);
      REQUIRE(b.hi - b.lo <= 1e-6);
    }
}

TEST_CASE("symmetric tmsv contour is a circle") {
  const auto r = displacement_contour(1.0, 0.5, g09);
  CHECK(r.status == "closed contour");
  CHECK(r.boundary.size() == 64);
  CHECK(radius_spread(r) < 1e-6);
  const auto w = r.column("w_atm");
  const auto rad = r.column("r");
  for (std::size_t i = 0; i < w.size(); ++i)
    if (rad[i] == 0.0) REQUIRE(w[i] < 0.0);
}

TEST_CASE("asymmetric tmsv contour is elongated") {
  const auto r = displacement_contour(1.0, 0.95, g09);
  CHECK(r.boundary.size() == 64);
  CHECK(radius_spread(r) > 1e-3);
  CHECK(r.metadata.at("radius_max").get<double>() > r.metadata.at("radius_min").get<double>());
  const auto w = r.column("w_atm");
  const auto rad = r.column("r");
  for (std::size_t i = 0; i < w.size(); ++i)
    if (rad[i] == 0.0) REQUIRE(w[i] < 0.0);
}

TEST_CASE("contour interior is entangled and exterior is not") {
  const auto r = displacement_contour(1.0, 0.95, g09, PolarGrid{16, 200, 8.0});
  const auto theta = r.column("theta");
  const auto rad = r.column("r");
  const auto w = r.column("w_atm");
  for (const auto& b : r.boundary)
    for (std::size_t i = 0; i < w.size(); ++i)
      if (theta[i] == b.fixed[0]) {
        if (rad[i] < b.lo) REQUIRE(w[i] < 0.0);
        if (rad[i] > b.hi) REQUIRE(w[i] > 0.0);
      }
}

TEST_CASE("rays without a root are reported") {
  const auto r = displacement_contour(1.0, 0.5, g09, PolarGrid{8, 20, 0.5});
  CHECK(r.boundary.empty());
  CHECK(r.status == "8 unbounded rays");
  CHECK(r.metadata.at("unbounded_rays").size() == 8);
  CHECK_THROWS_AS(displacement_contour(1.0, 0.5, g09, PolarGrid{0, 20, 1.0}), DomainError);
}

TEST_CASE("phase region map dimensions and the single-mode column") {
  const auto r = phase_region_map(0.5, correlated_moments(0.398, 0.163));
  CHECK(r.rows.size() == 101 * 101);
  CHECK(r.metadata.at("assumption") == "phi = chi = (phi + chi)/2");
  const auto power = r.column("power_a");
  const auto w = r.column("w_atm");
  std::set<double> at_full;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (power[i] == 50.0) at_full.insert(w[i]);
  REQUIRE(!at_full.empty());
  CHECK(*at_full.rbegin() - *at_full.begin() <= 1e-12 * std::max(1.0, std::abs(*at_full.begin())));
}

TEST_CASE("phase region map routes agree") {
  const auto r = phase_region_map(0.5, correlated_moments(0.398, 0.163), PhaseGrid{50, 21, 21});
  const auto w = r.column("w_atm");
  const auto wc = r.column("w_correlated");
  for (std::size_t i = 0; i < w.size(); ++i)
    REQUIRE(std::abs(w[i] - wc[i]) <= 1e-9 * std::max(1.0, std::abs(w[i])));
  CHECK(r.verification.failed == 0);
  CHECK(r.verification.checked >= 4);
}

TEST_CASE("entangled counts along the phase-sum extremes") {
  const auto r = phase_region_map(0.5, correlated_moments(0.398, 0.163));
  const auto at_zero = entangled_count_at_phase(r, 0.0);
  const auto at_pi = entangled_count_at_phase(r, M_PI);
  CHECK(entangled_count_at_phase(r, -M_PI) == at_pi);
  // phase sum 0 keeps the fluctuation noise off the squeezed quadratures
  CHECK(at_zero >= at_pi);
  CHECK(at_zero > 0);
}

TEST_CASE("Duan persistent region is the same for both correlated channels") {
  const auto a = phase_region_map(0.5, correlated_moments(0.398, 0.163));
  const auto b = phase_region_map(0.5, correlated_moments(0.027, 0.001));
  CHECK(a.column("persistent_region") == b.column("persistent_region"));
  CHECK(a.column("duan_persistent") == b.column("duan_persistent"));
  CHECK(a.column("entangled") != b.column("entangled"));
  CHECK(a.metadata.at("persistent_region_cells").get<int>() > 0);
}

TEST_CASE("phase region map refuses uncorrelated channels") {
  CHECK_THROWS_AS(phase_region_map(0.5, k16), MisuseError);
  CHECK_THROWS_AS(phase_region_map(0.5, correlated_moments(0.398, 0.163), PhaseGrid{50, 1, 10}),
                  DomainError);
}

TEST_CASE("a subset of grid points is verified against the direct route") {
  SweepOptions o;
  o.verify_fraction = 0.1;
  const auto r = squeezing_sweep(k16, 0.0, 5.0, 201, {0.3, 0.1}, {-0.2, 0.0}, o);
  CHECK(r.verification.checked >= 20);
  CHECK(r.verification.failed == 0);
  CHECK(r.verification.max_rel_error <= 1e-9);
}

TEST_CASE("sweeps are deterministic for a seed") {
  SweepOptions o;
  o.seed = 17;
  const auto a = to_csv(displacement_contour(1.0, 0.95, g09, {}, o));
  const auto b = to_csv(displacement_contour(1.0, 0.95, g09, {}, o));
  CHECK(a == b);
  CHECK(boundary_to_csv(phase_region_map(0.5, correlated_moments(0.398, 0.163), {}, o)) ==
        boundary_to_csv(phase_region_map(0.5, correlated_moments(0.398, 0.163), {}, o)));
  CHECK(to_json(squeezing_sweep(k16, 0, 5, 201, {}, {}, o)).dump() ==
        to_json(squeezing_sweep(k16, 0, 5, 201, {}, {}, o)).dump());
}

TEST_CASE("csv layout") {
  SweepOptions o;
  o.display_scale = 1e6;
  const auto r = squeezing_sweep(k144, 0.0, 2.0, 5, {}, {}, o);
  const std::string csv = to_csv(r);
  CHECK(csv.rfind("# experiment: squeezing_sweep\n# metadata: {", 0) == 0);
  CHECK(csv.find("\"display_scale_w_atm\":1000000.0") != std::string::npos);
  const auto header_at = csv.find("\nxi,w_atm,");
  CHECK(header_at != std::string::npos);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 2 + 1 + 5);
  const std::string bcsv = boundary_to_csv(r);
  CHECK(bcsv.rfind("xi,xi_lo,xi_hi,w_lo,w_hi\n", 0) == 0);
  CHECK(std::count(bcsv.begin(), bcsv.end(), '\n') == 2);
}
