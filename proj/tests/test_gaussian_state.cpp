#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "fading/errors.hpp"
#include "fading/gaussian_state.hpp"
#include "fading/random.hpp"
#include "support/bridge.hpp"

using namespace fading;
using C = std::complex<double>;
using M4 = Matrix4c<double>;

namespace {

M4 diag4(double a, double b, double c, double d) {
  M4 m = M4::Zero();
  m.diagonal() << a, b, c, d;
  return m;
}

void check_invariants(const GaussianState<double>& s) {
  const M4& v = s.covariance();
  REQUIRE((v - v.adjoint()).norm() <= 1e-12 * (1.0 + v.norm()));
  REQUIRE(std::abs(v(1, 1) - v(0, 0) - 1.0) <= 1e-12 * (1.0 + std::abs(v(0, 0))));
  REQUIRE(std::abs(v(3, 3) - v(2, 2) - 1.0) <= 1e-12 * (1.0 + std::abs(v(2, 2))));
  REQUIRE(v(0, 0).real() >= 0.0);
  REQUIRE(v(2, 2).real() >= 0.0);
  REQUIRE(min_eigenvalue(v) >= -1e-9 * std::max(1.0, v.cwiseAbs().maxCoeff()));
}

}  // namespace

TEST_CASE("tmsv at zero squeezing is the vacuum") {
  const auto s = tmsv_state(0.0);
  CHECK(s.covariance() == diag4(0, 1, 0, 1));
  CHECK(s.mean_a() == C(0));
  CHECK(s.mean_b() == C(0));
}

TEST_CASE("tmsv moments agree with the Fock-basis sums") {
  const auto s = tmsv_state(1.0);
  const auto [occupation, pair] = oracle::fock_tmsv(1.0);
  const auto m = s.moments();
  CHECK(oracle::close(m.n_a, occupation, 1e-12));
  CHECK(oracle::close(m.n_b, occupation, 1e-12));
  CHECK(oracle::close(m.ab.real(), pair, 1e-12));
  CHECK(m.n_a == doctest::Approx(1.38110).epsilon(1e-5));
  CHECK(m.ab.real() == doctest::Approx(1.81343).epsilon(1e-5));
  CHECK(m.adag_b == C(0));
  CHECK(m.m_a == C(0));
  check_invariants(s);
}

TEST_CASE("tmsv has unit commutator offsets") {
  const M4 v = tmsv_state(1.0).covariance();
  CHECK(std::abs(v(1, 1) - v(0, 0) - 1.0) <= 1e-15);
  CHECK(std::abs(v(3, 3) - v(2, 2) - 1.0) <= 1e-15);
}

TEST_CASE("tmsv matrix matches the explicit moment table") {
  for (double xi : {0.1, 0.7, 2.5}) {
    oracle::Moments m;
    m.n_a = m.n_b = std::sinh(xi) * std::sinh(xi);
    m.ab = std::sinh(xi) * std::cosh(xi);
    CHECK((tmsv_state(xi).covariance() - oracle::moment_table(m)).norm() <= 1e-12);
  }
}

TEST_CASE("tmsv rejects negative or non-finite squeezing") {
  CHECK_THROWS_AS(tmsv_state(-0.1), DomainError);
  CHECK_THROWS_AS(tmsv_state(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(tmsv_state(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("balanced asymmetric tmsv equals tmsv") {
  for (double xi : {0.0, 0.3, 1.0, 2.0}) {
    const auto a = asymmetric_tmsv(xi, 0.5);
    const auto t = tmsv_state(xi);
    CHECK((a.covariance() - t.covariance()).cwiseAbs().maxCoeff() <= 1e-12 *
                                                                         std::max(1.0, t.covariance().norm()));
  }
}

TEST_CASE("asymmetric tmsv of vacua is the displaced vacuum") {
  for (double t2 : {0.0, 0.2, 0.95, 1.0}) {
    const auto s = asymmetric_tmsv(0.0, t2, C(2.0, 0.0));
    CHECK(s.covariance() == diag4(0, 1, 0, 1));
    CHECK(s.mean_a() == C(2.0));
    CHECK(s.mean_b() == C(0.0));
  }
}

TEST_CASE("asymmetric tmsv single-mode squeezing term") {
  const auto m = asymmetric_tmsv(1.0, 0.95).moments();
  const double sc = std::sinh(1.0) * std::cosh(1.0);
  CHECK(oracle::close(m.m_a.real(), -0.9 * sc, 1e-12));
  CHECK(m.m_a.real() == doctest::Approx(-1.63209).epsilon(1e-5));
  CHECK(oracle::close(m.m_b.real(), 0.9 * sc, 1e-12));
  CHECK(oracle::close(m.ab.real(), 2.0 * std::sqrt(0.95 * 0.05) * sc, 1e-12));
  check_invariants(asymmetric_tmsv(1.0, 0.95));
}

TEST_CASE("asymmetric tmsv argument checks") {
  CHECK_THROWS_AS(asymmetric_tmsv(1.0, -0.1), DomainError);
  CHECK_THROWS_AS(asymmetric_tmsv(1.0, 1.1), DomainError);
  CHECK_THROWS_AS(asymmetric_tmsv(-1.0, 0.5), DomainError);
}

TEST_CASE("asymmetric tmsv via explicit beam-splitter algebra") {
  // a = t a1 + r a2, b = -r a1 + t a2 with <a1^2> = -sc, <a2^2> = sc.
  const double xi = 0.8, t2 = 0.3;
  const double t = std::sqrt(t2), r = std::sqrt(1 - t2);
  const double s2 = std::sinh(xi) * std::sinh(xi), sc = std::sinh(xi) * std::cosh(xi);
  oracle::Moments m;
  m.n_a = t * t * s2 + r * r * s2;
  m.n_b = r * r * s2 + t * t * s2;
  m.aa = t * t * (-sc) + r * r * sc;
  m.bb = r * r * (-sc) + t * t * sc;
  m.ab = -t * r * (-sc) + r * t * sc;
  m.adag_b = -t * r * s2 + r * t * s2;
  CHECK((asymmetric_tmsv(xi, t2).covariance() - oracle::moment_table(m)).norm() <= 1e-12);
}

TEST_CASE("displacement moves the means only") {
  const GaussianState<double> vac;
  const auto d = displace(vac, C(1.0), C(0.0));
  CHECK(d.mean_a() == C(1.0));
  CHECK(d.mean_b() == C(0.0));
  CHECK(d.covariance() == vac.covariance());

  const auto t = tmsv_state(1.0);
  const auto td = displace(t, std::polar(3.0, M_PI / 4), C(0.0));
  CHECK(td.covariance() == t.covariance());

  const auto back = displace(displace(t, C(1.0), C(0.0)), C(-1.0), C(0.0));
  CHECK(back.mean_a() == t.mean_a());
  CHECK(back.mean_b() == t.mean_b());
  CHECK(back.covariance() == t.covariance());

  CHECK_THROWS_AS(displace(vac, C(std::numeric_limits<double>::infinity()), C(0)), DomainError);
}

TEST_CASE("partial transpose examples") {
  const GaussianState<double> vac;
  CHECK(partial_transpose(vac).matrix() == diag4(0, 1, 0, 1));

  const auto pt = partial_transpose(tmsv_state(1.0)).matrix();
  const double sc = std::sinh(1.0) * std::cosh(1.0);
  // 1-based (1,3), (3,1), (1,4), (4,1)
  CHECK(oracle::close(pt(0, 2).real(), sc, 1e-14));
  CHECK(oracle::close(pt(2, 0).real(), sc, 1e-14));
  CHECK(pt(0, 3) == C(0));
  CHECK(pt(3, 0) == C(0));
  CHECK(pt(0, 2).real() == doctest::Approx(1.81343).epsilon(1e-5));
}

TEST_CASE("partial transpose is a Hermitian involution matching the entry table") {
  random::Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    const auto s = random::gaussian_state(rng);
    const M4 v = s.covariance();
    const M4 pt = partial_transpose(v);
    REQUIRE((pt - oracle::pt_entries(v)).norm() <= 1e-13 * (1.0 + v.norm()));
    REQUIRE((pt - pt.adjoint()).norm() <= 1e-12 * (1.0 + v.norm()));
    REQUIRE((partial_transpose(pt) - v).norm() <= 1e-13 * (1.0 + v.norm()));
    // (A, C^dag X; X C, B^T)
    const Matrix2c<double> b = v.bottomRightCorner<2, 2>();
    REQUIRE((pt.bottomRightCorner<2, 2>() - b.transpose()).norm() <= 1e-13 * (1.0 + v.norm()));
  }
}

TEST_CASE("simon witness examples") {
  CHECK(simon_witness_direct(GaussianState<double>()) == doctest::Approx(0.0));
  const double s = std::sinh(1.0), c = std::cosh(1.0);
  const double w = simon_witness_direct(tmsv_state(1.0));
  CHECK(oracle::close(w, -s * s * c * c, 1e-12));
  CHECK(w == doctest::Approx(-3.288529).epsilon(1e-6));
  const double brute =
      oracle::det(oracle::pt_entries(tmsv_state(1.0).covariance())).real();
  CHECK(oracle::close(w, brute, 1e-12));
  CHECK(simon_witness_direct(thermal_state(0.5, 0.5)) == doctest::Approx(0.5625).epsilon(1e-14));
}

TEST_CASE("tmsv witness closed form on 50 squeezing values") {
  for (int k = 0; k < 50; ++k) {
    const double xi = 3.0 * k / 49.0;
    const double s = std::sinh(xi), c = std::cosh(xi);
    const double want = -s * s * c * c;
    const double got = simon_witness_direct(tmsv_state(xi));
    REQUIRE(std::abs(got - want) <= 1e-10 * std::abs(want) + 1e-300);
  }
}

TEST_CASE("witness ignores displacement without a channel") {
  random::Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    const auto s = random::gaussian_state(rng);
    const double w0 = simon_witness_direct(s.with_means(0.0, 0.0));
    const double w1 = simon_witness_direct(s);
    REQUIRE(w1 == w0);
  }
}

TEST_CASE("duan matrix examples") {
  CHECK(duan_matrix(GaussianState<double>()) == Matrix2c<double>::Zero());
  const auto d = duan_matrix(tmsv_state(1.0));
  const double s = std::sinh(1.0), c = std::cosh(1.0);
  CHECK(oracle::close(d(0, 0).real(), s * s, 1e-14));
  CHECK(oracle::close(d(0, 1).real(), s * c, 1e-14));
  CHECK(oracle::close(d(1, 0).real(), s * c, 1e-14));
  CHECK(oracle::close(d(1, 1).real(), s * s, 1e-14));
  CHECK(oracle::close(d.determinant().real(), -s * s, 1e-12));
  CHECK(d.determinant().real() == doctest::Approx(-1.38110).epsilon(1e-5));
  CHECK(duan_matrix(thermal_state(0.5, 0.5)).determinant().real() == doctest::Approx(0.25));
}

TEST_CASE("duan matrix picks rows and columns one and three of the transpose") {
  random::Rng rng(23);
  const auto s = random::gaussian_state(rng);
  const M4 pt = oracle::pt_entries(s.covariance());
  const auto d = duan_matrix(s);
  CHECK(std::abs(d(0, 0) - pt(0, 0)) <= 1e-14);
  CHECK(std::abs(d(0, 1) - pt(0, 2)) <= 1e-14);
  CHECK(std::abs(d(1, 0) - pt(2, 0)) <= 1e-14);
  CHECK(std::abs(d(1, 1) - pt(2, 2)) <= 1e-14);
}

TEST_CASE("random Bogoliubov states satisfy every invariant") {
  random::Rng rng(24);
  for (int i = 0; i < 500; ++i) check_invariants(random::gaussian_state(rng));
}

TEST_CASE("matrix constructor rejects unphysical input") {
  M4 v = diag4(0, 1, 0, 1);
  CHECK_NOTHROW(GaussianState<double>(0.0, 0.0, v));

  M4 non_hermitian = v;
  non_hermitian(0, 2) = C(0.5, 0.0);
  CHECK_THROWS_AS(GaussianState<double>(0.0, 0.0, non_hermitian), DomainError);

  M4 bad_offset = diag4(0, 2, 0, 1);
  CHECK_THROWS_AS(GaussianState<double>(0.0, 0.0, bad_offset), DomainError);

  // Too much two-mode correlation for the occupation: not PSD.
  oracle::Moments m;
  m.n_a = m.n_b = 0.1;
  m.ab = 1.0;
  CHECK_THROWS_AS(GaussianState<double>(0.0, 0.0, oracle::moment_table(m)), DomainError);

  M4 nan = v;
  nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(GaussianState<double>(0.0, 0.0, nan), DomainError);

  CHECK_THROWS_AS(thermal_state(-1.0, 0.0), DomainError);
}

TEST_CASE("moment table round trip") {
  random::Rng rng(25);
  const auto s = random::gaussian_state(rng);
  const auto rebuilt = GaussianState<double>(s.mean_a(), s.mean_b(), s.moments());
  CHECK((rebuilt.covariance() - s.covariance()).norm() <= 1e-14 * s.covariance().norm());
  CHECK((moment_matrix(central_moments(s.covariance())) - s.covariance()).norm() == 0.0);
}

TEST_CASE("block accessors follow the (A, C^dag; C, B) layout") {
  random::Rng rng(26);
  const auto s = random::gaussian_state(rng);
  const M4& v = s.covariance();
  CHECK(Matrix2c<double>(s.block_a()) == v.topLeftCorner<2, 2>());
  CHECK(Matrix2c<double>(s.block_b()) == v.bottomRightCorner<2, 2>());
  CHECK(Matrix2c<double>(s.block_c()) == v.bottomLeftCorner<2, 2>());
}
