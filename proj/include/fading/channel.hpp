#pragma once

// Fading (fluctuating-loss) channels described by the transmittance moments
// that enter the output second-moment matrix.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fading/errors.hpp"
#include "fading/gaussian_state.hpp"

namespace fading {

/// <T_a>, <T_b>, <T_a^2>, <T_b^2>, <T_a T_b> of the amplitude transmission
/// coefficients.
template <typename Real = double>
struct ChannelMoments {
  Real t_a{1};
  Real t_b{1};
  Real t_a2{1};
  Real t_b2{1};
  Real t_ab{1};

  Real var_a() const { return std::max(Real(0), t_a2 - t_a * t_a); }
  Real var_b() const { return std::max(Real(0), t_b2 - t_b * t_b); }
  Real covariance() const { return t_ab - t_a * t_b; }

  bool operator==(const ChannelMoments&) const = default;
};

/// Loss channel with constant transmission; <T_x^n> = eta_x^{n/2}.
template <typename Real = double>
ChannelMoments<Real> deterministic_moments(Real eta_a, Real eta_b) {
  const Real ta = std::sqrt(eta_a);
  const Real tb = std::sqrt(eta_b);
  return {ta, tb, eta_a, eta_b, ta * tb};
}

/// Independent modes: <T_a T_b> = <T_a><T_b>.
template <typename Real = double>
ChannelMoments<Real> uncorrelated_moments(Real t_a, Real t_a2, Real t_b,
                                          Real t_b2) {
  return {t_a, t_b, t_a2, t_b2, t_a * t_b};
}

/// T_a = T_b = T.
template <typename Real = double>
ChannelMoments<Real> correlated_moments(Real t, Real t2) {
  return {t, t, t2, t2, t2};
}

/// Slack granted to the moment inequalities for rounding in the inputs.
inline constexpr double kMomentSlack = 1e-12;

/// Throws ChannelError naming the first violated moment inequality.
template <typename Real>
void validate(const ChannelMoments<Real>& m) {
  const Real eps(kMomentSlack);
  auto fail = [](const std::string& what) {
    throw ChannelError("invalid channel moments: " + what);
  };
  const Real values[] = {m.t_a, m.t_b, m.t_a2, m.t_b2, m.t_ab};
  for (Real x : values)
    if (!std::isfinite(x)) fail("moments must be finite");
  auto check_mode = [&](Real t, Real t2, const char* mode) {
    const std::string x(mode);
    if (t < -eps || t > Real(1) + eps) fail("0 <= <T_" + x + "> <= 1 violated");
    if (t2 > t + eps) fail("<T_" + x + "^2> <= <T_" + x + "> violated");
    if (t * t > t2 + eps)
      fail("<T_" + x + ">^2 <= <T_" + x + "^2> violated");
  };
  check_mode(m.t_a, m.t_a2, "a");
  check_mode(m.t_b, m.t_b2, "b");
  if (m.t_ab < -eps) fail("<T_a T_b> >= 0 violated");
  if (m.t_ab * m.t_ab > m.t_a2 * m.t_b2 + eps)
    fail("Cauchy-Schwarz <T_a T_b>^2 <= <T_a^2><T_b^2> violated");
  if (std::abs(m.covariance()) > std::sqrt(m.var_a() * m.var_b()) + eps)
    fail("covariance bound |<dT_a dT_b>| <= sqrt(<dT_a^2><dT_b^2>) "
         "violated");
}

template <typename Real = double>
struct CorrelationCoefficients {
  Real gamma{1};
  Real delta_gamma{0};
};

/// Variances below this are treated as exactly zero.
inline constexpr double kZeroVariance = 1e-15;

/// Gamma = <T_a T_b>/sqrt(<T_a^2><T_b^2>) and
/// DeltaGamma = <dT_a dT_b>/sqrt(<dT_a^2><dT_b^2>); DeltaGamma is 0 when
/// either variance vanishes or the covariance is at rounding level.
template <typename Real>
CorrelationCoefficients<Real> correlation_coefficients(
    const ChannelMoments<Real>& m) {
  validate(m);
  if (m.t_a2 <= Real(0) || m.t_b2 <= Real(0))
    throw DegenerateChannelError(
        "degenerate channel: <T^2> = 0 means the mode is completely lost");
  CorrelationCoefficients<Real> out;
  out.gamma = std::clamp(m.t_ab / std::sqrt(m.t_a2 * m.t_b2), Real(0), Real(1));
  const Real va = m.var_a();
  const Real vb = m.var_b();
  const Real rounding = Real(16) * std::numeric_limits<Real>::epsilon() *
                        std::max(std::abs(m.t_ab), std::abs(m.t_a * m.t_b));
  if (va > Real(kZeroVariance) && vb > Real(kZeroVariance) &&
      std::abs(m.covariance()) > rounding)
    out.delta_gamma =
        std::clamp(m.covariance() / std::sqrt(va * vb), Real(-1), Real(1));
  return out;
}

/// V_{eta_a, eta_b, gamma}: constant loss eta_x on each mode with the
/// cross block additionally scaled by gamma.
template <typename Real>
Matrix4c<Real> attenuated_covariance(const Matrix4c<Real>& v, Real eta_a,
                                     Real eta_b, Real gamma = Real(1)) {
  Vector4c<Real> scale;
  scale << std::sqrt(eta_a), std::sqrt(eta_a), std::sqrt(eta_b),
      std::sqrt(eta_b);
  Matrix4c<Real> out = scale.asDiagonal() * v * scale.asDiagonal();
  out.template bottomLeftCorner<2, 2>() *= gamma;
  out.template topRightCorner<2, 2>() *= gamma;
  out(1, 1) += Real(1) - eta_a;
  out(3, 3) += Real(1) - eta_b;
  return out;
}

enum class ChannelPath {
  block,       // block formula for the output matrix
  moment_map,  // entry-by-entry map of the normally ordered moments
};

namespace detail {

// (conj(mean), mean)
template <typename Real>
Vector2c<Real> amplitude_vector(Complex<Real> mean) {
  return Vector2c<Real>(std::conj(mean), mean);
}

template <typename Real>
GaussianState<Real> apply_channel_block(const GaussianState<Real>& state,
                                        const ChannelMoments<Real>& m) {
  const Vector2c<Real> amp_a = amplitude_vector(state.mean_a());
  const Vector2c<Real> amp_b = amplitude_vector(state.mean_b());
  Matrix2c<Real> vacuum_fill = Matrix2c<Real>::Zero();
  vacuum_fill(1, 1) = Real(1);  // (1 - Z)/2

  const Matrix2c<Real> a_out = m.t_a2 * state.block_a() +
                               (Real(1) - m.t_a2) * vacuum_fill +
                               m.var_a() * amp_a * amp_a.adjoint();
  const Matrix2c<Real> b_out = m.t_b2 * state.block_b() +
                               (Real(1) - m.t_b2) * vacuum_fill +
                               m.var_b() * amp_b * amp_b.adjoint();
  const Matrix2c<Real> c_out =
      m.t_ab * state.block_c() + m.covariance() * amp_b * amp_a.adjoint();
  const Matrix4c<Real> v =
      blockdet::assemble(a_out, b_out, c_out, c_out.adjoint());
  return GaussianState<Real>(m.t_a * state.mean_a(), m.t_b * state.mean_b(),
                             central_moments(v));
}

template <typename Real>
GaussianState<Real> apply_channel_moment_map(const GaussianState<Real>& state,
                                             const ChannelMoments<Real>& m) {
  // x = (a, a^dag, b, b^dag); V_ij = <dx_i^dag dx_j>.
  const Complex<Real> alpha = state.mean_a();
  const Complex<Real> beta = state.mean_b();
  const Complex<Real> mean[4] = {alpha, std::conj(alpha), beta,
                                 std::conj(beta)};
  const Complex<Real> mean_out[4] = {m.t_a * mean[0], m.t_a * mean[1],
                                     m.t_b * mean[2], m.t_b * mean[3]};
  const Matrix4c<Real>& v = state.covariance();
  Matrix4c<Real> v_out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      // x_i^dag x_j is anti-normally ordered only for a a^dag and b b^dag.
      const Real commutator = (i == j && (i == 1 || i == 3)) ? Real(1) : Real(0);
      const Complex<Real> normal =
          v(i, j) + std::conj(mean[i]) * mean[j] - commutator;
      const bool mode_a_i = i < 2;
      const bool mode_a_j = j < 2;
      const Real weight = (mode_a_i && mode_a_j)     ? m.t_a2
                          : (!mode_a_i && !mode_a_j) ? m.t_b2
                                                     : m.t_ab;
      v_out(i, j) = weight * normal + commutator -
                    std::conj(mean_out[i]) * mean_out[j];
    }
  }
  return GaussianState<Real>(mean_out[0], mean_out[2], central_moments(v_out));
}

}  // namespace detail

/// State after the fading channel. Output means are <T_x> times the input
/// means; the second moments follow from <T_a^{n+m} T_b^{k+l}> acting on
/// the normally ordered moments.
template <typename Real>
GaussianState<Real> apply_channel(const GaussianState<Real>& state,
                                  const ChannelMoments<Real>& m,
                                  ChannelPath path = ChannelPath::block) {
  validate(m);
  return path == ChannelPath::block ? detail::apply_channel_block(state, m)
                                    : detail::apply_channel_moment_map(state, m);
}

}  // namespace fading
