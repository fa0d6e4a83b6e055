#pragma once

// Closed-form input-output relation for the Simon test through a fading
// channel:
//
//   W_atm = Gamma^2 W_{<Ta^2>,<Tb^2>,1} + (1 - Gamma^2) N
//         + (1 - DeltaGamma^2) F + nu^dag S nu
//
// with the tilde blocks taken from the partially transposed constant-loss
// matrix V_{<Ta^2>,<Tb^2>,1}.

#include <algorithm>
#include <cmath>
#include <string>

#include "fading/block_determinant.hpp"
#include "fading/channel.hpp"
#include "fading/errors.hpp"
#include "fading/gaussian_state.hpp"

namespace fading {

enum class Verdict { entangled, separable, boundary };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::entangled:
      return "entangled";
    case Verdict::separable:
      return "separable";
    case Verdict::boundary:
      return "boundary";
  }
  return "boundary";
}

struct WitnessTolerance {
  double rel = 1e-9;
  double abs = 1e-12;
};

/// |w| within max(abs, rel * scale) is reported as boundary.
template <typename Real>
Verdict classify(Real w, Real scale, const WitnessTolerance& tol = {}) {
  const Real band = std::max(Real(tol.abs), Real(tol.rel) * std::abs(scale));
  if (std::abs(w) <= band) return Verdict::boundary;
  return w < Real(0) ? Verdict::entangled : Verdict::separable;
}

template <typename Real = double>
struct WitnessReport {
  Real w_atm{0};
  Real term_loss{0};  // Gamma^2 W_{<Ta^2>,<Tb^2>,1}
  Real term_N{0};     // (1 - Gamma^2) N
  Real term_F{0};     // (1 - DeltaGamma^2) F
  Real term_S{0};     // nu^dag S nu
  Real N{0};
  Real F{0};
  Real gamma{1};
  Real delta_gamma{0};
  Vector4c<Real> nu = Vector4c<Real>::Zero();
  Verdict verdict{Verdict::boundary};

  bool entangled() const { return verdict == Verdict::entangled; }
  Real term_sum() const { return term_loss + term_N + term_F + term_S; }
  Real scale() const {
    return std::max({std::abs(term_loss), std::abs(term_N), std::abs(term_F),
                     std::abs(term_S)});
  }
};

namespace detail {

template <typename Real>
struct TildeBlocks {
  Matrix2c<Real> a;  // A~
  Matrix2c<Real> b;  // B~
  Matrix2c<Real> c;  // C~ (lower-left)
  Real loss_witness; // det V^PT_{<Ta^2>,<Tb^2>,1}
};

template <typename Real>
TildeBlocks<Real> tilde_blocks(const GaussianState<Real>& state, Real eta_a,
                               Real eta_b) {
  const PtMatrix<Real> pt(partial_transpose(
      attenuated_covariance(state.covariance(), eta_a, eta_b)));
  return {pt.block_a(), pt.block_b(), pt.block_c(), pt.determinant().real()};
}

// mu_x = sqrt(<dT_x^2>) (conj(<x>), <x>)
template <typename Real>
Vector2c<Real> displacement_vector(Complex<Real> mean, Real variance) {
  return std::sqrt(variance) * amplitude_vector(mean);
}

}  // namespace detail

/// Evaluates every term of the expansion. Its w_atm equals
/// simon_witness_direct(apply_channel(state, m)).
template <typename Real>
WitnessReport<Real> witness_expansion(const GaussianState<Real>& state,
                                      const ChannelMoments<Real>& m,
                                      const WitnessTolerance& tol = {}) {
  using Scalar = Complex<Real>;
  const CorrelationCoefficients<Real> k = correlation_coefficients(m);
  const auto t = detail::tilde_blocks(state, m.t_a2, m.t_b2);
  const Vector2c<Real> mu_a =
      detail::displacement_vector(state.mean_a(), m.var_a());
  const Vector2c<Real> mu_b =
      detail::displacement_vector(state.mean_b(), m.var_b());
  // V^PT_atm = modified block matrix with alpha = mu_a, beta = conj(mu_b).
  const Vector2c<Real> beta = mu_b.conjugate();
  const Scalar g(k.gamma);
  const Scalar h(k.delta_gamma);
  const auto expansion = blockdet::expand_full(t.a, t.b, t.c, g, h, mu_a, beta);

  WitnessReport<Real> r;
  r.gamma = k.gamma;
  r.delta_gamma = k.delta_gamma;
  r.term_loss = expansion.block.real();
  r.term_N = expansion.determinants.real();
  r.term_F = expansion.quadratic.real();
  r.term_S = expansion.sandwich.real();
  r.N = blockdet::det2(blockdet::determinant_matrix(t.a, t.b, t.c, g)).real();
  const Vector2c<Real> alpha_perp = blockdet::perp(mu_a);
  const Vector2c<Real> beta_perp = blockdet::perp(beta);
  r.F = blockdet::det2(blockdet::quadratic_form_matrix(t.a, t.b, t.c, g,
                                                       alpha_perp, beta_perp))
            .real();
  r.nu << beta_perp, -alpha_perp;
  r.w_atm = r.term_sum();
  r.verdict = classify(r.w_atm, r.scale(), tol);
  return r;
}

/// The oracle route: det of the partial transpose of the output matrix.
template <typename Real>
Real witness_direct(const GaussianState<Real>& state,
                    const ChannelMoments<Real>& m,
                    ChannelPath path = ChannelPath::block) {
  return simon_witness_direct(apply_channel(state, m, path));
}

/// Gamma^2 W_{<Ta^2>,<Tb^2>,1} + (1 - Gamma^2) N for uncorrelated channels
/// and undisplaced states.
template <typename Real>
Real witness_uncorrelated_zero_mean(const GaussianState<Real>& state,
                                    const ChannelMoments<Real>& m) {
  if (std::abs(m.covariance()) > Real(1e-12))
    throw MisuseError(
        "witness_uncorrelated_zero_mean requires <T_a T_b> = <T_a><T_b>");
  if (!state.has_zero_means())
    throw MisuseError("witness_uncorrelated_zero_mean requires zero means");
  const CorrelationCoefficients<Real> k = correlation_coefficients(m);
  const auto t = detail::tilde_blocks(state, m.t_a2, m.t_b2);
  const Real g2 = k.gamma * k.gamma;
  const Real n = blockdet::det2(blockdet::determinant_matrix(
                                    t.a, t.b, t.c, Complex<Real>(k.gamma)))
                     .real();
  return g2 * t.loss_witness + (Real(1) - g2) * n;
}

/// True when T_a = T_b holds for the moments (within tol).
template <typename Real>
bool perfectly_correlated(const ChannelMoments<Real>& m, Real tol = Real(1e-9)) {
  return std::abs(m.t_a - m.t_b) <= tol && std::abs(m.t_a2 - m.t_b2) <= tol &&
         std::abs(m.t_ab - m.t_a2) <= tol;
}

/// W_{<T^2>,<T^2>,1} + nu^dag S nu for perfectly correlated channels.
template <typename Real>
WitnessReport<Real> witness_correlated(const GaussianState<Real>& state,
                                       const ChannelMoments<Real>& m,
                                       const WitnessTolerance& tol = {}) {
  const CorrelationCoefficients<Real> k = correlation_coefficients(m);
  const bool zero_variance = m.var_a() <= Real(kZeroVariance) &&
                             m.var_b() <= Real(kZeroVariance);
  if (std::abs(k.gamma - Real(1)) > Real(1e-9) ||
      (!zero_variance && std::abs(k.delta_gamma - Real(1)) > Real(1e-9)) ||
      std::abs(m.t_a2 - m.t_b2) > Real(1e-9))
    throw MisuseError(
        "witness_correlated requires a perfectly correlated channel "
        "(Gamma = DeltaGamma = 1, <T_a^2> = <T_b^2>)");
  const auto t = detail::tilde_blocks(state, m.t_a2, m.t_b2);
  const Vector2c<Real> mu_a =
      detail::displacement_vector(state.mean_a(), m.var_a());
  const Vector2c<Real> mu_b =
      detail::displacement_vector(state.mean_b(), m.var_b());
  const Complex<Real> one(1);

  WitnessReport<Real> r;
  r.gamma = k.gamma;
  r.delta_gamma = k.delta_gamma;
  r.nu << blockdet::perp(Vector2c<Real>(mu_b.conjugate())),
      -blockdet::perp(mu_a);
  r.term_loss = t.loss_witness;
  r.term_S =
      r.nu.dot(blockdet::sandwich_matrix(t.a, t.b, t.c, one, one) * r.nu)
          .real();
  r.w_atm = r.term_loss + r.term_S;
  r.verdict = classify(r.w_atm, r.scale(), tol);
  return r;
}

template <typename Real = double>
struct DuanReport {
  Real value{0};                    // det D^PT_atm
  Real persistent_region_value{0};  // channel-independent quadratic form
  Real loss_term{0};                // <T^2>^2 det D^PT
  Real fluctuation_term{0};         // <dT^2><T^2> * persistent_region_value
};

/// Duan determinant through a perfectly correlated channel,
///   det D^PT_atm = <T^2>^2 det D^PT + <dT^2><T^2> q,
/// q = (<a>, -<b^dag>)^dag ((<db^dag db>, <da db>), (<da^dag db^dag>,
/// <da^dag da>)) (<a>, -<b^dag>). q < 0 marks the region where the
/// condition holds whatever the channel.
template <typename Real>
DuanReport<Real> duan_witness_correlated(const GaussianState<Real>& state,
                                         const ChannelMoments<Real>& m) {
  validate(m);
  if (!perfectly_correlated(m))
    throw MisuseError(
        "duan_witness_correlated requires a perfectly correlated channel");
  const CentralMoments<Real> c = state.moments();
  Matrix2c<Real> form;
  form << c.n_b, c.ab, std::conj(c.ab), c.n_a;
  const Vector2c<Real> v(state.mean_a(), -std::conj(state.mean_b()));

  DuanReport<Real> r;
  r.persistent_region_value = v.dot(form * v).real();
  r.loss_term = m.t_a2 * m.t_a2 * blockdet::det2(duan_matrix(state)).real();
  r.fluctuation_term = m.var_a() * m.t_a2 * r.persistent_region_value;
  r.value = r.loss_term + r.fluctuation_term;
  return r;
}

}  // namespace fading
