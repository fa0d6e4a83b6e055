#include "fading/random.hpp"

#include <cmath>
#include <vector>

namespace fading::random {

namespace {

struct Bogoliubov {
  Matrix2c<double> k = Matrix2c<double>::Identity();
  Matrix2c<double> l = Matrix2c<double>::Zero();
};

// Transformation `second` applied after `first`.
Bogoliubov compose(const Bogoliubov& second, const Bogoliubov& first) {
  return {second.k * first.k + second.l * first.l.conjugate(),
          second.k * first.l + second.l * first.k.conjugate()};
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> dirichlet_weights(Rng& rng, int n) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : w) total += (x = expo(rng));
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace

std::complex<double> complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  return {re, n(rng)};
}

std::complex<double> unit_disk(Rng& rng) {
  const double r = std::sqrt(uniform(rng, 0.0, 1.0));
  return std::polar(r, uniform(rng, 0.0, 2.0 * M_PI));
}

Matrix2c<double> complex_matrix(Rng& rng) {
  Matrix2c<double> m;
  for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = complex_normal(rng);
  return m;
}

Vector2c<double> complex_vector(Rng& rng) {
  Vector2c<double> v;
  v(0) = complex_normal(rng);
  v(1) = complex_normal(rng);
  return v;
}

Matrix2c<double> hermitian_matrix(Rng& rng) {
  const Matrix2c<double> m = complex_matrix(rng);
  return 0.5 * (m + m.adjoint());
}

Matrix4c<double> psd_matrix(Rng& rng) {
  Matrix4c<double> r;
  for (int i = 0; i < 16; ++i) r(i / 4, i % 4) = complex_normal(rng);
  return r.adjoint() * r;
}

Matrix2c<double> unitary(Rng& rng) {
  Eigen::HouseholderQR<Matrix2c<double>> qr(complex_matrix(rng));
  Matrix2c<double> q = qr.householderQ();
  const Matrix2c<double> r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0.0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

GaussianState<double> gaussian_state(Rng& rng, const StateOptions& options) {
  const double n0 = uniform(rng, 0.0, options.max_thermal);
  const double n1 = uniform(rng, 0.0, options.max_thermal);

  Bogoliubov u1{unitary(rng), Matrix2c<double>::Zero()};
  Bogoliubov u2{unitary(rng), Matrix2c<double>::Zero()};

  Bogoliubov single;
  for (int i = 0; i < 2; ++i) {
    const double r = uniform(rng, 0.0, options.max_squeezing);
    single.k(i, i) = std::cosh(r);
    single.l(i, i) = std::polar(std::sinh(r), uniform(rng, 0.0, 2.0 * M_PI));
  }

  Bogoliubov two_mode;
  const double s = uniform(rng, 0.0, options.max_squeezing);
  const auto phase = std::polar(std::sinh(s), uniform(rng, 0.0, 2.0 * M_PI));
  two_mode.k = std::cosh(s) * Matrix2c<double>::Identity();
  two_mode.l << 0.0, phase, phase, 0.0;

  const Bogoliubov t = compose(u2, compose(two_mode, compose(single, u1)));

  Matrix2c<double> n = Matrix2c<double>::Zero();
  n(0, 0) = n0;
  n(1, 1) = n1;
  const Matrix2c<double> n_plus = n + Matrix2c<double>::Identity();

  // N_ij = <a_i^dag a_j>, M_ij = <a_i a_j>
  const Matrix2c<double> big_n = t.k.conjugate() * n * t.k.transpose() +
                                 t.l.conjugate() * n_plus * t.l.transpose();
  const Matrix2c<double> big_m = t.k * n_plus * t.l.transpose() + t.l * n * t.k.transpose();

  CentralMoments<double> m;
  m.n_a = big_n(0, 0).real();
  m.n_b = big_n(1, 1).real();
  m.adag_b = big_n(0, 1);
  m.m_a = big_m(0, 0);
  m.m_b = big_m(1, 1);
  m.ab = 0.5 * (big_m(0, 1) + big_m(1, 0));

  std::complex<double> mean_a = 0.0;
  std::complex<double> mean_b = 0.0;
  if (options.max_mean > 0.0) {
    mean_a = std::polar(uniform(rng, 0.0, options.max_mean), uniform(rng, 0.0, 2.0 * M_PI));
    mean_b = std::polar(uniform(rng, 0.0, options.max_mean), uniform(rng, 0.0, 2.0 * M_PI));
  }
  return GaussianState<double>(mean_a, mean_b, m);
}

GaussianState<double> squeezed_thermal_state(Rng& rng, const StateOptions& options) {
  const double n0 = uniform(rng, 0.0, options.max_thermal);
  const double n1 = uniform(rng, 0.0, options.max_thermal);
  const double s = uniform(rng, 0.0, options.max_squeezing);
  const double phase = uniform(rng, 0.0, 2.0 * M_PI);
  const double c = std::cosh(s);
  const double sh = std::sinh(s);

  CentralMoments<double> m;
  m.n_a = c * c * n0 + sh * sh * (n1 + 1.0);
  m.n_b = c * c * n1 + sh * sh * (n0 + 1.0);
  m.ab = std::polar(c * sh * (n0 + n1 + 1.0), phase);

  std::complex<double> mean_a = 0.0;
  std::complex<double> mean_b = 0.0;
  if (options.max_mean > 0.0) {
    mean_a = std::polar(uniform(rng, 0.0, options.max_mean), uniform(rng, 0.0, 2.0 * M_PI));
    mean_b = std::polar(uniform(rng, 0.0, options.max_mean), uniform(rng, 0.0, 2.0 * M_PI));
  }
  return GaussianState<double>(mean_a, mean_b, m);
}

ChannelMoments<double> channel_moments(Rng& rng, ChannelKind kind, int atoms) {
  auto marginal = [&] {
    const auto w = dirichlet_weights(rng, atoms);
    double m1 = 0.0;
    double m2 = 0.0;
    for (double wi : w) {
      const double t = uniform(rng, 0.0, 1.0);
      m1 += wi * t;
      m2 += wi * t * t;
    }
    return std::pair{m1, m2};
  };

  switch (kind) {
    case ChannelKind::uncorrelated: {
      const auto [ta, ta2] = marginal();
      const auto [tb, tb2] = marginal();
      return uncorrelated_moments(ta, ta2, tb, tb2);
    }
    case ChannelKind::correlated: {
      const auto [t, t2] = marginal();
      return correlated_moments(t, t2);
    }
    case ChannelKind::general:
      break;
  }
  ChannelMoments<double> m{0, 0, 0, 0, 0};
  for (double wi : dirichlet_weights(rng, atoms)) {
    const double ta = uniform(rng, 0.0, 1.0);
    const double tb = uniform(rng, 0.0, 1.0);
    m.t_a += wi * ta;
    m.t_b += wi * tb;
    m.t_a2 += wi * ta * ta;
    m.t_b2 += wi * tb * tb;
    m.t_ab += wi * ta * tb;
  }
  return m;
}

}  // namespace fading::random
