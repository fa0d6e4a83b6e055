#pragma once

// Reference computations written without the library's algebra: cofactor
// determinants, Fock-basis sums, an explicit moment table and channels given
// by discrete transmittance distributions.

#include <cmath>
#include <complex>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using Mat = Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>;

inline C cofactor_det(const Mat& m) {
  const Eigen::Index n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  C total = 0.0;
  for (Eigen::Index col = 0; col < n; ++col) {
    Mat minor(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i)
      for (Eigen::Index j = 0, k = 0; j < n; ++j)
        if (j != col) minor(i - 1, k++) = m(i, j);
    const double sign = col % 2 == 0 ? 1.0 : -1.0;
    total += sign * m(0, col) * cofactor_det(minor);
  }
  return total;
}

template <typename Derived>
C det(const Eigen::MatrixBase<Derived>& m) {
  return cofactor_det(Mat(m));
}

inline bool close(double got, double want, double rel, double abs = 0.0) {
  return std::abs(got - want) <= std::max(abs, rel * std::max(std::abs(got), std::abs(want)));
}

inline bool close(C got, C want, double rel, double abs = 0.0) {
  return std::abs(got - want) <= std::max(abs, rel * std::max(std::abs(got), std::abs(want)));
}

// <a^dag a> and <a b> of (cosh xi)^-1 sum_n tanh^n xi |n, n>, truncated.
inline std::pair<double, double> fock_tmsv(double xi, int n_max = 200) {
  const double t = std::tanh(xi);
  const double norm = 1.0 / std::cosh(xi);
  double occupation = 0.0;
  double pair = 0.0;
  for (int n = 0; n < n_max; ++n) {
    const double c_n = norm * std::pow(t, n);
    const double c_next = norm * std::pow(t, n + 1);
    occupation += n * c_n * c_n;
    pair += c_n * c_next * (n + 1);
  }
  return {occupation, pair};
}

// Normally ordered central moments and means of a two-mode state.
struct Moments {
  C mean_a{0}, mean_b{0};
  double n_a{0}, n_b{0};
  C aa{0}, bb{0}, ab{0}, adag_b{0};
};

// V_ij = <dx_i^dag dx_j> for x = (a, a^dag, b, b^dag), entry by entry.
inline Eigen::Matrix<C, 4, 4> moment_table(const Moments& m) {
  Eigen::Matrix<C, 4, 4> v;
  v(0, 0) = m.n_a;
  v(0, 1) = std::conj(m.aa);
  v(0, 2) = m.adag_b;
  v(0, 3) = std::conj(m.ab);
  v(1, 0) = m.aa;
  v(1, 1) = m.n_a + 1.0;
  v(1, 2) = m.ab;
  v(1, 3) = std::conj(m.adag_b);
  v(2, 0) = std::conj(m.adag_b);
  v(2, 1) = std::conj(m.ab);
  v(2, 2) = m.n_b;
  v(2, 3) = std::conj(m.bb);
  v(3, 0) = m.ab;
  v(3, 1) = m.adag_b;
  v(3, 2) = m.bb;
  v(3, 3) = m.n_b + 1.0;
  return v;
}

inline Moments read_table(const Eigen::Matrix<C, 4, 4>& v, C mean_a, C mean_b) {
  Moments m;
  m.mean_a = mean_a;
  m.mean_b = mean_b;
  m.n_a = v(0, 0).real();
  m.n_b = v(2, 2).real();
  m.aa = v(1, 0);
  m.bb = v(3, 2);
  m.ab = v(1, 2);
  m.adag_b = v(0, 2);
  return m;
}

// Swap the b-mode indices, flipping the commutator offset.
inline Eigen::Matrix<C, 4, 4> pt_entries(const Eigen::Matrix<C, 4, 4>& v) {
  Eigen::Matrix<C, 4, 4> out = v;
  const int perm[4] = {0, 1, 3, 2};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = v(perm[i], perm[j]);
  out(2, 2) -= 1.0;
  out(3, 3) += 1.0;
  return out;
}

struct DiscreteChannel {
  std::vector<std::pair<double, double>> atoms;
  std::vector<double> weights;

  double moment(int ka, int kb) const {
    double s = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      s += weights[i] * std::pow(atoms[i].first, ka) * std::pow(atoms[i].second, kb);
    return s;
  }
};

enum class Coupling { general, independent, identical };

inline DiscreteChannel random_channel(std::mt19937_64& rng, Coupling coupling, int n = 5) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto weights = [&](int k) {
    std::vector<double> w(static_cast<std::size_t>(k));
    double s = 0.0;
    for (auto& x : w) s += (x = -std::log(1.0 - u(rng)));
    for (auto& x : w) x /= s;
    return w;
  };
  DiscreteChannel ch;
  if (coupling == Coupling::independent) {
    std::vector<double> ta(n), tb(n);
    for (auto& x : ta) x = u(rng);
    for (auto& x : tb) x = u(rng);
    const auto wa = weights(n);
    const auto wb = weights(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        ch.atoms.push_back({ta[i], tb[j]});
        ch.weights.push_back(wa[i] * wb[j]);
      }
    return ch;
  }
  ch.weights = weights(n);
  for (int i = 0; i < n; ++i) {
    const double ta = u(rng);
    ch.atoms.push_back({ta, coupling == Coupling::identical ? ta : u(rng)});
  }
  return ch;
}

// Average of the raw normally ordered moments over the transmittance atoms,
// each atom acting as a deterministic amplitude damping, then re-centred.
inline Moments through_channel(const Moments& in, const DiscreteChannel& ch) {
  C mean_a = 0, mean_b = 0, aa = 0, bb = 0, ab = 0, adag_b = 0;
  double n_a = 0, n_b = 0;
  for (std::size_t i = 0; i < ch.atoms.size(); ++i) {
    const auto [ta, tb] = ch.atoms[i];
    const double w = ch.weights[i];
    mean_a += w * ta * in.mean_a;
    mean_b += w * tb * in.mean_b;
    n_a += w * ta * ta * (in.n_a + std::norm(in.mean_a));
    n_b += w * tb * tb * (in.n_b + std::norm(in.mean_b));
    aa += w * ta * ta * (in.aa + in.mean_a * in.mean_a);
    bb += w * tb * tb * (in.bb + in.mean_b * in.mean_b);
    ab += w * ta * tb * (in.ab + in.mean_a * in.mean_b);
    adag_b += w * ta * tb * (in.adag_b + std::conj(in.mean_a) * in.mean_b);
  }
  Moments out;
  out.mean_a = mean_a;
  out.mean_b = mean_b;
  out.n_a = n_a - std::norm(mean_a);
  out.n_b = n_b - std::norm(mean_b);
  out.aa = aa - mean_a * mean_a;
  out.bb = bb - mean_b * mean_b;
  out.ab = ab - mean_a * mean_b;
  out.adag_b = adag_b - std::conj(mean_a) * mean_b;
  return out;
}

// det of the partially transposed output, by cofactor expansion.
inline double witness_through(const Moments& in, const DiscreteChannel& ch) {
  return cofactor_det(Mat(pt_entries(moment_table(through_channel(in, ch))))).real();
}

}  // namespace oracle
