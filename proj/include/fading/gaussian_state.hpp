#pragma once

// Two-mode Gaussian states in terms of first and second moments of the
// bosonic operators.
//
// The second-moment matrix is V_ij = <dx_i^dag dx_j> with
// x = (a, a^dag, b, b^dag), i.e. rows and columns are labelled by the
// left-hand operators (a^dag, a, b^dag, b):
//
//   ( <da^dag da>   <da^dag2>     <da^dag db>   <da^dag db^dag> )
//   ( <da^2>        <da da^dag>   <da db>       <da db^dag>     )
//   ( <da db^dag>   <da^dag db^dag> <db^dag db> <db^dag2>       )
//   ( <da db>       <da^dag db>   <db^2>        <db db^dag>     )
//
// = (A, C^dag; C, B). This order is also the serialization order.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "fading/block_determinant.hpp"
#include "fading/errors.hpp"
#include "fading/types.hpp"

namespace fading {

/// The independent central second moments of a two-mode state.
template <typename Real = double>
struct CentralMoments {
  Real n_a{0};              // <da^dag da>
  Real n_b{0};              // <db^dag db>
  Complex<Real> m_a{0};     // <da^2>
  Complex<Real> m_b{0};     // <db^2>
  Complex<Real> ab{0};      // <da db>
  Complex<Real> adag_b{0};  // <da^dag db>
};

template <typename Real>
Matrix4c<Real> moment_matrix(const CentralMoments<Real>& m) {
  using std::conj;
  const Real one(1);
  Matrix4c<Real> v;
  // clang-format off
  v << m.n_a,           conj(m.m_a),    m.adag_b,      conj(m.ab),
       m.m_a,           m.n_a + one,    m.ab,          conj(m.adag_b),
       conj(m.adag_b),  conj(m.ab),     m.n_b,         conj(m.m_b),
       m.ab,            m.adag_b,       m.m_b,         m.n_b + one;
  // clang-format on
  return v;
}

template <typename Real>
CentralMoments<Real> central_moments(const Matrix4c<Real>& v) {
  CentralMoments<Real> m;
  m.n_a = v(0, 0).real();
  m.n_b = v(2, 2).real();
  m.m_a = v(1, 0);
  m.m_b = v(3, 2);
  m.ab = v(3, 0);
  m.adag_b = v(3, 1);
  return m;
}

namespace detail {

template <typename Real>
bool finite(const Complex<Real>& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <typename Real>
Real matrix_scale(const Matrix4c<Real>& v) {
  return std::max(Real(1), v.cwiseAbs().maxCoeff());
}

}  // namespace detail

/// Smallest eigenvalue of a Hermitian 4x4 matrix.
template <typename Real>
Real min_eigenvalue(const Matrix4c<Real>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4c<Real>> solver(m,
                                                      Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Positive semidefiniteness floor, relative to the matrix magnitude.
inline constexpr double kPsdFloor = 1e-9;

template <typename Real = double>
class GaussianState {
 public:
  using Scalar = Complex<Real>;
  using Matrix = Matrix4c<Real>;
  using Block = Matrix2c<Real>;

  /// Vacuum.
  GaussianState() : v_(moment_matrix(CentralMoments<Real>{})) {}

  GaussianState(Scalar mean_a, Scalar mean_b, const CentralMoments<Real>& m)
      : mean_a_(mean_a), mean_b_(mean_b), v_(moment_matrix(m)) {
    validate();
  }

  /// From an explicit matrix. The matrix must be Hermitian and carry the
  /// commutator offsets to within 1e-12 (relative); it is then rebuilt
  /// from its lower triangle so both hold exactly.
  GaussianState(Scalar mean_a, Scalar mean_b, const Matrix& v)
      : mean_a_(mean_a), mean_b_(mean_b) {
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j)
        if (!detail::finite(v(i, j)))
          throw DomainError("second-moment matrix has non-finite entries");
    const Real tol = Real(1e-12) * detail::matrix_scale(v);
    if ((v - v.adjoint()).cwiseAbs().maxCoeff() > tol)
      throw DomainError("second-moment matrix is not Hermitian");
    if (std::abs(v(1, 1) - v(0, 0) - Real(1)) > tol ||
        std::abs(v(3, 3) - v(2, 2) - Real(1)) > tol)
      throw DomainError(
          "second-moment matrix violates the commutator offsets "
          "<da da^dag> = <da^dag da> + 1, <db db^dag> = <db^dag db> + 1");
    v_ = moment_matrix(central_moments(v));
    validate();
  }

  Scalar mean_a() const { return mean_a_; }
  Scalar mean_b() const { return mean_b_; }
  const Matrix& covariance() const { return v_; }
  CentralMoments<Real> moments() const { return central_moments(v_); }

  Block block_a() const { return v_.template topLeftCorner<2, 2>(); }
  Block block_b() const { return v_.template bottomRightCorner<2, 2>(); }
  /// Cross block C (rows b, columns a); the upper-right block is C^dag.
  Block block_c() const { return v_.template bottomLeftCorner<2, 2>(); }

  bool has_zero_means() const {
    return mean_a_ == Scalar(0) && mean_b_ == Scalar(0);
  }

  GaussianState with_means(Scalar mean_a, Scalar mean_b) const {
    return GaussianState(mean_a, mean_b, moments());
  }

 private:
  void validate() const {
    if (!detail::finite(mean_a_) || !detail::finite(mean_b_))
      throw DomainError("mean amplitudes must be finite");
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j)
        if (!detail::finite(v_(i, j)))
          throw DomainError("second-moment matrix has non-finite entries");
    const Real scale = detail::matrix_scale(v_);
    if (v_(0, 0).real() < -Real(kPsdFloor) * scale ||
        v_(2, 2).real() < -Real(kPsdFloor) * scale)
      throw DomainError("mean photon numbers must be non-negative");
    if (min_eigenvalue(v_) < -Real(kPsdFloor) * scale)
      throw DomainError("second-moment matrix is not positive semidefinite");
  }

  Scalar mean_a_{0};
  Scalar mean_b_{0};
  Matrix v_;
};

namespace detail {

template <typename Real>
void require_finite_nonnegative(Real x, const char* what) {
  if (!std::isfinite(x) || x < Real(0))
    throw DomainError(std::string(what) + " must be finite and >= 0");
}

}  // namespace detail

/// Two-mode squeezed vacuum (cosh xi)^{-1} sum_n tanh^n xi |n, n>.
template <typename Real = double>
GaussianState<Real> tmsv_state(Real xi) {
  detail::require_finite_nonnegative(xi, "squeezing parameter xi");
  const Real s = std::sinh(xi);
  const Real c = std::cosh(xi);
  CentralMoments<Real> m;
  m.n_a = s * s;
  m.n_b = s * s;
  m.ab = s * c;
  return GaussianState<Real>(Complex<Real>(0), Complex<Real>(0), m);
}

/// Two single-mode vacua squeezed along orthogonal quadratures, mixed on a
/// beam splitter (a = t a1 + r a2, b = -r a1 + t a2, t^2 = t2) and followed
/// by a displacement alpha of mode a. t2 = 1/2 gives tmsv_state(xi).
template <typename Real = double>
GaussianState<Real> asymmetric_tmsv(Real xi, Real t2,
                                    Complex<Real> alpha = Complex<Real>(0)) {
  detail::require_finite_nonnegative(xi, "squeezing parameter xi");
  if (!std::isfinite(t2) || t2 < Real(0) || t2 > Real(1))
    throw DomainError("beam-splitter transmittance t2 must lie in [0, 1]");
  const Real t = std::sqrt(t2);
  const Real r = std::sqrt(Real(1) - t2);
  const Real s = std::sinh(xi);
  const Real sc = s * std::cosh(xi);
  // <a1^2> = -sc, <a2^2> = +sc, <a_i^dag a_i> = s^2
  CentralMoments<Real> m;
  m.n_a = s * s;
  m.n_b = s * s;
  m.m_a = (r * r - t * t) * sc;
  m.m_b = (t * t - r * r) * sc;
  m.ab = Real(2) * t * r * sc;
  m.adag_b = Real(0);
  return GaussianState<Real>(alpha, Complex<Real>(0), m);
}

/// Product of two thermal states with mean photon numbers n_a, n_b.
template <typename Real = double>
GaussianState<Real> thermal_state(Real n_a, Real n_b) {
  detail::require_finite_nonnegative(n_a, "thermal occupation n_a");
  detail::require_finite_nonnegative(n_b, "thermal occupation n_b");
  CentralMoments<Real> m;
  m.n_a = n_a;
  m.n_b = n_b;
  return GaussianState<Real>(Complex<Real>(0), Complex<Real>(0), m);
}

/// Shifts the mean amplitudes by (alpha, beta); V is unchanged.
template <typename Real>
GaussianState<Real> displace(const GaussianState<Real>& state,
                             Complex<Real> alpha, Complex<Real> beta) {
  if (!detail::finite(alpha) || !detail::finite(beta))
    throw DomainError("displacement amplitudes must be finite");
  return state.with_means(state.mean_a() + alpha, state.mean_b() + beta);
}

/// Partial transposition in mode b: (1+X) V (1+X) - (0+Z). Self-inverse.
template <typename Real>
Matrix4c<Real> partial_transpose(const Matrix4c<Real>& v) {
  Matrix4c<Real> swap = Matrix4c<Real>::Zero();
  swap(0, 0) = swap(1, 1) = Real(1);
  swap(2, 3) = swap(3, 2) = Real(1);
  Matrix4c<Real> out = swap * v * swap;
  out(2, 2) -= Real(1);
  out(3, 3) += Real(1);
  return out;
}

/// V^PT of a state. Block form (A, C^dag X; X C, B^T).
template <typename Real = double>
class PtMatrix {
 public:
  using Matrix = Matrix4c<Real>;
  using Block = Matrix2c<Real>;

  explicit PtMatrix(const Matrix& m) : m_(m) {}

  const Matrix& matrix() const { return m_; }
  Block block_a() const { return m_.template topLeftCorner<2, 2>(); }
  Block block_b() const { return m_.template bottomRightCorner<2, 2>(); }
  Block block_c() const { return m_.template bottomLeftCorner<2, 2>(); }

  Complex<Real> determinant() const {
    return blockdet::det4_block(block_a(), block_b(), block_c(),
                                m_.template topRightCorner<2, 2>());
  }

 private:
  Matrix m_;
};

template <typename Real>
PtMatrix<Real> partial_transpose(const GaussianState<Real>& state) {
  return PtMatrix<Real>(partial_transpose(state.covariance()));
}

/// det V^PT; negative certifies entanglement. Only central moments enter,
/// so displacements do not change it.
template <typename Real>
Real simon_witness_direct(const GaussianState<Real>& state) {
  return partial_transpose(state.covariance()).determinant().real();
}

/// Rows and columns 1 and 3 of V^PT:
/// ((<da^dag da>, <da^dag db^dag>), (<da db>, <db^dag db>)).
template <typename Real>
Matrix2c<Real> duan_matrix(const GaussianState<Real>& state) {
  const Matrix4c<Real> pt = partial_transpose(state.covariance());
  Matrix2c<Real> d;
  d << pt(0, 0), pt(0, 2), pt(2, 0), pt(2, 2);
  return d;
}

}  // namespace fading
