#pragma once

// Determinant calculus for 4x4 matrices built from 2x2 blocks.
//
// All functions accept arbitrary Eigen expressions of fixed 2x2 (or 2x1)
// shape. Wherever a product det(X) X^{-1} appears it is evaluated as the
// adjugate of X, so singular blocks (e.g. the vacuum, where C = 0) are fine.

#include <Eigen/Dense>

namespace fading::blockdet {

template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;

/// J = ((0, 1), (-1, 0)).
template <typename Scalar>
Mat2<Scalar> symplectic_form() {
  Mat2<Scalar> j;
  j << Scalar(0), Scalar(1), Scalar(-1), Scalar(0);
  return j;
}

template <typename Derived>
typename Derived::Scalar det2(const Eigen::MatrixBase<Derived>& m) {
  EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 2, 2);
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

/// adj(X) with adj(X) X = X adj(X) = det(X) I.
template <typename Derived>
Mat2<typename Derived::Scalar> adjugate(const Eigen::MatrixBase<Derived>& m) {
  EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 2, 2);
  Mat2<typename Derived::Scalar> adj;
  adj << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return adj;
}

/// det(A + B) = det A + det B - tr(A J B^T J).
template <typename DA, typename DB>
typename DA::Scalar det2_sum(const Eigen::MatrixBase<DA>& a,
                             const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  const Mat2<Scalar> j = symplectic_form<Scalar>();
  return det2(a) + det2(b) - (a * j * b.transpose() * j).trace();
}

/// Determinant of the block matrix (A, D; C, B):
/// det A det B + det C det D - tr(A J C^T J B J D^T J).
template <typename DA, typename DB, typename DC, typename DD>
typename DA::Scalar det4_block(const Eigen::MatrixBase<DA>& a,
                               const Eigen::MatrixBase<DB>& b,
                               const Eigen::MatrixBase<DC>& c,
                               const Eigen::MatrixBase<DD>& d) {
  using Scalar = typename DA::Scalar;
  const Mat2<Scalar> j = symplectic_form<Scalar>();
  return det2(a) * det2(b) + det2(c) * det2(d) -
         (a * j * c.transpose() * j * b * j * d.transpose() * j).trace();
}

/// v_perp = J conj(v); orthogonal to v with the same norm.
template <typename Derived>
Vec2<typename Derived::Scalar> perp(const Eigen::MatrixBase<Derived>& v) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 2);
  using Scalar = typename Derived::Scalar;
  return symplectic_form<Scalar>() * v.conjugate();
}

/// Assemble (A, D; C, B) as a dense 4x4 matrix.
template <typename DA, typename DB, typename DC, typename DD>
Mat4<typename DA::Scalar> assemble(const Eigen::MatrixBase<DA>& a,
                                   const Eigen::MatrixBase<DB>& b,
                                   const Eigen::MatrixBase<DC>& c,
                                   const Eigen::MatrixBase<DD>& d) {
  Mat4<typename DA::Scalar> m;
  m.template topLeftCorner<2, 2>() = a;
  m.template topRightCorner<2, 2>() = d;
  m.template bottomLeftCorner<2, 2>() = c;
  m.template bottomRightCorner<2, 2>() = b;
  return m;
}

/// The left-hand side of the full expansion:
/// (A + a a^dag, g* C^dag + h* a b^dag; g C + h b a^dag, B + b b^dag).
template <typename DA, typename DB, typename DC, typename Dal, typename Dbe>
Mat4<typename DA::Scalar> modified_block_matrix(
    const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
    const Eigen::MatrixBase<DC>& c, typename DA::Scalar g,
    typename DA::Scalar h, const Eigen::MatrixBase<Dal>& alpha,
    const Eigen::MatrixBase<Dbe>& beta) {
  using Eigen::numext::conj;
  const Mat2<typename DA::Scalar> lower =
      g * c + h * beta * alpha.adjoint();
  return assemble(a + alpha * alpha.adjoint(), b + beta * beta.adjoint(),
                  lower, lower.adjoint());
}

/// (det A, g* det C^dag; g det C, det B)
template <typename DA, typename DB, typename DC>
Mat2<typename DA::Scalar> determinant_matrix(const Eigen::MatrixBase<DA>& a,
                                             const Eigen::MatrixBase<DB>& b,
                                             const Eigen::MatrixBase<DC>& c,
                                             typename DA::Scalar g) {
  using Eigen::numext::conj;
  const auto det_c = det2(c);
  Mat2<typename DA::Scalar> m;
  m << det2(a), conj(g) * conj(det_c), g * det_c, det2(b);
  return m;
}

/// (x^dag A x, g* x^dag C^dag y; g y^dag C x, y^dag B y)
template <typename DA, typename DB, typename DC, typename Dx, typename Dy>
Mat2<typename DA::Scalar> quadratic_form_matrix(
    const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
    const Eigen::MatrixBase<DC>& c, typename DA::Scalar g,
    const Eigen::MatrixBase<Dx>& x, const Eigen::MatrixBase<Dy>& y) {
  using Eigen::numext::conj;
  const auto cross = y.dot(c * x);  // y^dag C x
  Mat2<typename DA::Scalar> m;
  m << x.dot(a * x), conj(g) * conj(cross), g * cross, y.dot(b * y);
  return m;
}

/// The 4x4 matrix sandwiched between (b_perp; -a_perp) in the full
/// expansion, with det(X) X^{-1} replaced by adj(X):
///   S11 = det A B - |g|^2 C adj(A) C^dag
///   S12 = -g* h (|g|^2 det(C^dag) C - B adj(C^dag) A)
///   S21 = -g h* (|g|^2 det(C) C^dag - A adj(C) B)
///   S22 = det B A - |g|^2 C^dag adj(B) C
template <typename DA, typename DB, typename DC>
Mat4<typename DA::Scalar> sandwich_matrix(const Eigen::MatrixBase<DA>& a,
                                          const Eigen::MatrixBase<DB>& b,
                                          const Eigen::MatrixBase<DC>& c,
                                          typename DA::Scalar g,
                                          typename DA::Scalar h) {
  using Scalar = typename DA::Scalar;
  using Eigen::numext::abs2;
  using Eigen::numext::conj;
  const Mat2<Scalar> ca = c;
  const Mat2<Scalar> cd = c.adjoint();
  const Scalar g2 = Scalar(abs2(g));
  const Scalar det_c = det2(ca);

  const Mat2<Scalar> s11 = det2(a) * b - g2 * ca * adjugate(a) * cd;
  const Mat2<Scalar> s12 =
      -conj(g) * h * (g2 * conj(det_c) * ca - b * adjugate(cd) * a);
  const Mat2<Scalar> s21 =
      -g * conj(h) * (g2 * det_c * cd - a * adjugate(ca) * b);
  const Mat2<Scalar> s22 = det2(b) * a - g2 * cd * adjugate(b) * ca;
  return assemble(s11, s22, s21, s12);
}

template <typename Scalar>
struct FullExpansion {
  Scalar block;          // |g|^2 det(A, C^dag; C, B)
  Scalar determinants;   // (1 - |g|^2) det(determinant_matrix)
  Scalar quadratic;      // (1 - |h|^2) det(quadratic_form_matrix at perps)
  Scalar sandwich;       // nu^dag S nu, nu = (b_perp, -a_perp)

  Scalar total() const { return block + determinants + quadratic + sandwich; }
};

/// Four-term expansion of det(modified_block_matrix(...)). Requires A and B
/// Hermitian; C, g, h, alpha, beta are arbitrary.
template <typename DA, typename DB, typename DC, typename Dal, typename Dbe>
FullExpansion<typename DA::Scalar> expand_full(
    const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
    const Eigen::MatrixBase<DC>& c, typename DA::Scalar g,
    typename DA::Scalar h, const Eigen::MatrixBase<Dal>& alpha,
    const Eigen::MatrixBase<Dbe>& beta) {
  using Scalar = typename DA::Scalar;
  using Eigen::numext::abs2;
  const Scalar one(1);
  const Vec2<Scalar> alpha_perp = perp(alpha);
  const Vec2<Scalar> beta_perp = perp(beta);

  Eigen::Matrix<Scalar, 4, 1> nu;
  nu << beta_perp, -alpha_perp;

  FullExpansion<Scalar> out;
  out.block = Scalar(abs2(g)) * det4_block(a, b, c, c.adjoint());
  out.determinants =
      (one - Scalar(abs2(g))) * det2(determinant_matrix(a, b, c, g));
  out.quadratic = (one - Scalar(abs2(h))) *
                  det2(quadratic_form_matrix(a, b, c, g, alpha_perp, beta_perp));
  out.sandwich = nu.dot(sandwich_matrix(a, b, c, g, h) * nu);
  return out;
}

}  // namespace fading::blockdet
