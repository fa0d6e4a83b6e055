#include "fading/identity_suite.hpp"

#include <algorithm>
#include <cmath>

#include "fading/block_determinant.hpp"
#include "fading/random.hpp"

namespace fading {

namespace {

namespace bd = blockdet;
using C = std::complex<double>;

double relative_error(C got, C exact, double term_scale) {
  return std::abs(got - exact) / std::max({std::abs(exact), term_scale, 1e-300});
}

template <int N>
double min_eig(const Eigen::Matrix<C, N, N>& m) {
  const Eigen::Matrix<C, N, N> h = 0.5 * (m + m.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix<C, N, N>>(h, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

void record_error(IdentityCheck& check, double err) {
  ++check.instances;
  check.worst = std::max(check.worst, err);
  if (!(err <= check.threshold)) ++check.failures;
}

void record_eig(IdentityCheck& check, double eig) {
  if (check.instances == 0) check.worst = eig;
  ++check.instances;
  check.worst = std::min(check.worst, eig);
  if (!(eig >= check.threshold)) ++check.failures;
}

}  // namespace

std::vector<IdentityCheck> run_identity_suite(const IdentitySuiteOptions& options) {
  random::Rng rng(options.seed);

  IdentityCheck sum{"det2_sum", 0, 0, 0, options.rel_tol};
  IdentityCheck block{"det4_block", 0, 0, 0, options.rel_tol};
  IdentityCheck full{"expand_full", 0, 0, 0, options.rel_tol};

  for (std::size_t i = 0; i < options.instances; ++i) {
    const Matrix2c<double> x = random::complex_matrix(rng);
    const Matrix2c<double> y = random::complex_matrix(rng);
    {
      const C got = bd::det2_sum(x, y);
      const Matrix2c<double> xy = x + y;
      const C trace = (x * bd::symplectic_form<C>() * y.transpose() * bd::symplectic_form<C>()).trace();
      const double scale = std::abs(bd::det2(x)) + std::abs(bd::det2(y)) + std::abs(trace);
      record_error(sum, relative_error(got, xy.determinant(), scale));
    }

    const Matrix2c<double> a = random::complex_matrix(rng);
    const Matrix2c<double> b = random::complex_matrix(rng);
    const Matrix2c<double> c = random::complex_matrix(rng);
    const Matrix2c<double> d = random::complex_matrix(rng);
    {
      const C got = bd::det4_block(a, b, c, d);
      const Matrix4c<double> dense = bd::assemble(a, b, c, d);
      const C ab = bd::det2(a) * bd::det2(b);
      const C cd = bd::det2(c) * bd::det2(d);
      const double scale = std::abs(ab) + std::abs(cd) + std::abs(ab + cd - got);
      record_error(block, relative_error(got, dense.determinant(), scale));
    }

    const Matrix2c<double> ha = random::hermitian_matrix(rng);
    const Matrix2c<double> hb = random::hermitian_matrix(rng);
    const C g = random::unit_disk(rng);
    const C h = random::unit_disk(rng);
    const Vector2c<double> alpha = random::complex_vector(rng);
    const Vector2c<double> beta = random::complex_vector(rng);
    {
      const auto terms = bd::expand_full(ha, hb, c, g, h, alpha, beta);
      const Matrix4c<double> lhs = bd::modified_block_matrix(ha, hb, c, g, h, alpha, beta);
      const double scale = std::abs(terms.block) + std::abs(terms.determinants) +
                           std::abs(terms.quadratic) + std::abs(terms.sandwich);
      record_error(full, relative_error(terms.total(), lhs.determinant(), scale));
    }
  }

  IdentityCheck scaled{"lemma_scaled_coupling", 0, 0, 0, options.eig_floor};
  IdentityCheck dets{"lemma_determinant_matrix", 0, 0, 0, options.eig_floor};
  IdentityCheck quad{"lemma_quadratic_form_matrix", 0, 0, 0, options.eig_floor};
  for (std::size_t i = 0; i < options.psd_instances; ++i) {
    const Matrix4c<double> m = random::psd_matrix(rng);
    const Matrix2c<double> a = m.topLeftCorner<2, 2>();
    const Matrix2c<double> b = m.bottomRightCorner<2, 2>();
    const Matrix2c<double> c = m.bottomLeftCorner<2, 2>();
    const C g = random::unit_disk(rng);
    record_eig(scaled, min_eig<4>(bd::assemble(a, b, (g * c).eval(),
                                               (std::conj(g) * c.adjoint()).eval())));
    record_eig(dets, min_eig<2>(bd::determinant_matrix(a, b, c, C(1))));
    const Vector2c<double> alpha = random::complex_vector(rng);
    const Vector2c<double> beta = random::complex_vector(rng);
    record_eig(quad, min_eig<2>(bd::quadratic_form_matrix(a, b, c, C(1), alpha, beta)));
  }

  return {sum, block, full, scaled, dets, quad};
}

}  // namespace fading
