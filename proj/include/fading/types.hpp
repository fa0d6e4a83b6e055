#pragma once

#include <complex>

#include <Eigen/Dense>

namespace fading {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using Matrix2c = Eigen::Matrix<std::complex<Real>, 2, 2>;

template <typename Real>
using Vector2c = Eigen::Matrix<std::complex<Real>, 2, 1>;

template <typename Real>
using Matrix4c = Eigen::Matrix<std::complex<Real>, 4, 4>;

template <typename Real>
using Vector4c = Eigen::Matrix<std::complex<Real>, 4, 1>;

}  // namespace fading
