#pragma once

#include <complex>

#include <Eigen/Dense>

namespace tori {

// Working scalar. Chosen at configure time; every acceptance run uses double.
#ifdef TORI_EXTENDED_PRECISION
using Real = long double;
inline constexpr bool kExtendedPrecision = true;
#else
using Real = double;
inline constexpr bool kExtendedPrecision = false;
#endif

using Complex = std::complex<Real>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr Real kPi = Real(3.141592653589793238462643383279502884L);

}  // namespace tori
