#pragma once

#include "tori/fourier.hpp"

namespace tori::detail {

// Multidimensional real transforms over a Grid, backed by FFTW.
// forward: samples (points) -> half-spectrum coefficients, normalized so
// that coefficient 0 is the mean. backward: the exact inverse.
void forward_transform(const Grid& grid, const Real* samples, Complex* coeffs);
void backward_transform(const Grid& grid, const Complex* coeffs, Real* samples);

}  // namespace tori::detail
