#pragma once

// Real-analytic maps T^d -> R^{rows x cols} represented on a regular grid.
//
// A FourierSeries always carries both representations: the samples
// u(theta_j), theta_j = 2*pi*j/N, and the complex coefficients
//
//     u(theta) = sum_k c_k exp(i k.theta),   c_k = mean_j u(theta_j) exp(-i k.theta_j),
//
// so c_0 is the average. Only the half spectrum (last wavenumber >= 0) is
// stored; c_{-k} = conj(c_k) is implied. Modes with some |k_i| = N_i/2
// (Nyquist) have no real-valued derivative and are zeroed by every
// spectral operator and by dealiased products.

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "tori/types.hpp"

namespace tori {

class Grid {
 public:
  Grid() = default;
  /// Sizes must be powers of two, at least 2.
  explicit Grid(std::vector<int> sizes);

  int dims() const { return static_cast<int>(data_->sizes.size()); }
  const std::vector<int>& sizes() const { return data_->sizes; }
  int size(int axis) const { return data_->sizes[axis]; }
  std::size_t points() const { return data_->points; }
  /// Number of stored (half-spectrum) modes.
  std::size_t modes() const { return data_->modes; }

  std::span<const int> wavenumber(std::size_t mode) const {
    return {data_->k.data() + mode * dims(), static_cast<std::size_t>(dims())};
  }
  bool is_nyquist(std::size_t mode) const { return data_->nyquist[mode] != 0; }
  std::ptrdiff_t partner(std::size_t mode) const { return data_->partner[mode]; }
  /// Index of k in the half spectrum, after wrapping; -1 when only -k is stored.
  std::ptrdiff_t mode_index(std::span<const int> k) const;

  /// Angles of grid point p (row-major, last axis fastest).
  std::vector<Real> angles(std::size_t point) const;

  /// The 3/2 zero-padding grid used for dealiased products.
  Grid padded() const;

  bool valid() const { return data_ != nullptr; }
  bool operator==(const Grid& other) const;

 private:
  struct Data {
    std::vector<int> sizes;
    std::size_t points = 0;
    std::size_t modes = 0;
    std::vector<int> k;
    std::vector<unsigned char> nyquist;
    // Index of -k when it is also stored (the self-conjugate planes), else -1.
    std::vector<std::ptrdiff_t> partner;
  };
  Grid(std::vector<int> sizes, bool check);
  std::shared_ptr<const Data> data_;
};

class FourierSeries {
 public:
  FourierSeries() = default;

  static FourierSeries zeros(const Grid& grid, int rows, int cols = 1);
  static FourierSeries constant(const Grid& grid, const Matrix& value);
  /// samples are component-major: component (r, c) occupies
  /// [(r*cols + c)*points, (r*cols + c + 1)*points).
  static FourierSeries from_samples(const Grid& grid, int rows, int cols,
                                    std::vector<Real> samples);
  /// coeffs are component-major over the half spectrum.
  static FourierSeries from_coeffs(const Grid& grid, int rows, int cols,
                                   std::vector<Complex> coeffs);

  const Grid& grid() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int components() const { return rows_ * cols_; }
  bool empty() const { return components() == 0; }

  std::span<const Real> samples() const { return samples_; }
  std::span<const Real> samples(int r, int c = 0) const;
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<const Complex> coeffs(int r, int c = 0) const;

  /// Coefficient for an arbitrary integer k (conjugate partner resolved).
  Complex coeff(int r, int c, std::span<const int> k) const;

  Matrix value_at(std::size_t point) const;
  /// Trigonometric interpolant at arbitrary angles.
  Matrix evaluate(std::span<const Real> theta) const;

 private:
  FourierSeries(Grid grid, int rows, int cols, std::vector<Real> samples,
                std::vector<Complex> coeffs);
  friend class SampleBuffer;
  friend struct SeriesAccess;

  Grid grid_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Real> samples_;
  std::vector<Complex> coeffs_;
};

/// Mutable sample storage; `finish()` transforms once and yields the series.
class SampleBuffer {
 public:
  SampleBuffer(const Grid& grid, int rows, int cols = 1);
  void set(std::size_t point, const Matrix& value);
  Real& at(int r, int c, std::size_t point) {
    return samples_[(static_cast<std::size_t>(r) * cols_ + c) * grid_.points() + point];
  }
  FourierSeries finish() &&;

 private:
  Grid grid_;
  int rows_, cols_;
  std::vector<Real> samples_;
};

// ---- algebra -------------------------------------------------------------

FourierSeries operator+(const FourierSeries& a, const FourierSeries& b);
FourierSeries operator-(const FourierSeries& a, const FourierSeries& b);
FourierSeries operator-(const FourierSeries& a);
FourierSeries operator*(Real s, const FourierSeries& a);

FourierSeries transpose(const FourierSeries& u);
FourierSeries block(const FourierSeries& u, int row0, int col0, int rows, int cols);
inline FourierSeries row_block(const FourierSeries& u, int row0, int rows) {
  return block(u, row0, 0, rows, u.cols());
}
inline FourierSeries col_block(const FourierSeries& u, int col0, int cols) {
  return block(u, 0, col0, u.rows(), cols);
}
FourierSeries hstack(const std::vector<FourierSeries>& parts);
FourierSeries vstack(const std::vector<FourierSeries>& parts);

/// Matrix product with 3/2-rule dealiasing; the result is the exact product
/// projected onto the non-Nyquist band of the common grid.
FourierSeries multiply(const FourierSeries& u, const FourierSeries& v);
/// Product of the grid samples, transformed back without padding (collocation).
FourierSeries multiply_collocated(const FourierSeries& u, const FourierSeries& v);
enum class ProductRule { Collocation, Dealiased };
inline FourierSeries multiply(const FourierSeries& u, const FourierSeries& v, ProductRule rule) {
  return rule == ProductRule::Dealiased ? multiply(u, v) : multiply_collocated(u, v);
}
/// The same trigonometric polynomial on another grid: coefficients are copied
/// where both grids hold them away from Nyquist, zero elsewhere.
FourierSeries resample(const FourierSeries& u, const Grid& grid);
/// Same series with every mode outside max_i |k_i| / (N_i/2) <= band set to zero.
FourierSeries low_pass(const FourierSeries& u, Real band);
/// Products with a constant matrix are exact and need no padding.
FourierSeries multiply(const Matrix& a, const FourierSeries& u);
FourierSeries multiply(const FourierSeries& u, const Matrix& a);
FourierSeries add_constant(const FourierSeries& u, const Matrix& value);

/// Pointwise inverse of a square matrix series. When some grid point has
/// reciprocal condition below `rcond_floor`, `singular_point` names it and
/// `inverse` is left empty.
struct PointwiseInverse {
  FourierSeries inverse;
  std::ptrdiff_t singular_point = -1;
};
PointwiseInverse pointwise_inverse(const FourierSeries& u, Real rcond_floor = Real(1e-13));

// ---- calculus and norms ----------------------------------------------------

/// L_omega u = -Du . omega, i.e. coefficients -i (k.omega) c_k.
FourierSeries lie_derivative(const FourierSeries& u, const Vector& omega);
/// d u / d theta_axis (axis is 0-based).
FourierSeries derivative(const FourierSeries& u, int axis);
/// c_0 of every component.
Matrix average(const FourierSeries& u);
/// max over the grid of the max row sum of |u_ij| (for vectors: max |u_i|).
Real sup_norm(const FourierSeries& u);
/// Fraction of the coefficient l2 energy carried by modes with
/// max_i |k_i| / (N_i/2) > 2/3.
Real tail_energy(const FourierSeries& u);

// ---- coefficient dump ------------------------------------------------------

/// Plain-text dump: header "d rows cols N_1 .. N_d", then one line per
/// (k, component) over the full box prod [-N_i/2, N_i/2):
/// "k_1 .. k_d row col re im".
void write_coeff_dump(std::ostream& out, const FourierSeries& u);
FourierSeries read_coeff_dump(std::istream& in);

}  // namespace tori
