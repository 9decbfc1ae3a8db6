#include "tori/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fft.hpp"
#include "tori/errors.hpp"

namespace tori {

struct SeriesAccess {
  static FourierSeries make(Grid grid, int rows, int cols, std::vector<Real> samples,
                            std::vector<Complex> coeffs) {
    return FourierSeries(std::move(grid), rows, cols, std::move(samples), std::move(coeffs));
  }
  static std::vector<Real>& samples(FourierSeries& u) { return u.samples_; }
  static std::vector<Complex>& coeffs(FourierSeries& u) { return u.coeffs_; }
};

namespace {

bool is_power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

void require_same_grid(const FourierSeries& a, const FourierSeries& b, const char* op) {
  if (!(a.grid() == b.grid())) {
    throw ShapeMismatch(std::string(op) + ": operands live on different grids");
  }
}

void require_same_shape(const FourierSeries& a, const FourierSeries& b, const char* op) {
  require_same_grid(a, b, op);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch(std::string(op) + ": shape " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
  }
}

// Replace c_k on the self-conjugate planes by the Hermitian part.
void enforce_symmetry(const Grid& grid, Complex* c) {
  for (std::size_t s = 0; s < grid.modes(); ++s) {
    const std::ptrdiff_t q = grid.partner(s);
    if (q < 0 || static_cast<std::size_t>(q) < s) continue;
    if (static_cast<std::size_t>(q) == s) {
      c[s] = Complex(c[s].real(), 0);
    } else {
      const Complex avg = Real(0.5) * (c[s] + std::conj(c[q]));
      c[s] = avg;
      c[q] = std::conj(avg);
    }
  }
}

template <class F>
FourierSeries map_modes(const FourierSeries& u, F&& factor) {
  const Grid& g = u.grid();
  std::vector<Complex> out(u.coeffs().begin(), u.coeffs().end());
  std::vector<Complex> f(g.modes());
  for (std::size_t s = 0; s < g.modes(); ++s) {
    f[s] = g.is_nyquist(s) ? Complex(0) : factor(g.wavenumber(s));
  }
  for (int c = 0; c < u.components(); ++c) {
    Complex* block = out.data() + static_cast<std::size_t>(c) * g.modes();
    for (std::size_t s = 0; s < g.modes(); ++s) block[s] *= f[s];
  }
  return FourierSeries::from_coeffs(g, u.rows(), u.cols(), std::move(out));
}

}  // namespace

// ---- Grid ------------------------------------------------------------------

Grid::Grid(std::vector<int> sizes) : Grid(std::move(sizes), true) {}

Grid::Grid(std::vector<int> sizes, bool check) {
  if (sizes.empty()) throw InvalidData("grid needs at least one angle");
  for (int n : sizes) {
    if (check ? !is_power_of_two(n) : (n < 2 || n % 2 != 0)) {
      throw InvalidData("grid size " + std::to_string(n) + " is not a power of two >= 2");
    }
  }
  auto data = std::make_shared<Data>();
  data->sizes = std::move(sizes);
  const int d = static_cast<int>(data->sizes.size());
  data->points = 1;
  for (int n : data->sizes) data->points *= static_cast<std::size_t>(n);
  std::vector<int> extent(data->sizes);
  extent.back() = data->sizes.back() / 2 + 1;
  data->modes = 1;
  for (int e : extent) data->modes *= static_cast<std::size_t>(e);

  data->k.resize(data->modes * d);
  data->nyquist.resize(data->modes);
  std::vector<int> j(d, 0);
  for (std::size_t s = 0; s < data->modes; ++s) {
    bool nyq = false;
    for (int i = 0; i < d; ++i) {
      const int n = data->sizes[i];
      const int k = (i + 1 < d && j[i] >= n / 2) ? j[i] - n : j[i];
      data->k[s * d + i] = k;
      if (std::abs(k) == n / 2) nyq = true;
    }
    data->nyquist[s] = nyq;
    for (int i = d - 1; i >= 0; --i) {
      if (++j[i] < extent[i]) break;
      j[i] = 0;
    }
  }
  data_ = std::move(data);

  std::vector<std::ptrdiff_t> partner(data_->modes, -1);
  std::vector<int> neg(d);
  for (std::size_t s = 0; s < data_->modes; ++s) {
    auto k = wavenumber(s);
    const int last = k[d - 1];
    if (last != 0 && last != data_->sizes[d - 1] / 2) continue;
    for (int i = 0; i < d; ++i) neg[i] = -k[i];
    partner[s] = mode_index(neg);
  }
  auto full = std::make_shared<Data>(*data_);
  full->partner = std::move(partner);
  data_ = std::move(full);
}

std::ptrdiff_t Grid::mode_index(std::span<const int> k) const {
  const int d = dims();
  std::size_t idx = 0;
  for (int i = 0; i < d; ++i) {
    const int n = data_->sizes[i];
    int j = ((k[i] % n) + n) % n;
    if (i + 1 == d) {
      if (j > n / 2) return -1;
      idx = idx * static_cast<std::size_t>(n / 2 + 1) + j;
    } else {
      idx = idx * static_cast<std::size_t>(n) + j;
    }
  }
  return static_cast<std::ptrdiff_t>(idx);
}

std::vector<Real> Grid::angles(std::size_t point) const {
  const int d = dims();
  std::vector<Real> theta(d);
  for (int i = d - 1; i >= 0; --i) {
    const int n = data_->sizes[i];
    theta[i] = 2 * kPi * static_cast<Real>(point % n) / static_cast<Real>(n);
    point /= n;
  }
  return theta;
}

Grid Grid::padded() const {
  std::vector<int> sizes(data_->sizes);
  for (int& n : sizes) {
    n += n / 2;
    n += n % 2;
  }
  return Grid(std::move(sizes), false);
}

bool Grid::operator==(const Grid& other) const {
  if (data_ == other.data_) return true;
  if (!data_ || !other.data_) return false;
  return data_->sizes == other.data_->sizes;
}

// ---- FourierSeries -----------------------------------------------------------

FourierSeries::FourierSeries(Grid grid, int rows, int cols, std::vector<Real> samples,
                             std::vector<Complex> coeffs)
    : grid_(std::move(grid)),
      rows_(rows),
      cols_(cols),
      samples_(std::move(samples)),
      coeffs_(std::move(coeffs)) {}

FourierSeries FourierSeries::zeros(const Grid& grid, int rows, int cols) {
  const auto comps = static_cast<std::size_t>(rows) * cols;
  return FourierSeries(grid, rows, cols, std::vector<Real>(comps * grid.points(), 0),
                       std::vector<Complex>(comps * grid.modes(), Complex(0)));
}

FourierSeries FourierSeries::constant(const Grid& grid, const Matrix& value) {
  return add_constant(zeros(grid, static_cast<int>(value.rows()), static_cast<int>(value.cols())),
                      value);
}

FourierSeries FourierSeries::from_samples(const Grid& grid, int rows, int cols,
                                          std::vector<Real> samples) {
  const auto comps = static_cast<std::size_t>(rows) * cols;
  if (samples.size() != comps * grid.points()) {
    throw ShapeMismatch("from_samples: expected " + std::to_string(comps * grid.points()) +
                        " samples, got " + std::to_string(samples.size()));
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw InvalidData("from_samples: non-finite sample at flat index " + std::to_string(i));
    }
  }
  std::vector<Complex> coeffs(comps * grid.modes());
  for (std::size_t c = 0; c < comps; ++c) {
    detail::forward_transform(grid, samples.data() + c * grid.points(),
                              coeffs.data() + c * grid.modes());
  }
  return FourierSeries(grid, rows, cols, std::move(samples), std::move(coeffs));
}

FourierSeries FourierSeries::from_coeffs(const Grid& grid, int rows, int cols,
                                         std::vector<Complex> coeffs) {
  const auto comps = static_cast<std::size_t>(rows) * cols;
  if (coeffs.size() != comps * grid.modes()) {
    throw ShapeMismatch("from_coeffs: expected " + std::to_string(comps * grid.modes()) +
                        " coefficients, got " + std::to_string(coeffs.size()));
  }
  for (const Complex& z : coeffs) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw InvalidData("from_coeffs: non-finite coefficient");
    }
  }
  std::vector<Real> samples(comps * grid.points());
  for (std::size_t c = 0; c < comps; ++c) {
    enforce_symmetry(grid, coeffs.data() + c * grid.modes());
    detail::backward_transform(grid, coeffs.data() + c * grid.modes(),
                               samples.data() + c * grid.points());
  }
  return FourierSeries(grid, rows, cols, std::move(samples), std::move(coeffs));
}

std::span<const Real> FourierSeries::samples(int r, int c) const {
  const std::size_t n = grid_.points();
  return {samples_.data() + (static_cast<std::size_t>(r) * cols_ + c) * n, n};
}

std::span<const Complex> FourierSeries::coeffs(int r, int c) const {
  const std::size_t n = grid_.modes();
  return {coeffs_.data() + (static_cast<std::size_t>(r) * cols_ + c) * n, n};
}

Complex FourierSeries::coeff(int r, int c, std::span<const int> k) const {
  const std::ptrdiff_t idx = grid_.mode_index(k);
  if (idx >= 0) return coeffs(r, c)[idx];
  std::vector<int> neg(k.begin(), k.end());
  for (int& x : neg) x = -x;
  return std::conj(coeffs(r, c)[grid_.mode_index(neg)]);
}

Matrix FourierSeries::value_at(std::size_t point) const {
  Matrix m(rows_, cols_);
  const std::size_t n = grid_.points();
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      m(r, c) = samples_[(static_cast<std::size_t>(r) * cols_ + c) * n + point];
  return m;
}

Matrix FourierSeries::evaluate(std::span<const Real> theta) const {
  const int d = grid_.dims();
  if (static_cast<int>(theta.size()) != d) throw ShapeMismatch("evaluate: wrong angle count");
  // phase[i][k + N_i/2] = exp(i k theta_i), k in [-N_i/2, N_i/2]
  std::vector<std::vector<Complex>> phase(d);
  for (int i = 0; i < d; ++i) {
    const int half = grid_.size(i) / 2;
    phase[i].resize(2 * half + 1);
    for (int k = -half; k <= half; ++k) {
      phase[i][k + half] = std::polar(Real(1), static_cast<Real>(k) * theta[i]);
    }
  }
  const int last_half = grid_.size(d - 1) / 2;
  Matrix out = Matrix::Zero(rows_, cols_);
  const std::size_t modes = grid_.modes();
  for (std::size_t s = 0; s < modes; ++s) {
    auto k = grid_.wavenumber(s);
    Complex e(1);
    for (int i = 0; i < d; ++i) e *= phase[i][k[i] + grid_.size(i) / 2];
    const Real w = (k[d - 1] > 0 && k[d - 1] < last_half) ? Real(2) : Real(1);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c)
        out(r, c) += w * (coeffs_[(static_cast<std::size_t>(r) * cols_ + c) * modes + s] * e).real();
  }
  return out;
}

// ---- SampleBuffer --------------------------------------------------------------

SampleBuffer::SampleBuffer(const Grid& grid, int rows, int cols)
    : grid_(grid),
      rows_(rows),
      cols_(cols),
      samples_(static_cast<std::size_t>(rows) * cols * grid.points(), 0) {}

void SampleBuffer::set(std::size_t point, const Matrix& value) {
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) at(r, c, point) = value(r, c);
}

FourierSeries SampleBuffer::finish() && {
  return FourierSeries::from_samples(grid_, rows_, cols_, std::move(samples_));
}

// ---- algebra -------------------------------------------------------------------

FourierSeries operator+(const FourierSeries& a, const FourierSeries& b) {
  require_same_shape(a, b, "add");
  std::vector<Real> s(a.samples().begin(), a.samples().end());
  std::vector<Complex> c(a.coeffs().begin(), a.coeffs().end());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] += b.samples()[i];
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b.coeffs()[i];
  return SeriesAccess::make(a.grid(), a.rows(), a.cols(), std::move(s), std::move(c));
}

FourierSeries operator-(const FourierSeries& a, const FourierSeries& b) {
  require_same_shape(a, b, "subtract");
  std::vector<Real> s(a.samples().begin(), a.samples().end());
  std::vector<Complex> c(a.coeffs().begin(), a.coeffs().end());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] -= b.samples()[i];
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b.coeffs()[i];
  return SeriesAccess::make(a.grid(), a.rows(), a.cols(), std::move(s), std::move(c));
}

FourierSeries operator-(const FourierSeries& a) { return Real(-1) * a; }

FourierSeries operator*(Real k, const FourierSeries& a) {
  std::vector<Real> s(a.samples().begin(), a.samples().end());
  std::vector<Complex> c(a.coeffs().begin(), a.coeffs().end());
  for (Real& x : s) x *= k;
  for (Complex& z : c) z *= k;
  return SeriesAccess::make(a.grid(), a.rows(), a.cols(), std::move(s), std::move(c));
}

namespace {

// Assemble a series whose component (r, c) is component pick(r, c) of src.
template <class Pick>
FourierSeries gather(const FourierSeries& src, int rows, int cols, Pick pick) {
  const Grid& g = src.grid();
  std::vector<Real> s;
  std::vector<Complex> c;
  s.reserve(static_cast<std::size_t>(rows) * cols * g.points());
  c.reserve(static_cast<std::size_t>(rows) * cols * g.modes());
  for (int r = 0; r < rows; ++r) {
    for (int q = 0; q < cols; ++q) {
      auto [sr, sc] = pick(r, q);
      auto ss = src.samples(sr, sc);
      auto cc = src.coeffs(sr, sc);
      s.insert(s.end(), ss.begin(), ss.end());
      c.insert(c.end(), cc.begin(), cc.end());
    }
  }
  return SeriesAccess::make(g, rows, cols, std::move(s), std::move(c));
}

}  // namespace

FourierSeries transpose(const FourierSeries& u) {
  return gather(u, u.cols(), u.rows(), [](int r, int c) { return std::pair{c, r}; });
}

FourierSeries block(const FourierSeries& u, int row0, int col0, int rows, int cols) {
  if (row0 < 0 || col0 < 0 || rows < 0 || cols < 0 || row0 + rows > u.rows() ||
      col0 + cols > u.cols()) {
    throw ShapeMismatch("block: out of range");
  }
  return gather(u, rows, cols, [&](int r, int c) { return std::pair{row0 + r, col0 + c}; });
}

FourierSeries hstack(const std::vector<FourierSeries>& parts) {
  if (parts.empty()) throw ShapeMismatch("hstack: nothing to stack");
  const FourierSeries& first = parts.front();
  int cols = 0;
  for (const auto& p : parts) {
    require_same_grid(first, p, "hstack");
    if (p.rows() != first.rows()) throw ShapeMismatch("hstack: row counts differ");
    cols += p.cols();
  }
  const Grid& g = first.grid();
  const int rows = first.rows();
  std::vector<Real> s;
  std::vector<Complex> c;
  for (int r = 0; r < rows; ++r) {
    for (const auto& p : parts) {
      for (int q = 0; q < p.cols(); ++q) {
        auto ss = p.samples(r, q);
        auto cc = p.coeffs(r, q);
        s.insert(s.end(), ss.begin(), ss.end());
        c.insert(c.end(), cc.begin(), cc.end());
      }
    }
  }
  return SeriesAccess::make(g, rows, cols, std::move(s), std::move(c));
}

FourierSeries vstack(const std::vector<FourierSeries>& parts) {
  if (parts.empty()) throw ShapeMismatch("vstack: nothing to stack");
  const FourierSeries& first = parts.front();
  int rows = 0;
  std::vector<Real> s;
  std::vector<Complex> c;
  for (const auto& p : parts) {
    require_same_grid(first, p, "vstack");
    if (p.cols() != first.cols()) throw ShapeMismatch("vstack: column counts differ");
    rows += p.rows();
    s.insert(s.end(), p.samples().begin(), p.samples().end());
    c.insert(c.end(), p.coeffs().begin(), p.coeffs().end());
  }
  return SeriesAccess::make(first.grid(), rows, first.cols(), std::move(s), std::move(c));
}

FourierSeries multiply(const Matrix& a, const FourierSeries& u) {
  if (a.cols() != u.rows()) throw ShapeMismatch("multiply: constant matrix columns != rows");
  const Grid& g = u.grid();
  const int rows = static_cast<int>(a.rows());
  const int cols = u.cols();
  FourierSeries out = FourierSeries::zeros(g, rows, cols);
  auto& s = SeriesAccess::samples(out);
  auto& c = SeriesAccess::coeffs(out);
  const std::size_t np = g.points(), nm = g.modes();
  for (int i = 0; i < rows; ++i) {
    for (int l = 0; l < u.rows(); ++l) {
      const Real w = a(i, l);
      if (w == 0) continue;
      for (int j = 0; j < cols; ++j) {
        Real* so = s.data() + (static_cast<std::size_t>(i) * cols + j) * np;
        Complex* co = c.data() + (static_cast<std::size_t>(i) * cols + j) * nm;
        auto su = u.samples(l, j);
        auto cu = u.coeffs(l, j);
        for (std::size_t p = 0; p < np; ++p) so[p] += w * su[p];
        for (std::size_t m = 0; m < nm; ++m) co[m] += w * cu[m];
      }
    }
  }
  return out;
}

FourierSeries multiply(const FourierSeries& u, const Matrix& a) {
  if (u.cols() != a.rows()) throw ShapeMismatch("multiply: columns != constant matrix rows");
  return transpose(multiply(Matrix(a.transpose()), transpose(u)));
}

FourierSeries add_constant(const FourierSeries& u, const Matrix& value) {
  if (value.rows() != u.rows() || value.cols() != u.cols()) {
    throw ShapeMismatch("add_constant: shape mismatch");
  }
  std::vector<Real> s(u.samples().begin(), u.samples().end());
  std::vector<Complex> c(u.coeffs().begin(), u.coeffs().end());
  const Grid& g = u.grid();
  for (int r = 0; r < u.rows(); ++r) {
    for (int q = 0; q < u.cols(); ++q) {
      const auto comp = static_cast<std::size_t>(r) * u.cols() + q;
      for (std::size_t p = 0; p < g.points(); ++p) s[comp * g.points() + p] += value(r, q);
      c[comp * g.modes()] += value(r, q);
    }
  }
  return SeriesAccess::make(g, u.rows(), u.cols(), std::move(s), std::move(c));
}

FourierSeries multiply(const FourierSeries& u, const FourierSeries& v) {
  require_same_grid(u, v, "multiply");
  if (u.cols() != v.rows()) {
    throw ShapeMismatch("multiply: inner dimensions " + std::to_string(u.cols()) + " and " +
                        std::to_string(v.rows()) + " differ");
  }
  const Grid& g = u.grid();
  const int rows = u.rows(), inner = u.cols(), cols = v.cols();
  if (rows * cols == 0 || inner == 0) return FourierSeries::zeros(g, rows, cols);

  const Grid fine = g.padded();
  // base mode -> padded mode (or -1 for Nyquist modes, which are dropped)
  std::vector<std::ptrdiff_t> map(g.modes(), -1);
  for (std::size_t s = 0; s < g.modes(); ++s) {
    if (!g.is_nyquist(s)) map[s] = fine.mode_index(g.wavenumber(s));
  }

  const std::size_t fp = fine.points(), fm = fine.modes();
  auto pad = [&](const FourierSeries& w) {
    std::vector<Real> out(static_cast<std::size_t>(w.components()) * fp);
    std::vector<Complex> buf(fm);
    for (int c = 0; c < w.components(); ++c) {
      std::fill(buf.begin(), buf.end(), Complex(0));
      const Complex* src = w.coeffs().data() + static_cast<std::size_t>(c) * g.modes();
      for (std::size_t s = 0; s < g.modes(); ++s) {
        if (map[s] >= 0) buf[map[s]] = src[s];
      }
      detail::backward_transform(fine, buf.data(), out.data() + static_cast<std::size_t>(c) * fp);
    }
    return out;
  };
  const std::vector<Real> uf = pad(u);
  const std::vector<Real> vf = pad(v);

  std::vector<Real> prod(fp);
  std::vector<Complex> fine_coeffs(fm);
  std::vector<Complex> coeffs(static_cast<std::size_t>(rows) * cols * g.modes(), Complex(0));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      std::fill(prod.begin(), prod.end(), Real(0));
      for (int l = 0; l < inner; ++l) {
        const Real* a = uf.data() + (static_cast<std::size_t>(i) * inner + l) * fp;
        const Real* b = vf.data() + (static_cast<std::size_t>(l) * cols + j) * fp;
        for (std::size_t p = 0; p < fp; ++p) prod[p] += a[p] * b[p];
      }
      detail::forward_transform(fine, prod.data(), fine_coeffs.data());
      Complex* dst = coeffs.data() + (static_cast<std::size_t>(i) * cols + j) * g.modes();
      for (std::size_t s = 0; s < g.modes(); ++s) {
        if (map[s] >= 0) dst[s] = fine_coeffs[map[s]];
      }
    }
  }
  return FourierSeries::from_coeffs(g, rows, cols, std::move(coeffs));
}

FourierSeries resample(const FourierSeries& u, const Grid& grid) {
  const Grid& src = u.grid();
  if (src.dims() != grid.dims()) throw ShapeMismatch("resample: grids differ in dimension");
  if (src == grid) return u;
  std::vector<Complex> c(static_cast<std::size_t>(u.components()) * grid.modes(), Complex(0));
  for (std::size_t s = 0; s < grid.modes(); ++s) {
    if (grid.is_nyquist(s)) continue;
    const auto k = grid.wavenumber(s);
    bool inside = true;
    for (int i = 0; i < grid.dims(); ++i) {
      if (2 * std::abs(k[i]) >= src.size(i)) inside = false;
    }
    if (!inside) continue;
    for (int r = 0; r < u.rows(); ++r)
      for (int q = 0; q < u.cols(); ++q)
        c[(static_cast<std::size_t>(r) * u.cols() + q) * grid.modes() + s] = u.coeff(r, q, k);
  }
  return FourierSeries::from_coeffs(grid, u.rows(), u.cols(), std::move(c));
}

FourierSeries low_pass(const FourierSeries& u, Real band) {
  const Grid& g = u.grid();
  std::vector<Complex> c(u.coeffs().begin(), u.coeffs().end());
  for (std::size_t s = 0; s < g.modes(); ++s) {
    bool keep = !g.is_nyquist(s);
    const auto k = g.wavenumber(s);
    for (int i = 0; i < g.dims(); ++i) {
      if (std::abs(k[i]) > band * (g.size(i) / 2)) keep = false;
    }
    if (keep) continue;
    for (int comp = 0; comp < u.components(); ++comp) c[comp * g.modes() + s] = 0;
  }
  return FourierSeries::from_coeffs(g, u.rows(), u.cols(), std::move(c));
}

FourierSeries multiply_collocated(const FourierSeries& u, const FourierSeries& v) {
  require_same_grid(u, v, "multiply_collocated");
  if (u.cols() != v.rows()) {
    throw ShapeMismatch("multiply_collocated: inner dimensions " + std::to_string(u.cols()) +
                        " and " + std::to_string(v.rows()) + " differ");
  }
  const Grid& g = u.grid();
  const std::size_t np = g.points();
  const int rows = u.rows(), inner = u.cols(), cols = v.cols();
  std::vector<Real> s(static_cast<std::size_t>(rows) * cols * np, 0);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      Real* out = s.data() + (static_cast<std::size_t>(i) * cols + j) * np;
      for (int l = 0; l < inner; ++l) {
        auto a = u.samples(i, l);
        auto b = v.samples(l, j);
        for (std::size_t p = 0; p < np; ++p) out[p] += a[p] * b[p];
      }
    }
  }
  return FourierSeries::from_samples(g, rows, cols, std::move(s));
}

PointwiseInverse pointwise_inverse(const FourierSeries& u, Real rcond_floor) {
  if (u.rows() != u.cols()) throw ShapeMismatch("pointwise_inverse: matrix is not square");
  const Grid& g = u.grid();
  SampleBuffer buf(g, u.rows(), u.cols());
  for (std::size_t p = 0; p < g.points(); ++p) {
    Eigen::PartialPivLU<Matrix> lu(u.value_at(p));
    if (!(lu.rcond() >= rcond_floor)) return {FourierSeries(), static_cast<std::ptrdiff_t>(p)};
    buf.set(p, lu.inverse());
  }
  return {std::move(buf).finish(), -1};
}

// ---- calculus and norms ----------------------------------------------------------

FourierSeries lie_derivative(const FourierSeries& u, const Vector& omega) {
  if (omega.size() != u.grid().dims()) {
    throw ShapeMismatch("lie_derivative: frequency vector has " + std::to_string(omega.size()) +
                        " entries for a " + std::to_string(u.grid().dims()) + "-torus");
  }
  return map_modes(u, [&](std::span<const int> k) {
    Real kw = 0;
    for (std::size_t i = 0; i < k.size(); ++i) kw += static_cast<Real>(k[i]) * omega[i];
    return Complex(0, -kw);
  });
}

FourierSeries derivative(const FourierSeries& u, int axis) {
  if (axis < 0 || axis >= u.grid().dims()) {
    throw InvalidData("derivative: angle index " + std::to_string(axis) + " out of range");
  }
  return map_modes(u, [&](std::span<const int> k) {
    return Complex(0, static_cast<Real>(k[axis]));
  });
}

Matrix average(const FourierSeries& u) {
  Matrix m(u.rows(), u.cols());
  for (int r = 0; r < u.rows(); ++r)
    for (int c = 0; c < u.cols(); ++c) m(r, c) = u.coeffs(r, c)[0].real();
  return m;
}

Real sup_norm(const FourierSeries& u) {
  const std::size_t np = u.grid().points();
  const auto s = u.samples();
  Real best = 0;
  std::vector<Real> row(np);
  for (int r = 0; r < u.rows(); ++r) {
    std::fill(row.begin(), row.end(), Real(0));
    for (int c = 0; c < u.cols(); ++c) {
      const Real* x = s.data() + (static_cast<std::size_t>(r) * u.cols() + c) * np;
      for (std::size_t p = 0; p < np; ++p) row[p] += std::abs(x[p]);
    }
    for (Real v : row) best = std::max(best, v);
  }
  return best;
}

Real tail_energy(const FourierSeries& u) {
  const Grid& g = u.grid();
  const int d = g.dims();
  const int last_half = g.size(d - 1) / 2;
  Real total = 0, tail = 0;
  for (std::size_t s = 0; s < g.modes(); ++s) {
    auto k = g.wavenumber(s);
    Real level = 0;
    for (int i = 0; i < d; ++i) {
      level = std::max(level, std::abs(static_cast<Real>(k[i])) / (g.size(i) / 2));
    }
    const Real w = (k[d - 1] > 0 && k[d - 1] < last_half) ? Real(2) : Real(1);
    Real e = 0;
    for (int c = 0; c < u.components(); ++c) {
      e += std::norm(u.coeffs()[static_cast<std::size_t>(c) * g.modes() + s]);
    }
    total += w * e;
    if (3 * level > 2) tail += w * e;
  }
  return total > 0 ? tail / total : Real(0);
}

}  // namespace tori
