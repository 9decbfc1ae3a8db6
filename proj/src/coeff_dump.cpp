#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "tori/errors.hpp"
#include "tori/fourier.hpp"

namespace tori {

namespace {

// Visit every k in prod [-N_i/2, N_i/2), first axis slowest.
template <class F>
void for_each_box_mode(const Grid& g, F&& f) {
  const int d = g.dims();
  std::vector<int> k(d);
  for (int i = 0; i < d; ++i) k[i] = -g.size(i) / 2;
  while (true) {
    f(k);
    int i = d - 1;
    for (; i >= 0; --i) {
      if (++k[i] < g.size(i) / 2) break;
      k[i] = -g.size(i) / 2;
    }
    if (i < 0) return;
  }
}

}  // namespace

void write_coeff_dump(std::ostream& out, const FourierSeries& u) {
  const Grid& g = u.grid();
  out << g.dims() << ' ' << u.rows() << ' ' << u.cols();
  for (int n : g.sizes()) out << ' ' << n;
  out << '\n';
  const auto old_flags = out.flags();
  const auto old_prec = out.precision();
  out << std::scientific << std::setprecision(std::numeric_limits<Real>::max_digits10);
  for_each_box_mode(g, [&](const std::vector<int>& k) {
    for (int r = 0; r < u.rows(); ++r) {
      for (int c = 0; c < u.cols(); ++c) {
        const Complex z = u.coeff(r, c, k);
        for (int ki : k) out << ki << ' ';
        out << r << ' ' << c << ' ' << z.real() << ' ' << z.imag() << '\n';
      }
    }
  });
  out.flags(old_flags);
  out.precision(old_prec);
}

FourierSeries read_coeff_dump(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw InvalidData("coefficient dump: missing header");
  std::istringstream hs(header);
  int d = 0, rows = 0, cols = 0;
  if (!(hs >> d >> rows >> cols) || d < 1 || rows < 0 || cols < 0) {
    throw InvalidData("coefficient dump: malformed header '" + header + "'");
  }
  std::vector<int> sizes(d);
  for (int& n : sizes) {
    if (!(hs >> n)) throw InvalidData("coefficient dump: header lacks grid sizes");
  }
  const Grid g(sizes);
  std::vector<Complex> coeffs(static_cast<std::size_t>(rows) * cols * g.modes(), Complex(0));
  std::vector<int> k(d);
  std::size_t line_no = 1;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    int r = 0, c = 0;
    Real re = 0, im = 0;
    for (int& ki : k) ls >> ki;
    if (!(ls >> r >> c >> re >> im) || r < 0 || r >= rows || c < 0 || c >= cols) {
      throw InvalidData("coefficient dump: malformed line " + std::to_string(line_no));
    }
    const std::ptrdiff_t idx = g.mode_index(k);
    if (idx < 0) continue;  // -k half, implied by conjugate symmetry
    coeffs[(static_cast<std::size_t>(r) * cols + c) * g.modes() + idx] = Complex(re, im);
  }
  return FourierSeries::from_coeffs(g, rows, cols, std::move(coeffs));
}

}  // namespace tori
