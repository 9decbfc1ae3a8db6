#include "tori/cohomology.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tori/errors.hpp"

namespace tori {

namespace {

std::vector<int> to_vector(std::span<const int> k) { return {k.begin(), k.end()}; }

std::string mode_string(std::span<const int> k) {
  std::string s = "(";
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(k[i]);
  }
  return s + ")";
}

Real dot(std::span<const int> k, const Vector& omega) {
  Real kw = 0;
  for (std::size_t i = 0; i < k.size(); ++i) kw += static_cast<Real>(k[i]) * omega[i];
  return kw;
}

void require_dims(const FourierSeries& v, const Vector& omega, const char* op) {
  if (v.grid().dims() != omega.size()) {
    throw ShapeMismatch(std::string(op) + ": series has " + std::to_string(v.grid().dims()) +
                        " angles but omega has " + std::to_string(omega.size()) + " entries");
  }
}

std::size_t offset(const FourierSeries& v, int r, int c) {
  return (static_cast<std::size_t>(r) * v.cols() + c) * v.grid().modes();
}

}  // namespace

FrequencyData::FrequencyData(Vector omega, Vector beta, std::optional<Real> gamma,
                             std::optional<Real> tau)
    : omega_(std::move(omega)), beta_(std::move(beta)), gamma_(gamma), tau_(tau) {
  if (omega_.size() == 0) throw InvalidData("omega must have at least one entry");
  for (Eigen::Index i = 0; i < beta_.size(); ++i) {
    if (beta_[i] == 0) throw InvalidData("beta_" + std::to_string(i + 1) + " is zero");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(beta_[i]) == std::abs(beta_[j])) {
        throw InvalidData("|beta_" + std::to_string(j + 1) + "| == |beta_" +
                          std::to_string(i + 1) + "|");
      }
    }
  }
  if (gamma_ && !(*gamma_ > 0)) throw InvalidData("gamma must be positive");
  if (tau_ && !(*tau_ > omega_.size() - 1)) throw InvalidData("tau must exceed d - 1");
}

Matrix FrequencyData::gamma_matrix(const Vector& alpha) const {
  const int m = normal_count();
  Matrix g = Matrix::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    g(i, i + m) = -beta_[i];
    g(i + m, i) = beta_[i];
    if (alpha.size() == m) {
      g(i, i) = alpha[i];
      g(i + m, i + m) = alpha[i];
    }
  }
  return g;
}

DivisorAudit audit_divisors(const FrequencyData& freq, const Grid& grid, Real divisor_floor) {
  constexpr Real inf = std::numeric_limits<Real>::infinity();
  DivisorAudit a;
  a.min_tangent = a.min_first = a.min_second = inf;
  const Vector& beta = freq.beta();
  const int m = freq.normal_count();
  const bool dioph = freq.gamma() && freq.tau();
  Real margin = inf;

  // The half spectrum suffices: every divisor at -k equals one at k.
  for (std::size_t s = 0; s < grid.modes(); ++s) {
    if (grid.is_nyquist(s)) continue;
    auto k = grid.wavenumber(s);
    const Real kw = dot(k, freq.omega());
    bool zero = true;
    Real k1 = 0;
    for (int ki : k) {
      zero = zero && ki == 0;
      k1 += std::abs(static_cast<Real>(ki));
    }
    Real local = inf;
    if (!zero) {
      local = std::abs(kw);
      if (local < a.min_tangent) {
        a.min_tangent = local;
        a.tangent_mode = to_vector(k);
      }
    }
    for (int i = 0; i < m; ++i) {
      for (Real sign : {Real(1), Real(-1)}) {
        const Real dv = std::abs(kw + sign * beta[i]);
        local = std::min(local, dv);
        if (dv < a.min_first) {
          a.min_first = dv;
          a.first_mode = to_vector(k);
        }
      }
      for (int j = 0; j < m; ++j) {
        for (Real si : {Real(1), Real(-1)}) {
          for (Real sj : {Real(1), Real(-1)}) {
            if (zero && i == j && si != sj) continue;
            const Real dv = std::abs(kw + si * beta[i] + sj * beta[j]);
            local = std::min(local, dv);
            if (dv < a.min_second) {
              a.min_second = dv;
              a.second_mode = to_vector(k);
            }
          }
        }
      }
    }
    if (dioph && !zero) {
      const Real r = local * std::pow(k1, *freq.tau()) / *freq.gamma();
      if (r < margin) {
        margin = r;
        a.worst_mode = to_vector(k);
      }
    }
  }
  if (dioph) a.diophantine_margin = margin;
  a.passed = a.min_tangent > divisor_floor && (m == 0 || a.min_first > divisor_floor) &&
             (m == 0 || a.min_second > divisor_floor);
  return a;
}

FourierSeries solve_zero_average(const FourierSeries& v, const Vector& omega,
                                 const Matrix& average, const CohomologyOptions& opts) {
  require_dims(v, omega, "solve_zero_average");
  if (average.size() != 0 && (average.rows() != v.rows() || average.cols() != v.cols())) {
    throw ShapeMismatch("solve_zero_average: prescribed average has the wrong shape");
  }
  const Matrix avg = tori::average(v);
  const Real avg_norm = avg.cwiseAbs().maxCoeff();
  if (avg_norm > opts.average_tol * sup_norm(v)) {
    throw UnsolvableEquation("solve_zero_average: right-hand side has average " +
                                 std::to_string(static_cast<double>(avg_norm)),
                             avg_norm);
  }
  const Grid& g = v.grid();
  std::vector<Complex> out(v.coeffs().size(), Complex(0));
  for (std::size_t s = 1; s < g.modes(); ++s) {
    if (g.is_nyquist(s)) continue;
    const Real kw = dot(g.wavenumber(s), omega);
    if (std::abs(kw) < opts.divisor_floor) {
      throw SmallDivisor("solve_zero_average: |k.omega| below floor at k = " +
                             mode_string(g.wavenumber(s)),
                         to_vector(g.wavenumber(s)), std::abs(kw));
    }
    const Complex f(0, 1 / kw);
    for (int c = 0; c < v.components(); ++c) {
      const std::size_t o = static_cast<std::size_t>(c) * g.modes() + s;
      out[o] = f * v.coeffs()[o];
    }
  }
  if (average.size() != 0) {
    for (int r = 0; r < v.rows(); ++r)
      for (int c = 0; c < v.cols(); ++c) out[offset(v, r, c)] = average(r, c);
  }
  return FourierSeries::from_coeffs(g, v.rows(), v.cols(), std::move(out));
}

FourierSeries solve_melnikov1(const FourierSeries& v, const FrequencyData& freq, Side side,
                              const CohomologyOptions& opts) {
  require_dims(v, freq.omega(), "solve_melnikov1");
  const int m = freq.normal_count();
  const bool left = side == Side::Left;
  if ((left ? v.rows() : v.cols()) != 2 * m) {
    throw ShapeMismatch(std::string("solve_melnikov1: expected ") + std::to_string(2 * m) +
                        (left ? " rows" : " columns"));
  }
  const Grid& g = v.grid();
  const int others = left ? v.cols() : v.rows();
  const Vector& beta = freq.beta();
  std::vector<Complex> out(v.coeffs().size(), Complex(0));
  for (std::size_t s = 0; s < g.modes(); ++s) {
    if (g.is_nyquist(s)) continue;
    const Real kw = dot(g.wavenumber(s), freq.omega());
    const Complex a(0, -kw);
    for (int j = 0; j < m; ++j) {
      const Real div = std::min(std::abs(kw - beta[j]), std::abs(kw + beta[j]));
      if (div < opts.divisor_floor) {
        throw SmallDivisor("solve_melnikov1: |k.omega -+ beta_" + std::to_string(j + 1) +
                               "| below floor at k = " + mode_string(g.wavenumber(s)),
                           to_vector(g.wavenumber(s)), div);
      }
      // [[a, -b], [b, a]]^{-1} = [[a, b], [-b, a]] / (a^2 + b^2)
      const Complex det = a * a + beta[j] * beta[j];
      for (int o = 0; o < others; ++o) {
        const std::size_t i1 = left ? offset(v, j, o) : offset(v, o, j);
        const std::size_t i2 = left ? offset(v, j + m, o) : offset(v, o, j + m);
        const Complex v1 = v.coeffs()[i1 + s];
        const Complex v2 = v.coeffs()[i2 + s];
        out[i1 + s] = (a * v1 + beta[j] * v2) / det;
        out[i2 + s] = (-beta[j] * v1 + a * v2) / det;
      }
    }
  }
  return FourierSeries::from_coeffs(g, v.rows(), v.cols(), std::move(out));
}

Melnikov2Solution solve_melnikov2(const FourierSeries& v, const FrequencyData& freq,
                                  const CohomologyOptions& opts) {
  require_dims(v, freq.omega(), "solve_melnikov2");
  const int m = freq.normal_count();
  if (v.rows() != 2 * m || v.cols() != 2 * m) {
    throw ShapeMismatch("solve_melnikov2: expected a " + std::to_string(2 * m) + "x" +
                        std::to_string(2 * m) + " series");
  }
  const Grid& g = v.grid();
  const Vector& beta = freq.beta();
  using Block = Eigen::Matrix<Complex, 4, 4>;
  using Vec4 = Eigen::Matrix<Complex, 4, 1>;
  std::vector<Complex> out(v.coeffs().size(), Complex(0));
  Real defect = 0;

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const std::size_t idx[4] = {offset(v, i, j), offset(v, i, j + m), offset(v, i + m, j),
                                  offset(v, i + m, j + m)};
      const Real bi = beta[i], bj = beta[j];
      for (std::size_t s = 0; s < g.modes(); ++s) {
        if (g.is_nyquist(s)) continue;
        const Real kw = dot(g.wavenumber(s), freq.omega());
        Vec4 rhs;
        for (int q = 0; q < 4; ++q) rhs[q] = v.coeffs()[idx[q] + s];
        if (s == 0 && i == j) {
          const Complex p = Real(0.5) * (rhs[0] - rhs[3]);
          const Complex q = Real(0.5) * (rhs[1] + rhs[2]);
          defect = std::max({defect, std::abs(rhs[0] + rhs[3]), std::abs(rhs[1] - rhs[2])});
          out[idx[0]] = q / (2 * bi);
          out[idx[3]] = -q / (2 * bi);
          out[idx[1]] = -p / (2 * bi);
          out[idx[2]] = -p / (2 * bi);
          continue;
        }
        Real div = std::numeric_limits<Real>::infinity();
        for (Real si : {Real(1), Real(-1)})
          for (Real sj : {Real(1), Real(-1)}) div = std::min(div, std::abs(kw + si * bi + sj * bj));
        if (div < opts.divisor_floor) {
          throw SmallDivisor("solve_melnikov2: |k.omega -+ beta_" + std::to_string(i + 1) +
                                 " -+ beta_" + std::to_string(j + 1) + "| below floor at k = " +
                                 mode_string(g.wavenumber(s)),
                             to_vector(g.wavenumber(s)), div);
        }
        const Complex a(0, -kw);
        Block mat;
        mat << a, -bj, -bi, 0,
               bj, a, 0, -bi,
               bi, 0, a, -bj,
               0, bi, bj, a;
        const Vec4 sol = mat.partialPivLu().solve(rhs);
        for (int q = 0; q < 4; ++q) out[idx[q] + s] = sol[q];
      }
    }
  }
  const Real scale = sup_norm(v);
  if (defect > opts.solvability_tol * scale) {
    throw UnsolvableEquation("solve_melnikov2: k = 0 diagonal average is " +
                                 std::to_string(static_cast<double>(defect)) +
                                 " away from the image",
                             defect);
  }
  return {FourierSeries::from_coeffs(g, v.rows(), v.cols(), std::move(out)), defect};
}

}  // namespace tori
