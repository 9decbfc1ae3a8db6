#pragma once

// Generators and independent oracles shared by the unit tests and the acceptance run.
// Nothing here goes through the FFT: trig polynomials are summed directly and the
// linear operators are assembled densely in the real basis 1, cos(k.theta), sin(k.theta).

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tori/fourier.hpp"

namespace tori::testing {

inline Real dot(const std::vector<int>& k, const Vector& omega) {
  Real s = 0;
  for (std::size_t i = 0; i < k.size(); ++i) s += k[i] * omega[static_cast<Eigen::Index>(i)];
  return s;
}

inline Real dot(const std::vector<int>& k, const std::vector<Real>& theta) {
  Real s = 0;
  for (std::size_t i = 0; i < k.size(); ++i) s += k[i] * theta[i];
  return s;
}

// Half box {k : |k_i| <= order, first nonzero entry positive}.
inline std::vector<std::vector<int>> half_modes(int dims, int order) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(dims, -order);
  for (;;) {
    int first = 0;
    for (int v : k)
      if (v != 0) {
        first = v;
        break;
      }
    if (first > 0) out.push_back(k);
    int i = dims - 1;
    while (i >= 0 && k[i] == order) k[i--] = -order;
    if (i < 0) break;
    ++k[i];
  }
  return out;
}

/// Real trig basis over a half box: index 0 is the constant, then (cos, sin) per mode.
struct TrigBasis {
  int dims = 0;
  int order = 0;
  std::vector<std::vector<int>> modes;

  TrigBasis(int d, int ord) : dims(d), order(ord), modes(half_modes(d, ord)) {}
  int size() const { return 1 + 2 * static_cast<int>(modes.size()); }
  int cos_index(std::size_t h) const { return 1 + 2 * static_cast<int>(h); }
  int sin_index(std::size_t h) const { return 2 + 2 * static_cast<int>(h); }

  Real evaluate(const Vector& c, const std::vector<Real>& theta) const {
    Real s = c[0];
    for (std::size_t h = 0; h < modes.size(); ++h) {
      const Real a = dot(modes[h], theta);
      s += c[cos_index(h)] * std::cos(a) + c[sin_index(h)] * std::sin(a);
    }
    return s;
  }

  /// Basis functions at the grid points (points x size).
  Matrix table(const Grid& g) const {
    Matrix t(static_cast<Eigen::Index>(g.points()), size());
    for (std::size_t p = 0; p < g.points(); ++p) {
      const auto th = g.angles(p);
      const auto r = static_cast<Eigen::Index>(p);
      t(r, 0) = 1;
      for (std::size_t h = 0; h < modes.size(); ++h) {
        const Real a = dot(modes[h], th);
        t(r, cos_index(h)) = std::cos(a);
        t(r, sin_index(h)) = std::sin(a);
      }
    }
    return t;
  }

  /// L_w in this basis: L cos(k.t) = (k.w) sin(k.t), L sin(k.t) = -(k.w) cos(k.t).
  Matrix lie_derivative(const Vector& omega) const {
    Matrix L = Matrix::Zero(size(), size());
    for (std::size_t h = 0; h < modes.size(); ++h) {
      const Real kw = dot(modes[h], omega);
      L(sin_index(h), cos_index(h)) = kw;
      L(cos_index(h), sin_index(h)) = -kw;
    }
    return L;
  }
};

/// A rows x cols trig polynomial given by basis coefficients per component.
struct TrigPoly {
  const TrigBasis* basis = nullptr;
  int rows = 0, cols = 0;
  std::vector<Vector> comp;  // component-major

  Vector& at(int r, int c) { return comp[static_cast<std::size_t>(r * cols + c)]; }
  const Vector& at(int r, int c) const { return comp[static_cast<std::size_t>(r * cols + c)]; }

  std::vector<Real> sample(const Grid& g) const {
    std::vector<Real> s(comp.size() * g.points());
    for (std::size_t p = 0; p < g.points(); ++p) {
      const auto th = g.angles(p);
      for (std::size_t c = 0; c < comp.size(); ++c) s[c * g.points() + p] = basis->evaluate(comp[c], th);
    }
    return s;
  }
  FourierSeries series(const Grid& g) const {
    return FourierSeries::from_samples(g, rows, cols, sample(g));
  }
  /// Same, with the basis already tabulated on g.
  FourierSeries series(const Grid& g, const Matrix& table) const {
    std::vector<Real> s(comp.size() * g.points());
    for (std::size_t c = 0; c < comp.size(); ++c) {
      Eigen::Map<Vector>(s.data() + c * g.points(), static_cast<Eigen::Index>(g.points())) = table * comp[c];
    }
    return FourierSeries::from_samples(g, rows, cols, std::move(s));
  }
};

inline TrigPoly zero_poly(const TrigBasis& b, int rows, int cols) {
  TrigPoly p{&b, rows, cols, std::vector<Vector>(static_cast<std::size_t>(rows * cols),
                                                 Vector::Zero(b.size()))};
  return p;
}

/// Random coefficients on modes with max |k_i| <= order (<= basis order), decaying
/// like exp(-|k|_1 / 2) so that products stay well scaled.
inline TrigPoly random_poly(std::mt19937_64& rng, const TrigBasis& b, int rows, int cols,
                            int order) {
  std::uniform_real_distribution<double> u(-1, 1);
  TrigPoly p = zero_poly(b, rows, cols);
  for (auto& c : p.comp) {
    c[0] = u(rng);
    for (std::size_t h = 0; h < b.modes.size(); ++h) {
      int top = 0, l1 = 0;
      for (int v : b.modes[h]) {
        top = std::max(top, std::abs(v));
        l1 += std::abs(v);
      }
      if (top > order) continue;
      const Real w = std::exp(-Real(0.5) * l1);
      c[b.cos_index(h)] = w * u(rng);
      c[b.sin_index(h)] = w * u(rng);
    }
  }
  return p;
}

/// Samples of an arbitrary function on a grid, component-major.
template <class F>
FourierSeries sample_function(const Grid& g, int rows, int cols, F&& f) {
  std::vector<Real> s(static_cast<std::size_t>(rows * cols) * g.points());
  for (std::size_t p = 0; p < g.points(); ++p) {
    const Matrix v = f(g.angles(p));
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) s[static_cast<std::size_t>(r * cols + c) * g.points() + p] = v(r, c);
  }
  return FourierSeries::from_samples(g, rows, cols, std::move(s));
}

/// Naive O(N^2) DFT coefficient c_k = mean_j u(theta_j) exp(-i k.theta_j) of component 0.
inline Complex naive_coeff(const FourierSeries& u, int comp, const std::vector<int>& k) {
  const Grid& g = u.grid();
  const auto s = u.samples();
  Complex acc(0);
  for (std::size_t p = 0; p < g.points(); ++p) {
    const Real a = dot(k, g.angles(p));
    acc += s[static_cast<std::size_t>(comp) * g.points() + p] * Complex(std::cos(a), -std::sin(a));
  }
  return acc / static_cast<Real>(g.points());
}

inline Real max_abs_diff(const FourierSeries& a, const FourierSeries& b) {
  Real m = 0;
  for (std::size_t i = 0; i < a.samples().size(); ++i)
    m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
  return m;
}

inline Real max_abs(const FourierSeries& a) {
  Real m = 0;
  for (Real v : a.samples()) m = std::max(m, std::abs(v));
  return m;
}

/// Dense solver for systems  L_w u + S u = v  on vec(u) (nc components), with
/// S an nc x nc constant coupling, assembled as I (x) L + S (x) I over a TrigBasis.
/// Components coupled through S are solved together; `conventions` are extra
/// equations on the constant coefficients (component -> weight, value) closing a
/// kernel. The factorizations are kept so many right-hand sides reuse them.
class DenseOracle {
 public:
  struct Convention {
    std::map<int, Real> weights;
    Real value = 0;
  };

  DenseOracle(const TrigBasis& basis, const Vector& omega, const Matrix& S,
              std::vector<Convention> conventions = {})
      : basis_(basis), conventions_(std::move(conventions)) {
    const int nc = static_cast<int>(S.rows());
    const int nb = basis.size();
    const Matrix L = basis.lie_derivative(omega);
    std::vector<int> group(nc, -1);
    for (int c = 0; c < nc; ++c) {
      if (group[c] >= 0) continue;
      const int gid = static_cast<int>(groups_.size());
      std::vector<int> members{c}, stack{c};
      group[c] = gid;
      while (!stack.empty()) {
        const int a = stack.back();
        stack.pop_back();
        for (int b = 0; b < nc; ++b)
          if (group[b] < 0 && (S(a, b) != 0 || S(b, a) != 0)) {
            group[b] = gid;
            members.push_back(b);
            stack.push_back(b);
          }
      }
      std::sort(members.begin(), members.end());
      groups_.push_back({members, {}, {}});
    }
    for (auto& gr : groups_) {
      const int k = static_cast<int>(gr.members.size());
      std::vector<const Convention*> mine;
      for (const auto& cv : conventions_)
        if (gr.owns(cv.weights.begin()->first)) mine.push_back(&cv);
      Matrix A = Matrix::Zero(k * nb + static_cast<int>(mine.size()), k * nb);
      for (int a = 0; a < k; ++a) {
        A.block(a * nb, a * nb, nb, nb) += L;
        for (int b = 0; b < k; ++b) {
          const Real s = S(gr.members[a], gr.members[b]);
          if (s != 0) A.block(a * nb, b * nb, nb, nb).diagonal().array() += s;
        }
      }
      for (std::size_t r = 0; r < mine.size(); ++r) {
        for (const auto& [comp, w] : mine[r]->weights) A(k * nb + static_cast<int>(r), gr.local(comp) * nb) = w;
      }
      gr.conventions = mine;
      gr.qr.compute(A);
    }
  }
  DenseOracle(const DenseOracle&) = delete;
  DenseOracle& operator=(const DenseOracle&) = delete;

  /// rhs and result: one coefficient vector per component.
  std::vector<Vector> solve(const std::vector<Vector>& rhs) const {
    const int nb = basis_.size();
    std::vector<Vector> out(rhs.size());
    for (const auto& gr : groups_) {
      const int k = static_cast<int>(gr.members.size());
      Vector b = Vector::Zero(k * nb + static_cast<int>(gr.conventions.size()));
      for (int a = 0; a < k; ++a) b.segment(a * nb, nb) = rhs[static_cast<std::size_t>(gr.members[a])];
      for (std::size_t r = 0; r < gr.conventions.size(); ++r) b[k * nb + static_cast<int>(r)] = gr.conventions[r]->value;
      const Vector x = gr.qr.solve(b);
      for (int a = 0; a < k; ++a) out[static_cast<std::size_t>(gr.members[a])] = x.segment(a * nb, nb);
    }
    return out;
  }

  const TrigBasis& basis() const { return basis_; }

 private:
  struct Group {
    std::vector<int> members;
    std::vector<const Convention*> conventions;
    Eigen::ColPivHouseholderQR<Matrix> qr;
    bool owns(int c) const { return std::find(members.begin(), members.end(), c) != members.end(); }
    int local(int c) const {
      return static_cast<int>(std::find(members.begin(), members.end(), c) - members.begin());
    }
  };
  const TrigBasis& basis_;
  std::vector<Convention> conventions_;
  std::vector<Group> groups_;
};

/// Gamma_{0,beta} = [[0, -diag(beta)], [diag(beta), 0]].
inline Matrix gamma0(const Vector& beta) {
  const int m = static_cast<int>(beta.size());
  Matrix G = Matrix::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    G(i, i + m) = -beta[i];
    G(i + m, i) = beta[i];
  }
  return G;
}

/// Coupling of vec(u), u rows x cols, for u -> G u (left) and u -> -u G (right).
inline Matrix left_coupling(const Matrix& G, int cols) {
  const int rows = static_cast<int>(G.rows());
  Matrix S = Matrix::Zero(rows * cols, rows * cols);
  for (int r = 0; r < rows; ++r)
    for (int s = 0; s < rows; ++s)
      for (int c = 0; c < cols; ++c) S(r * cols + c, s * cols + c) += G(r, s);
  return S;
}
inline Matrix right_coupling(const Matrix& G, int rows) {
  const int cols = static_cast<int>(G.rows());
  Matrix S = Matrix::Zero(rows * cols, rows * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      for (int s = 0; s < cols; ++s) S(r * cols + c, r * cols + s) -= G(s, c);
  return S;
}

/// Dense-operator oracles for the three cohomological solvers at fixed (omega, beta),
/// on random trig right-hand sides of order <= `order`.
class CohomologyOracle {
 public:
  struct Errors {
    Real zero_average = 0, left = 0, right = 0, second = 0;
    Real max() const { return std::max({zero_average, left, right, second}); }
  };

  CohomologyOracle(const Vector& omega, const Vector& beta, int order, int grid_size)
      : omega_(omega),
        beta_(beta),
        m_(static_cast<int>(beta.size())),
        basis_(static_cast<int>(omega.size()), order),
        grid_(std::vector<int>(omega.size(), grid_size)),
        table_(basis_.table(grid_)),
        G_(gamma0(beta)),
        left_(basis_, omega, left_coupling(G_, 2)),
        right_(basis_, omega, right_coupling(G_, 2)),
        second_(basis_, omega,
                left_coupling(G_, 2 * m_) + right_coupling(G_, 2 * m_), kernel_conventions()) {}

  const Grid& grid() const { return grid_; }
  const TrigBasis& basis() const { return basis_; }

  /// Relative sup errors of each solver against its dense solve for one random case.
  template <class ZeroAverage, class Melnikov1, class Melnikov2>
  Errors run_case(std::mt19937_64& rng, int order, ZeroAverage&& zero, Melnikov1&& mel1,
                  Melnikov2&& mel2) const {
    Errors e;
    std::uniform_real_distribution<double> u(-1, 1);
    {
      TrigPoly v = random_poly(rng, basis_, 2, 1, order);
      Matrix avg(2, 1);
      for (int r = 0; r < 2; ++r) {
        v.at(r, 0)[0] = 0;
        avg(r, 0) = u(rng);
      }
      std::vector<DenseOracle::Convention> conv;
      for (int r = 0; r < 2; ++r) conv.push_back({{{r, Real(1)}}, avg(r, 0)});
      const DenseOracle scalar(basis_, omega_, Matrix::Zero(2, 2), conv);
      e.zero_average = compare(zero(v.series(grid_, table_), avg), scalar.solve(v.comp), 2, 1);
    }
    {
      const TrigPoly v = random_poly(rng, basis_, 2 * m_, 2, order);
      e.left = compare(mel1(v.series(grid_, table_), true), left_.solve(v.comp), 2 * m_, 2);
    }
    {
      const TrigPoly v = random_poly(rng, basis_, 2, 2 * m_, order);
      e.right = compare(mel1(v.series(grid_, table_), false), right_.solve(v.comp), 2, 2 * m_);
    }
    {
      TrigPoly v = random_poly(rng, basis_, 2 * m_, 2 * m_, order);
      for (int i = 0; i < m_; ++i) {
        v.at(i + m_, i + m_)[0] = -v.at(i, i)[0];
        v.at(i + m_, i)[0] = v.at(i, i + m_)[0];
      }
      e.second = compare(mel2(v.series(grid_, table_)), second_.solve(v.comp), 2 * m_, 2 * m_);
    }
    return e;
  }

 private:
  std::vector<DenseOracle::Convention> kernel_conventions() const {
    const int n2 = 2 * m_;
    std::vector<DenseOracle::Convention> out;
    for (int i = 0; i < m_; ++i) {
      out.push_back({{{i * n2 + i, Real(1)}, {(i + m_) * n2 + i + m_, Real(1)}}, 0});
      out.push_back({{{i * n2 + i + m_, Real(1)}, {(i + m_) * n2 + i, Real(-1)}}, 0});
    }
    return out;
  }

  Real compare(const FourierSeries& got, const std::vector<Vector>& want, int rows, int cols) const {
    TrigPoly w{&basis_, rows, cols, want};
    const FourierSeries ref = w.series(grid_, table_);
    return max_abs_diff(got, ref) / max_abs(ref);
  }

  Vector omega_, beta_;
  int m_;
  TrigBasis basis_;
  Grid grid_;
  Matrix table_;
  Matrix G_;
  DenseOracle left_, right_, second_;
};

}  // namespace tori::testing
