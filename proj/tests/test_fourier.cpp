#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "support.hpp"
#include "tori/errors.hpp"
#include "tori/fourier.hpp"

using namespace tori;
using namespace tori::testing;

namespace {

Matrix scalar(Real v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST(Grid, Construction) {
  EXPECT_THROW(Grid(std::vector<int>{}), InvalidData);
  EXPECT_THROW(Grid({12}), InvalidData);
  EXPECT_THROW(Grid({1}), InvalidData);
  const Grid g({8, 4});
  EXPECT_EQ(g.points(), 32u);
  EXPECT_EQ(g.modes(), 8u * 3u);
  EXPECT_EQ(g.dims(), 2);
  EXPECT_TRUE(g == Grid({8, 4}));
  EXPECT_FALSE(g == Grid({4, 8}));
  const Grid p = g.padded();
  EXPECT_GE(p.size(0), 12);
  EXPECT_GE(p.size(1), 6);
}

TEST(Grid, ModeIndexRoundTrip) {
  const Grid g({8, 8});
  for (std::size_t s = 0; s < g.modes(); ++s) {
    auto k = g.wavenumber(s);
    EXPECT_EQ(g.mode_index(k), static_cast<std::ptrdiff_t>(s));
  }
  const std::vector<int> neg{1, -2};
  EXPECT_EQ(g.mode_index(neg), -1);
}

// Forward transform against a naive DFT on a non-square grid.
TEST(FourierSeries, CoefficientsMatchNaiveDft) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  const Grid g({8, 4});
  std::vector<Real> s(2 * g.points());
  for (auto& x : s) x = u(rng);
  const auto f = FourierSeries::from_samples(g, 2, 1, s);
  for (int c = 0; c < 2; ++c)
    for (int k1 = -3; k1 <= 3; ++k1)
      for (int k2 = -1; k2 <= 1; ++k2) {
        const std::vector<int> k{k1, k2};
        const Complex want = naive_coeff(f, c, k);
        const Complex got = f.coeff(c, 0, k);
        EXPECT_NEAR(std::abs(got - want), 0, 1e-15) << k1 << "," << k2;
      }
  EXPECT_NEAR(average(f)(1, 0), std::accumulate(s.begin() + 32, s.end(), Real(0)) / 32, 1e-15);
}

TEST(FourierSeries, RoundTripAndEvaluate) {
  std::mt19937_64 rng(2);
  const TrigBasis b(2, 5);
  const TrigPoly p = random_poly(rng, b, 2, 2, 5);
  const Grid g({16, 16});
  const FourierSeries f = p.series(g);
  const auto back = FourierSeries::from_coeffs(g, 2, 2, {f.coeffs().begin(), f.coeffs().end()});
  EXPECT_LT(max_abs_diff(f, back), 1e-14);
  for (const std::vector<Real>& th :
       {std::vector<Real>{0.3, 1.7}, std::vector<Real>{5.9, 0.01}, std::vector<Real>{2, 4}}) {
    const Matrix v = f.evaluate(th);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) EXPECT_NEAR(v(r, c), b.evaluate(p.at(r, c), th), 1e-13);
  }
  EXPECT_THROW(f.evaluate(std::vector<Real>{1}), ShapeMismatch);
}

TEST(FourierSeries, TrigPolynomialCoefficients) {
  const Grid g({16});
  const FourierSeries f = sample_function(g, 1, 1, [](const std::vector<Real>& t) {
    return scalar(3 * std::cos(2 * t[0]) - 4 * std::sin(2 * t[0]));
  });
  const std::vector<int> k{2}, mk{-2};
  EXPECT_NEAR(std::abs(f.coeff(0, 0, k) - Complex(1.5, 2)), 0, 1e-15);
  EXPECT_NEAR(std::abs(f.coeff(0, 0, mk) - Complex(1.5, -2)), 0, 1e-15);
}

TEST(FourierSeries, InvalidInput) {
  const Grid g({8});
  EXPECT_THROW(FourierSeries::from_samples(g, 1, 1, std::vector<Real>(7)), ShapeMismatch);
  std::vector<Real> bad(8, 0);
  bad[3] = std::numeric_limits<Real>::quiet_NaN();
  EXPECT_THROW(FourierSeries::from_samples(g, 1, 1, bad), InvalidData);
  const auto a = FourierSeries::zeros(g, 2, 1);
  const auto c = FourierSeries::zeros(g, 1, 2);
  const auto other = FourierSeries::zeros(Grid({16}), 2, 1);
  EXPECT_THROW(a + c, ShapeMismatch);
  EXPECT_THROW(a - other, ShapeMismatch);
  EXPECT_THROW(multiply(a, a), ShapeMismatch);
  EXPECT_THROW(multiply_collocated(a, a), ShapeMismatch);
  EXPECT_THROW(derivative(a, 1), InvalidData);
  EXPECT_THROW(lie_derivative(a, Vector::Ones(2)), ShapeMismatch);
  EXPECT_THROW(block(a, 1, 0, 2, 1), ShapeMismatch);
  EXPECT_THROW(hstack({a, c}), ShapeMismatch);
  EXPECT_THROW(pointwise_inverse(a), ShapeMismatch);
}

TEST(Calculus, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(4);
  const TrigBasis b(2, 6);
  const TrigPoly p = random_poly(rng, b, 1, 1, 6);
  const Grid g({32, 32});
  const FourierSeries f = p.series(g);
  const Real h = 1e-5;
  for (int axis = 0; axis < 2; ++axis) {
    const FourierSeries df = derivative(f, axis);
    for (const std::vector<Real>& th : {std::vector<Real>{0.4, 2.2}, std::vector<Real>{3.3, 5.1}}) {
      auto tp = th, tm = th;
      tp[axis] += h;
      tm[axis] -= h;
      const Real fd = (b.evaluate(p.comp[0], tp) - b.evaluate(p.comp[0], tm)) / (2 * h);
      EXPECT_NEAR(df.evaluate(th)(0, 0), fd, 1e-8);
    }
  }
}

TEST(Calculus, LieDerivativeSignAndLinearity) {
  const Grid g({16, 16});
  Vector w(2);
  w << std::sqrt(Real(2)), std::sqrt(Real(3));
  // L_w cos(k.t) = (k.w) sin(k.t)
  const FourierSeries c = sample_function(g, 1, 1, [](const std::vector<Real>& t) {
    return scalar(std::cos(2 * t[0] - t[1]));
  });
  const Real kw = 2 * w[0] - w[1];
  const FourierSeries want = sample_function(g, 1, 1, [kw](const std::vector<Real>& t) {
    return scalar(kw * std::sin(2 * t[0] - t[1]));
  });
  EXPECT_LT(max_abs_diff(lie_derivative(c, w), want), 1e-13);
  EXPECT_LT(max_abs_diff(lie_derivative(c, w),
                         -(w[0] * derivative(c, 0) + w[1] * derivative(c, 1))),
            1e-13);
}

// Dealiased product against the coefficient convolution, truncated to the band.
TEST(Products, DealiasedMatchesConvolution) {
  std::mt19937_64 rng(8);
  const TrigBasis b(1, 7);
  const Grid g({16});
  const TrigPoly pu = random_poly(rng, b, 1, 1, 7);
  const TrigPoly pv = random_poly(rng, b, 1, 1, 7);
  const FourierSeries u = pu.series(g), v = pv.series(g);
  const FourierSeries w = multiply(u, v);
  for (int k = -7; k <= 7; ++k) {
    Complex acc(0);
    for (int j = -7; j <= 7; ++j) {
      const int l = k - j;
      if (std::abs(l) > 7) continue;
      acc += u.coeff(0, 0, std::vector<int>{j}) * v.coeff(0, 0, std::vector<int>{l});
    }
    EXPECT_NEAR(std::abs(w.coeff(0, 0, std::vector<int>{k}) - acc), 0, 1e-14) << k;
  }
  EXPECT_EQ(w.coeff(0, 0, std::vector<int>{8}), Complex(0));
}

TEST(Products, ExactForBandLimitedFactors) {
  std::mt19937_64 rng(9);
  const TrigBasis b(2, 4);
  const Grid g({32, 32});
  for (int trial = 0; trial < 5; ++trial) {
    const TrigPoly pu = random_poly(rng, b, 2, 3, 4), pv = random_poly(rng, b, 3, 2, 4);
    const FourierSeries u = pu.series(g), v = pv.series(g);
    const FourierSeries want = sample_function(g, 2, 2, [&](const std::vector<Real>& t) {
      Matrix a(2, 3), c(3, 2);
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 3; ++s) {
          a(r, s) = b.evaluate(pu.at(r, s), t);
          c(s, r) = b.evaluate(pv.at(s, r), t);
        }
      return Matrix(a * c);
    });
    EXPECT_LT(max_abs_diff(multiply(u, v), want), 1e-13);
    EXPECT_LT(max_abs_diff(multiply_collocated(u, v), want), 1e-13);
  }
}

TEST(Products, ProductRule) {
  std::mt19937_64 rng(10);
  const TrigBasis b(2, 5);
  const Grid g({32, 32});
  for (int trial = 0; trial < 5; ++trial) {
    const FourierSeries u = random_poly(rng, b, 2, 2, 5).series(g);
    const FourierSeries v = random_poly(rng, b, 2, 1, 5).series(g);
    for (int axis = 0; axis < 2; ++axis) {
      const FourierSeries lhs = derivative(multiply(u, v), axis);
      const FourierSeries rhs = multiply(derivative(u, axis), v) + multiply(u, derivative(v, axis));
      EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12);
    }
  }
}

TEST(Products, ConstantMatrixAndTranspose) {
  std::mt19937_64 rng(12);
  const TrigBasis b(1, 3);
  const Grid g({8});
  const FourierSeries u = random_poly(rng, b, 2, 3, 3).series(g);
  Matrix a(3, 2);
  a << 1, 2, 3, 4, 5, 6;
  const FourierSeries x = multiply(u, a);
  EXPECT_LT(max_abs_diff(x, multiply(u, FourierSeries::constant(g, a))), 1e-14);
  EXPECT_LT(max_abs_diff(transpose(multiply(a.transpose(), transpose(u))), x), 1e-14);
  const FourierSeries s = add_constant(u, Matrix::Ones(2, 3));
  EXPECT_NEAR((average(s) - average(u))(1, 2), 1, 1e-15);
  EXPECT_EQ(hstack({col_block(u, 0, 1), col_block(u, 1, 2)}).samples().size(), u.samples().size());
  EXPECT_EQ(max_abs_diff(vstack({row_block(u, 0, 1), row_block(u, 1, 1)}), u), 0);
}

TEST(Products, PointwiseInverse) {
  const Grid g({16});
  const FourierSeries a = sample_function(g, 2, 2, [](const std::vector<Real>& t) {
    Matrix m(2, 2);
    m << 2 + std::cos(t[0]), std::sin(t[0]), 0.5, 1.5;
    return m;
  });
  const auto inv = pointwise_inverse(a);
  ASSERT_EQ(inv.singular_point, -1);
  const FourierSeries id = multiply_collocated(a, inv.inverse);
  EXPECT_LT(max_abs_diff(id, FourierSeries::constant(g, Matrix::Identity(2, 2))), 1e-14);
  const FourierSeries sing = sample_function(g, 1, 1, [](const std::vector<Real>& t) {
    return scalar(std::sin(t[0]));
  });
  const auto bad = pointwise_inverse(sing);
  EXPECT_GE(bad.singular_point, 0);
  EXPECT_TRUE(bad.inverse.empty());
}

TEST(Norms, SupNormIsMaxRowSum) {
  const Grid g({8});
  const FourierSeries u = sample_function(g, 2, 2, [](const std::vector<Real>& t) {
    Matrix m(2, 2);
    m << std::cos(t[0]), -1, 0.5, 0.25;
    return m;
  });
  EXPECT_NEAR(sup_norm(u), 2, 1e-15);
}

// Grid sup of a smooth function on a fine 1D grid against dense evaluation.
TEST(Norms, SupNormConvergesOnFineGrid) {
  auto f = [](Real t) { return std::cos(t + 0.3) + Real(0.5) * std::sin(2 * t) + Real(0.1) * std::cos(5 * t); };
  const Grid g({8192});
  const FourierSeries u = sample_function(g, 1, 1, [&](const std::vector<Real>& t) { return scalar(f(t[0])); });
  Real fine = 0;
  for (int j = 0; j < 4 * 8192; ++j) fine = std::max(fine, std::abs(f(2 * kPi * j / (4 * 8192))));
  EXPECT_NEAR(sup_norm(u), fine, 1e-6);
  EXPECT_LE(sup_norm(u), fine);
}

TEST(Norms, TailEnergy) {
  const Grid g({32});
  const FourierSeries low = sample_function(g, 1, 1, [](const std::vector<Real>& t) { return scalar(std::cos(3 * t[0])); });
  const FourierSeries high = sample_function(g, 1, 1, [](const std::vector<Real>& t) { return scalar(std::cos(14 * t[0])); });
  EXPECT_NEAR(tail_energy(low), 0, 1e-28);
  EXPECT_NEAR(tail_energy(high), 1, 1e-14);
  EXPECT_NEAR(tail_energy(low + high), 0.5, 1e-14);
}

TEST(Spectral, ResampleAndLowPass) {
  std::mt19937_64 rng(13);
  const TrigBasis b(2, 5);
  const Grid g({16, 16}), fine({64, 32});
  const FourierSeries u = random_poly(rng, b, 2, 1, 5).series(g);
  const FourierSeries up = resample(u, fine);
  for (const std::vector<Real>& th : {std::vector<Real>{0.1, 0.2}, std::vector<Real>{4, 1}})
    EXPECT_LT((up.evaluate(th) - u.evaluate(th)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT(max_abs_diff(resample(up, g), u), 1e-13);
  EXPECT_THROW(resample(u, Grid({16})), ShapeMismatch);

  const FourierSeries lp = low_pass(u, Real(0.5));  // keeps |k_i| <= 4
  for (std::size_t s = 0; s < g.modes(); ++s) {
    auto k = g.wavenumber(s);
    const bool kept = std::abs(k[0]) <= 4 && std::abs(k[1]) <= 4;
    for (int c = 0; c < 2; ++c) {
      const Complex got = lp.coeffs(c)[s];
      if (kept)
        EXPECT_EQ(got, u.coeffs(c)[s]);
      else
        EXPECT_EQ(got, Complex(0));
    }
  }
}

TEST(Spectral, NyquistModesAreDropped) {
  const Grid g({8});
  const FourierSeries u = sample_function(g, 1, 1, [](const std::vector<Real>& t) { return scalar(std::cos(4 * t[0])); });
  EXPECT_NEAR(sup_norm(derivative(u, 0)), 0, 1e-15);
  EXPECT_NEAR(sup_norm(low_pass(u, 1)), 0, 1e-15);
}

TEST(CoeffDump, RoundTrip) {
  std::mt19937_64 rng(14);
  const TrigBasis b(2, 3);
  const Grid g({8, 16});
  const FourierSeries u = random_poly(rng, b, 2, 3, 3).series(g);
  std::stringstream ss;
  write_coeff_dump(ss, u);
  const FourierSeries v = read_coeff_dump(ss);
  EXPECT_TRUE(v.grid() == g);
  EXPECT_EQ(v.rows(), 2);
  EXPECT_EQ(v.cols(), 3);
  EXPECT_LT(max_abs_diff(u, v), 1e-15);

  std::stringstream header;
  write_coeff_dump(header, u);
  std::string first;
  std::getline(header, first);
  EXPECT_EQ(first.substr(0, 5), "2 2 3");

  std::stringstream empty, bad("2 1 1 8\n0 0 0 0 x y\n");
  EXPECT_THROW(read_coeff_dump(empty), InvalidData);
  EXPECT_THROW(read_coeff_dump(bad), InvalidData);
}
