#include "tori/frame.hpp"

#include <cmath>
#include <string>

#include "tori/errors.hpp"

namespace tori {

namespace {

FourierSeries inverse_or_throw(const FourierSeries& u, const char* what) {
  auto inv = pointwise_inverse(u);
  if (inv.singular_point >= 0) {
    const auto p = static_cast<std::size_t>(inv.singular_point);
    throw DegenerateFrame(std::string(what) + " is singular at grid point " + std::to_string(p),
                          p);
  }
  return std::move(inv.inverse);
}

}  // namespace

Matrix standard_symplectic(int k) {
  Matrix o = Matrix::Zero(2 * k, 2 * k);
  o.topRightCorner(k, k) = -Matrix::Identity(k, k);
  o.bottomLeftCorner(k, k) = Matrix::Identity(k, k);
  return o;
}

AdaptedFrame build_frame(const ModelFamily& model, const FourierSeries& K,
                         const FourierSeries& W, ProductRule products) {
  auto product = [products](const FourierSeries& a, const FourierSeries& b) {
    return multiply(a, b, products);
  };
  const int n = model.degrees_of_freedom();
  const int d = K.grid().dims();
  const int m2 = 2 * (n - d);
  if (K.rows() != 2 * n || K.cols() != 1) throw ShapeMismatch("build_frame: K has wrong shape");
  if (m2 < 0) throw ShapeMismatch("build_frame: torus dimension exceeds degrees of freedom");
  if (m2 > 0 && (W.rows() != 2 * n || W.cols() != m2 || !(W.grid() == K.grid()))) {
    throw ShapeMismatch("build_frame: W must be " + std::to_string(2 * n) + "x" +
                        std::to_string(m2) + " on the grid of K");
  }
  const Matrix& omega = model.symplectic_form();
  const Matrix& metric = model.metric();
  const Matrix& cs = model.complex_structure();
  const Grid& g = K.grid();

  AdaptedFrame f;
  f.n = n;
  f.d = d;
  f.products = products;
  std::vector<FourierSeries> cols;
  for (int i = 0; i < d; ++i) cols.push_back(derivative(K, i));
  f.L = hstack(cols);
  const FourierSeries Lt = transpose(f.L);
  const FourierSeries GL = multiply(metric, f.L);
  f.B = inverse_or_throw(product(Lt, GL), "G_LL");
  const FourierSeries JL = multiply(cs, f.L);
  const FourierSeries JLB = product(JL, f.B);

  // Axis derivatives of N by the product rule, from exact derivatives of K and W.
  std::vector<FourierSeries> dL(d), dB(d);
  for (int i = 0; i < d; ++i) {
    dL[i] = derivative(f.L, i);
    const FourierSeries dG = product(transpose(dL[i]), GL) + product(Lt, multiply(metric, dL[i]));
    dB[i] = -product(f.B, product(dG, f.B));
    f.dN.push_back(product(multiply(cs, dL[i]), f.B) + product(JL, dB[i]));
  }

  if (m2 > 0) {
    f.W = W;
    const FourierSeries Wt = transpose(W);
    const FourierSeries OW = multiply(omega, W);
    f.omega_ww = product(Wt, OW);
    f.omega_ww_inv = inverse_or_throw(f.omega_ww, "Omega_WW");
    const FourierSeries M = product(Wt, GL);
    const FourierSeries MB = product(M, f.B);
    f.C = product(f.omega_ww_inv, MB);
    const FourierSeries OC = product(f.omega_ww, f.C);
    f.A = Real(0.5) * product(transpose(f.C), OC);
    f.N = product(f.L, f.A) + JLB + product(W, f.C);
    for (int i = 0; i < d; ++i) {
      const FourierSeries dW = derivative(W, i);
      const FourierSeries dO = product(transpose(dW), OW) + product(Wt, multiply(omega, dW));
      const FourierSeries dOinv = -product(f.omega_ww_inv, product(dO, f.omega_ww_inv));
      const FourierSeries dM = product(transpose(dW), GL) + product(Wt, multiply(metric, dL[i]));
      const FourierSeries dC = product(dOinv, MB) +
                               product(f.omega_ww_inv, product(dM, f.B) + product(M, dB[i]));
      const FourierSeries CtdO = product(transpose(f.C), dO);
      const FourierSeries dA =
          Real(0.5) * (product(transpose(dC), OC) + product(CtdO, f.C) + product(transpose(f.C),
                                                                                 product(f.omega_ww, dC)));
      f.dN[i] = f.dN[i] + product(dL[i], f.A) + product(f.L, dA) + product(dW, f.C) +
                product(W, dC);
    }
    f.P = hstack({f.L, f.N, W});
    f.Pinv = vstack({multiply(transpose(f.N), omega), -multiply(Lt, omega),
                     product(f.omega_ww_inv, multiply(Wt, omega))});
  } else {
    f.A = FourierSeries::zeros(g, d, d);
    f.N = JLB;
    f.P = hstack({f.L, f.N});
    f.Pinv = vstack({multiply(transpose(f.N), omega), -multiply(Lt, omega)});
  }
  return f;
}

FourierSeries lie_derivative_N(const AdaptedFrame& frame, const Vector& omega) {
  FourierSeries out = FourierSeries::zeros(frame.N.grid(), frame.N.rows(), frame.N.cols());
  for (int i = 0; i < frame.d; ++i) out = out - omega[i] * frame.dN[i];
  return out;
}

FourierSeries torsion(const AdaptedFrame& frame, const ModelFamily& model,
                      const FourierSeries& DX, const Vector& omega) {
  auto product = [&](const FourierSeries& a, const FourierSeries& b) {
    return multiply(a, b, frame.products);
  };
  const FourierSeries XN = lie_derivative_N(frame, omega) + product(DX, frame.N);
  return product(multiply(transpose(frame.N), model.symplectic_form()), XN);
}

FrameDefects frame_defects(const AdaptedFrame& frame, const ModelFamily& model,
                           const FourierSeries& DX, const FourierSeries& T,
                           const FrequencyData& freq, const Vector& alpha) {
  auto product = [&](const FourierSeries& a, const FourierSeries& b) {
    return multiply(a, b, frame.products);
  };
  const int n = frame.n, d = frame.d, m2 = frame.normal_dim();
  const Matrix& omega = model.symplectic_form();
  const Grid& g = frame.P.grid();
  FrameDefects out;

  // P^T Omega P against blockdiag(Omega_d, Omega_WW).
  FourierSeries target = FourierSeries::zeros(g, 2 * n, 2 * n);
  {
    Matrix od = Matrix::Zero(2 * n, 2 * n);
    od.topLeftCorner(2 * d, 2 * d) = standard_symplectic(d);
    target = FourierSeries::constant(g, od);
    if (m2 > 0) {
      target = target + vstack({FourierSeries::zeros(g, 2 * d, 2 * n),
                                hstack({FourierSeries::zeros(g, m2, 2 * d), frame.omega_ww})});
    }
  }
  const FourierSeries ptop = product(transpose(frame.P), multiply(omega, frame.P));
  out.symplectic = sup_norm(ptop - target);
  out.omega_ll = sup_norm(block(ptop, 0, 0, d, d));
  if (m2 > 0) {
    out.omega_lw = sup_norm(block(ptop, 0, 2 * d, d, m2));
    out.omega_ww = sup_norm(add_constant(frame.omega_ww, -standard_symplectic(m2 / 2)));
  }

  // Pinv X_P against Lambda.
  const Vector& w = freq.omega();
  std::vector<FourierSeries> lie_cols{lie_derivative(frame.L, w), lie_derivative_N(frame, w)};
  if (m2 > 0) lie_cols.push_back(lie_derivative(frame.W, w));
  const FourierSeries XP = hstack(lie_cols) + product(DX, frame.P);
  const FourierSeries red = product(frame.Pinv, XP);
  Matrix lam = Matrix::Zero(2 * n, 2 * n);
  if (m2 > 0) lam.bottomRightCorner(m2, m2) = freq.gamma_matrix(alpha);
  FourierSeries lambda_series = FourierSeries::constant(g, lam);
  lambda_series = lambda_series + vstack({hstack({FourierSeries::zeros(g, d, d), T,
                                                   FourierSeries::zeros(g, d, 2 * n - 2 * d)}),
                                          FourierSeries::zeros(g, 2 * n - d, 2 * n)});
  out.reducibility = sup_norm(red - lambda_series);

  const int m = m2 / 2;
  out.alpha = Vector::Zero(m);
  if (m > 0) {
    const Matrix corner = average(block(red, 2 * d, 2 * d, m2, m2));
    for (int i = 0; i < m; ++i) out.alpha[i] = Real(0.5) * (corner(i, i) + corner(i + m, i + m));
  }
  return out;
}

FourierSeries symplectic_normalize(const FourierSeries& W, const Matrix& omega) {
  if (W.cols() % 2 != 0 || W.rows() != omega.rows()) {
    throw ShapeMismatch("symplectic_normalize: W must have an even number of columns");
  }
  const int m = W.cols() / 2;
  const Matrix pairing = average(multiply_collocated(transpose(W), multiply(omega, W)));
  Matrix scale = Matrix::Identity(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    const Real c = pairing(i, i + m);
    if (!(c < 0)) {
      throw DegenerateFrame("symplectic_normalize: column pair " + std::to_string(i + 1) +
                                " has nonnegative average pairing",
                            0);
    }
    scale(i, i) = scale(i + m, i + m) = 1 / std::sqrt(-c);
  }
  return multiply(W, scale);
}

}  // namespace tori
