#pragma once

// The adapted frame P = (L N W) along a torus K with normal bundle W:
//
//   L = DK,  N = L A + J L B + W C,
//   B = G_LL^{-1},  C = Omega_WW^{-1} G_WL B,  A = C^T Omega_WW C / 2,
//
// its approximate inverse (rows N^T Omega, -L^T Omega, Omega_WW^{-1} W^T Omega)
// and the torsion T = N^T Omega (L_w N + DX N).

#include <vector>

#include "tori/cohomology.hpp"
#include "tori/model.hpp"

namespace tori {

struct AdaptedFrame {
  FourierSeries L, N, W;  // 2n x d, 2n x d, 2n x 2m (m = n - d; W empty when m = 0)
  FourierSeries A, B, C;  // d x d, d x d, 2m x d
  FourierSeries P;        // 2n x 2n
  FourierSeries Pinv;     // 2n x 2n
  FourierSeries omega_ww, omega_ww_inv;
  std::vector<FourierSeries> dN;  // d_theta_i N, i < d
  int n = 0;
  int d = 0;
  ProductRule products = ProductRule::Collocation;
  int normal_dim() const { return 2 * (n - d); }
};

/// Throws DegenerateFrame when G_LL or Omega_WW is singular at some grid point.
AdaptedFrame build_frame(const ModelFamily& model, const FourierSeries& K,
                         const FourierSeries& W,
                         ProductRule products = ProductRule::Collocation);

/// L_w N = -sum_i w_i d_theta_i N, from the product-rule derivatives kept in the frame.
FourierSeries lie_derivative_N(const AdaptedFrame& frame, const Vector& omega);

/// T = N^T Omega (L_w N + DX N).
FourierSeries torsion(const AdaptedFrame& frame, const ModelFamily& model,
                      const FourierSeries& DX, const Vector& omega);

struct FrameDefects {
  Real symplectic = 0;    // |P^T Omega P - blockdiag(Omega_d, Omega_WW)|
  Real reducibility = 0;  // |Pinv (L_w P + DX P) - Lambda|
  Real omega_ll = 0;      // |L^T Omega L|
  Real omega_lw = 0;      // |L^T Omega W|
  Real omega_ww = 0;      // |Omega_WW - Omega_2m|
  /// Dummy parameter read off the W-corner of Pinv (L_w P + DX P), averaged.
  Vector alpha;
};

FrameDefects frame_defects(const AdaptedFrame& frame, const ModelFamily& model,
                           const FourierSeries& DX, const FourierSeries& T,
                           const FrequencyData& freq, const Vector& alpha);

/// Omega_k = [[0, -I_k], [I_k, 0]].
Matrix standard_symplectic(int k);

/// Scales each column pair (i, i + m) of W by the constant that makes the
/// average of W_i^T Omega W_{i+m} equal to -1. The scaling commutes with every
/// Gamma_{alpha,beta}, so E_W is only rescaled.
FourierSeries symplectic_normalize(const FourierSeries& W, const Matrix& omega);

}  // namespace tori
