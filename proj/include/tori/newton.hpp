#pragma once

// Newton-like step for a d-torus K with normal bundle W (columns 2m, m = n - d),
// parameters lambda and dummy unfolding alpha, solving
//
//   L_w K + X(K; lambda) = 0,
//   L_w W + DX(K; lambda) W - W Gamma_{alpha,beta} = 0.
//
// With m = 0 the same step is the Lagrangian scheme: no W, lambda or alpha.

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "tori/cohomology.hpp"
#include "tori/frame.hpp"
#include "tori/model.hpp"

namespace tori {

struct TorusSolution {
  FourierSeries K;
  FourierSeries W;  // empty when n == d
  Vector lambda;
  Vector alpha;
  FrequencyData freq;
  int n = 0;
  int d = 0;
};

struct NewtonOptions {
  CohomologyOptions cohomology;
  /// Products of non-constant series in the residuals, the frame and the step.
  ProductRule products = ProductRule::Collocation;
  /// Modes of K and W kept after each step (fraction of N/2 per axis).
  Real band = Real(2) / 3;
  /// Frame and step are computed on the grid refined by this factor (a power of two);
  /// the residual norms in the report stay on the grid of the iterate.
  int oversample = 2;
  Real torsion_cond_cap = Real(1e8);
  Real transversality_cond_cap = Real(1e8);
  /// Rescale the column pairs of W after each step (see symplectic_normalize).
  bool normalize_bundle = true;
};

struct StepReport {
  static constexpr Real kNotComputed = std::numeric_limits<Real>::quiet_NaN();

  int step = 0;
  Real error_K = 0;  // max_i sup |E_K,i|
  Real error_W = 0;  // max_i sup sum_j |E_W,ij|
  Real dlambda = kNotComputed;
  Real dalpha = kNotComputed;
  Real alpha = 0;  // |alpha| of the iterate the residuals belong to
  Real sym_defect = 0;
  Real red_defect = 0;
  Real omega_ll = 0;
  Real omega_lw = 0;
  Real omega_ww = 0;
  Real alpha_recovered = 0;
  Real tail_energy = 0;
  Real torsion_cond = 0;
  Real transversality_cond = kNotComputed;
  Real average_eta_N = kNotComputed;  // |<eta_K^N>| projected out
  Real average_b_N = kNotComputed;    // |<b^N>| projected out
  Real solvability_defect = kNotComputed;
  Real min_divisor_tangent = 0;
  Real min_divisor_first = 0;
  Real min_divisor_second = 0;

  Real residual() const { return std::max(error_K, error_W); }
};

struct Residuals {
  FourierSeries E_K;
  FourierSeries E_W;
  TorusFields fields;
};

Residuals residuals(const TorusSolution& sol, const ModelFamily& model,
                    ProductRule products = ProductRule::Collocation);

/// The norms of the invariance errors (max over components; row sums for E_W).
Real error_norm_K(const FourierSeries& E_K);
Real error_norm_W(const FourierSeries& E_W);

struct ParameterShift {
  Vector dlambda, dalpha, s, t;
  Real transversality_cond = 0;
};

/// Closed-form solution of the k = 0 diagonal system: eta is <eta^W> (2m x 2m),
/// B[r] is <B^W> for the r-th parameter basis vector. Throws DegenerateFamily
/// when <B>_12 - <B>_21 has condition number above `cond_cap`.
ParameterShift parameter_shift(const Matrix& eta, const std::vector<Matrix>& B,
                               Real cond_cap = Real(1e8));

struct KBlock {
  FourierSeries xi_eta;  // 2n x 1
  FourierSeries xi_b;    // 2n x m (empty when m = 0)
  Real average_eta_N = 0;
  Real average_b_N = 0;  // NaN when m = 0
  Real torsion_cond = 0;
};

/// Solves L_w xi + Lambda xi = (eta_K, b) in the frame coordinates.
KBlock solve_K_block(const FourierSeries& E_K, const AdaptedFrame& frame, const FourierSeries& T,
                     const FourierSeries& DlX, const FrequencyData& freq,
                     const NewtonOptions& opts = {});

struct StepResult {
  TorusSolution next;
  StepReport report;  // residuals and defects of the input iterate, corrections taken
};

/// One full step. Throws on any sub-solver failure, leaving `sol` untouched.
StepResult newton_step(const TorusSolution& sol, const ModelFamily& model,
                       const NewtonOptions& opts = {});

/// Report for `sol` without stepping (corrections left as not computed).
StepReport diagnose(const TorusSolution& sol, const ModelFamily& model,
                    const NewtonOptions& opts = {});

struct IterateOptions {
  NewtonOptions newton;
  Real tol = Real(1e-11);
  int max_steps = 12;
  /// Stop (unconverged) once the residual exceeds this multiple of the initial one.
  Real divergence_factor = Real(1e6);
};

/// Steps until max(|E_K|, |E_W|) <= tol; appends one report per step plus a final
/// row for the returned iterate to `log` (when given). Throws NonConvergence.
TorusSolution iterate(TorusSolution sol, const ModelFamily& model, const IterateOptions& opts,
                      std::vector<StepReport>* log = nullptr);

using ModelFactory = std::function<std::unique_ptr<ModelFamily>(Real)>;

struct ContinuationNode {
  Real value = 0;
  int steps = 0;
  Real residual = 0;
  Vector lambda;
  std::vector<StepReport> log;
};

struct ContinuationOptions {
  IterateOptions iterate;
  Real min_step = Real(1e-12);
};

/// Follows the scalar through `schedule` (strictly monotone), re-converging at
/// each node with the previous solution as predictor and halving the increment
/// on failure. Throws NonConvergence once the increment falls below min_step.
TorusSolution continue_parameter(TorusSolution sol, const ModelFactory& factory,
                                 const std::vector<Real>& schedule,
                                 const ContinuationOptions& opts,
                                 std::vector<ContinuationNode>* nodes = nullptr);

}  // namespace tori
