#pragma once

// Initial data for the four-pendula problem: libration circles of the two
// torus pendula, their k1-coupled 2-torus, and the (K0, W0) embedding with the
// other two pendula at rest.

#include <vector>

#include "tori/newton.hpp"

namespace tori {

/// Amplitude predictor A = 4 sqrt(1 - omega sqrt(l)); throws InvalidData when
/// omega >= 1/sqrt(l) (no libration with that frequency).
Real libration_amplitude(Real length, Real omega);

struct CircleResult {
  TorusSolution circle;  // n = d = 1, K = (y, x)
  std::vector<StepReport> log;
};

/// Invariant circle of the pendulum of length `length` rotating with frequency
/// `omega`, by the n = d = 1 Newton scheme from the linear guess.
CircleResult pendulum_circle(Real length, Real omega, int grid_size,
                             const IterateOptions& opts = {});

/// Default k1 schedule: {0} when k1 == 0, else {0, k1/100, k1/10, k1}.
std::vector<Real> coupling_schedule(Real k1);

/// Columns of the unnormalized normal bundle for pendula of lengths l3, l4 at
/// rest, and the scalings b_j = 1/sqrt(l^{3/2} + l^{-3/2}).
Matrix rest_bundle(Real l3, Real l4);
Vector rest_bundle_scaling(Real l3, Real l4);

struct InitialData {
  TorusSolution solution;  // n = 4, d = 2, lambda = alpha = 0
  CircleResult circles[2];
  std::vector<ContinuationNode> coupling;
};

struct InitOptions {
  IterateOptions iterate;
  std::vector<Real> k1_schedule;  // empty: coupling_schedule(params.k1)
};

/// params.epsilon is ignored: the returned data is exact for the epsilon = 0 system.
InitialData build_initial(const PendulaParams& params, const Vector& omega,
                          const std::vector<int>& grid_sizes, const InitOptions& opts = {});

}  // namespace tori
