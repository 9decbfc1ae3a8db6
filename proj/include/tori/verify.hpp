#pragma once

// Checks of computed tori against direct numerical integration of the flow
// and of the variational equations M' = DX(z(t)) M.

#include <vector>

#include "tori/newton.hpp"

namespace tori {

struct IntegrationOptions {
  Real abs_tol = Real(1e-13);
  Real rel_tol = Real(1e-13);
  Real initial_step = Real(1e-3);
};

struct Trajectory {
  std::vector<Real> times;
  std::vector<Vector> states;
  std::vector<Matrix> variational;  // empty unless integrated
  Real energy_drift = 0;            // max |h(z(t)) - h(z0)|
};

/// Adaptive Runge-Kutta-Fehlberg 7(8), states reported at `times` (monotone in
/// either direction, starting at the initial time). Throws IntegrationFailure,
/// or InvalidData when the times are out of order.
Trajectory integrate(const ModelFamily& model, const Vector& lambda, const Vector& z0,
                     const std::vector<Real>& times, const IntegrationOptions& opts = {});
/// Same, together with M(t) solving M' = DX(z(t); lambda) M, M(0) = M0.
Trajectory integrate_variational(const ModelFamily& model, const Vector& lambda,
                                 const Vector& z0, const Matrix& M0,
                                 const std::vector<Real>& times,
                                 const IntegrationOptions& opts = {});

/// times 0, T/samples, ..., T
std::vector<Real> uniform_times(Real T, int samples);

/// max over theta0 and sampled t in [0, T] of |Phi_t(K(theta0)) - K(theta0 + w t)|.
Real flow_invariance_error(const TorusSolution& sol, const ModelFamily& model,
                           const std::vector<std::vector<Real>>& theta0, Real T,
                           int samples = 100, const IntegrationOptions& opts = {});

/// max over theta0 and sampled t of |M(t) W(theta0) - W(theta0 + w t) exp(Gamma_{0,beta} t)|
/// (max row sum of the difference).
Real bundle_invariance_error(const TorusSolution& sol, const ModelFamily& model,
                             const std::vector<std::vector<Real>>& theta0, Real T,
                             int samples = 100, const IntegrationOptions& opts = {});

/// Rotation rate of each normal column pair: M(t) W(theta0) is expressed in the
/// bundle at theta0 + w t and the unwrapped angle of every 2x2 diagonal block is
/// divided by T.
Vector measure_normal_frequencies(const TorusSolution& sol, const ModelFamily& model,
                                  const std::vector<Real>& theta0, Real T, int samples = 400,
                                  const IntegrationOptions& opts = {});

/// Period of a closed orbit through z0: first time after `t_min` at which the
/// orbit recrosses the section through z0 transversal to X(z0), refined by
/// Newton on the crossing time.
Real return_time(const ModelFamily& model, const Vector& lambda, const Vector& z0, Real t_guess,
                 const IntegrationOptions& opts = {});

/// Random angle vectors in [0, 2 pi)^d from a fixed seed.
std::vector<std::vector<Real>> random_angles(int count, int dims, unsigned seed);

}  // namespace tori
