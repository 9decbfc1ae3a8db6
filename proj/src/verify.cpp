#include "tori/verify.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <random>
#include <string>

#include "tori/errors.hpp"

namespace tori {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<Real>;
using Stepper = odeint::runge_kutta_fehlberg78<State, Real, State, Real>;

template <class System, class Observer>
void run(System&& sys, State& x, const std::vector<Real>& times, const IntegrationOptions& opts,
         Observer&& obs) {
  if (times.empty()) return;
  if (times.size() == 1) {
    obs(x, times.front());
    return;
  }
  const Real dir = times.back() >= times.front() ? Real(1) : Real(-1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(dir * (times[i] - times[i - 1]) >= 0)) throw InvalidData("integration times must be monotone");
  }
  try {
    odeint::integrate_times(odeint::make_controlled(opts.abs_tol, opts.rel_tol, Stepper()), sys, x,
                            times.begin(), times.end(), dir * opts.initial_step, obs);
  } catch (const std::exception& e) {
    throw IntegrationFailure(std::string("integration failed: ") + e.what());
  }
  for (Real v : x) {
    if (!std::isfinite(v)) throw IntegrationFailure("integration produced non-finite values");
  }
}

Vector to_vector(const State& x, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = x[i];
  return v;
}

std::vector<Real> shifted(const std::vector<Real>& theta, const Vector& omega, Real t) {
  std::vector<Real> out(theta);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += omega[i] * t;
  return out;
}

Matrix rotation_blocks(const Vector& beta, Real t) {
  const int m = static_cast<int>(beta.size());
  Matrix r = Matrix::Zero(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    const Real c = std::cos(beta[j] * t), s = std::sin(beta[j] * t);
    r(j, j) = c;
    r(j, j + m) = -s;
    r(j + m, j) = s;
    r(j + m, j + m) = c;
  }
  return r;
}

Real row_sum_norm(const Matrix& a) {
  return a.size() ? a.cwiseAbs().rowwise().sum().maxCoeff() : Real(0);
}

}  // namespace

std::vector<Real> uniform_times(Real T, int samples) {
  std::vector<Real> t(samples + 1);
  for (int i = 0; i <= samples; ++i) t[i] = T * static_cast<Real>(i) / samples;
  return t;
}

Trajectory integrate(const ModelFamily& model, const Vector& lambda, const Vector& z0,
                     const std::vector<Real>& times, const IntegrationOptions& opts) {
  const int n2 = static_cast<int>(z0.size());
  State x(z0.data(), z0.data() + n2);
  const Real h0 = model.hamiltonian(z0, lambda);
  Trajectory tr;
  auto sys = [&](const State& s, State& dsdt, Real) {
    const Vector f = model.vector_field(to_vector(s, n2), lambda);
    for (int i = 0; i < n2; ++i) dsdt[i] = f[i];
  };
  run(sys, x, times, opts, [&](const State& s, Real t) {
    tr.times.push_back(t);
    tr.states.push_back(to_vector(s, n2));
    tr.energy_drift =
        std::max(tr.energy_drift, std::abs(model.hamiltonian(tr.states.back(), lambda) - h0));
  });
  return tr;
}

Trajectory integrate_variational(const ModelFamily& model, const Vector& lambda,
                                 const Vector& z0, const Matrix& M0,
                                 const std::vector<Real>& times,
                                 const IntegrationOptions& opts) {
  const int n2 = static_cast<int>(z0.size());
  const int k = static_cast<int>(M0.cols());
  if (M0.rows() != n2) throw ShapeMismatch("integrate_variational: M0 must have 2n rows");
  State x(n2 + n2 * k);
  for (int i = 0; i < n2; ++i) x[i] = z0[i];
  Eigen::Map<Matrix>(x.data() + n2, n2, k) = M0;
  const Real h0 = model.hamiltonian(z0, lambda);
  Trajectory tr;
  auto sys = [&](const State& s, State& dsdt, Real) {
    const Vector z = to_vector(s, n2);
    const Vector f = model.vector_field(z, lambda);
    for (int i = 0; i < n2; ++i) dsdt[i] = f[i];
    Eigen::Map<Matrix>(dsdt.data() + n2, n2, k) =
        model.jacobian(z, lambda) * Eigen::Map<const Matrix>(s.data() + n2, n2, k);
  };
  run(sys, x, times, opts, [&](const State& s, Real t) {
    tr.times.push_back(t);
    tr.states.push_back(to_vector(s, n2));
    tr.variational.push_back(Eigen::Map<const Matrix>(s.data() + n2, n2, k));
    tr.energy_drift =
        std::max(tr.energy_drift, std::abs(model.hamiltonian(tr.states.back(), lambda) - h0));
  });
  return tr;
}

Real flow_invariance_error(const TorusSolution& sol, const ModelFamily& model,
                           const std::vector<std::vector<Real>>& theta0, Real T, int samples,
                           const IntegrationOptions& opts) {
  const auto times = uniform_times(T, samples);
  Real worst = 0;
  for (const auto& th : theta0) {
    const Vector z0 = sol.K.evaluate(th);
    const Trajectory tr = integrate(model, sol.lambda, z0, times, opts);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const Vector target = sol.K.evaluate(shifted(th, sol.freq.omega(), tr.times[i]));
      worst = std::max(worst, (tr.states[i] - target).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

Real bundle_invariance_error(const TorusSolution& sol, const ModelFamily& model,
                             const std::vector<std::vector<Real>>& theta0, Real T, int samples,
                             const IntegrationOptions& opts) {
  if (sol.W.empty()) return 0;
  const auto times = uniform_times(T, samples);
  Real worst = 0;
  for (const auto& th : theta0) {
    const Trajectory tr = integrate_variational(model, sol.lambda, sol.K.evaluate(th),
                                                sol.W.evaluate(th), times, opts);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const Real t = tr.times[i];
      const Matrix target = sol.W.evaluate(shifted(th, sol.freq.omega(), t)) *
                            rotation_blocks(sol.freq.beta(), t);
      worst = std::max(worst, row_sum_norm(tr.variational[i] - target));
    }
  }
  return worst;
}

Vector measure_normal_frequencies(const TorusSolution& sol, const ModelFamily& model,
                                  const std::vector<Real>& theta0, Real T, int samples,
                                  const IntegrationOptions& opts) {
  const int m = sol.n - sol.d;
  if (m == 0) return Vector();
  const auto times = uniform_times(T, samples);
  const Matrix& omega = model.symplectic_form();
  const Trajectory tr = integrate_variational(model, sol.lambda, sol.K.evaluate(theta0),
                                              sol.W.evaluate(theta0), times, opts);
  Vector angle = Vector::Zero(m), last = Vector::Zero(m);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const Matrix w = sol.W.evaluate(shifted(theta0, sol.freq.omega(), tr.times[i]));
    const Matrix wto = w.transpose() * omega;
    const Matrix y = (wto * w).partialPivLu().solve(wto * tr.variational[i]);
    for (int j = 0; j < m; ++j) {
      const Real a = std::atan2(y(j + m, j), y(j, j));
      if (i > 0) {
        Real da = a - last[j];
        while (da > kPi) da -= 2 * kPi;
        while (da < -kPi) da += 2 * kPi;
        angle[j] += da;
      }
      last[j] = a;
    }
  }
  return angle / T;
}

Real return_time(const ModelFamily& model, const Vector& lambda, const Vector& z0, Real t_guess,
                 const IntegrationOptions& opts) {
  const Vector f0 = model.vector_field(z0, lambda);
  Real t = t_guess;
  Vector z = integrate(model, lambda, z0, {0, t}, opts).states.back();
  for (int it = 0; it < 20; ++it) {
    const Real g = (z - z0).dot(f0);
    const Real dg = model.vector_field(z, lambda).dot(f0);
    if (dg == 0) throw IntegrationFailure("return_time: flow tangent to the section");
    const Real dt = -g / dg;
    z = integrate(model, lambda, z, {t, t + dt}, opts).states.back();
    t += dt;
    if (std::abs(dt) <= 1e-15 * std::max(Real(1), std::abs(t))) break;
  }
  return t;
}

std::vector<std::vector<Real>> random_angles(int count, int dims, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 2 * 3.141592653589793);
  std::vector<std::vector<Real>> out(count, std::vector<Real>(dims));
  for (auto& th : out)
    for (Real& x : th) x = static_cast<Real>(u(rng));
  return out;
}

}  // namespace tori
