#include <cmath>
#include <string>

#include "tori/errors.hpp"
#include "tori/model.hpp"

namespace tori {

namespace {

Matrix chain_symplectic_form(int pendula, int block) {
  if (block < 1 || pendula % block != 0) {
    throw InvalidData("pendulum chain: " + std::to_string(pendula) +
                      " pendula do not split into groups of " + std::to_string(block));
  }
  Matrix omega = Matrix::Zero(2 * pendula, 2 * pendula);
  for (int g = 0; g < pendula / block; ++g) {
    const int o = 2 * block * g;
    for (int i = 0; i < block; ++i) {
      omega(o + i, o + block + i) = -1;
      omega(o + block + i, o + i) = 1;
    }
  }
  return omega;
}

}  // namespace

PendulumChain::PendulumChain(std::vector<Pendulum> pendula, std::vector<Spring> springs,
                             int block, int parameters, std::string name)
    : ModelFamily(chain_symplectic_form(static_cast<int>(pendula.size()), block),
                  Matrix::Identity(2 * pendula.size(), 2 * pendula.size()),
                  chain_symplectic_form(static_cast<int>(pendula.size()), block)),
      pendula_(std::move(pendula)),
      springs_(std::move(springs)),
      block_(block),
      parameters_(parameters),
      name_(std::move(name)) {
  const int n = static_cast<int>(pendula_.size());
  for (const Pendulum& p : pendula_) {
    if (p.parameter >= parameters_) throw InvalidData("pendulum refers to a missing parameter");
    if (p.parameter < 0 && !(p.length > 0)) throw InvalidData("pendulum lengths must be positive");
    if (p.parameter >= 0 && !(p.base_frequency > 0)) {
      throw InvalidData("parametric pendulum needs a positive base frequency");
    }
  }
  for (const Spring& s : springs_) {
    if (s.a < 0 || s.b < 0 || s.a >= n || s.b >= n || s.a == s.b) {
      throw InvalidData("spring joins invalid pendula");
    }
  }
}

int PendulumChain::y_index(int j) const { return 2 * block_ * (j / block_) + j % block_; }
int PendulumChain::x_index(int j) const { return y_index(j) + block_; }

std::vector<Real> PendulumChain::lengths(const Vector& lambda) const {
  std::vector<Real> l(pendula_.size());
  for (std::size_t j = 0; j < pendula_.size(); ++j) {
    const Pendulum& p = pendula_[j];
    if (p.parameter < 0) {
      l[j] = p.length;
    } else {
      const Real w = p.base_frequency + lambda[p.parameter];
      if (!(w > 0)) {
        throw InvalidData("beta + lambda = " + std::to_string(static_cast<double>(w)) +
                          " is not positive for pendulum " + std::to_string(j + 1));
      }
      l[j] = 1 / (w * w);
    }
  }
  return l;
}

Real PendulumChain::length_derivative(int j, const Vector& lambda) const {
  const Pendulum& p = pendula_[j];
  const Real w = p.base_frequency + lambda[p.parameter];
  return -2 / (w * w * w);
}

void PendulumChain::require_sizes(const Vector& z, const Vector& lambda) const {
  if (z.size() != 2 * degrees_of_freedom() || lambda.size() != parameters_) {
    throw ShapeMismatch(name_ + ": expected z in R^" + std::to_string(2 * degrees_of_freedom()) +
                        " and lambda in R^" + std::to_string(parameters_));
  }
}

Real PendulumChain::hamiltonian(const Vector& z, const Vector& lambda) const {
  require_sizes(z, lambda);
  const auto l = lengths(lambda);
  Real h = 0;
  for (int j = 0; j < degrees_of_freedom(); ++j) {
    const Real y = z[y_index(j)], x = z[x_index(j)];
    h += y * y / (2 * l[j] * l[j]) - l[j] * std::cos(x);
  }
  for (const Spring& s : springs_) {
    const Real d = l[s.b] * z[x_index(s.b)] - l[s.a] * z[x_index(s.a)];
    h += s.k / 2 * d * d;
  }
  return h;
}

Vector PendulumChain::gradient(const Vector& z, const Vector& lambda) const {
  require_sizes(z, lambda);
  const auto l = lengths(lambda);
  Vector g = Vector::Zero(z.size());
  for (int j = 0; j < degrees_of_freedom(); ++j) {
    g[y_index(j)] = z[y_index(j)] / (l[j] * l[j]);
    g[x_index(j)] = l[j] * std::sin(z[x_index(j)]);
  }
  for (const Spring& s : springs_) {
    const Real f = s.k * (l[s.b] * z[x_index(s.b)] - l[s.a] * z[x_index(s.a)]);
    g[x_index(s.b)] += f * l[s.b];
    g[x_index(s.a)] -= f * l[s.a];
  }
  return g;
}

Matrix PendulumChain::hessian(const Vector& z, const Vector& lambda) const {
  require_sizes(z, lambda);
  const auto l = lengths(lambda);
  Matrix h = Matrix::Zero(z.size(), z.size());
  for (int j = 0; j < degrees_of_freedom(); ++j) {
    h(y_index(j), y_index(j)) = 1 / (l[j] * l[j]);
    h(x_index(j), x_index(j)) = l[j] * std::cos(z[x_index(j)]);
  }
  for (const Spring& s : springs_) {
    const int a = x_index(s.a), b = x_index(s.b);
    h(a, a) += s.k * l[s.a] * l[s.a];
    h(b, b) += s.k * l[s.b] * l[s.b];
    h(a, b) -= s.k * l[s.a] * l[s.b];
    h(b, a) -= s.k * l[s.a] * l[s.b];
  }
  return h;
}

Vector PendulumChain::gradient_length_derivative(const Vector& z, const std::vector<Real>& l,
                                                 int j) const {
  Vector g = Vector::Zero(z.size());
  g[y_index(j)] = -2 * z[y_index(j)] / (l[j] * l[j] * l[j]);
  g[x_index(j)] = std::sin(z[x_index(j)]);
  for (const Spring& s : springs_) {
    if (s.a != j && s.b != j) continue;
    const Real xa = z[x_index(s.a)], xb = z[x_index(s.b)];
    const Real f = s.k * (l[s.b] * xb - l[s.a] * xa);
    // d f / d l_j
    const Real df = (s.b == j) ? s.k * xb : -s.k * xa;
    g[x_index(s.b)] += df * l[s.b] + (s.b == j ? f : 0);
    g[x_index(s.a)] -= df * l[s.a] + (s.a == j ? f : 0);
  }
  return g;
}

Matrix PendulumChain::hessian_length_derivative(const Vector& z, const std::vector<Real>& l,
                                                int j) const {
  Matrix h = Matrix::Zero(z.size(), z.size());
  h(y_index(j), y_index(j)) = -2 / (l[j] * l[j] * l[j]);
  h(x_index(j), x_index(j)) = std::cos(z[x_index(j)]);
  for (const Spring& s : springs_) {
    const int a = x_index(s.a), b = x_index(s.b);
    if (s.a == j) {
      h(a, a) += 2 * s.k * l[s.a];
      h(a, b) -= s.k * l[s.b];
      h(b, a) -= s.k * l[s.b];
    }
    if (s.b == j) {
      h(b, b) += 2 * s.k * l[s.b];
      h(a, b) -= s.k * l[s.a];
      h(b, a) -= s.k * l[s.a];
    }
  }
  return h;
}

Matrix PendulumChain::parameter_gradient(const Vector& z, const Vector& lambda) const {
  require_sizes(z, lambda);
  const auto l = lengths(lambda);
  Matrix out = Matrix::Zero(z.size(), parameters_);
  for (int j = 0; j < degrees_of_freedom(); ++j) {
    const int r = pendula_[j].parameter;
    if (r < 0) continue;
    out.col(r) += length_derivative(j, lambda) * gradient_length_derivative(z, l, j);
  }
  return out;
}

Matrix PendulumChain::hessian_derivative_z(const Vector& z, const Vector& lambda,
                                           const Vector& dz) const {
  require_sizes(z, lambda);
  const auto l = lengths(lambda);
  Matrix h = Matrix::Zero(z.size(), z.size());
  for (int j = 0; j < degrees_of_freedom(); ++j) {
    const int x = x_index(j);
    h(x, x) = -l[j] * std::sin(z[x]) * dz[x];
  }
  return h;
}

Matrix PendulumChain::hessian_derivative_lambda(const Vector& z, const Vector& lambda,
                                                const Vector& dlambda) const {
  require_sizes(z, lambda);
  if (dlambda.size() != parameters_) throw ShapeMismatch(name_ + ": dlambda has wrong size");
  const auto l = lengths(lambda);
  Matrix h = Matrix::Zero(z.size(), z.size());
  for (int j = 0; j < degrees_of_freedom(); ++j) {
    const int r = pendula_[j].parameter;
    if (r < 0 || dlambda[r] == 0) continue;
    h += dlambda[r] * length_derivative(j, lambda) * hessian_length_derivative(z, l, j);
  }
  return h;
}

bool PendulumChain::in_domain(const Vector& z, const Vector& lambda) const {
  for (int j = 0; j < degrees_of_freedom(); ++j) {
    if (!(std::abs(z[x_index(j)]) < kPi)) return false;
    const Pendulum& p = pendula_[j];
    if (p.parameter >= 0 && !(p.base_frequency + lambda[p.parameter] > 0)) return false;
  }
  return z.allFinite();
}

std::unique_ptr<PendulumChain> make_pendula(const PendulaParams& params) {
  if (params.beta.size() != 2) throw InvalidData("the pendula need two normal frequencies");
  if (!(params.l1 > 0) || !(params.l2 > 0)) throw InvalidData("l1, l2 must be positive");
  if (!(params.beta[0] > 0) || !(params.beta[1] > 0)) {
    throw InvalidData("the pendula need positive normal frequencies");
  }
  std::vector<Pendulum> p = {
      {params.l1, -1, 0},
      {params.l2, -1, 0},
      {0, 0, params.beta[0]},
      {0, 1, params.beta[1]},
  };
  std::vector<Spring> s = {
      {0, 1, params.k1},
      {1, 2, params.epsilon * params.k2},
      {2, 3, params.epsilon * params.k3},
  };
  return std::make_unique<PendulumChain>(std::move(p), std::move(s), 2, 2, "pendula");
}

std::unique_ptr<PendulumChain> make_pendulum_pair(Real l1, Real l2, Real k1) {
  return std::make_unique<PendulumChain>(std::vector<Pendulum>{{l1, -1, 0}, {l2, -1, 0}},
                                         std::vector<Spring>{{0, 1, k1}}, 2, 0, "pendulum-pair");
}

std::unique_ptr<PendulumChain> make_pendulum(Real length) {
  return std::make_unique<PendulumChain>(std::vector<Pendulum>{{length, -1, 0}},
                                         std::vector<Spring>{}, 1, 0, "pendulum");
}

}  // namespace tori
