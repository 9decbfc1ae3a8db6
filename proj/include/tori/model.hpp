#pragma once

// Parametric Hamiltonian families h(z; lambda) on R^{2n} with constant
// symplectic form Omega, metric G and complex structure J (Omega J = -G).
//
// Concrete models supply h and its derivatives; the vector field is
// X = -Omega^{-1} grad h, so that dh . X = 0 and Omega DX + DX^T Omega = 0 hold
// by construction.

#include <memory>
#include <string>
#include <vector>

#include "tori/fourier.hpp"

namespace tori {

class ModelFamily {
 public:
  virtual ~ModelFamily() = default;

  virtual std::string name() const = 0;
  virtual int degrees_of_freedom() const = 0;
  virtual int parameter_count() const = 0;

  virtual Real hamiltonian(const Vector& z, const Vector& lambda) const = 0;
  virtual Vector gradient(const Vector& z, const Vector& lambda) const = 0;
  virtual Matrix hessian(const Vector& z, const Vector& lambda) const = 0;
  /// Column r is d(grad h)/d lambda_r.
  virtual Matrix parameter_gradient(const Vector& z, const Vector& lambda) const = 0;
  /// sum_k dz_k d(hess h)/dz_k
  virtual Matrix hessian_derivative_z(const Vector& z, const Vector& lambda,
                                      const Vector& dz) const = 0;
  /// sum_r dlambda_r d(hess h)/dlambda_r
  virtual Matrix hessian_derivative_lambda(const Vector& z, const Vector& lambda,
                                           const Vector& dlambda) const = 0;
  /// False when z leaves the region where the family is meant to be used.
  virtual bool in_domain(const Vector& z, const Vector& lambda) const = 0;

  Vector vector_field(const Vector& z, const Vector& lambda) const;
  Matrix jacobian(const Vector& z, const Vector& lambda) const;
  Matrix parameter_jacobian(const Vector& z, const Vector& lambda) const;
  Matrix jacobian_derivative_z(const Vector& z, const Vector& lambda, const Vector& dz) const;
  Matrix jacobian_derivative_lambda(const Vector& z, const Vector& lambda,
                                    const Vector& dlambda) const;

  const Matrix& symplectic_form() const { return omega_; }
  const Matrix& metric() const { return metric_; }
  const Matrix& complex_structure() const { return complex_; }

 protected:
  /// Checks Omega antisymmetric invertible, G SPD, J^2 = -I and Omega J = -G.
  ModelFamily(Matrix omega, Matrix metric, Matrix complex_structure);

 private:
  Matrix omega_, metric_, complex_;
  Matrix minus_omega_inv_;
};

// ---- coupled pendula ------------------------------------------------------------

/// A pendulum of fixed length, or one whose length is 1/(beta + lambda_r)^2.
struct Pendulum {
  Real length = 1;
  int parameter = -1;
  Real base_frequency = 0;
};

/// Spring energy k/2 (l_b x_b - l_a x_a)^2.
struct Spring {
  int a = 0;
  int b = 1;
  Real k = 0;
};

/// Pendula grouped `block` at a time; within group g the coordinates are
/// (y of its pendula, then x of its pendula) and Omega restricted to the group is
/// [[0, -I], [I, 0]]. The flow is x' = y / l^2, y' = -l sin x - (spring forces).
class PendulumChain : public ModelFamily {
 public:
  PendulumChain(std::vector<Pendulum> pendula, std::vector<Spring> springs, int block,
                int parameters, std::string name);

  std::string name() const override { return name_; }
  int degrees_of_freedom() const override { return static_cast<int>(pendula_.size()); }
  int parameter_count() const override { return parameters_; }

  Real hamiltonian(const Vector& z, const Vector& lambda) const override;
  Vector gradient(const Vector& z, const Vector& lambda) const override;
  Matrix hessian(const Vector& z, const Vector& lambda) const override;
  Matrix parameter_gradient(const Vector& z, const Vector& lambda) const override;
  Matrix hessian_derivative_z(const Vector& z, const Vector& lambda,
                              const Vector& dz) const override;
  Matrix hessian_derivative_lambda(const Vector& z, const Vector& lambda,
                                   const Vector& dlambda) const override;
  bool in_domain(const Vector& z, const Vector& lambda) const override;

  /// Current lengths; throws InvalidData when some beta + lambda <= 0.
  std::vector<Real> lengths(const Vector& lambda) const;
  int y_index(int pendulum) const;
  int x_index(int pendulum) const;

 private:
  // d(grad h)/d l_j and d(hess h)/d l_j at fixed z.
  Vector gradient_length_derivative(const Vector& z, const std::vector<Real>& l, int j) const;
  Matrix hessian_length_derivative(const Vector& z, const std::vector<Real>& l, int j) const;
  Real length_derivative(int j, const Vector& lambda) const;
  void require_sizes(const Vector& z, const Vector& lambda) const;

  std::vector<Pendulum> pendula_;
  std::vector<Spring> springs_;
  int block_;
  int parameters_;
  std::string name_;
};

struct PendulaParams {
  Real l1 = Real(0.45678);
  Real l2 = Real(0.325);
  Vector beta;  // normal frequencies, two entries
  Real k1 = Real(1e-2);
  Real k2 = 1;
  Real k3 = 1;
  Real epsilon = 0;
};

/// Four pendula, coordinates (y1, y2, x1, x2, y3, y4, x3, x4), lambda moves l3, l4.
std::unique_ptr<PendulumChain> make_pendula(const PendulaParams& params);
/// The first two pendula alone (n = 2, no parameters), coupled by k1.
std::unique_ptr<PendulumChain> make_pendulum_pair(Real l1, Real l2, Real k1);
/// One pendulum, coordinates (y, x).
std::unique_ptr<PendulumChain> make_pendulum(Real length);

// ---- evaluation along a torus -------------------------------------------------------

struct TorusFields {
  FourierSeries X;    // 2n
  FourierSeries DX;   // 2n x 2n
  FourierSeries DlX;  // 2n x p
};

/// Gridwise X, D_zX, D_lambda X at (K(theta); lambda). Throws DomainEscape.
TorusFields eval_on_torus(const ModelFamily& model, const FourierSeries& K, const Vector& lambda);

/// Gridwise (D_z DX [dk]) W.
FourierSeries eval_bilinear_z(const ModelFamily& model, const FourierSeries& K,
                              const Vector& lambda, const FourierSeries& dk,
                              const FourierSeries& W);
/// Gridwise (D_lambda DX [dlambda]) W.
FourierSeries eval_bilinear_lambda(const ModelFamily& model, const FourierSeries& K,
                                   const Vector& lambda, const Vector& dlambda,
                                   const FourierSeries& W);

/// Hamiltonian along the torus.
FourierSeries energy_on_torus(const ModelFamily& model, const FourierSeries& K,
                              const Vector& lambda);

}  // namespace tori
