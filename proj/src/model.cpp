#include "tori/model.hpp"

#include <string>

#include "tori/errors.hpp"

namespace tori {

ModelFamily::ModelFamily(Matrix omega, Matrix metric, Matrix complex_structure)
    : omega_(std::move(omega)), metric_(std::move(metric)), complex_(std::move(complex_structure)) {
  const auto n2 = omega_.rows();
  if (omega_.cols() != n2 || metric_.rows() != n2 || metric_.cols() != n2 ||
      complex_.rows() != n2 || complex_.cols() != n2 || n2 % 2 != 0) {
    throw ShapeMismatch("model: Omega, G, J must be square of the same even size");
  }
  const Real tol = Real(1e-12);
  if ((omega_ + omega_.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw InvalidData("model: Omega is not antisymmetric");
  }
  Eigen::FullPivLU<Matrix> lu(omega_);
  if (!lu.isInvertible()) throw InvalidData("model: Omega is singular");
  if ((metric_ - metric_.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw InvalidData("model: G is not symmetric");
  }
  Eigen::LLT<Matrix> llt(metric_);
  if (llt.info() != Eigen::Success) throw InvalidData("model: G is not positive definite");
  const Matrix id = Matrix::Identity(n2, n2);
  if ((complex_ * complex_ + id).cwiseAbs().maxCoeff() > tol) {
    throw InvalidData("model: J^2 != -I");
  }
  if ((omega_ * complex_ + metric_).cwiseAbs().maxCoeff() > tol) {
    throw InvalidData("model: Omega J != -G");
  }
  minus_omega_inv_ = -lu.inverse();
}

Vector ModelFamily::vector_field(const Vector& z, const Vector& lambda) const {
  return minus_omega_inv_ * gradient(z, lambda);
}

Matrix ModelFamily::jacobian(const Vector& z, const Vector& lambda) const {
  return minus_omega_inv_ * hessian(z, lambda);
}

Matrix ModelFamily::parameter_jacobian(const Vector& z, const Vector& lambda) const {
  return minus_omega_inv_ * parameter_gradient(z, lambda);
}

Matrix ModelFamily::jacobian_derivative_z(const Vector& z, const Vector& lambda,
                                          const Vector& dz) const {
  return minus_omega_inv_ * hessian_derivative_z(z, lambda, dz);
}

Matrix ModelFamily::jacobian_derivative_lambda(const Vector& z, const Vector& lambda,
                                               const Vector& dlambda) const {
  return minus_omega_inv_ * hessian_derivative_lambda(z, lambda, dlambda);
}

// ---- evaluation along a torus ---------------------------------------------------------

namespace {

void require_torus(const ModelFamily& model, const FourierSeries& K, const Vector& lambda,
                   const char* op) {
  if (K.rows() != 2 * model.degrees_of_freedom() || K.cols() != 1) {
    throw ShapeMismatch(std::string(op) + ": K must be a " +
                        std::to_string(2 * model.degrees_of_freedom()) + "-vector series");
  }
  if (lambda.size() != model.parameter_count()) {
    throw ShapeMismatch(std::string(op) + ": lambda has " + std::to_string(lambda.size()) +
                        " entries, model expects " + std::to_string(model.parameter_count()));
  }
}

Vector column_at(const FourierSeries& u, std::size_t p) {
  const std::size_t np = u.grid().points();
  Vector v(u.rows());
  for (int r = 0; r < u.rows(); ++r) v[r] = u.samples()[static_cast<std::size_t>(r) * np + p];
  return v;
}

}  // namespace

TorusFields eval_on_torus(const ModelFamily& model, const FourierSeries& K, const Vector& lambda) {
  require_torus(model, K, lambda, "eval_on_torus");
  const Grid& g = K.grid();
  const int n2 = K.rows();
  const int p = model.parameter_count();
  SampleBuffer x(g, n2, 1), dx(g, n2, n2), dl(g, n2, p);
  for (std::size_t q = 0; q < g.points(); ++q) {
    const Vector z = column_at(K, q);
    if (!model.in_domain(z, lambda)) {
      throw DomainEscape("torus leaves the model domain at grid point " + std::to_string(q), q);
    }
    x.set(q, model.vector_field(z, lambda));
    dx.set(q, model.jacobian(z, lambda));
    if (p > 0) dl.set(q, model.parameter_jacobian(z, lambda));
  }
  return {std::move(x).finish(), std::move(dx).finish(), std::move(dl).finish()};
}

FourierSeries eval_bilinear_z(const ModelFamily& model, const FourierSeries& K,
                              const Vector& lambda, const FourierSeries& dk,
                              const FourierSeries& W) {
  require_torus(model, K, lambda, "eval_bilinear_z");
  if (dk.rows() != K.rows() || dk.cols() != 1 || W.rows() != K.rows() ||
      !(dk.grid() == K.grid()) || !(W.grid() == K.grid())) {
    throw ShapeMismatch("eval_bilinear_z: dk or W does not match K");
  }
  const Grid& g = K.grid();
  SampleBuffer out(g, W.rows(), W.cols());
  for (std::size_t q = 0; q < g.points(); ++q) {
    const Matrix d = model.jacobian_derivative_z(column_at(K, q), lambda, column_at(dk, q));
    out.set(q, d * W.value_at(q));
  }
  return std::move(out).finish();
}

FourierSeries eval_bilinear_lambda(const ModelFamily& model, const FourierSeries& K,
                                   const Vector& lambda, const Vector& dlambda,
                                   const FourierSeries& W) {
  require_torus(model, K, lambda, "eval_bilinear_lambda");
  if (dlambda.size() != model.parameter_count() || W.rows() != K.rows() ||
      !(W.grid() == K.grid())) {
    throw ShapeMismatch("eval_bilinear_lambda: dlambda or W does not match the model");
  }
  const Grid& g = K.grid();
  SampleBuffer out(g, W.rows(), W.cols());
  for (std::size_t q = 0; q < g.points(); ++q) {
    const Matrix d = model.jacobian_derivative_lambda(column_at(K, q), lambda, dlambda);
    out.set(q, d * W.value_at(q));
  }
  return std::move(out).finish();
}

FourierSeries energy_on_torus(const ModelFamily& model, const FourierSeries& K,
                              const Vector& lambda) {
  require_torus(model, K, lambda, "energy_on_torus");
  const Grid& g = K.grid();
  SampleBuffer out(g, 1, 1);
  for (std::size_t q = 0; q < g.points(); ++q) {
    out.at(0, 0, q) = model.hamiltonian(column_at(K, q), lambda);
  }
  return std::move(out).finish();
}

}  // namespace tori
