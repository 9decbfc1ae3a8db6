#include "tori/init_pendula.hpp"

#include <cmath>
#include <string>

#include "tori/errors.hpp"

namespace tori {

Real libration_amplitude(Real length, Real omega) {
  if (!(length > 0) || !(omega > 0)) throw InvalidData("length and frequency must be positive");
  const Real r = omega * std::sqrt(length);
  if (!(r < 1)) {
    throw InvalidData("frequency " + std::to_string(static_cast<double>(omega)) +
                      " is not below the linear frequency 1/sqrt(l) = " +
                      std::to_string(static_cast<double>(1 / std::sqrt(length))) +
                      ": no libration");
  }
  return 4 * std::sqrt(1 - r);
}

CircleResult pendulum_circle(Real length, Real omega, int grid_size, const IterateOptions& opts) {
  const Real A = libration_amplitude(length, omega);
  const Grid grid({grid_size});
  SampleBuffer k(grid, 2, 1);
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const Real th = grid.angles(p)[0];
    k.at(0, 0, p) = -length * length * A * omega * std::sin(th);
    k.at(1, 0, p) = A * std::cos(th);
  }
  Vector w(1);
  w[0] = omega;
  TorusSolution guess{std::move(k).finish(), FourierSeries(), Vector(), Vector(),
                      FrequencyData(w, Vector()), 1, 1};
  const auto model = make_pendulum(length);
  CircleResult out{guess, {}};
  out.circle = iterate(std::move(guess), *model, opts, &out.log);
  return out;
}

std::vector<Real> coupling_schedule(Real k1) {
  if (k1 == 0) return {0};
  return {0, k1 / 100, k1 / 10, k1};
}

Matrix rest_bundle(Real l3, Real l4) {
  Matrix w = Matrix::Zero(8, 4);
  const Real s3 = std::sqrt(l3 * l3 * l3), s4 = std::sqrt(l4 * l4 * l4);
  w(4, 0) = 1;
  w(6, 0) = 1;
  w(5, 1) = 1;
  w(7, 1) = 1;
  w(4, 2) = -s3;
  w(6, 2) = 1 / s3;
  w(5, 3) = -s4;
  w(7, 3) = 1 / s4;
  return w;
}

Vector rest_bundle_scaling(Real l3, Real l4) {
  Vector b(2);
  for (int j = 0; j < 2; ++j) {
    const Real l = j == 0 ? l3 : l4;
    const Real s = std::sqrt(l * l * l);
    b[j] = 1 / std::sqrt(s + 1 / s);
  }
  return b;
}

InitialData build_initial(const PendulaParams& params, const Vector& omega,
                          const std::vector<int>& grid_sizes, const InitOptions& opts) {
  if (omega.size() != 2 || grid_sizes.size() != 2) {
    throw InvalidData("the pendula torus is two-dimensional");
  }
  if (params.beta.size() != 2) throw InvalidData("the pendula need two normal frequencies");
  const FrequencyData freq(omega, params.beta);
  const Grid grid(grid_sizes);

  InitialData out;
  out.circles[0] = pendulum_circle(params.l1, omega[0], grid_sizes[0], opts.iterate);
  out.circles[1] = pendulum_circle(params.l2, omega[1], grid_sizes[1], opts.iterate);

  // Product of the two circles, coordinates (y1, y2, x1, x2).
  SampleBuffer pair(grid, 4, 1);
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const std::size_t j1 = p / grid_sizes[1], j2 = p % grid_sizes[1];
    const FourierSeries& c1 = out.circles[0].circle.K;
    const FourierSeries& c2 = out.circles[1].circle.K;
    pair.at(0, 0, p) = c1.samples(0)[j1];
    pair.at(1, 0, p) = c2.samples(0)[j2];
    pair.at(2, 0, p) = c1.samples(1)[j1];
    pair.at(3, 0, p) = c2.samples(1)[j2];
  }
  TorusSolution torus{std::move(pair).finish(), FourierSeries(), Vector(), Vector(),
                      FrequencyData(omega, Vector()), 2, 2};
  const std::vector<Real> schedule =
      opts.k1_schedule.empty() ? coupling_schedule(params.k1) : opts.k1_schedule;
  ContinuationOptions copts;
  copts.iterate = opts.iterate;
  const Real l1 = params.l1, l2 = params.l2;
  torus = continue_parameter(
      std::move(torus),
      [l1, l2](Real k1) -> std::unique_ptr<ModelFamily> { return make_pendulum_pair(l1, l2, k1); },
      schedule, copts, &out.coupling);

  // Embed with the last two pendula at rest.
  SampleBuffer k0(grid, 8, 1);
  for (std::size_t p = 0; p < grid.points(); ++p) {
    for (int r = 0; r < 4; ++r) k0.at(r, 0, p) = torus.K.samples(r)[p];
  }
  const Real l3 = 1 / (params.beta[0] * params.beta[0]);
  const Real l4 = 1 / (params.beta[1] * params.beta[1]);
  const Vector b = rest_bundle_scaling(l3, l4);
  Matrix scale = Matrix::Zero(4, 4);
  scale.diagonal() << b[0], b[1], b[0], b[1];
  const Matrix w0 = rest_bundle(l3, l4) * scale;

  out.solution = TorusSolution{std::move(k0).finish(), FourierSeries::constant(grid, w0),
                               Vector::Zero(2), Vector::Zero(2), freq, 4, 2};
  return out;
}

}  // namespace tori
