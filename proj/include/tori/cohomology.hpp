#pragma once

// Mode-by-mode solvers for the linear equations met in a Newton step:
//
//   L_w u = v                          (zero-average)
//   L_w u + G u = v,  L_w u - u G = v  (first Melnikov, left / right)
//   L_w u + G u - u G = V              (second Melnikov)
//
// with G = Gamma_{0,beta} = [[0, -diag(beta)], [diag(beta), 0]] and L_w the Lie
// derivative (coefficients -i (k.w) c_k).

#include <optional>
#include <vector>

#include "tori/fourier.hpp"

namespace tori {

class FrequencyData {
 public:
  FrequencyData() = default;
  /// Throws InvalidData when some beta_i == 0 or |beta_i| == |beta_j|, i != j.
  FrequencyData(Vector omega, Vector beta, std::optional<Real> gamma = std::nullopt,
                std::optional<Real> tau = std::nullopt);

  const Vector& omega() const { return omega_; }
  const Vector& beta() const { return beta_; }
  int dims() const { return static_cast<int>(omega_.size()); }
  int normal_count() const { return static_cast<int>(beta_.size()); }
  std::optional<Real> gamma() const { return gamma_; }
  std::optional<Real> tau() const { return tau_; }

  /// Gamma_{alpha,beta}; alpha empty means zero.
  Matrix gamma_matrix(const Vector& alpha = Vector()) const;

 private:
  Vector omega_;
  Vector beta_;
  std::optional<Real> gamma_;
  std::optional<Real> tau_;
};

struct CohomologyOptions {
  Real divisor_floor = Real(1e-8);
  /// Allowed |<v>| relative to sup_norm(v) for zero-average equations.
  Real average_tol = Real(1e-8);
  /// Allowed distance from the image at k = 0, relative to sup_norm(V).
  Real solvability_tol = Real(1e-7);
};

struct DivisorAudit {
  Real min_tangent = 0;  // |k.w|, k != 0
  std::vector<int> tangent_mode;
  Real min_first = 0;  // |k.w +- beta_i|
  std::vector<int> first_mode;
  Real min_second = 0;  // |k.w +- beta_i +- beta_j| (the k = 0, i = j kernel excluded)
  std::vector<int> second_mode;
  /// With gamma, tau given: min over k != 0 of divisor * |k|_1^tau / gamma
  /// (below 1 means the Diophantine-Melnikov bound fails at that mode).
  std::optional<Real> diophantine_margin;
  std::vector<int> worst_mode;
  bool passed = false;
};

/// Scans every non-Nyquist mode represented on `grid`.
DivisorAudit audit_divisors(const FrequencyData& freq, const Grid& grid,
                            Real divisor_floor = Real(1e-8));

/// Solves L_w u = v - <v> with <u> = average (rows x cols; empty means zero).
FourierSeries solve_zero_average(const FourierSeries& v, const Vector& omega,
                                 const Matrix& average = Matrix(),
                                 const CohomologyOptions& opts = {});

enum class Side { Left, Right };

/// Left: L_w u + G u = v, v has 2m rows. Right: L_w u - u G = v, v has 2m columns.
FourierSeries solve_melnikov1(const FourierSeries& v, const FrequencyData& freq, Side side,
                              const CohomologyOptions& opts = {});

struct Melnikov2Solution {
  FourierSeries u;
  /// Largest distance of a k = 0, i = i average block from the image form
  /// ((p, q), (q, -p)); that part of the rhs is projected out.
  Real defect = 0;
};

/// L_w u + G u - u G = V for 2m x 2m series V. The kernel of the k = 0 diagonal
/// blocks is fixed by <u>_{ii} + <u>_{i+m,i+m} = 0 and <u>_{i,i+m} = <u>_{i+m,i}.
Melnikov2Solution solve_melnikov2(const FourierSeries& v, const FrequencyData& freq,
                                  const CohomologyOptions& opts = {});

}  // namespace tori
