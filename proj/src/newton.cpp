#include "tori/newton.hpp"

#include <cmath>
#include <string>

#include "tori/errors.hpp"

namespace tori {

namespace {

void require_solution(const TorusSolution& sol, const ModelFamily& model) {
  const int n = sol.n, d = sol.d, m = n - d;
  if (n != model.degrees_of_freedom()) {
    throw ShapeMismatch("solution has n = " + std::to_string(n) + " but the model has " +
                        std::to_string(model.degrees_of_freedom()) + " degrees of freedom");
  }
  if (d < 1 || m < 0 || sol.K.grid().dims() != d || sol.freq.dims() != d ||
      sol.freq.normal_count() != m) {
    throw ShapeMismatch("solution dimensions (n, d) do not match its grid or frequencies");
  }
  if (sol.K.rows() != 2 * n || sol.K.cols() != 1) throw ShapeMismatch("K must be a 2n-vector");
  if (m > 0) {
    if (sol.W.rows() != 2 * n || sol.W.cols() != 2 * m || !(sol.W.grid() == sol.K.grid())) {
      throw ShapeMismatch("W must be 2n x 2(n - d) on the grid of K");
    }
    if (sol.lambda.size() != m || sol.alpha.size() != m || model.parameter_count() != m) {
      throw ShapeMismatch("lambda and alpha need n - d entries, one per model parameter");
    }
  } else if (!sol.W.empty() || sol.lambda.size() != model.parameter_count()) {
    throw ShapeMismatch("a Lagrangian torus carries no normal bundle");
  }
}

Real condition_number(const Matrix& a) {
  if (a.size() == 0) return 1;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  const Real smin = sv[sv.size() - 1];
  return smin > 0 ? sv[0] / smin : std::numeric_limits<Real>::infinity();
}

Real max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : Real(0); }
Real max_abs(const Vector& a) { return a.size() ? a.cwiseAbs().maxCoeff() : Real(0); }

void fill_diagnostics(StepReport& rep, const TorusSolution& sol, const ModelFamily& model,
                      const Residuals& res, const AdaptedFrame& frame, const FourierSeries& T,
                      const NewtonOptions& opts) {
  rep.error_K = error_norm_K(res.E_K);
  rep.error_W = sol.n > sol.d ? error_norm_W(res.E_W) : Real(0);
  rep.alpha = max_abs(sol.alpha);
  const FrameDefects fd = frame_defects(frame, model, res.fields.DX, T, sol.freq, sol.alpha);
  rep.sym_defect = fd.symplectic;
  rep.red_defect = fd.reducibility;
  rep.omega_ll = fd.omega_ll;
  rep.omega_lw = fd.omega_lw;
  rep.omega_ww = fd.omega_ww;
  rep.alpha_recovered = max_abs(fd.alpha);
  rep.tail_energy = tail_energy(sol.K);
  if (!sol.W.empty()) rep.tail_energy = std::max(rep.tail_energy, tail_energy(sol.W));
  rep.torsion_cond = condition_number(average(T));
  const DivisorAudit audit =
      audit_divisors(sol.freq, sol.K.grid(), opts.cohomology.divisor_floor);
  rep.min_divisor_tangent = audit.min_tangent;
  rep.min_divisor_first = sol.freq.normal_count() ? audit.min_first : Real(0);
  rep.min_divisor_second = sol.freq.normal_count() ? audit.min_second : Real(0);
}

}  // namespace

Real error_norm_K(const FourierSeries& E_K) { return sup_norm(E_K); }
Real error_norm_W(const FourierSeries& E_W) { return sup_norm(E_W); }

Residuals residuals(const TorusSolution& sol, const ModelFamily& model, ProductRule products) {
  require_solution(sol, model);
  Residuals r;
  r.fields = eval_on_torus(model, sol.K, sol.lambda);
  r.E_K = lie_derivative(sol.K, sol.freq.omega()) + r.fields.X;
  if (sol.n > sol.d) {
    r.E_W = lie_derivative(sol.W, sol.freq.omega()) + multiply(r.fields.DX, sol.W, products) -
            multiply(sol.W, sol.freq.gamma_matrix(sol.alpha));
  }
  return r;
}

ParameterShift parameter_shift(const Matrix& eta, const std::vector<Matrix>& B, Real cond_cap) {
  const int m = static_cast<int>(eta.rows()) / 2;
  if (eta.rows() != 2 * m || eta.cols() != 2 * m || static_cast<int>(B.size()) != m) {
    throw ShapeMismatch("parameter_shift: need a 2m x 2m average and m parameter blocks");
  }
  Matrix b11(m, m), b12(m, m), b21(m, m), b22(m, m);
  for (int r = 0; r < m; ++r) {
    if (B[r].rows() != 2 * m || B[r].cols() != 2 * m) {
      throw ShapeMismatch("parameter_shift: parameter block has wrong shape");
    }
    for (int i = 0; i < m; ++i) {
      b11(i, r) = B[r](i, i);
      b12(i, r) = B[r](i, i + m);
      b21(i, r) = B[r](i + m, i);
      b22(i, r) = B[r](i + m, i + m);
    }
  }
  Vector e11(m), e12(m), e21(m), e22(m);
  for (int i = 0; i < m; ++i) {
    e11[i] = eta(i, i);
    e12[i] = eta(i, i + m);
    e21[i] = eta(i + m, i);
    e22[i] = eta(i + m, i + m);
  }
  ParameterShift ps;
  const Matrix transversal = b12 - b21;
  ps.transversality_cond = condition_number(transversal);
  if (!(ps.transversality_cond <= cond_cap)) {
    throw DegenerateFamily("transversality fails: <B>_12 - <B>_21 has condition number " +
                           std::to_string(static_cast<double>(ps.transversality_cond)));
  }
  ps.dlambda = m ? Vector(transversal.fullPivLu().solve(e12 - e21)) : Vector();
  ps.s = (e11 - e22) / 2 - (b11 - b22) * ps.dlambda / 2;
  ps.t = (e12 + e21) / 2 - (b12 + b21) * ps.dlambda / 2;
  ps.dalpha = -(e11 + e22) / 2 + (b11 + b22) * ps.dlambda / 2;
  return ps;
}

KBlock solve_K_block(const FourierSeries& E_K, const AdaptedFrame& frame, const FourierSeries& T,
                     const FourierSeries& DlX, const FrequencyData& freq,
                     const NewtonOptions& opts) {
  auto mul = [&](const FourierSeries& a, const FourierSeries& b) {
    return multiply(a, b, opts.products);
  };
  const int d = frame.d, m = frame.n - frame.d;
  const Vector& omega = freq.omega();
  const FourierSeries eta = -mul(frame.Pinv, E_K);
  const FourierSeries V = m > 0 ? hstack({eta, mul(frame.Pinv, DlX)}) : eta;

  KBlock out;
  FourierSeries vN = row_block(V, d, d);
  const Matrix avgN = average(vN);
  out.average_eta_N = max_abs(Matrix(avgN.col(0)));
  out.average_b_N = m > 0 ? max_abs(Matrix(avgN.rightCols(m))) : StepReport::kNotComputed;
  const Real scale = std::max(Real(1), sup_norm(vN));
  if (max_abs(avgN) > opts.cohomology.average_tol * scale) {
    throw UnsolvableEquation("N-components of the K equation have average " +
                                 std::to_string(static_cast<double>(max_abs(avgN))),
                             max_abs(avgN));
  }
  vN = add_constant(vN, -avgN);
  FourierSeries xN = solve_zero_average(vN, omega, Matrix(), opts.cohomology);

  const Matrix Tavg = average(T);
  out.torsion_cond = condition_number(Tavg);
  if (!(out.torsion_cond <= opts.torsion_cond_cap)) {
    throw DegenerateTorsion("<T> has condition number " +
                            std::to_string(static_cast<double>(out.torsion_cond)));
  }
  const FourierSeries vL = row_block(V, 0, d);
  const Matrix c0 = Tavg.fullPivLu().solve(average(vL) - average(mul(T, xN)));
  xN = add_constant(xN, c0);
  FourierSeries rL = vL - mul(T, xN);
  rL = add_constant(rL, -average(rL));
  const FourierSeries xL = solve_zero_average(rL, omega, Matrix(), opts.cohomology);

  FourierSeries xi;
  if (m > 0) {
    const FourierSeries xW =
        solve_melnikov1(row_block(V, 2 * d, 2 * m), freq, Side::Left, opts.cohomology);
    xi = vstack({xL, xN, xW});
    out.xi_b = col_block(xi, 1, m);
  } else {
    xi = vstack({xL, xN});
  }
  out.xi_eta = col_block(xi, 0, 1);
  return out;
}

namespace {

TorusSolution refine(const TorusSolution& sol, int factor) {
  if (factor == 1) return sol;
  std::vector<int> sizes = sol.K.grid().sizes();
  for (int& n : sizes) n *= factor;
  const Grid fine(sizes);
  TorusSolution out = sol;
  out.K = resample(sol.K, fine);
  if (!sol.W.empty()) out.W = resample(sol.W, fine);
  return out;
}

void check_oversample(const NewtonOptions& opts) {
  const int f = opts.oversample;
  if (f < 1 || (f & (f - 1)) != 0) throw InvalidData("oversample must be a power of two");
}

// Residual norms and tail of the iterate on its own grid.
void coarse_norms(StepReport& rep, const TorusSolution& sol, const ModelFamily& model,
                  const NewtonOptions& opts) {
  const Residuals res = residuals(sol, model, opts.products);
  rep.error_K = error_norm_K(res.E_K);
  rep.error_W = sol.n > sol.d ? error_norm_W(res.E_W) : Real(0);
  rep.tail_energy = tail_energy(sol.K);
  if (!sol.W.empty()) rep.tail_energy = std::max(rep.tail_energy, tail_energy(sol.W));
  const DivisorAudit audit =
      audit_divisors(sol.freq, sol.K.grid(), opts.cohomology.divisor_floor);
  rep.min_divisor_tangent = audit.min_tangent;
  rep.min_divisor_first = sol.freq.normal_count() ? audit.min_first : Real(0);
  rep.min_divisor_second = sol.freq.normal_count() ? audit.min_second : Real(0);
}

StepResult step_on_grid(const TorusSolution& sol, const ModelFamily& model,
                        const NewtonOptions& opts, Real band) {
  auto mul = [&](const FourierSeries& a, const FourierSeries& b) {
    return multiply(a, b, opts.products);
  };
  const Residuals res = residuals(sol, model, opts.products);
  const int d = sol.d, m = sol.n - sol.d;
  const Vector& omega = sol.freq.omega();
  const AdaptedFrame frame = build_frame(model, sol.K, sol.W, opts.products);
  const FourierSeries T = torsion(frame, model, res.fields.DX, omega);

  StepResult out{sol, {}};
  StepReport& rep = out.report;
  fill_diagnostics(rep, sol, model, res, frame, T, opts);

  const KBlock kb = solve_K_block(res.E_K, frame, T, res.fields.DlX, sol.freq, opts);
  rep.average_eta_N = kb.average_eta_N;
  rep.average_b_N = kb.average_b_N;

  if (m == 0) {
    out.next.K = low_pass(sol.K + mul(frame.P, kb.xi_eta), band);
    return out;
  }

  // W block: known part of D_zz X [dK, W] goes to the right-hand side, the part
  // proportional to dlambda joins B.
  const FourierSeries dK_eta = mul(frame.P, kb.xi_eta);
  const FourierSeries eta_hat =
      -mul(frame.Pinv, res.E_W) -
      mul(frame.Pinv, eval_bilinear_z(model, sol.K, sol.lambda, dK_eta, sol.W));
  std::vector<FourierSeries> B_hat;
  std::vector<Matrix> B_avg;
  for (int r = 0; r < m; ++r) {
    const Vector e = Vector::Unit(m, r);
    const FourierSeries dK_b = mul(frame.P, col_block(kb.xi_b, r, 1));
    B_hat.push_back(mul(frame.Pinv,
                             eval_bilinear_lambda(model, sol.K, sol.lambda, e, sol.W) -
                                 eval_bilinear_z(model, sol.K, sol.lambda, dK_b, sol.W)));
    B_avg.push_back(average(block(B_hat.back(), 2 * d, 0, 2 * m, 2 * m)));
  }
  const ParameterShift ps = parameter_shift(average(block(eta_hat, 2 * d, 0, 2 * m, 2 * m)),
                                            B_avg, opts.transversality_cond_cap);
  rep.transversality_cond = ps.transversality_cond;

  FourierSeries rhs = eta_hat;
  for (int r = 0; r < m; ++r) rhs = rhs - ps.dlambda[r] * B_hat[r];
  Matrix g_dalpha = Matrix::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) g_dalpha(i, i) = g_dalpha(i + m, i + m) = ps.dalpha[i];

  const Melnikov2Solution sw = solve_melnikov2(
      add_constant(block(rhs, 2 * d, 0, 2 * m, 2 * m), g_dalpha), sol.freq, opts.cohomology);
  rep.solvability_defect = sw.defect;
  const FourierSeries xN =
      solve_melnikov1(block(rhs, d, 0, d, 2 * m), sol.freq, Side::Right, opts.cohomology);
  const FourierSeries xL = solve_melnikov1(block(rhs, 0, 0, d, 2 * m) - mul(T, xN),
                                           sol.freq, Side::Right, opts.cohomology);
  const FourierSeries xi_W = vstack({xL, xN, sw.u});

  const FourierSeries xi_K = kb.xi_eta - multiply(kb.xi_b, Matrix(ps.dlambda));
  TorusSolution& next = out.next;
  next.K = low_pass(sol.K + mul(frame.P, xi_K), band);
  next.W = low_pass(sol.W + mul(frame.P, xi_W), band);
  next.lambda = sol.lambda + ps.dlambda;
  next.alpha = sol.alpha + ps.dalpha;
  rep.dlambda = max_abs(ps.dlambda);
  rep.dalpha = max_abs(ps.dalpha);
  return out;
}

}  // namespace

StepReport diagnose(const TorusSolution& sol, const ModelFamily& model,
                    const NewtonOptions& opts) {
  check_oversample(opts);
  const TorusSolution fine = refine(sol, opts.oversample);
  const Residuals res = residuals(fine, model, opts.products);
  const AdaptedFrame frame = build_frame(model, fine.K, fine.W, opts.products);
  const FourierSeries T = torsion(frame, model, res.fields.DX, fine.freq.omega());
  StepReport rep;
  fill_diagnostics(rep, fine, model, res, frame, T, opts);
  coarse_norms(rep, sol, model, opts);
  return rep;
}

StepResult newton_step(const TorusSolution& sol, const ModelFamily& model,
                       const NewtonOptions& opts) {
  check_oversample(opts);
  StepResult out =
      step_on_grid(refine(sol, opts.oversample), model, opts, opts.band / opts.oversample);
  coarse_norms(out.report, sol, model, opts);
  TorusSolution& next = out.next;
  const Grid& grid = sol.K.grid();
  next.K = resample(next.K, grid);
  if (!next.W.empty()) {
    next.W = resample(next.W, grid);
    if (opts.normalize_bundle) next.W = symplectic_normalize(next.W, model.symplectic_form());
  }
  return out;
}

TorusSolution iterate(TorusSolution sol, const ModelFamily& model, const IterateOptions& opts,
                      std::vector<StepReport>* log) {
  Real first = -1;
  for (int k = 0;; ++k) {
    if (k == opts.max_steps) {
      StepReport rep = diagnose(sol, model, opts.newton);
      rep.step = k;
      if (log) log->push_back(rep);
      if (rep.residual() <= opts.tol) return sol;
      throw NonConvergence("residual " + std::to_string(static_cast<double>(rep.residual())) +
                           " above tolerance after " + std::to_string(k) + " steps");
    }
    StepResult st = newton_step(sol, model, opts.newton);
    st.report.step = k;
    const Real r = st.report.residual();
    if (first < 0) first = r;
    if (r <= opts.tol) {
      st.report.dlambda = st.report.dalpha = StepReport::kNotComputed;
      if (log) log->push_back(st.report);
      return sol;
    }
    if (log) log->push_back(st.report);
    if (!std::isfinite(r) || r > opts.divergence_factor * std::max(first, opts.tol)) {
      throw NonConvergence("Newton iteration diverged at step " + std::to_string(k) +
                           " (residual " + std::to_string(static_cast<double>(r)) + ")");
    }
    sol = std::move(st.next);
  }
}

}  // namespace tori
