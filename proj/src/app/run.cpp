#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "tori/app.hpp"
#include "tori/errors.hpp"

namespace tori::app {

namespace {

std::string fmt(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", static_cast<double>(v));
  return buf;
}

void write_convergence(const std::filesystem::path& path, const std::vector<StepReport>& log) {
  std::ofstream out(path);
  out << "step,E_K,E_W,dlambda,dalpha,alpha,sym_defect,red_defect,tail_energy,"
         "omega_ll,omega_lw,omega_ww,torsion_cond,transversality_cond,solvability_defect,"
         "average_eta_N,average_b_N\n";
  for (const auto& r : log) {
    out << r.step;
    for (Real v : {r.error_K, r.error_W, r.dlambda, r.dalpha, r.alpha, r.sym_defect, r.red_defect,
                   r.tail_energy, r.omega_ll, r.omega_lw, r.omega_ww, r.torsion_cond,
                   r.transversality_cond, r.solvability_defect, r.average_eta_N, r.average_b_N}) {
      out << ',' << fmt(v);
    }
    out << '\n';
  }
}

void write_continuation(const std::filesystem::path& path,
                        const std::vector<ContinuationNode>& nodes) {
  std::ofstream out(path);
  out << "parameter,value,steps,residual,lambda\n";
  for (const auto& nd : nodes) {
    out << "epsilon," << fmt(nd.value) << ',' << nd.steps << ',' << fmt(nd.residual);
    for (Eigen::Index i = 0; i < nd.lambda.size(); ++i) out << (i ? ";" : ",") << fmt(nd.lambda[i]);
    out << '\n';
  }
}

void write_series(const std::filesystem::path& path, const FourierSeries& u) {
  std::ofstream out(path);
  write_coeff_dump(out, u);
}

void log_steps(std::ostream& log, const std::vector<StepReport>& steps, const std::string& tag) {
  for (const auto& r : steps) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s step %2d  E_K %.3e  E_W %.3e  dlambda %.3e  alpha %.3e\n",
                  tag.c_str(), r.step, static_cast<double>(r.error_K),
                  static_cast<double>(r.error_W), static_cast<double>(r.dlambda),
                  static_cast<double>(r.alpha));
    log << buf;
  }
}

struct Verification {
  std::vector<std::pair<std::string, std::string>> lines;
  void add(const std::string& key, Real v) { lines.emplace_back(key, fmt(v)); }
  void add(const std::string& key, const std::string& v) { lines.emplace_back(key, v); }
};

void write_verify(const std::filesystem::path& path, const Verification& v) {
  std::ofstream out(path);
  for (const auto& [k, val] : v.lines) out << k << " = " << val << '\n';
}

void write_failure(const std::filesystem::path& dir, const std::string& stage,
                   const std::exception& e) {
  nlohmann::json j;
  j["status"] = "failed";
  j["stage"] = stage;
  j["message"] = e.what();
  if (const auto* te = dynamic_cast<const Error*>(&e)) {
    j["kind"] = te->kind();
    if (const auto* sd = dynamic_cast<const SmallDivisor*>(te)) {
      j["mode"] = sd->mode();
      j["divisor"] = static_cast<double>(sd->divisor());
    } else if (const auto* ue = dynamic_cast<const UnsolvableEquation*>(te)) {
      j["defect"] = static_cast<double>(ue->defect());
    } else if (const auto* de = dynamic_cast<const DomainEscape*>(te)) {
      j["point"] = de->point();
    } else if (const auto* df = dynamic_cast<const DegenerateFrame*>(te)) {
      j["point"] = df->point();
    }
  } else {
    j["kind"] = "internal";
  }
  std::ofstream out(dir / "failure.json");
  out << j.dump(2) << '\n';
}

int run_pendulum(const Config& cfg, std::ostream& log, std::string& stage) {
  const auto& dir = cfg.output_dir;
  stage = "init";
  const IterateOptions it = iterate_options(cfg);
  CircleResult c = pendulum_circle(cfg.params.l1, cfg.omega[0], cfg.grid[0], it);
  log_steps(log, c.log, "circle");
  write_convergence(dir / "convergence.csv", c.log);
  write_continuation(dir / "continuation.csv", {});
  write_series(dir / "K.coeffs", c.circle.K);

  Verification v;
  v.add("model", cfg.model);
  v.add("residual", c.log.back().residual());
  if (cfg.verify) {
    stage = "verify";
    const auto model = make_pendulum(cfg.params.l1);
    const Real expected = 2 * kPi / cfg.omega[0];
    const Vector z0 = c.circle.K.evaluate(std::vector<Real>{0});
    const Real period = return_time(*model, Vector(), z0, expected);
    v.add("period", period);
    v.add("period_expected", expected);
    v.add("period_error", std::abs(period - expected));
    const auto angles = random_angles(cfg.verify_samples, 1, cfg.seed);
    v.add("verify_time", cfg.verify_time);
    v.add("flow_invariance_error",
          flow_invariance_error(c.circle, *model, angles, cfg.verify_time));
  } else {
    v.add("verify", "off");
  }
  write_verify(dir / "verify.txt", v);
  return 0;
}

int run_pendula(const Config& cfg, std::ostream& log, std::string& stage) {
  const auto& dir = cfg.output_dir;
  stage = "init";
  InitOptions io;
  io.iterate = iterate_options(cfg);
  InitialData init = build_initial(cfg.params, cfg.omega, cfg.grid, io);
  log_steps(log, init.circles[0].log, "circle 1");
  log_steps(log, init.circles[1].log, "circle 2");
  for (const auto& nd : init.coupling) {
    log << "k1 " << fmt(nd.value) << "  steps " << nd.steps << "  residual " << fmt(nd.residual)
        << '\n';
  }

  stage = "continuation";
  std::vector<Real> schedule = cfg.eps_schedule;
  if (schedule.front() != 0) schedule.insert(schedule.begin(), Real(0));
  ContinuationOptions copts;
  copts.iterate = io.iterate;
  PendulaParams params = cfg.params;
  std::vector<ContinuationNode> nodes;
  const TorusSolution sol = continue_parameter(
      init.solution,
      [params](Real eps) mutable -> std::unique_ptr<ModelFamily> {
        params.epsilon = eps;
        return make_pendula(params);
      },
      schedule, copts, &nodes);
  for (const auto& nd : nodes) log_steps(log, nd.log, "eps " + fmt(nd.value));
  write_convergence(dir / "convergence.csv", nodes.back().log);
  write_continuation(dir / "continuation.csv", nodes);
  write_series(dir / "K.coeffs", sol.K);
  write_series(dir / "W.coeffs", sol.W);

  Verification v;
  v.add("model", cfg.model);
  v.add("epsilon", nodes.back().value);
  v.add("residual", nodes.back().residual);
  for (int i = 0; i < sol.lambda.size(); ++i) v.add("lambda_" + std::to_string(i + 1), sol.lambda[i]);
  for (int i = 0; i < sol.alpha.size(); ++i) v.add("alpha_" + std::to_string(i + 1), sol.alpha[i]);
  if (cfg.verify) {
    stage = "verify";
    PendulaParams p = cfg.params;
    p.epsilon = nodes.back().value;
    const auto model = make_pendula(p);
    const auto angles = random_angles(cfg.verify_samples, 2, cfg.seed);
    v.add("verify_time", cfg.verify_time);
    v.add("verify_samples", std::to_string(cfg.verify_samples));
    v.add("flow_invariance_error", flow_invariance_error(sol, *model, angles, cfg.verify_time));
    v.add("bundle_invariance_error",
          bundle_invariance_error(sol, *model, angles, cfg.verify_time));
    const Vector beta = measure_normal_frequencies(sol, *model, angles.front(), cfg.verify_time);
    for (int i = 0; i < beta.size(); ++i) {
      v.add("beta_measured_" + std::to_string(i + 1), beta[i]);
      v.add("beta_error_" + std::to_string(i + 1), std::abs(beta[i] - cfg.beta[i]));
    }
    const Trajectory tr =
        integrate(*model, sol.lambda, sol.K.evaluate(angles.front()), {0, cfg.verify_time});
    v.add("energy_drift", tr.energy_drift);
  } else {
    v.add("verify", "off");
  }
  write_verify(dir / "verify.txt", v);
  return 0;
}

}  // namespace

int run(const Config& cfg, std::ostream& log) {
  std::string stage = "setup";
  try {
    std::filesystem::create_directories(cfg.output_dir);
    std::filesystem::remove(cfg.output_dir / "failure.json");
    return cfg.model == "pendulum" ? run_pendulum(cfg, log, stage) : run_pendula(cfg, log, stage);
  } catch (const std::exception& e) {
    log << "failed in " << stage << ": " << e.what() << '\n';
    try {
      write_failure(cfg.output_dir, stage, e);
    } catch (const std::exception&) {
    }
    return 2;
  }
}

}  // namespace tori::app
