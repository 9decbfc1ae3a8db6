#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tori/app.hpp"
#include "tori/errors.hpp"

namespace tori::app {

namespace {

Real parse_real(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError("'" + key + "' must be a number");
  std::string s = node.Scalar();
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  bool root = false;
  if (s.rfind("sqrt(", 0) == 0 && s.size() > 6 && s.back() == ')') {
    s = s.substr(5, s.size() - 6);
    root = true;
  }
  std::size_t used = 0;
  long double v = 0;
  try {
    v = std::stold(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ConfigError("'" + key + "': cannot read '" + node.Scalar() + "' as a real");
  }
  if (root) {
    if (v < 0) throw ConfigError("'" + key + "': square root of a negative number");
    v = std::sqrt(v);
  }
  return static_cast<Real>(v);
}

std::vector<Real> parse_reals(const YAML::Node& node, const std::string& key) {
  std::vector<Real> out;
  if (node.IsSequence()) {
    for (const auto& e : node) out.push_back(parse_real(e, key));
  } else {
    out.push_back(parse_real(node, key));
  }
  return out;
}

Vector to_vector(const std::vector<Real>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

template <class T>
T parse_as(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("'" + key + "' has the wrong type");
  }
}

const std::set<std::string> kKeys = {
    "model", "n", "d", "omega", "beta", "l1", "l2", "k1", "k2", "k3", "eps_schedule", "N_F",
    "newton_tol", "max_steps", "divisor_floor", "oversample", "output_dir", "verify",
    "verify_time", "verify_samples", "seed", "precision"};

Config from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("config must be a key-value map");
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (!kKeys.count(key)) throw ConfigError("unknown key '" + key + "'");
  }
  Config cfg;
  if (root["model"]) cfg.model = parse_as<std::string>(root["model"], "model");
  if (cfg.model == "pendula") {
    cfg.n = 4;
    cfg.d = 2;
  } else if (cfg.model == "pendulum") {
    cfg.n = 1;
    cfg.d = 1;
  } else {
    throw ConfigError("unknown model '" + cfg.model + "' (pendula | pendulum)");
  }
  if (root["n"] && parse_as<int>(root["n"], "n") != cfg.n) {
    throw ConfigError("model " + cfg.model + " has n = " + std::to_string(cfg.n));
  }
  if (root["d"] && parse_as<int>(root["d"], "d") != cfg.d) {
    throw ConfigError("model " + cfg.model + " has d = " + std::to_string(cfg.d));
  }
  const int m = cfg.n - cfg.d;

  if (!root["omega"]) throw ConfigError("'omega' is required");
  cfg.omega = to_vector(parse_reals(root["omega"], "omega"));
  if (cfg.omega.size() != cfg.d) {
    throw ConfigError("'omega' needs " + std::to_string(cfg.d) + " entries");
  }
  if (m > 0) {
    if (!root["beta"]) throw ConfigError("'beta' is required");
    cfg.beta = to_vector(parse_reals(root["beta"], "beta"));
    if (cfg.beta.size() != m) throw ConfigError("'beta' needs " + std::to_string(m) + " entries");
  } else if (root["beta"] && parse_reals(root["beta"], "beta").size() != 0) {
    throw ConfigError("model " + cfg.model + " has no normal frequencies");
  }
  // Definition check: beta_i != 0, |beta_i| != |beta_j|.
  (void)FrequencyData(cfg.omega, cfg.beta);

  PendulaParams& p = cfg.params;
  if (root["l1"]) p.l1 = parse_real(root["l1"], "l1");
  if (root["l2"]) p.l2 = parse_real(root["l2"], "l2");
  if (root["k1"]) p.k1 = parse_real(root["k1"], "k1");
  if (root["k2"]) p.k2 = parse_real(root["k2"], "k2");
  if (root["k3"]) p.k3 = parse_real(root["k3"], "k3");
  if (!(p.l1 > 0) || !(p.l2 > 0)) throw ConfigError("lengths must be positive");
  p.beta = cfg.beta;

  if (root["eps_schedule"]) cfg.eps_schedule = parse_reals(root["eps_schedule"], "eps_schedule");
  if (cfg.eps_schedule.empty()) throw ConfigError("'eps_schedule' is empty");
  for (std::size_t i = 1; i < cfg.eps_schedule.size(); ++i) {
    if (!(cfg.eps_schedule[i] > cfg.eps_schedule[i - 1])) {
      throw ConfigError("'eps_schedule' must be strictly increasing");
    }
  }
  if (cfg.eps_schedule.front() < 0) throw ConfigError("'eps_schedule' must be nonnegative");
  if (m == 0 && (cfg.eps_schedule.size() != 1 || cfg.eps_schedule[0] != 0)) {
    throw ConfigError("model " + cfg.model + " has no epsilon");
  }

  cfg.grid.assign(cfg.d, 128);
  if (root["N_F"]) {
    const YAML::Node g = root["N_F"];
    if (g.IsSequence()) {
      cfg.grid = parse_as<std::vector<int>>(g, "N_F");
    } else {
      cfg.grid.assign(cfg.d, parse_as<int>(g, "N_F"));
    }
  }
  if (static_cast<int>(cfg.grid.size()) != cfg.d) {
    throw ConfigError("'N_F' needs " + std::to_string(cfg.d) + " entries");
  }
  for (int s : cfg.grid) {
    if (s < 8 || (s & (s - 1)) != 0) throw ConfigError("'N_F' entries must be powers of two >= 8");
  }

  if (root["newton_tol"]) cfg.newton_tol = parse_real(root["newton_tol"], "newton_tol");
  if (root["max_steps"]) cfg.max_steps = parse_as<int>(root["max_steps"], "max_steps");
  if (root["divisor_floor"]) cfg.divisor_floor = parse_real(root["divisor_floor"], "divisor_floor");
  if (root["oversample"]) cfg.oversample = parse_as<int>(root["oversample"], "oversample");
  if (!(cfg.newton_tol > 0)) throw ConfigError("'newton_tol' must be positive");
  if (cfg.max_steps < 1) throw ConfigError("'max_steps' must be at least 1");
  if (!(cfg.divisor_floor > 0)) throw ConfigError("'divisor_floor' must be positive");
  if (cfg.oversample < 1 || (cfg.oversample & (cfg.oversample - 1)) != 0) {
    throw ConfigError("'oversample' must be a power of two");
  }

  if (root["output_dir"]) cfg.output_dir = parse_as<std::string>(root["output_dir"], "output_dir");
  if (root["verify"]) cfg.verify = parse_as<bool>(root["verify"], "verify");
  if (root["verify_time"]) cfg.verify_time = parse_real(root["verify_time"], "verify_time");
  if (root["verify_samples"]) {
    cfg.verify_samples = parse_as<int>(root["verify_samples"], "verify_samples");
  }
  if (root["seed"]) cfg.seed = parse_as<unsigned>(root["seed"], "seed");
  if (!(cfg.verify_time > 0) || cfg.verify_samples < 1) {
    throw ConfigError("'verify_time' and 'verify_samples' must be positive");
  }

  if (root["precision"]) cfg.precision = parse_as<std::string>(root["precision"], "precision");
  if (cfg.precision != "double" && cfg.precision != "extended") {
    throw ConfigError("'precision' must be double or extended");
  }
  if ((cfg.precision == "extended") != kExtendedPrecision) {
    throw ConfigError("precision '" + cfg.precision + "' requested but this build uses " +
                      (kExtendedPrecision ? "extended" : "double"));
  }
  return cfg;
}

}  // namespace

Config parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config does not parse: ") + e.what());
  }
  return from_yaml(root);
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

IterateOptions iterate_options(const Config& cfg) {
  IterateOptions it;
  it.tol = cfg.newton_tol;
  it.max_steps = cfg.max_steps;
  it.newton.cohomology.divisor_floor = cfg.divisor_floor;
  it.newton.oversample = cfg.oversample;
  return it;
}

}  // namespace tori::app
