#include "earnshaw/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "earnshaw/errors.hpp"
#include "json.hpp"

namespace earnshaw::config {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(path + ": unknown key '" + key + "'");
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

template <class T>
T as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ValidationError(path + ": wrong type");
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  return as<T>(j.at(key), join(path, key));
}

template <class T>
T require(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ValidationError(join(path, key) + ": required");
  return as<T>(j.at(key), join(path, key));
}

double number(const json& j, const char* key, const std::string& path, double fallback) {
  const double v = get<double>(j, key, path, fallback);
  if (!std::isfinite(v)) throw ValidationError(join(path, key) + ": must be finite");
  return v;
}

int integer(const json& j, const char* key, const std::string& path, int fallback, int lo) {
  const int v = get<int>(j, key, path, fallback);
  if (v < lo) throw ValidationError(join(path, key) + ": must be >= " + std::to_string(lo));
  return v;
}

Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ValidationError(path + ": expected [x, y, z]");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    v[k] = as<double>(j[k], path);
    if (!std::isfinite(v[k])) throw ValidationError(path + ": must be finite");
  }
  return v;
}

Vec3 vec3_or(const json& j, const char* key, const std::string& path, const Vec3& fallback) {
  return j.contains(key) ? vec3(j.at(key), join(path, key)) : fallback;
}

materials::DispersionModel dispersion(const json& j, const std::string& path) {
  using materials::DispersionModel;
  if (j.is_number()) return DispersionModel::constant(as<double>(j, path));
  if (j.is_string()) {
    if (j.get<std::string>() == "pec") return DispersionModel::perfect_conductor();
    throw ValidationError(path + ": unknown model name '" + j.get<std::string>() + "'");
  }
  require_object(j, path);
  const auto model = require<std::string>(j, "model", path);
  if (model == "pec") {
    check_keys(j, path, {"model"});
    return DispersionModel::perfect_conductor();
  }
  if (model == "constant") {
    check_keys(j, path, {"model", "value"});
    return DispersionModel::constant(require<double>(j, "value", path));
  }
  if (model == "plasma") {
    check_keys(j, path, {"model", "omega_p"});
    return DispersionModel::plasma(require<double>(j, "omega_p", path));
  }
  if (model == "drude") {
    check_keys(j, path, {"model", "omega_p", "gamma"});
    return DispersionModel::drude(require<double>(j, "omega_p", path), require<double>(j, "gamma", path));
  }
  if (model == "lorentz") {
    check_keys(j, path, {"model", "oscillators"});
    const json& list = j.at("oscillators");
    if (!list.is_array()) throw ValidationError(path + ".oscillators: expected an array");
    std::vector<materials::LorentzOscillator> osc;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = path + ".oscillators[" + std::to_string(i) + "]";
      check_keys(list[i], p, {"strength", "resonance", "damping"});
      osc.push_back({require<double>(list[i], "strength", p), require<double>(list[i], "resonance", p),
                     number(list[i], "damping", p, 0.0)});
    }
    return DispersionModel::lorentz(std::move(osc));
  }
  throw ValidationError(path + ".model: unknown model '" + model + "'");
}

materials::Medium medium(const json& j, const std::string& path) {
  check_keys(j, path, {"eps", "mu"});
  materials::Medium m;
  if (j.contains("eps")) m.eps = dispersion(j.at("eps"), path + ".eps");
  if (j.contains("mu")) m.mu = dispersion(j.at("mu"), path + ".mu");
  return m;
}

scattering::SphereObject sphere(const json& j, const std::string& path) {
  check_keys(j, path, {"label", "center", "radius", "eps", "mu"});
  scattering::SphereObject s;
  s.label = require<std::string>(j, "label", path);
  s.center = vec3(j.contains("center") ? j.at("center") : json::array({0, 0, 0}), path + ".center");
  s.radius = require<double>(j, "radius", path);
  if (!j.contains("eps")) throw ValidationError(path + ".eps: required");
  s.eps = dispersion(j.at("eps"), path + ".eps");
  if (j.contains("mu")) s.mu = dispersion(j.at("mu"), path + ".mu");
  return s;
}

void energy_options(const json& j, casimir::EnergyOptions& o) {
  const std::string p = "energy";
  check_keys(j, p, {"tol", "l_max", "adapt_lmax", "max_lmax", "initial_nodes", "max_nodes", "fixed_nodes",
                    "eigen_diagnostics", "max_matsubara"});
  o.tol = number(j, "tol", p, o.tol);
  if (!(o.tol > 0.0)) throw ValidationError("energy.tol: must be positive");
  o.l_max = integer(j, "l_max", p, o.l_max, 0);
  o.adapt_lmax = get<bool>(j, "adapt_lmax", p, o.adapt_lmax);
  o.max_lmax = integer(j, "max_lmax", p, o.max_lmax, 1);
  o.initial_nodes = integer(j, "initial_nodes", p, o.initial_nodes, 2);
  o.max_nodes = integer(j, "max_nodes", p, o.max_nodes, o.initial_nodes);
  o.fixed_nodes = integer(j, "fixed_nodes", p, o.fixed_nodes, 0);
  o.eigen_diagnostics = get<bool>(j, "eigen_diagnostics", p, o.eigen_diagnostics);
  o.max_matsubara = integer(j, "max_matsubara", p, o.max_matsubara, 1);
}

void stability_options(const json& j, stability::StabilityOptions& o, bool& decomposition) {
  const std::string p = "stability";
  check_keys(j, p, {"l_max", "nodes", "h_rel", "richardson", "decomposition"});
  o.l_max = integer(j, "l_max", p, o.l_max, 0);
  o.nodes = integer(j, "nodes", p, o.nodes, 2);
  o.h_rel = number(j, "h_rel", p, o.h_rel);
  if (!(o.h_rel > 0.0 && o.h_rel < 0.1)) throw ValidationError("stability.h_rel: must lie in (0, 0.1)");
  o.richardson = get<bool>(j, "richardson", p, o.richardson);
  decomposition = get<bool>(j, "decomposition", p, decomposition);
}

SweepSpec sweep(const json& j, const casimir::Configuration& cfg) {
  const std::string p = "sweep";
  check_keys(j, p, {"target", "direction", "offsets", "force"});
  SweepSpec s;
  s.target = require<std::string>(j, "target", p);
  casimir::find_object(cfg, s.target);
  s.direction = vec3_or(j, "direction", p, s.direction);
  if (!(s.direction.norm() > 0.0)) throw ValidationError("sweep.direction: must be non-zero");
  s.direction.normalize();
  s.offsets = require<std::vector<double>>(j, "offsets", p);
  if (s.offsets.empty()) throw ValidationError("sweep.offsets: empty sweep list");
  s.force = get<bool>(j, "force", p, s.force);
  const int index = casimir::find_object(cfg, s.target);
  for (double off : s.offsets) {
    if (!std::isfinite(off)) throw ValidationError("sweep.offsets: must be finite");
    casimir::Configuration moved = cfg;
    moved.objects[index].center += off * s.direction;
    casimir::validate(moved);
  }
  return s;
}

PlatesSpec plates(const json& j) {
  const std::string p = "plates";
  check_keys(j, p, {"plate1", "plate2", "gaps", "tol"});
  PlatesSpec s;
  if (!j.contains("plate1") || !j.contains("plate2")) throw ValidationError("plates: plate1 and plate2 are required");
  s.plate1 = medium(j.at("plate1"), "plates.plate1");
  s.plate2 = medium(j.at("plate2"), "plates.plate2");
  s.gaps = require<std::vector<double>>(j, "gaps", p);
  if (s.gaps.empty()) throw ValidationError("plates.gaps: empty gap list");
  for (double g : s.gaps)
    if (!(g > 0.0) || !std::isfinite(g)) throw GeometryError("plates.gaps: gaps must be positive");
  s.tol = number(j, "tol", p, s.tol);
  if (!(s.tol > 0.0)) throw ValidationError("plates.tol: must be positive");
  return s;
}

classical::Container container(const json& j, const std::string& path) {
  check_keys(j, path, {"label", "shape", "center", "radius", "half_extent", "fixed", "mobile", "intra_coulomb", "hard_core"});
  classical::Container c;
  c.label = require<std::string>(j, "label", path);
  const auto shape = get<std::string>(j, "shape", path, "sphere");
  if (shape == "sphere") {
    c.shape = classical::Shape::Sphere;
    c.radius = require<double>(j, "radius", path);
    if (j.contains("half_extent")) throw ValidationError(path + ": half_extent given for a sphere");
  } else if (shape == "box") {
    c.shape = classical::Shape::Box;
    c.half_extent = vec3(j.contains("half_extent") ? j.at("half_extent") : json(), path + ".half_extent");
    if (j.contains("radius")) throw ValidationError(path + ": radius given for a box");
  } else {
    throw ValidationError(path + ".shape: expected 'sphere' or 'box'");
  }
  c.center = vec3_or(j, "center", path, Vec3::Zero());
  c.intra_coulomb = get<bool>(j, "intra_coulomb", path, false);
  c.hard_core = number(j, "hard_core", path, 0.0);
  if (j.contains("fixed")) {
    const json& list = j.at("fixed");
    if (!list.is_array()) throw ValidationError(path + ".fixed: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = path + ".fixed[" + std::to_string(i) + "]";
      check_keys(list[i], p, {"q", "position"});
      c.fixed.push_back({require<double>(list[i], "q", p), vec3_or(list[i], "position", p, Vec3::Zero())});
    }
  }
  if (j.contains("mobile")) {
    const json& list = j.at("mobile");
    if (!list.is_array()) throw ValidationError(path + ".mobile: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = path + ".mobile[" + std::to_string(i) + "]";
      check_keys(list[i], p, {"q", "tether"});
      classical::MobileCharge m{require<double>(list[i], "q", p), std::nullopt};
      if (list[i].contains("tether")) {
        const json& t = list[i].at("tether");
        check_keys(t, p + ".tether", {"k", "anchor"});
        m.tether = classical::Tether{require<double>(t, "k", p + ".tether"), vec3_or(t, "anchor", p + ".tether", Vec3::Zero())};
      }
      c.mobile.push_back(m);
    }
  }
  return c;
}

void classical_section(const json& j, RunConfig& rc) {
  const std::string p = "classical";
  check_keys(j, p, {"eps_m", "beta", "containers", "target", "mc", "quadrature"});
  classical::ClassicalConfig cc;
  cc.eps_m = number(j, "eps_m", p, 1.0);
  cc.beta = get<double>(j, "beta", p, 1.0);
  const json& list = j.contains("containers") ? j.at("containers") : json::array();
  if (!list.is_array()) throw ValidationError("classical.containers: expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) cc.containers.push_back(container(list[i], p + ".containers[" + std::to_string(i) + "]"));
  classical::validate(cc);

  McSpec mc;
  mc.target = require<std::string>(j, "target", p);
  classical::find_container(cc, mc.target);
  if (j.contains("mc")) {
    const json& m = j.at("mc");
    check_keys(m, "classical.mc", {"steps", "burn_in", "thin", "step_size"});
    mc.options.steps = get<std::uint64_t>(m, "steps", "classical.mc", mc.options.steps);
    mc.options.burn_in = get<std::uint64_t>(m, "burn_in", "classical.mc", mc.options.burn_in);
    mc.options.thin = get<std::uint64_t>(m, "thin", "classical.mc", mc.options.thin);
    mc.options.step_size = number(m, "step_size", "classical.mc", mc.options.step_size);
    if (mc.options.thin == 0 || mc.options.steps < mc.options.thin) throw ValidationError("classical.mc: need steps >= thin >= 1");
    if (!(mc.options.step_size > 0.0)) throw ValidationError("classical.mc.step_size: must be positive");
  }
  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    const std::string qp = "classical.quadrature";
    check_keys(q, qp, {"enabled", "fd_step", "tol", "initial_nodes", "max_nodes"});
    mc.quadrature = get<bool>(q, "enabled", qp, mc.quadrature);
    mc.fd_step = number(q, "fd_step", qp, mc.fd_step);
    if (!(mc.fd_step > 0.0)) throw ValidationError("classical.quadrature.fd_step: must be positive");
    mc.quadrature_options.tol = number(q, "tol", qp, mc.quadrature_options.tol);
    mc.quadrature_options.initial_nodes = integer(q, "initial_nodes", qp, mc.quadrature_options.initial_nodes, 2);
    mc.quadrature_options.max_nodes = integer(q, "max_nodes", qp, mc.quadrature_options.max_nodes, mc.quadrature_options.initial_nodes);
  }
  rc.classical = std::move(cc);
  rc.mc = std::move(mc);
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config", {"length_unit", "medium", "tau", "objects", "energy", "stability", "targets", "sweep", "plates",
                           "classical", "seed", "output"});
  RunConfig rc;
  rc.length_unit = get<std::string>(j, "length_unit", "", rc.length_unit);
  rc.seed = get<std::uint64_t>(j, "seed", "", rc.seed);
  rc.output = get<std::string>(j, "output", "", rc.output);
  if (rc.output.empty()) throw ValidationError("output: must not be empty");

  if (j.contains("medium")) rc.medium = medium(j.at("medium"), "medium");
  rc.tau = number(j, "tau", "", 0.0);
  if (rc.tau < 0.0) throw ValidationError("tau: must be >= 0");
  if (j.contains("objects")) {
    casimir::Configuration cfg;
    cfg.medium = rc.medium;
    cfg.tau = rc.tau;
    const json& list = j.at("objects");
    if (!list.is_array()) throw ValidationError("objects: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) cfg.objects.push_back(sphere(list[i], "objects[" + std::to_string(i) + "]"));
    casimir::validate(cfg);
    rc.targets = get<std::vector<std::string>>(j, "targets", "", {});
    for (const auto& t : rc.targets) casimir::find_object(cfg, t);
    if (j.contains("sweep")) rc.sweep = sweep(j.at("sweep"), cfg);
    rc.casimir = std::move(cfg);
  } else {
    for (const char* key : {"targets", "sweep"})
      if (j.contains(key)) throw ValidationError(std::string(key) + ": requires 'objects'");
  }
  if (j.contains("energy")) energy_options(j.at("energy"), rc.energy);
  if (j.contains("stability")) stability_options(j.at("stability"), rc.stability, rc.decomposition);
  if (j.contains("plates")) rc.plates = plates(j.at("plates"));
  if (j.contains("classical")) classical_section(j.at("classical"), rc);
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read config file: " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return parse_run_config(s.str());
}

}  // namespace earnshaw::config
