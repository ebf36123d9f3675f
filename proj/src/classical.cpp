#include "earnshaw/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "earnshaw/errors.hpp"
#include "earnshaw/parallel.hpp"
#include "earnshaw/quadrature.hpp"

namespace earnshaw::classical {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite3(const Vec3& v) { return v.allFinite(); }

double coulomb_prefactor(const ClassicalConfig& c) { return 1.0 / (4.0 * std::numbers::pi * c.eps_m); }

// Squared distance from a point to an axis-aligned box.
double box_distance2(const Vec3& p, const Vec3& center, const Vec3& half) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double e = std::max(std::abs(p[a] - center[a]) - half[a], 0.0);
    s += e * e;
  }
  return s;
}

bool disjoint(const Container& a, const Container& b) {
  if (a.shape == Shape::Sphere && b.shape == Shape::Sphere)
    return (a.center - b.center).norm() > a.radius + b.radius;
  if (a.shape == Shape::Box && b.shape == Shape::Box) {
    for (int k = 0; k < 3; ++k)
      if (std::abs(a.center[k] - b.center[k]) > a.half_extent[k] + b.half_extent[k]) return true;
    return false;
  }
  const Container& s = a.shape == Shape::Sphere ? a : b;
  const Container& x = a.shape == Shape::Sphere ? b : a;
  return box_distance2(s.center, x.center, x.half_extent) > s.radius * s.radius;
}

struct MobileRef {
  int container;
  int index;
};

std::vector<MobileRef> mobile_list(const ClassicalConfig& c) {
  std::vector<MobileRef> out;
  for (int j = 0; j < static_cast<int>(c.containers.size()); ++j)
    for (int i = 0; i < static_cast<int>(c.containers[j].mobile.size()); ++i) out.push_back({j, i});
  return out;
}

double pair_term(double pref, double q1, const Vec3& x1, double q2, const Vec3& x2) {
  return pref * q1 * q2 / (x1 - x2).norm();
}

double intra_pair(const Container& c, double pref, double q1, const Vec3& x1, double q2, const Vec3& x2) {
  const double r = (x1 - x2).norm();
  if (r <= c.hard_core) return kInf;
  return pref * q1 * q2 / r;
}

double tether_energy(const MobileCharge& m, const Vec3& rel) {
  if (!m.tether) return 0.0;
  return 0.5 * m.tether->k * (rel - m.tether->anchor).squaredNorm();
}

// Every term of H that involves mobile charge `m` at relative position `rel`,
// with all other mobiles taken from `pos`.
double local_energy(const ClassicalConfig& cfg, const Positions& pos, const MobileRef& m, const Vec3& rel) {
  const Container& own = cfg.containers[m.container];
  if (!own.contains(rel)) return kInf;
  const MobileCharge& mc = own.mobile[m.index];
  const double pref = coulomb_prefactor(cfg);
  const Vec3 x = own.center + rel;
  double e = tether_energy(mc, rel);
  for (int j = 0; j < static_cast<int>(cfg.containers.size()); ++j) {
    const Container& c = cfg.containers[j];
    if (j == m.container) {
      if (!own.intra_coulomb) continue;
      for (const auto& f : c.fixed) e += intra_pair(c, pref, mc.q, x, f.q, c.center + f.position);
      for (int i = 0; i < static_cast<int>(c.mobile.size()); ++i)
        if (i != m.index) e += intra_pair(c, pref, mc.q, x, c.mobile[i].q, c.center + pos[j][i]);
      continue;
    }
    for (const auto& f : c.fixed) e += pair_term(pref, mc.q, x, f.q, c.center + f.position);
    for (int i = 0; i < static_cast<int>(c.mobile.size()); ++i)
      e += pair_term(pref, mc.q, x, c.mobile[i].q, c.center + pos[j][i]);
  }
  return e;
}

}  // namespace

bool Container::contains(const Vec3& r) const {
  if (shape == Shape::Sphere) return r.squaredNorm() <= radius * radius;
  return (r.array().abs() <= half_extent.array()).all();
}

double Container::volume() const {
  if (shape == Shape::Sphere) return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
  return 8.0 * half_extent.prod();
}

void validate(const ClassicalConfig& cfg) {
  if (!(cfg.eps_m > 0.0) || !std::isfinite(cfg.eps_m)) throw ValidationError("eps_M must be positive and finite");
  if (!(cfg.beta > 0.0)) throw ValidationError("beta must be positive");
  if (cfg.containers.empty()) throw ValidationError("no containers");
  for (std::size_t j = 0; j < cfg.containers.size(); ++j) {
    const Container& c = cfg.containers[j];
    if (c.label.empty()) throw ValidationError("container without label");
    for (std::size_t i = 0; i < j; ++i)
      if (cfg.containers[i].label == c.label) throw ValidationError("duplicate container label: " + c.label);
    if (!finite3(c.center)) throw ValidationError("non-finite centre for " + c.label);
    if (c.shape == Shape::Sphere && !(c.radius > 0.0 && std::isfinite(c.radius)))
      throw ValidationError("sphere radius must be positive for " + c.label);
    if (c.shape == Shape::Box && !(finite3(c.half_extent) && (c.half_extent.array() > 0.0).all()))
      throw ValidationError("box extents must be positive for " + c.label);
    if (!(c.hard_core >= 0.0) || !std::isfinite(c.hard_core)) throw ValidationError("hard_core must be >= 0");
    for (const auto& f : c.fixed) {
      if (!std::isfinite(f.q) || !finite3(f.position)) throw ValidationError("non-finite fixed charge in " + c.label);
      if (!c.contains(f.position)) throw GeometryError("fixed charge outside container " + c.label);
    }
    for (const auto& m : c.mobile) {
      if (!std::isfinite(m.q)) throw ValidationError("non-finite mobile charge in " + c.label);
      if (m.tether && !(m.tether->k >= 0.0 && std::isfinite(m.tether->k) && finite3(m.tether->anchor)))
        throw ValidationError("tether stiffness must be finite and >= 0 in " + c.label);
    }
    for (std::size_t i = 0; i < j; ++i)
      if (!disjoint(cfg.containers[i], c))
        throw GeometryError("containers " + cfg.containers[i].label + " and " + c.label + " overlap");
  }
}

int find_container(const ClassicalConfig& cfg, const std::string& label) {
  for (std::size_t j = 0; j < cfg.containers.size(); ++j)
    if (cfg.containers[j].label == label) return static_cast<int>(j);
  throw ValidationError("unknown container: " + label);
}

double cross_energy(const ClassicalConfig& cfg, const Positions& pos) {
  const double pref = coulomb_prefactor(cfg);
  struct Point {
    double q;
    Vec3 x;
  };
  std::vector<std::vector<Point>> pts(cfg.containers.size());
  for (std::size_t j = 0; j < cfg.containers.size(); ++j) {
    const Container& c = cfg.containers[j];
    for (const auto& f : c.fixed) pts[j].push_back({f.q, c.center + f.position});
    for (std::size_t i = 0; i < c.mobile.size(); ++i) pts[j].push_back({c.mobile[i].q, c.center + pos[j][i]});
  }
  double e = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      for (const auto& p : pts[a])
        for (const auto& s : pts[b]) e += pair_term(pref, p.q, p.x, s.q, s.x);
  return e;
}

double internal_energy(const ClassicalConfig& cfg, const Positions& pos, int j) {
  const Container& c = cfg.containers[j];
  double e = 0.0;
  for (std::size_t i = 0; i < c.mobile.size(); ++i) {
    if (!c.contains(pos[j][i])) return kInf;
    e += tether_energy(c.mobile[i], pos[j][i]);
  }
  if (!c.intra_coulomb) return e;
  const double pref = coulomb_prefactor(cfg);
  std::vector<std::pair<double, Vec3>> pts;
  for (const auto& f : c.fixed) pts.emplace_back(f.q, f.position);
  for (std::size_t i = 0; i < c.mobile.size(); ++i) pts.emplace_back(c.mobile[i].q, pos[j][i]);
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      e += intra_pair(c, pref, pts[a].first, pts[a].second, pts[b].first, pts[b].second);
  return e;
}

double hamiltonian(const ClassicalConfig& cfg, const Positions& pos) {
  double e = cross_energy(cfg, pos);
  for (int j = 0; j < static_cast<int>(cfg.containers.size()); ++j) e += internal_energy(cfg, pos, j);
  return e;
}

Vec3 grad_d_hamiltonian(const ClassicalConfig& cfg, const Positions& pos, const std::string& label) {
  const int a = find_container(cfg, label);
  const double pref = coulomb_prefactor(cfg);
  auto charges = [&](int j) {
    std::vector<std::pair<double, Vec3>> pts;
    const Container& c = cfg.containers[j];
    for (const auto& f : c.fixed) pts.emplace_back(f.q, c.center + f.position);
    for (std::size_t i = 0; i < c.mobile.size(); ++i) pts.emplace_back(c.mobile[i].q, c.center + pos[j][i]);
    return pts;
  };
  const auto own = charges(a);
  Vec3 g = Vec3::Zero();
  for (int j = 0; j < static_cast<int>(cfg.containers.size()); ++j) {
    if (j == a) continue;
    for (const auto& s : charges(j))
      for (const auto& p : own) {
        const Vec3 r = p.second - s.second;
        const double n = r.norm();
        g -= pref * p.first * s.first / (n * n * n) * r;
      }
  }
  return g;
}

double laplacian_d_hamiltonian(const ClassicalConfig& cfg, const Positions& pos, const std::string& label) {
  const int a = find_container(cfg, label);
  const double pref = coulomb_prefactor(cfg);
  const Container& ca = cfg.containers[a];
  double lap = 0.0;
  auto visit = [&](double q, const Vec3& x) {
    for (int j = 0; j < static_cast<int>(cfg.containers.size()); ++j) {
      if (j == a) continue;
      const Container& c = cfg.containers[j];
      auto add = [&](double qs, const Vec3& xs) {
        const Vec3 r = x - xs;
        const double n2 = r.squaredNorm();
        const double n = std::sqrt(n2);
        const Eigen::Matrix3d hess = pref * q * qs * (3.0 * r * r.transpose() / (n2 * n2 * n) - Eigen::Matrix3d::Identity() / (n2 * n));
        lap += hess.trace();
      };
      for (const auto& f : c.fixed) add(f.q, c.center + f.position);
      for (std::size_t i = 0; i < c.mobile.size(); ++i) add(c.mobile[i].q, c.center + pos[j][i]);
    }
  };
  for (const auto& f : ca.fixed) visit(f.q, ca.center + f.position);
  for (std::size_t i = 0; i < ca.mobile.size(); ++i) visit(ca.mobile[i].q, ca.center + pos[a][i]);
  return lap;
}

namespace {

struct NodeSet {
  std::vector<Vec3> rel;
  std::vector<double> log_w;
};

NodeSet volume_nodes(const Container& c, int n) {
  NodeSet s;
  if (c.shape == Shape::Box) {
    const auto gx = quadrature::gauss_legendre(n, -c.half_extent.x(), c.half_extent.x());
    const auto gy = quadrature::gauss_legendre(n, -c.half_extent.y(), c.half_extent.y());
    const auto gz = quadrature::gauss_legendre(n, -c.half_extent.z(), c.half_extent.z());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          s.rel.emplace_back(gx.nodes[i], gy.nodes[j], gz.nodes[k]);
          s.log_w.push_back(std::log(gx.weights[i] * gy.weights[j] * gz.weights[k]));
        }
    return s;
  }
  const auto gr = quadrature::gauss_legendre(n, 0.0, c.radius);
  const auto gu = quadrature::gauss_legendre(n, -1.0, 1.0);
  const auto gp = quadrature::gauss_legendre(n, 0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double r = gr.nodes[i], u = gu.nodes[j], phi = gp.nodes[k];
        const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
        s.rel.emplace_back(r * st * std::cos(phi), r * st * std::sin(phi), r * u);
        s.log_w.push_back(std::log(gr.weights[i] * r * r * gu.weights[j] * gp.weights[k]));
      }
  return s;
}

// Energy with every mobile removed: fixed-fixed pairs across and inside containers.
double fixed_energy(const ClassicalConfig& cfg) {
  ClassicalConfig bare = cfg;
  Positions none(cfg.containers.size());
  for (auto& c : bare.containers) c.mobile.clear();
  return hamiltonian(bare, none);
}

// log Z at a fixed node count, mobiles integrated over their containers.
double log_partition(const ClassicalConfig& cfg, const std::vector<MobileRef>& mobiles, int n) {
  const double beta = cfg.beta;
  // One-body exponents per mobile; the mobile-mobile term is added in the pair loop.
  ClassicalConfig solo = cfg;
  for (auto& c : solo.containers) c.mobile.clear();
  std::vector<NodeSet> nodes;
  std::vector<std::vector<double>> a;
  for (const auto& m : mobiles) {
    ClassicalConfig one = solo;
    one.containers[m.container].mobile = {cfg.containers[m.container].mobile[m.index]};
    Positions p1(cfg.containers.size());
    p1[m.container].assign(1, Vec3::Zero());
    NodeSet ns = volume_nodes(cfg.containers[m.container], n);
    std::vector<double> ai(ns.rel.size());
    for (std::size_t i = 0; i < ns.rel.size(); ++i)
      ai[i] = ns.log_w[i] - beta * local_energy(one, p1, {m.container, 0}, ns.rel[i]);
    nodes.push_back(std::move(ns));
    a.push_back(std::move(ai));
  }

  auto log_sum_exp = [](const std::vector<double>& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(mx)) return mx;
    std::vector<double> e(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) e[i] = std::exp(v[i] - mx);
    return mx + std::log(quadrature::pairwise_sum(e));
  };

  if (mobiles.size() == 1) return log_sum_exp(a[0]);

  const Container& c0 = cfg.containers[mobiles[0].container];
  const Container& c1 = cfg.containers[mobiles[1].container];
  const double q0 = c0.mobile[mobiles[0].index].q, q1 = c1.mobile[mobiles[1].index].q;
  const bool same = mobiles[0].container == mobiles[1].container;
  const double pref = coulomb_prefactor(cfg);
  auto pair = [&](std::size_t i, std::size_t j) {
    const Vec3 x0 = c0.center + nodes[0].rel[i];
    const Vec3 x1 = c1.center + nodes[1].rel[j];
    if (!same) return pair_term(pref, q0, x0, q1, x1);
    if (!c0.intra_coulomb) return 0.0;
    return intra_pair(c0, pref, q0, x0, q1, x1);
  };
  const std::size_t n0 = a[0].size(), n1 = a[1].size();
  // Per-row log-sum-exp, then combine rows; rows run in parallel.
  std::vector<double> rows(n0);
  parallel_for(n0, [&](std::size_t i) {
    std::vector<double> v(n1);
    for (std::size_t j = 0; j < n1; ++j) v[j] = a[0][i] + a[1][j] - beta * pair(i, j);
    rows[i] = log_sum_exp(v);
  });
  return log_sum_exp(rows);
}

}  // namespace

FreeEnergy free_energy_quadrature(const ClassicalConfig& config, const std::string& label, const Vec3& d,
                                  const QuadratureOptions& opt) {
  ClassicalConfig cfg = config;
  cfg.containers[find_container(cfg, label)].center += d;
  validate(cfg);
  const auto mobiles = mobile_list(cfg);
  if (mobiles.size() > 2) throw CapabilityError("quadrature free energy supports at most two mobile charges");
  const double base = fixed_energy(cfg);
  if (mobiles.empty()) return {base, 0};
  if (!std::isfinite(cfg.beta)) throw DomainError("quadrature free energy needs finite beta");

  auto eval = [&](int n) {
    const double lz = log_partition(cfg, mobiles, n);
    if (!std::isfinite(lz)) throw PrecisionError("partition function vanished on the quadrature grid");
    return base - lz / cfg.beta;
  };
  if (opt.fixed_nodes > 0) return {eval(opt.fixed_nodes), opt.fixed_nodes};
  if (opt.initial_nodes < 2 || opt.max_nodes < opt.initial_nodes) throw ValidationError("bad quadrature node limits");

  int n = opt.initial_nodes;
  double prev = eval(n);
  while (2 * n <= opt.max_nodes) {
    n *= 2;
    const double cur = eval(n);
    // Relative to |F| with a thermal-energy floor so F near zero still terminates.
    const double scale = std::abs(cur) + 1.0 / cfg.beta;
    if (std::abs(cur - prev) <= opt.tol * scale) return {cur, n};
    prev = cur;
  }
  throw ConvergenceError("quadrature free energy did not converge", prev, std::nan(""));
}

double laplacian_F_fd(const ClassicalConfig& config, const std::string& label, double h, const QuadratureOptions& opt) {
  if (!(h > 0.0)) throw ValidationError("finite-difference step must be positive");
  QuadratureOptions fixed = opt;
  fixed.fixed_nodes = opt.fixed_nodes > 0 ? opt.fixed_nodes : free_energy_quadrature(config, label, Vec3::Zero(), opt).nodes;
  const double f0 = free_energy_quadrature(config, label, Vec3::Zero(), fixed).value;
  auto lap = [&](double s) {
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = s * Vec3::Unit(k);
      acc += free_energy_quadrature(config, label, e, fixed).value + free_energy_quadrature(config, label, -e, fixed).value - 2.0 * f0;
    }
    return acc / (s * s);
  };
  const double coarse = lap(h), fine = lap(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

namespace {

// Portable uniform draw in [0, 1); the standard distributions are not
// reproducible across library implementations.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Positions McRun::sample(const ClassicalConfig& config, std::size_t index) const {
  Positions pos(config.containers.size());
  std::size_t k = index * 3 * static_cast<std::size_t>(n_mobile);
  for (std::size_t j = 0; j < config.containers.size(); ++j)
    for (std::size_t i = 0; i < config.containers[j].mobile.size(); ++i, k += 3)
      pos[j].emplace_back(coords[k], coords[k + 1], coords[k + 2]);
  return pos;
}

McRun metropolis_run(const ClassicalConfig& cfg, const McOptions& opt) {
  validate(cfg);
  if (!(opt.step_size > 0.0) || !std::isfinite(opt.step_size)) throw ValidationError("step_size must be positive");
  if (opt.thin == 0 || opt.steps < opt.thin) throw ValidationError("need steps >= thin >= 1");

  const auto mobiles = mobile_list(cfg);
  std::mt19937_64 rng(opt.seed);
  Positions pos(cfg.containers.size());
  for (std::size_t j = 0; j < cfg.containers.size(); ++j) {
    const Container& c = cfg.containers[j];
    for (const auto& m : c.mobile) {
      const Vec3 start = m.tether && c.contains(m.tether->anchor) ? m.tether->anchor : Vec3::Zero();
      pos[j].push_back(start);
    }
  }
  // Coincident starts under a hard core: scatter until the state is admissible.
  for (int tries = 0; !std::isfinite(hamiltonian(cfg, pos)); ++tries) {
    if (tries == 10000) throw ValidationError("no admissible starting configuration found");
    for (const auto& m : mobiles) {
      const Container& c = cfg.containers[m.container];
      const Vec3 ext = c.shape == Shape::Sphere ? Vec3::Constant(c.radius) : c.half_extent;
      Vec3 r;
      do {
        for (int a = 0; a < 3; ++a) r[a] = (2.0 * uniform01(rng) - 1.0) * ext[a];
      } while (!c.contains(r));
      pos[m.container][m.index] = r;
    }
  }

  McRun run;
  run.n_mobile = static_cast<int>(mobiles.size());
  run.coords.reserve(static_cast<std::size_t>(opt.steps / opt.thin) * 3 * mobiles.size());
  std::uint64_t accepted = 0;
  const std::uint64_t total = opt.burn_in + opt.steps;
  for (std::uint64_t step = 0; step < total; ++step) {
    if (!mobiles.empty()) {
      const MobileRef& m = mobiles[rng() % mobiles.size()];
      Vec3& cur = pos[m.container][m.index];
      Vec3 trial = cur;
      for (int a = 0; a < 3; ++a) trial[a] += opt.step_size * (2.0 * uniform01(rng) - 1.0);
      const double u = uniform01(rng);
      const double e_new = local_energy(cfg, pos, m, trial);
      bool accept = false;
      if (std::isfinite(e_new)) {
        const double de = e_new - local_energy(cfg, pos, m, cur);
        // Compare without forming beta * 0 when beta is infinite.
        accept = de <= 0.0 || u < std::exp(-cfg.beta * de);
      }
      if (accept) {
        cur = trial;
        if (step >= opt.burn_in) ++accepted;
      }
    }
    if (step >= opt.burn_in && (step - opt.burn_in + 1) % opt.thin == 0) {
      for (const auto& m : mobiles) {
        const Vec3& p = pos[m.container][m.index];
        run.coords.insert(run.coords.end(), {p[0], p[1], p[2]});
      }
      ++run.n_samples;
    }
  }
  run.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(opt.steps);
  run.acceptance_warning = !mobiles.empty() && (run.acceptance_rate < 0.1 || run.acceptance_rate > 0.9);
  return run;
}

McEstimate blocking_analysis(std::span<const double> series) {
  constexpr std::size_t kMinBlocks = 32;
  const std::size_t n = series.size();
  if (n < 2 * kMinBlocks) throw PrecisionError("too few samples for blocking analysis");
  std::vector<double> x(series.begin(), series.end());
  McEstimate est;
  est.n_samples = n;
  est.mean = quadrature::pairwise_sum(x);
  est.mean /= static_cast<double>(n);

  auto level_error = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (double y : v) s += (y - est.mean) * (y - est.mean);
    const double m = static_cast<double>(v.size());
    return std::sqrt(s / (m * (m - 1.0)));
  };
  std::vector<double> errs;
  std::vector<std::size_t> sizes;
  while (x.size() >= kMinBlocks) {
    errs.push_back(level_error(x));
    sizes.push_back(x.size());
    std::vector<double> y(x.size() / 2);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.5 * (x[2 * i] + x[2 * i + 1]);
    x.swap(y);
  }
  if (errs[0] == 0.0) {
    est.autocorrelation_time = 0.5;
    return est;
  }
  // Plateau: first level whose successor does not exceed it by more than the
  // successor's own statistical uncertainty.
  for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
    const double delta = errs[k + 1] / std::sqrt(2.0 * (static_cast<double>(sizes[k + 1]) - 1.0));
    if (errs[k + 1] - errs[k] <= delta) {
      est.stderr_ = std::max(errs[k], errs[k + 1]);
      est.autocorrelation_time = 0.5 * (est.stderr_ / errs[0]) * (est.stderr_ / errs[0]);
      return est;
    }
  }
  throw PrecisionError("blocking analysis found no plateau; run a longer chain");
}

McEstimate laplacian_F_estimator(const ClassicalConfig& cfg, const std::string& label, const McRun& run) {
  find_container(cfg, label);
  const std::size_t n = run.n_samples;
  if (n < 64) throw PrecisionError("too few samples for the Laplacian estimator");
  std::vector<Vec3> g(n);
  Vec3 mean = Vec3::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const Positions p = run.sample(cfg, k);
    g[k] = grad_d_hamiltonian(cfg, p, label);
    mean += g[k];
  }
  mean /= static_cast<double>(n);
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) y[k] = (g[k] - mean).squaredNorm();
  McEstimate e = blocking_analysis(y);
  const double bessel = static_cast<double>(n) / static_cast<double>(n - 1);
  e.mean = -cfg.beta * e.mean * bessel;
  e.stderr_ = cfg.beta * e.stderr_ * bessel;
  return e;
}

}  // namespace earnshaw::classical
