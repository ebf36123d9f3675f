#include "earnshaw/casimir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "earnshaw/errors.hpp"
#include "earnshaw/parallel.hpp"
#include "earnshaw/quadrature.hpp"
#include "earnshaw/specfun.hpp"
#include "earnshaw/translation.hpp"
#include "kernel.hpp"

namespace earnshaw::casimir {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool any_diverges_at_zero(const Configuration& c) {
  if (c.medium.eps.diverges_at_zero() || c.medium.mu.diverges_at_zero()) return true;
  for (const auto& o : c.objects)
    if (o.eps.diverges_at_zero() || o.mu.diverges_at_zero()) return true;
  return false;
}

double integrate(const Configuration& config, const kernel::Geometry& geom, std::vector<IntegrandSample>& grid,
                 int l_max, bool eigen_diagnostics, std::optional<double>& min_eig) {
  std::vector<std::optional<double>> eig(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const auto f = kernel::build(config, geom, grid[i].kappa, l_max);
    const auto ld = kernel::log_det(f, geom.axial, eigen_diagnostics);
    grid[i].integrand = ld.value;
    eig[i] = ld.min_eigenvalue;
  });
  std::vector<double> terms(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    terms[i] = grid[i].weight * grid[i].integrand;
    if (eig[i]) min_eig = min_eig ? std::min(*min_eig, *eig[i]) : *eig[i];
  }
  return quadrature::pairwise_sum(terms);
}

bool converged(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b) || (a == 0.0 && b == 0.0); }

double rel_change(double a, double b) { return b == 0.0 ? (a == 0.0 ? 0.0 : 1.0) : std::abs(a - b) / std::abs(b); }

int initial_lmax(const Configuration& config, const EnergyOptions& opt) {
  const int l = opt.l_max > 0 ? opt.l_max : default_lmax(config);
  if (l > specfun::kMaxOrder) throw CapabilityError("l_max exceeds the supported multipole order");
  return l;
}

}  // namespace

void validate(const Configuration& config) {
  if (config.objects.size() < 2) throw ValidationError("a configuration needs at least two objects");
  if (!(config.tau >= 0.0) || !std::isfinite(config.tau)) throw ValidationError("tau must be finite and >= 0");
  if (config.medium.eps.is_perfect_conductor() || config.medium.mu.is_perfect_conductor())
    throw ValidationError("the medium cannot be a perfect conductor");
  std::set<std::string> labels;
  for (const auto& o : config.objects) {
    if (!(o.radius > 0.0) || !std::isfinite(o.radius)) throw ValidationError("sphere radius must be positive");
    if (!o.center.allFinite()) throw ValidationError("sphere center must be finite");
    if (o.mu.is_perfect_conductor()) throw ValidationError("mu cannot be a perfect conductor");
    if (!o.label.empty() && !labels.insert(o.label).second) throw ValidationError("duplicate label: " + o.label);
  }
  for (std::size_t i = 0; i < config.objects.size(); ++i)
    for (std::size_t j = i + 1; j < config.objects.size(); ++j) {
      const auto& a = config.objects[i];
      const auto& b = config.objects[j];
      if ((a.center - b.center).norm() - a.radius - b.radius <= 0.0)
        throw GeometryError("objects overlap or touch: " + a.label + ", " + b.label);
    }
}

double min_gap(const Configuration& config) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < config.objects.size(); ++i)
    for (std::size_t j = i + 1; j < config.objects.size(); ++j) {
      const auto& a = config.objects[i];
      const auto& b = config.objects[j];
      g = std::min(g, (a.center - b.center).norm() - a.radius - b.radius);
    }
  return g;
}

int default_lmax(const Configuration& config) {
  double r = 0.0;
  for (const auto& o : config.objects) r = std::max(r, o.radius);
  const double l = std::ceil(5.0 + 8.0 * r / min_gap(config));
  return static_cast<int>(std::min<double>(l, specfun::kMaxOrder));
}

int find_object(const Configuration& config, const std::string& label) {
  for (std::size_t i = 0; i < config.objects.size(); ++i)
    if (config.objects[i].label == label) return static_cast<int>(i);
  throw ValidationError("no object labelled '" + label + "'");
}

int tmatrix_sign(const scattering::SphereObject& object, const materials::Medium& medium, double kappa, int l_max) {
  return scattering::to_sign(scattering::definiteness(scattering::mie_tmatrix(object, medium, kappa, l_max), 0.0));
}

Eigen::MatrixXd assemble_block_matrix(const Configuration& config, double kappa, int l_max) {
  validate(config);
  if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
  const int n = static_cast<int>(config.objects.size());
  std::vector<scattering::TMatrix> t;
  for (const auto& o : config.objects) t.push_back(scattering::mie_tmatrix(o, config.medium, kappa, l_max));
  const int b = 2 * scattering::multipole_count(l_max);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n * b, n * b);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto x = translation::translation_matrix(config.medium, kappa,
                                                     config.objects[i].center - config.objects[j].center, l_max);
      m.block(i * b, j * b, b, b) = -(t[i].dense() * x.value());
    }
  return m;
}

IntegrandValue log_det_integrand_checked(const Configuration& config, double kappa, int l_max,
                                         bool eigen_diagnostics) {
  validate(config);
  if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
  const auto geom = kernel::prepare_geometry(config);
  const auto f = kernel::build(config, geom, kappa, l_max);
  const auto ld = kernel::log_det(f, geom.axial, eigen_diagnostics);
  return {ld.value, ld.min_eigenvalue};
}

double log_det_integrand(const Configuration& config, double kappa, int l_max) {
  return log_det_integrand_checked(config, kappa, l_max, false).value;
}

double trace_log_integrand(const Configuration& config, double kappa, int l_max) {
  validate(config);
  if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
  const auto geom = kernel::prepare_geometry(config);
  return kernel::trace_log(kernel::build(config, geom, kappa, l_max), geom.axial);
}

std::vector<IntegrandSample> frequency_grid(const Configuration& config, int nodes) {
  const auto rule = quadrature::semi_infinite(nodes, 1.0 / min_gap(config));
  std::vector<IntegrandSample> grid(rule.nodes.size());
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = {rule.nodes[i], 0.0, rule.weights[i] / kTwoPi};
  return grid;
}

double energy_on_grid(const Configuration& config, const std::vector<IntegrandSample>& grid, int l_max) {
  validate(config);
  auto g = grid;
  std::optional<double> eig;
  return integrate(config, kernel::prepare_geometry(config), g, l_max, false, eig);
}

EnergyResult energy_T0(const Configuration& config, const EnergyOptions& opt) {
  validate(config);
  if (config.tau != 0.0) throw ValidationError("energy_T0 requires tau = 0");
  const auto geom = kernel::prepare_geometry(config);
  EnergyResult res;
  int l = initial_lmax(config, opt);

  auto run = [&](int nodes, int lm, std::vector<IntegrandSample>& grid) {
    grid = frequency_grid(config, nodes);
    return integrate(config, geom, grid, lm, opt.eigen_diagnostics, res.min_eigenvalue);
  };

  std::vector<IntegrandSample> grid;
  int nodes = opt.fixed_nodes > 0 ? opt.fixed_nodes : opt.initial_nodes;
  double e = run(nodes, l, grid);
  double node_err = 0.0;
  if (opt.fixed_nodes <= 0) {
    for (;;) {
      if (2 * nodes > opt.max_nodes)
        throw ConvergenceError("frequency quadrature did not converge within the node budget", e, node_err);
      std::vector<IntegrandSample> g2;
      const double e2 = run(2 * nodes, l, g2);
      node_err = rel_change(e, e2);
      nodes *= 2;
      e = e2;
      grid = std::move(g2);
      if (node_err <= opt.tol || (e == 0.0)) break;
    }
  }
  double l_err = 0.0;
  if (opt.adapt_lmax) {
    for (;;) {
      const int l2 = std::min(2 * l, std::min(opt.max_lmax, specfun::kMaxOrder));
      if (l2 <= l) throw ConvergenceError("multipole truncation did not converge within max_lmax", e, l_err);
      std::vector<IntegrandSample> g2;
      const double e2 = run(nodes, l2, g2);
      l_err = rel_change(e, e2);
      const bool done = converged(e, e2, opt.tol);
      l = l2;
      e = e2;
      grid = std::move(g2);
      if (done) break;
    }
  }
  res.value = e;
  res.l_max_used = l;
  res.node_count = nodes;
  res.est_rel_error = std::max(node_err, l_err);
  res.samples = std::move(grid);
  return res;
}

EnergyResult free_energy_T(const Configuration& config, const EnergyOptions& opt) {
  validate(config);
  if (!(config.tau > 0.0)) throw ValidationError("free_energy_T requires tau > 0");
  const auto geom = kernel::prepare_geometry(config);
  const double tau = config.tau;
  EnergyResult res;
  res.zero_frequency_floor = any_diverges_at_zero(config);

  auto matsubara = [&](int lm, std::vector<IntegrandSample>& samples) {
    samples.clear();
    std::vector<double> terms;
    const std::size_t batch = std::max<std::size_t>(16, 4 * max_threads());
    std::size_t n0 = 0;
    for (;;) {
      if (n0 >= static_cast<std::size_t>(opt.max_matsubara)) {
        const double partial = quadrature::pairwise_sum(terms);
        throw ConvergenceError("Matsubara sum did not converge within the term budget", partial, 1.0);
      }
      std::vector<IntegrandSample> chunk(batch);
      for (std::size_t k = 0; k < batch; ++k) {
        const std::size_t n = n0 + k;
        // The n = 0 term is the kappa -> 0 limit, realized at the floor.
        chunk[k].kappa = n == 0 ? kKappaFloor : static_cast<double>(n) * tau;
        chunk[k].weight = tau / kTwoPi * (n == 0 ? 0.5 : 1.0);
      }
      integrate(config, geom, chunk, lm, opt.eigen_diagnostics, res.min_eigenvalue);
      for (auto& s : chunk) {
        terms.push_back(s.weight * s.integrand);
        samples.push_back(s);
      }
      n0 += batch;
      const double sum = quadrature::pairwise_sum(terms);
      const double last = std::abs(terms[terms.size() - 1]);
      const double prev = std::abs(terms[terms.size() - 2]);
      if (last == 0.0) return std::make_pair(sum, 0.0);
      const double ratio = last / prev;
      if (ratio < 1.0) {
        const double tail = last * ratio / (1.0 - ratio);
        if (tail <= opt.tol * std::abs(sum)) return std::make_pair(sum, tail / std::abs(sum));
      }
    }
  };

  int l = initial_lmax(config, opt);
  std::vector<IntegrandSample> samples;
  auto [e, tail_err] = matsubara(l, samples);
  double l_err = 0.0;
  if (opt.adapt_lmax) {
    for (;;) {
      const int l2 = std::min(2 * l, std::min(opt.max_lmax, specfun::kMaxOrder));
      if (l2 <= l) throw ConvergenceError("multipole truncation did not converge within max_lmax", e, l_err);
      std::vector<IntegrandSample> s2;
      auto [e2, t2] = matsubara(l2, s2);
      l_err = rel_change(e, e2);
      const bool done = converged(e, e2, opt.tol);
      l = l2;
      e = e2;
      tail_err = t2;
      samples = std::move(s2);
      if (done) break;
    }
  }
  res.value = e;
  res.l_max_used = l;
  res.node_count = static_cast<int>(samples.size());
  res.est_rel_error = std::max(tail_err, l_err);
  res.samples = std::move(samples);
  return res;
}

EnergyResult energy(const Configuration& config, const EnergyOptions& options) {
  return config.tau > 0.0 ? free_energy_T(config, options) : energy_T0(config, options);
}

double lifshitz_plates(const materials::Medium& plate1, const materials::Medium& plate2,
                       const materials::Medium& medium, double gap, double tau, double tol) {
  if (!(gap > 0.0) || !std::isfinite(gap)) throw ValidationError("plate gap must be positive");
  if (!(tau >= 0.0)) throw ValidationError("tau must be >= 0");
  // ln(1 - r1 r2 exp(-2 q_M gap)) summed over polarizations.
  auto integrand = [&](double kappa, double k) {
    const auto r1 = scattering::fresnel_reflection(plate1.eps, plate1.mu, medium, kappa, k);
    const auto r2 = scattering::fresnel_reflection(plate2.eps, plate2.mu, medium, kappa, k);
    const double q = std::sqrt(k * k + medium.epsilon(kappa) * medium.permeability(kappa) * kappa * kappa);
    const double e = std::exp(-2.0 * q * gap);
    return std::log1p(-r1.r_te * r2.r_te * e) + std::log1p(-r1.r_tm * r2.r_tm * e);
  };
  auto refine = [&](auto eval) {
    int n = 32;
    double prev = eval(n);
    for (; n <= 4096; n *= 2) {
      const double next = eval(2 * n);
      if (std::abs(next - prev) <= tol * std::abs(next) || next == 0.0) return next;
      prev = next;
    }
    throw ConvergenceError("Lifshitz quadrature did not converge", prev, 1.0);
  };

  if (tau == 0.0) {
    // Polar coordinates in the (kappa, k) quarter plane.
    return refine([&](int n) {
      const auto rho = quadrature::semi_infinite(n, 1.0 / gap);
      const auto phi = quadrature::gauss_legendre(std::max(8, n / 4), 0.0, std::numbers::pi / 2);
      std::vector<double> terms;
      for (std::size_t i = 0; i < rho.nodes.size(); ++i)
        for (std::size_t j = 0; j < phi.nodes.size(); ++j) {
          const double r = rho.nodes[i], c = std::cos(phi.nodes[j]), s = std::sin(phi.nodes[j]);
          terms.push_back(rho.weights[i] * phi.weights[j] * r * r * s * integrand(r * c, r * s));
        }
      return quadrature::pairwise_sum(terms) / (4.0 * std::numbers::pi * std::numbers::pi);
    });
  }

  const bool floor0 = plate1.eps.diverges_at_zero() || plate2.eps.diverges_at_zero() ||
                      plate1.mu.diverges_at_zero() || plate2.mu.diverges_at_zero() ||
                      medium.eps.diverges_at_zero() || medium.mu.diverges_at_zero();
  return refine([&](int n) {
    const auto kr = quadrature::semi_infinite(n, 1.0 / gap);
    std::vector<double> terms;
    for (int m = 0;; ++m) {
      const double kappa = m == 0 ? (floor0 ? kKappaFloor : 0.0) : m * tau;
      std::vector<double> inner;
      for (std::size_t i = 0; i < kr.nodes.size(); ++i)
        inner.push_back(kr.weights[i] * kr.nodes[i] * integrand(kappa, kr.nodes[i]));
      const double v = quadrature::pairwise_sum(inner) / kTwoPi * (m == 0 ? 0.5 : 1.0);
      terms.push_back(v);
      if (m > 2 && std::abs(v) <= 1e-3 * tol * std::abs(quadrature::pairwise_sum(terms))) break;
      if (m > 10000000) throw ConvergenceError("Matsubara sum for plates did not converge", 0.0, 1.0);
    }
    return tau / kTwoPi * quadrature::pairwise_sum(terms);
  });
}

}  // namespace earnshaw::casimir
