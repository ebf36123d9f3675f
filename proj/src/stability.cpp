#include "earnshaw/stability.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/LU>

#include "earnshaw/errors.hpp"
#include "earnshaw/parallel.hpp"
#include "earnshaw/quadrature.hpp"
#include "earnshaw/translation.hpp"
#include "kernel.hpp"

namespace earnshaw::stability {

namespace {

using casimir::Configuration;
using Eigen::MatrixXd;

struct Setup {
  int index = 0;
  int l_max = 0;
  double h = 0.0;
  std::vector<casimir::IntegrandSample> grid;
};

double object_gap(const Configuration& c, int index) {
  double g = std::numeric_limits<double>::infinity();
  const auto& a = c.objects[index];
  for (std::size_t j = 0; j < c.objects.size(); ++j) {
    if (static_cast<int>(j) == index) continue;
    const auto& b = c.objects[j];
    g = std::min(g, (a.center - b.center).norm() - a.radius - b.radius);
  }
  return g;
}

Setup make_setup(const Configuration& config, const std::string& label, const StabilityOptions& opt) {
  casimir::validate(config);
  if (config.tau != 0.0) throw CapabilityError("stability analysis is implemented for tau = 0");
  if (!(opt.h_rel > 0.0) || opt.h_rel >= 0.1) throw ValidationError("h_rel must lie in (0, 0.1)");
  if (opt.nodes < 2) throw ValidationError("at least two frequency nodes are required");
  Setup s;
  s.index = casimir::find_object(config, label);
  s.l_max = opt.l_max > 0 ? opt.l_max : casimir::default_lmax(config);
  s.h = opt.h_rel * object_gap(config, s.index);
  s.grid = casimir::frequency_grid(config, opt.nodes);
  return s;
}

Configuration displaced(const Configuration& c, int index, const Vec3& delta) {
  Configuration out = c;
  out.objects[index].center += delta;
  return out;
}

struct Probe {
  Vec3 force_h = Vec3::Zero(), force_half = Vec3::Zero();
  Vec3 curv_h = Vec3::Zero(), curv_half = Vec3::Zero();
  double lap_h = 0.0, lap_half = 0.0;
};

Probe probe(const Configuration& config, const Setup& s, bool richardson) {
  auto energy_at = [&](const Vec3& delta) {
    return casimir::energy_on_grid(displaced(config, s.index, delta), s.grid, s.l_max);
  };
  Probe p;
  const double e0 = energy_at(Vec3::Zero());
  for (int j = 0; j < 3; ++j) {
    for (int level = 0; level < (richardson ? 2 : 1); ++level) {
      const double h = level == 0 ? s.h : 0.5 * s.h;
      Vec3 e = Vec3::Zero();
      e[j] = h;
      const double ep = energy_at(e), em = energy_at(-e);
      const double f = -(ep - em) / (2.0 * h);
      const double l = (ep + em - 2.0 * e0) / (h * h);
      if (level == 0) {
        p.force_h[j] = f;
        p.curv_h[j] = l;
        p.lap_h += l;
      } else {
        p.force_half[j] = f;
        p.curv_half[j] = l;
        p.lap_half += l;
      }
    }
  }
  return p;
}

// Block (i, j) of the primed translation X'(c_i - c_j) from the kernel storage.
MatrixXd x_block(const kernel::Frequency& f, int i, int j) { return i < j ? f.x[i][j] : MatrixXd(f.x[j][i].transpose()); }

struct Traces {
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
};

Traces traces_at(const Configuration& config, const kernel::Geometry& geom, int a, double kappa, int l_max) {
  const auto f = kernel::build(config, geom, kappa, l_max);
  const int b = f.block;
  std::vector<int> rest;
  for (int j = 0; j < static_cast<int>(config.objects.size()); ++j)
    if (j != a) rest.push_back(j);
  const int k = static_cast<int>(rest.size());

  // Merged rest: T_R = (I - D X_RR)^-1 D.
  MatrixXd d = MatrixXd::Zero(k * b, k * b), xrr = MatrixXd::Zero(k * b, k * b);
  for (int p = 0; p < k; ++p) {
    d.block(p * b, p * b, b, b) = f.t[rest[p]].asDiagonal();
    for (int q = 0; q < k; ++q)
      if (p != q) xrr.block(p * b, q * b, b, b) = x_block(f, rest[p], rest[q]);
  }
  const MatrixXd tr = (MatrixXd::Identity(k * b, k * b) - d * xrr).partialPivLu().solve(d);

  MatrixXd g(b, k * b);
  std::array<MatrixXd, 3> dg;
  for (auto& m : dg) m.resize(b, k * b);
  for (int p = 0; p < k; ++p) {
    const int j = rest[p];
    g.block(0, p * b, b, b) = x_block(f, a, j);
    const Vec3 sep = geom.centers[a] - geom.centers[j];
    const double gap = sep.norm() - config.objects[a].radius - config.objects[j].radius;
    const auto grad = translation::translation_gradient(config.medium, kappa, sep, l_max, 1e-3 * sep.norm(), true);
    for (int c = 0; c < 3; ++c) dg[c].block(0, p * b, b, b) = grad[c] * std::exp(-f.kappa_m * gap);
  }

  const Eigen::VectorXd ta = f.t[a];
  const MatrixXd trg = tr * g.transpose();
  const MatrixXd n = ta.asDiagonal() * (g * trg);
  Eigen::PartialPivLU<MatrixXd> lu(MatrixXd::Identity(b, b) - n);
  if (!(lu.determinant() > 0.0))
    throw TruncationError("unphysical truncation: I - N is not positive; increase l_max");
  const MatrixXd r = lu.inverse();

  Traces t;
  t.t1 = 2.0 * f.kappa_m * f.kappa_m * (r * n).trace();
  // J = T_R is symmetric for reciprocal media, so G T_R dG^T = (dG T_R G^T)^T.
  for (int c = 0; c < 3; ++c) {
    const MatrixXd p = ta.asDiagonal() * (dg[c] * trg);
    const MatrixXd q = ta.asDiagonal() * (g * (tr * dg[c].transpose()));
    t.t2 += 2.0 * (r * (ta.asDiagonal() * (dg[c] * (tr * dg[c].transpose())))).trace();
    const MatrixXd rdn = r * (p + q);
    t.t3 += (rdn * rdn).trace();
  }
  return t;
}

}  // namespace

Vec3 force(const Configuration& config, const std::string& label, const StabilityOptions& opt) {
  const Setup s = make_setup(config, label, opt);
  StabilityOptions o = opt;
  const Probe p = probe(config, s, o.richardson);
  return o.richardson ? Vec3((4.0 * p.force_half - p.force_h) / 3.0) : p.force_h;
}

double laplacian_fd(const Configuration& config, const std::string& label, const StabilityOptions& opt) {
  const Setup s = make_setup(config, label, opt);
  const Probe p = probe(config, s, opt.richardson);
  return opt.richardson ? (4.0 * p.lap_half - p.lap_h) / 3.0 : p.lap_h;
}

Decomposition laplacian_decomposition(const Configuration& config, const std::string& label,
                                      const StabilityOptions& opt) {
  const Setup s = make_setup(config, label, opt);
  const auto geom = kernel::prepare_geometry(config);
  std::vector<Traces> per(s.grid.size());
  parallel_for(s.grid.size(), [&](std::size_t i) { per[i] = traces_at(config, geom, s.index, s.grid[i].kappa, s.l_max); });
  std::vector<double> a(per.size()), b(per.size()), c(per.size());
  for (std::size_t i = 0; i < per.size(); ++i) {
    a[i] = s.grid[i].weight * per[i].t1;
    b[i] = s.grid[i].weight * per[i].t2;
    c[i] = s.grid[i].weight * per[i].t3;
  }
  return {quadrature::pairwise_sum(a), quadrature::pairwise_sum(b), quadrature::pairwise_sum(c)};
}

std::optional<int> predicted_sign_product(const Configuration& config, const std::string& label) {
  const int index = casimir::find_object(config, label);
  std::vector<double> kappas;
  for (const auto& g : casimir::frequency_grid(config, 16)) kappas.push_back(g.kappa);
  auto cls = [&](const scattering::SphereObject& o) { return materials::classify(o.eps, o.mu, config.medium, kappas); };
  const auto ca = cls(config.objects[index]);
  std::optional<int> rest_sign = 0;
  for (std::size_t j = 0; j < config.objects.size(); ++j) {
    if (static_cast<int>(j) == index) continue;
    const auto c = cls(config.objects[j]);
    if (!c.sign) return std::nullopt;
    if (*c.sign == 0) continue;
    if (*rest_sign == 0) rest_sign = c.sign;
    else if (*rest_sign != *c.sign) return std::nullopt;
  }
  materials::Classification cr;
  cr.sign = rest_sign;
  cr.cls = *rest_sign > 0 ? materials::MaterialClass::ClassI
           : *rest_sign < 0 ? materials::MaterialClass::ClassII
                            : materials::MaterialClass::Neutral;
  return materials::sign_product(ca, cr);
}

StabilityReport stability_report(const Configuration& config, const std::string& label, const StabilityOptions& opt,
                                 bool with_decomposition) {
  const Setup s = make_setup(config, label, opt);
  const Probe p = probe(config, s, opt.richardson);
  StabilityReport r;
  r.object_label = label;
  r.h_used = s.h;
  r.l_max_used = s.l_max;
  r.nodes_used = opt.nodes;
  r.laplacian_raw = p.lap_h;
  if (opt.richardson) {
    r.force = (4.0 * p.force_half - p.force_h) / 3.0;
    r.laplacian = (4.0 * p.lap_half - p.lap_h) / 3.0;
    r.curvature = (4.0 * p.curv_half - p.curv_h) / 3.0;
    r.est_error = std::abs(r.laplacian - p.lap_half);
  } else {
    r.force = p.force_h;
    r.laplacian = p.lap_h;
    r.curvature = p.curv_h;
  }
  r.predicted_sign_product = predicted_sign_product(config, label);
  if (with_decomposition) r.decomposition = laplacian_decomposition(config, label, opt);
  return r;
}

Equilibrium find_axial_equilibrium(const Configuration& config, const std::string& label, const Vec3& axis,
                                   std::pair<double, double> bracket, const StabilityOptions& opt, double xtol) {
  if (!(axis.norm() > 0.0)) throw ValidationError("axis must be non-zero");
  const Vec3 u = axis.normalized();
  const int index = casimir::find_object(config, label);
  const Vec3 start = config.objects[index].center;
  // A common grid and l_max for every probe along the bracket.
  StabilityOptions o = opt;
  if (o.l_max <= 0) o.l_max = casimir::default_lmax(config);
  auto at = [&](double s) {
    Configuration c = config;
    c.objects[index].center = start + s * u;
    return c;
  };
  auto f_axial = [&](double s) { return force(at(s), label, o).dot(u); };

  Equilibrium eq;
  double lo = bracket.first, hi = bracket.second;
  double flo = f_axial(lo), fhi = f_axial(hi);
  if (flo == 0.0) hi = lo;
  else if (fhi == 0.0) lo = hi;
  else if ((flo > 0) == (fhi > 0)) return eq;
  while (hi - lo > xtol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f_axial(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  eq.found = true;
  eq.offset = 0.5 * (lo + hi);
  eq.position = start + eq.offset * u;
  eq.report = stability_report(at(eq.offset), label, o, false);
  return eq;
}

}  // namespace earnshaw::stability
