#include "earnshaw/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "earnshaw/errors.hpp"
#include "earnshaw/specfun.hpp"

namespace earnshaw::scattering {

double TMatrix::entry(Polarization p, int l) const { return scaled(p, l) * std::exp(log_scale); }

Eigen::VectorXd TMatrix::scaled_diagonal() const {
  const int n = multipole_count(l_max);
  Eigen::VectorXd diag(2 * n);
  for (int l = 1; l <= l_max; ++l) {
    for (int m = -l; m <= l; ++m) {
      diag[vector_index(Polarization::Magnetic, l, m, l_max)] = magnetic[l - 1];
      diag[vector_index(Polarization::Electric, l, m, l_max)] = electric[l - 1];
    }
  }
  return diag;
}

Eigen::MatrixXd TMatrix::dense() const {
  Eigen::VectorXd diag = scaled_diagonal() * std::exp(log_scale);
  return diag.asDiagonal();
}

TMatrix mie_tmatrix(const SphereObject& sphere, const materials::Medium& medium, double kappa, int l_max) {
  if (!(sphere.radius > 0.0) || !std::isfinite(sphere.radius)) throw ValidationError("sphere radius must be positive");
  if (l_max < 1) throw ValidationError("l_max must be >= 1");
  if (l_max > specfun::kMaxOrder) throw CapabilityError("l_max exceeds the supported multipole order");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("T-matrix requires kappa > 0");

  const double eps_m = medium.epsilon(kappa);
  const double mu_m = medium.permeability(kappa);
  const double n_m = medium.index(kappa);
  const double x = n_m * kappa * sphere.radius;

  TMatrix t;
  t.kappa = kappa;
  t.l_max = l_max;
  t.log_scale = 2.0 * x;
  t.magnetic.resize(l_max);
  t.electric.resize(l_max);

  const auto bi_x = specfun::mod_sph_bessel_i_array(l_max, x);
  const auto bk_x = specfun::mod_sph_bessel_k_array(l_max, x);

  if (sphere.eps.is_perfect_conductor()) {
    for (int l = 1; l <= l_max; ++l) {
      const double i = bi_x.value[l], k = bk_x.value[l];
      const double xi = i + x * bi_x.deriv[l];
      const double xk = k + x * bk_x.deriv[l];
      t.magnetic[l - 1] = i / k;
      t.electric[l - 1] = -xi / xk;
    }
    return t;
  }

  const double eps_j = materials::eval_epsilon(sphere.eps, kappa);
  const double mu_j = materials::eval_epsilon(sphere.mu, kappa);
  const double y = std::sqrt(eps_j * mu_j) * kappa * sphere.radius;
  const auto bi_y = specfun::mod_sph_bessel_i_array(l_max, y);

  for (int l = 1; l <= l_max; ++l) {
    const double ix = bi_x.value[l], kx = bk_x.value[l], iy = bi_y.value[l];
    const double dix = ix + x * bi_x.deriv[l];
    const double dkx = kx + x * bk_x.deriv[l];
    const double diy = iy + y * bi_y.deriv[l];
    // Common factors exp(x + y) and exp(y - x) cancel into log_scale.
    const double num_m = mu_m * ix * diy - mu_j * iy * dix;
    const double den_m = mu_j * iy * dkx - mu_m * kx * diy;
    const double num_n = eps_m * ix * diy - eps_j * iy * dix;
    const double den_n = eps_j * iy * dkx - eps_m * kx * diy;
    t.magnetic[l - 1] = -num_m / den_m;
    t.electric[l - 1] = num_n / den_n;
  }
  return t;
}

Reflection fresnel_reflection(const materials::DispersionModel& eps, const materials::DispersionModel& mu,
                              const materials::Medium& medium, double kappa, double k_transverse) {
  if (!(kappa >= 0.0) || !(k_transverse >= 0.0)) throw DomainError("kappa and k_transverse must be >= 0");
  if (eps.is_perfect_conductor()) return {-1.0, 1.0};
  const double eps_m = medium.epsilon(kappa), mu_m = medium.permeability(kappa);
  const double eps_1 = materials::eval_epsilon(eps, kappa), mu_1 = materials::eval_epsilon(mu, kappa);
  const double kt2 = k_transverse * k_transverse;
  const double q_m = std::sqrt(kt2 + eps_m * mu_m * kappa * kappa);
  const double q_1 = std::sqrt(kt2 + eps_1 * mu_1 * kappa * kappa);
  if (q_m + q_1 == 0.0) throw DomainError("Fresnel coefficients undefined at kappa = k_transverse = 0");
  return {(mu_1 * q_m - mu_m * q_1) / (mu_1 * q_m + mu_m * q_1),
          (eps_1 * q_m - eps_m * q_1) / (eps_1 * q_m + eps_m * q_1)};
}

namespace {

Definiteness classify_values(const Eigen::VectorXd& v, double tol) {
  if (v.size() == 0) return Definiteness::Zero;
  const double scale = v.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) throw PrecisionError("non-finite T-matrix entries");
  if (scale == 0.0) return Definiteness::Zero;
  const double thr = tol * scale;
  const double lo = v.minCoeff(), hi = v.maxCoeff();
  if (lo >= -thr && hi <= thr) return Definiteness::Zero;
  if (lo >= -thr) return Definiteness::Positive;
  if (hi <= thr) return Definiteness::Negative;
  return Definiteness::Mixed;
}

}  // namespace

Definiteness definiteness(const Eigen::MatrixXd& t, double tol) {
  if (t.rows() != t.cols()) throw ValidationError("definiteness requires a square matrix");
  Eigen::MatrixXd sym = 0.5 * (t + t.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return classify_values(es.eigenvalues(), tol);
}

Definiteness definiteness(const TMatrix& t, double tol) { return classify_values(t.scaled_diagonal(), tol); }

int to_sign(Definiteness d) {
  switch (d) {
    case Definiteness::Positive: return 1;
    case Definiteness::Negative: return -1;
    case Definiteness::Zero: return 0;
    case Definiteness::Mixed: break;
  }
  return 2;
}

std::string to_string(Definiteness d) {
  switch (d) {
    case Definiteness::Positive: return "positive";
    case Definiteness::Negative: return "negative";
    case Definiteness::Zero: return "zero";
    case Definiteness::Mixed: break;
  }
  return "mixed";
}

}  // namespace earnshaw::scattering
