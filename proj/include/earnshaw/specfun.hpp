#pragma once

// Special functions for multipole expansions at imaginary frequency.
//
// Normalization of the modified spherical Bessel functions (used everywhere
// in this library):
//
//   i_l(x) = sqrt(pi / (2x)) I_{l+1/2}(x)      i_0(x) = sinh(x) / x
//   k_l(x) = sqrt(2 / (pi x)) K_{l+1/2}(x)     k_0(x) = exp(-x) / x
//
// With this choice the Wronskian is  i_l k_l' - i_l' k_l = -1 / x^2  and the
// modified-Helmholtz Green's function expands as
//
//   exp(-kappa |x - x'|) / (4 pi |x - x'|)
//       = kappa * sum_{lm} i_l(kappa r<) k_l(kappa r>) Y_lm(x^) Y_lm*(x'^).
//
// Recurrences:
//   i_{l-1} - i_{l+1} =  (2l+1)/x i_l,   i_l' = i_{l+1} + l/x i_l
//   k_{l-1} - k_{l+1} = -(2l+1)/x k_l,   k_l' = -k_{l-1} - (l+1)/x k_l
//
// Spherical harmonics carry the Condon-Shortley phase.

#include <complex>
#include <cstdint>
#include <vector>

namespace earnshaw::specfun {

/// Highest multipole order the special functions are validated for.
inline constexpr int kMaxOrder = 60;

/// Value and derivative in scaled form: true value = value * exp(log_scale).
/// For i_l the scale is +x, for k_l it is -x, so large arguments never
/// overflow.
struct ScaledBessel {
  double value = 0.0;
  double deriv = 0.0;
  double log_scale = 0.0;

  double true_value() const;
  double true_deriv() const;
};

/// Unscaled evaluation record; values can overflow for large x.
struct BesselEval {
  int l = 0;
  double x = 0.0;
  double i_value = 0.0;
  double k_value = 0.0;
  double i_deriv = 0.0;
  double k_deriv = 0.0;
};

ScaledBessel mod_sph_bessel_i(int l, double x);
ScaledBessel mod_sph_bessel_k(int l, double x);
BesselEval mod_sph_bessel(int l, double x);

/// Scaled values exp(-x) i_l(x) and derivatives for l = 0..lmax.
struct ScaledBesselArray {
  std::vector<double> value;
  std::vector<double> deriv;
  double log_scale = 0.0;
};
ScaledBesselArray mod_sph_bessel_i_array(int lmax, double x);
/// Scaled values exp(x) k_l(x) and derivatives for l = 0..lmax. No order
/// limit: upward recurrence is stable for k_l.
ScaledBesselArray mod_sph_bessel_k_array(int lmax, double x);

/// Orthonormal associated Legendre functions, including the Condon-Shortley
/// phase, such that Y_lm(theta, phi) = P̄_l^m(cos theta) exp(i m phi) for
/// m >= 0. Indexed by legendre_index(l, m).
std::vector<double> normalized_legendre(int lmax, double cos_theta);
inline int legendre_index(int l, int m) { return l * (l + 1) / 2 + m; }

/// Complex spherical harmonic Y_lm for -l <= m <= l.
std::complex<double> spherical_harmonic(int l, int m, double theta, double phi);

/// All Y_lm for l <= lmax at one direction, indexed by l*l + l + m.
std::vector<std::complex<double>> spherical_harmonics(int lmax, double theta, double phi);
inline int lm_index(int l, int m) { return l * l + l + m; }

/// Wigner 3j symbol, evaluated by exact integer arithmetic and rounded to
/// double once at the end. Results are memoized; the cache is safe for
/// concurrent use.
double wigner3j(int l1, int l2, int l3, int m1, int m2, int m3);

/// Gaunt integral: int dOmega Y_{l1 m1} Y_{l2 m2} Y_{l3 m3}.
double gaunt(int l1, int m1, int l2, int m2, int l3, int m3);

}  // namespace earnshaw::specfun
