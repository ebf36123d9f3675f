#pragma once

// Translation matrices of vector spherical waves at imaginary frequency.
//
// Waves about an origin, with kappa_M = n_M kappa:
//   scalar  phi^reg_lm = i_l(kappa_M r) Y_lm,  phi^out_lm = k_l(kappa_M r) Y_lm
//   vector  M_lm = curl(r phi_lm) / sqrt(l(l+1)),  N_lm = curl(M_lm) / kappa_M
//
// translation_matrix(d) re-expands outgoing waves about an origin O in
// regular waves about O + d:
//   W^out_c(x - O) = sum_c' W[c', c](d) W^reg_c'(x - O - d),   |x - O - d| < |d|
// and returns X = W P with P = +1 on M columns and -1 on N columns, written in
// the real spherical-harmonic basis. With the T-matrix sign convention of
// scattering.hpp the two-object round trip is T_A X(d) T_B X(-d).
//
// Real basis, a = |m|:
//   y_l0 = Y_l0
//   y_lm  = ((-1)^m Y_lm + Y_l,-m) / sqrt 2          m > 0
//   y_l,-a = i (Y_l,-a - (-1)^a Y_la) / sqrt 2       m < 0
// Entries are stored scaled: true = scaled * exp(log_scale),
// log_scale = -kappa_M |d|.

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Core>

#include "earnshaw/geometry.hpp"
#include "earnshaw/materials.hpp"

namespace earnshaw::translation {

struct TranslationMatrix {
  double kappa = 0.0;
  Vec3 displacement = Vec3::Zero();
  int l_max = 0;
  Eigen::MatrixXd scaled;
  double log_scale = 0.0;

  Eigen::MatrixXd value() const;
};

TranslationMatrix translation_matrix(const materials::Medium& medium, double kappa, const Vec3& d, int l_max);

/// Reciprocity image: X(-d) == reciprocity_image(X(d)). In the real basis
/// this is the plain transpose.
Eigen::MatrixXd reciprocity_image(const Eigen::MatrixXd& x, int l_max);

/// Central differences of the scaled translation matrix with respect to d.
/// The result uses the log_scale of translation_matrix(d). With richardson,
/// combines steps h and h/2 to fourth order.
std::array<Eigen::MatrixXd, 3> translation_gradient(const materials::Medium& medium, double kappa, const Vec3& d,
                                                     int l_max, double h, bool richardson = false);

/// Dyadic Green's function in momentum space,
/// mu_M (I + k k^T / (n_M kappa)^2) / (k^2 + (n_M kappa)^2).
Eigen::Matrix3d momentum_space_G(const materials::Medium& medium, double kappa, const Vec3& k);

namespace detail {

using cplx = std::complex<double>;
/// Sparse column representation of an operator on scalar coefficients.
using SparseColumn = std::vector<std::pair<int, cplx>>;

/// Scalar translation U[(l',m'), (L,M)], l' <= l_target, L <= l_source,
/// complex basis, scaled by exp(kappa_m |d|).
Eigen::MatrixXcd scalar_translation_scaled(double kappa_m, const Vec3& d, int l_target, int l_source);

/// Complex-basis vector translation X = W P, scaled by exp(kappa_m |d|).
Eigen::MatrixXcd vector_translation_complex_scaled(double kappa_m, const Vec3& d, int l_max);

/// K_real = conj(S) K_complex S^T for the vector layout of scattering.hpp.
/// m_diagonal promises that k couples only equal m and skips the rest.
Eigen::MatrixXd complex_to_real(const Eigen::MatrixXcd& k, int l_max, bool m_diagonal = false);

/// Angular momentum component j (0, 1, 2) applied to phi_lm.
SparseColumn angular_momentum(int j, int l, int m);
/// Cartesian derivative j of phi_lm, divided by kappa_m; outgoing or regular family.
SparseColumn gradient(int j, int l, int m, bool outgoing);

}  // namespace detail

}  // namespace earnshaw::translation
