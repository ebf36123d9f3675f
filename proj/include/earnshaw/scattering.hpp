#pragma once

// T-matrices of homogeneous spheres at imaginary frequency, Fresnel
// coefficients of half-spaces, and definiteness checks.
//
// Sign convention: the stored T-matrix is the negative of the outgoing
// coefficient produced by a unit regular wave for the magnetic (M, TE)
// multipoles and the outgoing coefficient itself for the electric (N, TM)
// multipoles. With this choice every entry is >= 0 for a ClassI sphere and
// <= 0 for a ClassII sphere, and the round-trip operator of two objects is
// N = T_A X T_B X^T (see translation.hpp).

#include <string>
#include <vector>

#include <Eigen/Core>

#include "earnshaw/geometry.hpp"
#include "earnshaw/materials.hpp"

namespace earnshaw::scattering {

struct SphereObject {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  materials::DispersionModel eps = materials::DispersionModel::constant(1.0);
  materials::DispersionModel mu = materials::DispersionModel::constant(1.0);
  std::string label;
};

enum class Polarization { Magnetic = 0, Electric = 1 };

/// Number of (l, m) pairs with 1 <= l <= l_max.
inline int multipole_count(int l_max) { return l_max * (l_max + 2); }
/// Position of (P, l, m) in a vector of size 2 * multipole_count(l_max).
inline int vector_index(Polarization p, int l, int m, int l_max) {
  return static_cast<int>(p) * multipole_count(l_max) + l * l + l + m - 1;
}

/// Diagonal, m-independent T-matrix of a sphere. Entries are stored scaled:
/// true entry = scaled * exp(log_scale), log_scale = 2 n_M kappa R, so large
/// kappa R never overflows.
struct TMatrix {
  double kappa = 0.0;
  int l_max = 0;
  std::vector<double> magnetic;  ///< scaled, index l - 1
  std::vector<double> electric;  ///< scaled, index l - 1
  double log_scale = 0.0;

  double scaled(Polarization p, int l) const {
    return p == Polarization::Magnetic ? magnetic[l - 1] : electric[l - 1];
  }
  double entry(Polarization p, int l) const;
  /// Full diagonal of size 2 * multipole_count(l_max), scaled.
  Eigen::VectorXd scaled_diagonal() const;
  /// Dense diagonal matrix of true entries.
  Eigen::MatrixXd dense() const;
};

TMatrix mie_tmatrix(const SphereObject& sphere, const materials::Medium& medium, double kappa, int l_max);

struct Reflection {
  double r_te = 0.0;
  double r_tm = 0.0;
};

/// Imaginary-frequency Fresnel coefficients of a half-space (eps, mu)
/// against the medium, at transverse wavevector k_transverse.
Reflection fresnel_reflection(const materials::DispersionModel& eps, const materials::DispersionModel& mu,
                              const materials::Medium& medium, double kappa, double k_transverse);

enum class Definiteness { Positive, Negative, Zero, Mixed };

/// Sign report of a symmetric matrix. tol is relative to the largest
/// magnitude entry of t.
Definiteness definiteness(const Eigen::MatrixXd& t, double tol = 1e-12);
Definiteness definiteness(const TMatrix& t, double tol = 1e-12);

int to_sign(Definiteness d);  ///< +1, -1, 0; 2 for Mixed
std::string to_string(Definiteness d);

}  // namespace earnshaw::scattering
