#pragma once

// Casimir interaction energies of spheres from the scattering formula
//   E = (1/2pi) int_0^inf dkappa ln det(I - K(kappa)),
// with K the block matrix K_IJ = T_I X(c_I - c_J) for I != J and 0 on the
// diagonal (hbar = c = 1, lengths in the user's unit L). At temperature
// tau = 2 pi k_B T L / (hbar c) the integral becomes (tau / 2pi) sum'_n over
// kappa_n = n tau with the n = 0 term halved.
//
// Numerically the block matrix is similarity-scaled so no entry overflows,
// and symmetrized with |T|^(1/2) when all objects share a T-matrix sign; in
// that case a Cholesky factorization both evaluates the determinant and
// certifies that I - N has strictly positive spectrum.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "earnshaw/geometry.hpp"
#include "earnshaw/materials.hpp"
#include "earnshaw/scattering.hpp"

namespace earnshaw::casimir {

struct Configuration {
  std::vector<scattering::SphereObject> objects;
  materials::Medium medium = materials::Medium::vacuum();
  double tau = 0.0;
};

/// Throws ValidationError for bad fields, GeometryError for overlap or
/// non-positive gaps.
void validate(const Configuration& config);
double min_gap(const Configuration& config);
/// ceil(5 + 8 R_max / min_gap), capped at the supported order.
int default_lmax(const Configuration& config);
int find_object(const Configuration& config, const std::string& label);

struct EnergyOptions {
  double tol = 1e-4;
  int l_max = 0;              ///< 0 selects default_lmax
  bool adapt_lmax = true;     ///< double l_max until the relative change < tol
  int max_lmax = 40;
  int initial_nodes = 20;
  int max_nodes = 640;
  int fixed_nodes = 0;        ///< > 0: single fixed grid, no node doubling
  bool eigen_diagnostics = false;  ///< record the smallest eigenvalue of I - N
  int max_matsubara = 200000;
};

struct IntegrandSample {
  double kappa = 0.0;
  double integrand = 0.0;
  double weight = 0.0;  ///< contribution = weight * integrand
};

struct EnergyResult {
  double value = 0.0;
  int l_max_used = 0;
  int node_count = 0;
  double est_rel_error = 0.0;
  std::vector<IntegrandSample> samples;
  bool zero_frequency_floor = false;  ///< n = 0 term evaluated at kappa_floor
  std::optional<double> min_eigenvalue;
};

inline constexpr double kKappaFloor = 1e-6;

/// Block matrix with identity diagonal blocks and off-diagonal blocks
/// -T_I X_IJ, true (unscaled) values, real basis.
Eigen::MatrixXd assemble_block_matrix(const Configuration& config, double kappa, int l_max);

struct IntegrandValue {
  double value = 0.0;
  std::optional<double> min_eigenvalue;
};

/// ln det(I - N). Throws TruncationError when I - N is not positive.
double log_det_integrand(const Configuration& config, double kappa, int l_max);
IntegrandValue log_det_integrand_checked(const Configuration& config, double kappa, int l_max,
                                         bool eigen_diagnostics);
/// Same quantity as a trace of the matrix logarithm (eigenvalue sum); the
/// independent cross-check of log_det_integrand.
double trace_log_integrand(const Configuration& config, double kappa, int l_max);

/// Quadrature rule kappa = g (1 - t) / t on n Gauss-Legendre nodes, g = 1 / min_gap.
std::vector<IntegrandSample> frequency_grid(const Configuration& config, int nodes);

EnergyResult energy_T0(const Configuration& config, const EnergyOptions& options = {});
EnergyResult free_energy_T(const Configuration& config, const EnergyOptions& options = {});
/// Dispatches on config.tau.
EnergyResult energy(const Configuration& config, const EnergyOptions& options = {});

/// Energy on a fixed grid at fixed l_max (used for differencing).
double energy_on_grid(const Configuration& config, const std::vector<IntegrandSample>& grid, int l_max);

/// Lifshitz energy per area of two half-spaces (materials given as
/// eps/mu pairs) separated by a slab of the medium of width gap.
double lifshitz_plates(const materials::Medium& plate1, const materials::Medium& plate2,
                       const materials::Medium& medium, double gap, double tau, double tol = 1e-10);

/// Per-object T-matrix sign over all entries at kappa: +1, -1, 0, or 2 when mixed.
int tmatrix_sign(const scattering::SphereObject& object, const materials::Medium& medium, double kappa, int l_max);

}  // namespace earnshaw::casimir
