#pragma once

// Forces and the Laplacian of the Casimir energy under a rigid displacement
// of one object, plus the trace decomposition
//   lap E = -(1/2pi) int dkappa [t1 + t2 + t3],
//   t1 = 2 kappa_M^2 tr[N (I - N)^-1]
//   t2 = 2 sum_j tr[T_A dG_j T_R dG_j^T (I - N)^-1]
//   t3 = sum_j tr[((I - N)^-1 dN_j)^2]
// with N = T_A G T_R G^T, G the A-to-rest translation and T_R the rest
// merged by block elimination. All derivatives are taken on a fixed frequency
// grid and fixed l_max so quadrature noise cancels.

#include <optional>
#include <string>
#include <utility>

#include "earnshaw/casimir.hpp"

namespace earnshaw::stability {

struct StabilityOptions {
  int l_max = 0;         ///< 0: casimir::default_lmax
  int nodes = 32;        ///< frequency nodes of the fixed grid
  double h_rel = 1e-3;   ///< step relative to the object's smallest gap
  bool richardson = true;
};

struct Decomposition {
  /// kappa-integrated traces (1/2pi) int t_k, before the overall minus sign;
  /// the Laplacian equals -(term1 + term2 + term3).
  double term1 = 0.0, term2 = 0.0, term3 = 0.0;
  double laplacian() const { return -(term1 + term2 + term3); }
};

struct StabilityReport {
  std::string object_label;
  Vec3 force = Vec3::Zero();
  double laplacian = 0.0;      ///< Richardson-refined when enabled
  double laplacian_raw = 0.0;  ///< single step h
  Vec3 curvature = Vec3::Zero();  ///< second derivatives along x, y, z; they sum to laplacian
  std::optional<Decomposition> decomposition;
  std::optional<int> predicted_sign_product;
  double h_used = 0.0;
  double est_error = 0.0;
  int l_max_used = 0;
  int nodes_used = 0;
};

/// -grad E on object `label` by central differences.
Vec3 force(const casimir::Configuration& config, const std::string& label, const StabilityOptions& options = {});

double laplacian_fd(const casimir::Configuration& config, const std::string& label,
                    const StabilityOptions& options = {});

Decomposition laplacian_decomposition(const casimir::Configuration& config, const std::string& label,
                                      const StabilityOptions& options = {});

/// Force, Laplacian and sign prediction; the decomposition on request.
StabilityReport stability_report(const casimir::Configuration& config, const std::string& label,
                                 const StabilityOptions& options = {}, bool with_decomposition = false);

/// s^A s^R from the material classes of A and of the rest (empty if unknown).
std::optional<int> predicted_sign_product(const casimir::Configuration& config, const std::string& label);

struct Equilibrium {
  bool found = false;
  double offset = 0.0;  ///< displacement along axis from the starting centre
  Vec3 position = Vec3::Zero();
  std::optional<StabilityReport> report;
};

/// Bisection on the force component along `axis` over offsets [lo, hi].
Equilibrium find_axial_equilibrium(const casimir::Configuration& config, const std::string& label, const Vec3& axis,
                                   std::pair<double, double> bracket, const StabilityOptions& options = {},
                                   double xtol = 1e-6);

}  // namespace earnshaw::stability
