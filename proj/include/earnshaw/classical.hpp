#pragma once

// Classical fluctuating charges in rigid containers. The Hamiltonian is the
// cross-container Coulomb energy q q' / (4 pi eps_M r) plus per-container
// terms U_J (hard walls, harmonic tethers, optional intra-container Coulomb).
// Under a rigid shift d of one container,
//   lap_d F = <lap_d H> - beta Var(grad_d H),
// and <lap_d H> vanishes identically because the shifted Coulomb kernels are
// harmonic away from coincident points, which disjoint containers exclude.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "earnshaw/geometry.hpp"

namespace earnshaw::classical {

enum class Shape { Sphere, Box };

struct Tether {
  double k = 0.0;
  Vec3 anchor = Vec3::Zero();  ///< relative to the container centre
};

struct FixedCharge {
  double q = 0.0;
  Vec3 position = Vec3::Zero();  ///< relative to the container centre
};

struct MobileCharge {
  double q = 0.0;
  std::optional<Tether> tether;
};

struct Container {
  std::string label;
  Shape shape = Shape::Sphere;
  Vec3 center = Vec3::Zero();
  double radius = 1.0;                     ///< Sphere
  Vec3 half_extent = Vec3::Constant(0.5);  ///< Box
  std::vector<FixedCharge> fixed;
  std::vector<MobileCharge> mobile;
  bool intra_coulomb = false;  ///< include Coulomb pairs inside the container in U_J
  double hard_core = 0.0;      ///< intra pairs closer than this are forbidden

  bool contains(const Vec3& relative) const;
  double volume() const;
};

struct ClassicalConfig {
  std::vector<Container> containers;
  double eps_m = 1.0;
  double beta = 1.0;  ///< may be +infinity
};

/// Mobile positions relative to their container centres, [container][charge].
using Positions = std::vector<std::vector<Vec3>>;

/// Throws ValidationError / GeometryError (overlapping containers).
void validate(const ClassicalConfig& config);
int find_container(const ClassicalConfig& config, const std::string& label);

/// Cross-container Coulomb energy.
double cross_energy(const ClassicalConfig& config, const Positions& positions);
/// U_J: tethers and optional intra-container Coulomb; +inf outside the walls or inside a hard core.
double internal_energy(const ClassicalConfig& config, const Positions& positions, int container);
double hamiltonian(const ClassicalConfig& config, const Positions& positions);

/// Gradient of H under a rigid displacement of container `label`.
Vec3 grad_d_hamiltonian(const ClassicalConfig& config, const Positions& positions, const std::string& label);
/// Trace of the analytic Hessian of H under the same displacement; zero up to rounding.
double laplacian_d_hamiltonian(const ClassicalConfig& config, const Positions& positions, const std::string& label);

struct QuadratureOptions {
  double tol = 1e-8;
  int initial_nodes = 8;
  int max_nodes = 32;
  int fixed_nodes = 0;  ///< > 0: single evaluation with this many nodes per dimension
};

struct FreeEnergy {
  double value = 0.0;
  int nodes = 0;
};

/// F = -ln(Z) / beta with container `label` shifted by d; at most two mobile charges.
FreeEnergy free_energy_quadrature(const ClassicalConfig& config, const std::string& label, const Vec3& d,
                                  const QuadratureOptions& options = {});

/// Central-difference Laplacian of the quadrature free energy on a common node grid,
/// Richardson-combined over steps h and h/2.
double laplacian_F_fd(const ClassicalConfig& config, const std::string& label, double h,
                      const QuadratureOptions& options = {});

struct McRun {
  std::vector<double> coords;  ///< flattened positions of recorded samples, mobile order
  int n_mobile = 0;
  std::size_t n_samples = 0;
  double acceptance_rate = 0.0;
  bool acceptance_warning = false;  ///< rate outside [0.1, 0.9]

  Positions sample(const ClassicalConfig& config, std::size_t index) const;
};

struct McOptions {
  std::uint64_t steps = 1000000;
  std::uint64_t burn_in = 10000;
  std::uint64_t thin = 10;
  double step_size = 0.1;
  std::uint64_t seed = 1;
};

/// Metropolis chain over mobile positions, starting from the tether anchors
/// (or container centres). Deterministic in the seed.
McRun metropolis_run(const ClassicalConfig& config, const McOptions& options);

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n_samples = 0;
  double autocorrelation_time = 0.0;  ///< integrated, in recorded samples
};

/// Mean and blocking-analysis error of a correlated series. Throws
/// PrecisionError when no plateau is reached.
McEstimate blocking_analysis(std::span<const double> series);

/// -beta Var(grad_d H) over the recorded samples.
McEstimate laplacian_F_estimator(const ClassicalConfig& config, const std::string& label, const McRun& run);

}  // namespace earnshaw::classical
