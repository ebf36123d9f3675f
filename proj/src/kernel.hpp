#pragma once

// Per-frequency building blocks shared by casimir and stability.

#include <vector>

#include <Eigen/Core>

#include "earnshaw/casimir.hpp"

namespace earnshaw::kernel {

/// Object centres, rotated so that collinear configurations lie on the z axis.
struct Geometry {
  std::vector<Vec3> centers;
  bool axial = false;
};

Geometry prepare_geometry(const casimir::Configuration& config);

/// Scaled matrices at one frequency. For objects I != J the matrix
/// k(I, J) = t[I] * x(I, J) * exp(-kappa_M gap_IJ) is the similarity-scaled
/// block T_I X(c_I - c_J); t holds scaled T-matrix diagonals.
struct Frequency {
  double kappa = 0.0;
  double kappa_m = 0.0;
  int l_max = 0;
  int block = 0;  ///< 2 l_max (l_max + 2)
  std::vector<Eigen::VectorXd> t;
  std::vector<int> sign;  ///< per object: +1, -1, 0 (all zero), 2 (mixed)
  /// Scaled translation times exp(-kappa_M gap), for I < J; the J > I block is the transpose.
  std::vector<std::vector<Eigen::MatrixXd>> x;
  const Eigen::MatrixXd& xs(int i, int j) const { return x[i][j]; }
};

Frequency build(const casimir::Configuration& config, const Geometry& geom, double kappa, int l_max);

/// +1 or -1 when every object shares that T-matrix sign (zero objects allowed), 0 otherwise.
int common_sign(const Frequency& f);

/// Index classes that decouple exactly for axial geometries; a single class otherwise.
std::vector<std::vector<int>> components(int l_max, bool axial);

/// Symmetrized H = I - s |T|^(1/2) X |T|^(1/2) restricted to the multipole indices idx
/// (same list for every object), for a common sign s.
Eigen::MatrixXd symmetric_matrix(const Frequency& f, int s, const std::vector<int>& idx);
/// General scaled I - K restricted to idx.
Eigen::MatrixXd general_matrix(const Frequency& f, const std::vector<int>& idx);

struct LogDet {
  double value = 0.0;
  std::optional<double> min_eigenvalue;
};

LogDet log_det(const Frequency& f, bool axial, bool eigen_diagnostics);
double trace_log(const Frequency& f, bool axial);

}  // namespace earnshaw::kernel
