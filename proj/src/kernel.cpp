#include "kernel.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "earnshaw/errors.hpp"
#include "earnshaw/translation.hpp"

namespace earnshaw::kernel {

Geometry prepare_geometry(const casimir::Configuration& config) {
  Geometry g;
  const auto& obj = config.objects;
  for (const auto& o : obj) g.centers.push_back(o.center);
  if (obj.size() < 2) return g;
  std::size_t far = 1;
  for (std::size_t i = 1; i < obj.size(); ++i)
    if ((obj[i].center - obj[0].center).norm() > (obj[far].center - obj[0].center).norm()) far = i;
  const Vec3 u = (obj[far].center - obj[0].center).normalized();
  const double scale = (obj[far].center - obj[0].center).norm();
  for (const auto& o : obj)
    if ((o.center - obj[0].center).cross(u).norm() > 1e-13 * scale) return g;
  for (std::size_t i = 0; i < obj.size(); ++i) g.centers[i] = Vec3(0.0, 0.0, u.dot(obj[i].center - obj[0].center));
  g.axial = true;
  return g;
}

Frequency build(const casimir::Configuration& config, const Geometry& geom, double kappa, int l_max) {
  Frequency f;
  f.kappa = kappa;
  f.kappa_m = config.medium.index(kappa) * kappa;
  f.l_max = l_max;
  f.block = 2 * scattering::multipole_count(l_max);
  const int n = static_cast<int>(config.objects.size());
  for (const auto& o : config.objects) {
    const auto t = scattering::mie_tmatrix(o, config.medium, kappa, l_max);
    f.t.push_back(t.scaled_diagonal());
    const double lo = f.t.back().minCoeff(), hi = f.t.back().maxCoeff();
    f.sign.push_back(lo >= 0.0 && hi > 0.0 ? 1 : hi <= 0.0 && lo < 0.0 ? -1 : (lo == 0.0 && hi == 0.0) ? 0 : 2);
  }
  f.x.assign(n, std::vector<Eigen::MatrixXd>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec3 d = geom.centers[i] - geom.centers[j];
      const double gap = d.norm() - config.objects[i].radius - config.objects[j].radius;
      const auto xm = translation::detail::complex_to_real(
          translation::detail::vector_translation_complex_scaled(f.kappa_m, d, l_max), l_max, geom.axial);
      f.x[i][j] = xm * std::exp(-f.kappa_m * gap);
    }
  return f;
}

int common_sign(const Frequency& f) {
  int s = 0;
  for (int v : f.sign) {
    if (v == 0) continue;
    if (v == 2) return 0;
    if (s == 0) s = v;
    else if (s != v) return 0;
  }
  return s == 0 ? 1 : s;
}

std::vector<std::vector<int>> components(int l_max, bool axial) {
  const int nv = scattering::multipole_count(l_max);
  if (!axial) {
    std::vector<int> all(2 * nv);
    for (int i = 0; i < 2 * nv; ++i) all[i] = i;
    return {all};
  }
  // Classes (|m|, s): M waves carry s = sign(m), N waves s = -sign(m); m = 0 splits by polarization.
  std::vector<std::vector<int>> out(2 * (l_max + 1));
  for (int p = 0; p < 2; ++p)
    for (int l = 1; l <= l_max; ++l)
      for (int m = -l; m <= l; ++m) {
        const int idx = p * nv + l * l + l + m - 1;
        int cls;
        if (m == 0) cls = p;
        else {
          const int s = (m > 0) == (p == 0) ? 0 : 1;
          cls = 2 * std::abs(m) + s;
        }
        out[cls].push_back(idx);
      }
  return out;
}

Eigen::MatrixXd symmetric_matrix(const Frequency& f, int s, const std::vector<int>& idx) {
  const int n = static_cast<int>(f.t.size());
  const int b = static_cast<int>(idx.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n * b, n * b);
  std::vector<Eigen::VectorXd> root(n, Eigen::VectorXd(b));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < b; ++a) root[i][a] = std::sqrt(std::abs(f.t[i][idx[a]]));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto& x = f.x[i][j];
      for (int a = 0; a < b; ++a)
        for (int c = 0; c < b; ++c) {
          const double v = -s * root[i][a] * x(idx[a], idx[c]) * root[j][c];
          h(i * b + a, j * b + c) = v;
          h(j * b + c, i * b + a) = v;
        }
    }
  return h;
}

Eigen::MatrixXd general_matrix(const Frequency& f, const std::vector<int>& idx) {
  const int n = static_cast<int>(f.t.size());
  const int b = static_cast<int>(idx.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n * b, n * b);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int a = 0; a < b; ++a)
        for (int c = 0; c < b; ++c) {
          // X(c_J - c_I) = X(c_I - c_J)^T
          const double x = i < j ? f.x[i][j](idx[a], idx[c]) : f.x[j][i](idx[c], idx[a]);
          m(i * b + a, j * b + c) = -f.t[i][idx[a]] * x;
        }
    }
  return m;
}

namespace {

[[noreturn]] void truncation_failure(double kappa, int l_max) {
  throw TruncationError("unphysical truncation: I - N is not positive at kappa = " + std::to_string(kappa) +
                        ", l_max = " + std::to_string(l_max) + "; increase l_max");
}

}  // namespace

LogDet log_det(const Frequency& f, bool axial, bool eigen_diagnostics) {
  LogDet out;
  const int s = common_sign(f);
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& idx : components(f.l_max, axial)) {
    if (idx.empty()) continue;
    if (s != 0) {
      const Eigen::MatrixXd h = symmetric_matrix(f, s, idx);
      Eigen::LLT<Eigen::MatrixXd> llt(h);
      if (llt.info() != Eigen::Success) truncation_failure(f.kappa, f.l_max);
      const auto& l = llt.matrixLLT();
      for (int i = 0; i < l.rows(); ++i) out.value += 2.0 * std::log(l(i, i));
      if (eigen_diagnostics) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
      }
    } else {
      const Eigen::MatrixXd m = general_matrix(f, idx);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
      const auto& u = lu.matrixLU();
      double sgn = lu.permutationP().determinant();
      for (int i = 0; i < u.rows(); ++i) {
        if (u(i, i) == 0.0) truncation_failure(f.kappa, f.l_max);
        sgn *= u(i, i) > 0 ? 1.0 : -1.0;
        out.value += std::log(std::abs(u(i, i)));
      }
      if (sgn <= 0) truncation_failure(f.kappa, f.l_max);
      if (eigen_diagnostics) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
        for (int i = 0; i < es.eigenvalues().size(); ++i)
          if (std::abs(es.eigenvalues()[i].imag()) < 1e-12) min_eig = std::min(min_eig, es.eigenvalues()[i].real());
        if (!(min_eig > 0.0)) truncation_failure(f.kappa, f.l_max);
      }
    }
  }
  if (eigen_diagnostics) out.min_eigenvalue = min_eig;
  return out;
}

double trace_log(const Frequency& f, bool axial) {
  // Eigenvalues of the coupling part K, then sum log(1 - nu); accurate even when K is tiny.
  const int s = common_sign(f);
  double total = 0.0;
  for (const auto& idx : components(f.l_max, axial)) {
    if (idx.empty()) continue;
    if (s != 0) {
      const Eigen::MatrixXd h = symmetric_matrix(f, s, idx);
      const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(h.rows(), h.cols()) - h;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().maxCoeff() >= 1.0) truncation_failure(f.kappa, f.l_max);
      for (int i = 0; i < es.eigenvalues().size(); ++i) total += std::log1p(-es.eigenvalues()[i]);
    } else {
      const Eigen::MatrixXd m = general_matrix(f, idx);
      const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(m.rows(), m.cols()) - m;
      Eigen::EigenSolver<Eigen::MatrixXd> es(k, false);
      for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double a = es.eigenvalues()[i].real(), b = es.eigenvalues()[i].imag();
        total += 0.5 * std::log1p(-2.0 * a + a * a + b * b);
      }
    }
  }
  return total;
}

}  // namespace earnshaw::kernel
