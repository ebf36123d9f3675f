#include "earnshaw/translation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>

#include "earnshaw/errors.hpp"
#include "earnshaw/scattering.hpp"
#include "earnshaw/specfun.hpp"

namespace earnshaw::translation {

namespace detail {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

inline double sign_pow(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

// Gaunt coefficients for one (l', L) pair, all (m', M), with the constant
// prefactor 4 pi (-1)^{l'} (-1)^M folded in. lambda runs |L - l'|..L + l' in
// steps of two.
struct GauntBlock {
  int lt = 0, ls = 0, lam_min = 0, n_lam = 0;
  std::vector<double> vals;
  double at(int mt, int ms, int j) const {
    return vals[(static_cast<std::size_t>(mt + lt) * (2 * ls + 1) + (ms + ls)) * n_lam + j];
  }
};

std::shared_ptr<const GauntBlock> gaunt_block(int lt, int ls) {
  static std::shared_mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const GauntBlock>> cache;
  const auto key = std::make_pair(lt, ls);
  {
    std::shared_lock lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto b = std::make_shared<GauntBlock>();
  b->lt = lt;
  b->ls = ls;
  b->lam_min = std::abs(lt - ls);
  b->n_lam = std::min(lt, ls) + 1;
  b->vals.assign(static_cast<std::size_t>(2 * lt + 1) * (2 * ls + 1) * b->n_lam, 0.0);
  for (int mt = -lt; mt <= lt; ++mt) {
    for (int ms = -ls; ms <= ls; ++ms) {
      const int mu = ms - mt;
      const double pref = 4.0 * kPi * sign_pow(lt) * sign_pow(ms);
      for (int j = 0; j < b->n_lam; ++j) {
        const int lam = b->lam_min + 2 * j;
        if (std::abs(mu) > lam) continue;
        b->vals[(static_cast<std::size_t>(mt + lt) * (2 * ls + 1) + (ms + ls)) * b->n_lam + j] =
            pref * specfun::gaunt(ls, ms, lt, -mt, lam, -mu);
      }
    }
  }
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(b));
  return it->second;
}

// Axial counterpart: mu = 0 only, with Y_lambda0(+z) folded in.
struct AxialBlock {
  int m_max = 0, lam_min = 0, n_lam = 0;
  std::vector<double> vals;
  double at(int m, int j) const { return vals[static_cast<std::size_t>(m + m_max) * n_lam + j]; }
};

std::shared_ptr<const AxialBlock> axial_block(int lt, int ls) {
  static std::shared_mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const AxialBlock>> cache;
  const auto key = std::make_pair(lt, ls);
  {
    std::shared_lock lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto b = std::make_shared<AxialBlock>();
  b->m_max = std::min(lt, ls);
  b->lam_min = std::abs(lt - ls);
  b->n_lam = b->m_max + 1;
  b->vals.resize(static_cast<std::size_t>(2 * b->m_max + 1) * b->n_lam);
  for (int m = -b->m_max; m <= b->m_max; ++m)
    for (int j = 0; j < b->n_lam; ++j) {
      const int lam = b->lam_min + 2 * j;
      const double y = std::sqrt((2.0 * lam + 1.0) / (4.0 * kPi));
      b->vals[static_cast<std::size_t>(m + b->m_max) * b->n_lam + j] =
          4.0 * kPi * sign_pow(lt) * sign_pow(m) * y * specfun::gaunt(ls, m, lt, -m, lam, 0);
    }
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(b));
  return it->second;
}

void validate(double kappa_m, const Vec3& d) {
  if (!(kappa_m > 0.0) || !std::isfinite(kappa_m)) throw DomainError("translation requires kappa > 0");
  const double r = d.norm();
  if (!(r > 0.0)) throw DomainError("translation displacement is zero: objects coincide");
  if (!std::isfinite(r)) throw DomainError("translation displacement is not finite");
}

bool is_axial(const Vec3& d) { return d.x() == 0.0 && d.y() == 0.0; }

void add_to(SparseColumn& col, int index, cplx value) {
  for (auto& [i, v] : col) {
    if (i == index) {
      v += value;
      return;
    }
  }
  col.emplace_back(index, value);
}

// Applies a per-basis-function operator to a sparse column.
template <class Op>
SparseColumn apply(const SparseColumn& in, Op op) {
  SparseColumn out;
  for (const auto& [idx, v] : in) {
    const int l = static_cast<int>(std::sqrt(static_cast<double>(idx)));
    const int m = idx - l * l - l;
    for (const auto& [j, w] : op(l, m)) add_to(out, j, v * w);
  }
  return out;
}

}  // namespace

SparseColumn angular_momentum(int j, int l, int m) {
  SparseColumn col;
  if (j == 2) {
    if (m != 0) col.emplace_back(specfun::lm_index(l, m), cplx(m));
    return col;
  }
  const double up = (m < l) ? std::sqrt(static_cast<double>((l - m) * (l + m + 1))) : 0.0;
  const double dn = (m > -l) ? std::sqrt(static_cast<double>((l + m) * (l - m + 1))) : 0.0;
  // L_x = (L_+ + L_-) / 2, L_y = (L_+ - L_-) / (2i)
  const cplx cu = (j == 0) ? cplx(0.5 * up) : -0.5 * kI * up;
  const cplx cd = (j == 0) ? cplx(0.5 * dn) : 0.5 * kI * dn;
  if (up != 0.0) col.emplace_back(specfun::lm_index(l, m + 1), cu);
  if (dn != 0.0) col.emplace_back(specfun::lm_index(l, m - 1), cd);
  return col;
}

SparseColumn gradient(int j, int l, int m, bool outgoing) {
  // f' - l f / r and f' + (l + 1) f / r in units of kappa.
  const double s = outgoing ? -1.0 : 1.0;
  SparseColumn col;
  const double dl = l;
  if (j == 2) {
    const double a = std::sqrt(((dl + 1) * (dl + 1) - m * m) / ((2 * dl + 1) * (2 * dl + 3)));
    const double b = (l > 0) ? std::sqrt((dl * dl - m * m) / ((2 * dl - 1) * (2 * dl + 1))) : 0.0;
    col.emplace_back(specfun::lm_index(l + 1, m), s * a);
    if (b != 0.0) col.emplace_back(specfun::lm_index(l - 1, m), s * b);
    return col;
  }
  const double c1 = std::sqrt((dl + m + 1) * (dl + m + 2) / ((2 * dl + 1) * (2 * dl + 3)));
  const double c2 = (l > 0) ? std::sqrt((dl - m) * (dl - m - 1) / ((2 * dl - 1) * (2 * dl + 1))) : 0.0;
  const double c3 = std::sqrt((dl - m + 1) * (dl - m + 2) / ((2 * dl + 1) * (2 * dl + 3)));
  const double c4 = (l > 0) ? std::sqrt((dl + m) * (dl + m - 1) / ((2 * dl - 1) * (2 * dl + 1))) : 0.0;
  // d_x = (d_+ + d_-) / 2, d_y = (d_+ - d_-) / (2i)
  const cplx wp = (j == 0) ? cplx(0.5) : -0.5 * kI;
  const cplx wm = (j == 0) ? cplx(0.5) : 0.5 * kI;
  col.emplace_back(specfun::lm_index(l + 1, m + 1), -s * c1 * wp);
  col.emplace_back(specfun::lm_index(l + 1, m - 1), s * c3 * wm);
  if (c2 != 0.0) col.emplace_back(specfun::lm_index(l - 1, m + 1), s * c2 * wp);
  if (c4 != 0.0) col.emplace_back(specfun::lm_index(l - 1, m - 1), -s * c4 * wm);
  return col;
}

Eigen::MatrixXcd scalar_translation_scaled(double kappa_m, const Vec3& d, int l_target, int l_source) {
  validate(kappa_m, d);
  const double r = d.norm();
  const int lam_max = l_target + l_source;
  const auto kb = specfun::mod_sph_bessel_k_array(lam_max, kappa_m * r);
  const int nt = (l_target + 1) * (l_target + 1), ns = (l_source + 1) * (l_source + 1);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(nt, ns);

  if (is_axial(d)) {
    // Only mu = 0 survives.
    const bool flip = d.z() < 0;
    for (int lt = 0; lt <= l_target; ++lt) {
      for (int ls = 0; ls <= l_source; ++ls) {
        const auto blk = axial_block(lt, ls);
        for (int m = -blk->m_max; m <= blk->m_max; ++m) {
          double sum = 0.0;
          for (int j = 0; j < blk->n_lam; ++j) {
            const int lam = blk->lam_min + 2 * j;
            sum += kb.value[lam] * blk->at(m, j) * (flip && lam % 2 ? -1.0 : 1.0);
          }
          u(specfun::lm_index(lt, m), specfun::lm_index(ls, m)) = sum;
        }
      }
    }
    return u;
  }

  const double theta = std::acos(std::clamp(d.z() / r, -1.0, 1.0));
  const double phi = std::atan2(d.y(), d.x());
  const auto ylm = specfun::spherical_harmonics(lam_max, theta, phi);
  for (int lt = 0; lt <= l_target; ++lt) {
    for (int ls = 0; ls <= l_source; ++ls) {
      const auto blk = gaunt_block(lt, ls);
      for (int mt = -lt; mt <= lt; ++mt) {
        for (int ms = -ls; ms <= ls; ++ms) {
          const int mu = ms - mt;
          cplx sum = 0.0;
          for (int j = 0; j < blk->n_lam; ++j) {
            const int lam = blk->lam_min + 2 * j;
            if (std::abs(mu) > lam) continue;
            sum += kb.value[lam] * ylm[specfun::lm_index(lam, mu)] * blk->at(mt, ms, j);
          }
          u(specfun::lm_index(lt, mt), specfun::lm_index(ls, ms)) = sum;
        }
      }
    }
  }
  return u;
}

Eigen::MatrixXcd vector_translation_complex_scaled(double kappa_m, const Vec3& d, int l_max) {
  validate(kappa_m, d);
  if (l_max < 1) throw ValidationError("l_max must be >= 1");
  if (l_max > specfun::kMaxOrder) throw CapabilityError("l_max exceeds the supported multipole order");
  const Eigen::MatrixXcd u = scalar_translation_scaled(kappa_m, d, l_max, l_max + 1);
  const int nv = scattering::multipole_count(l_max);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(2 * nv, 2 * nv);
  const Vec3 kd = kappa_m * d;
  const bool axial = is_axial(d);

  for (int l = 1; l <= l_max; ++l) {
    const double ll = l * (l + 1.0);
    for (int m = -l; m <= l; ++m) {
      // (d . L) phi and Q phi = d . curl(L phi), both in units of kappa.
      SparseColumn dl, q;
      for (int n = 0; n < 3; ++n)
        for (const auto& [i, v] : angular_momentum(n, l, m)) add_to(dl, i, kd[n] * v);
      for (int n = 0; n < 3; ++n) {
        const SparseColumn ln = angular_momentum(n, l, m);
        for (int k = 0; k < 3; ++k) {
          if (k == n) continue;
          const int j = 3 - k - n;
          const double eps = ((j + 1) % 3 == k) ? 1.0 : -1.0;
          if (kd[j] == 0.0) continue;
          const SparseColumn g = apply(ln, [&](int a, int b) { return gradient(k, a, b, true); });
          for (const auto& [i, v] : g) add_to(q, i, eps * kd[j] * v);
        }
      }
      const int src = specfun::lm_index(l, m);
      const int cm = scattering::vector_index(scattering::Polarization::Magnetic, l, m, l_max);
      const int cn = scattering::vector_index(scattering::Polarization::Electric, l, m, l_max);
      for (int lt = 1; lt <= l_max; ++lt) {
        const double llt = lt * (lt + 1.0);
        for (int mt = -lt; mt <= lt; ++mt) {
          if (axial && mt != m) continue;
          const int row = specfun::lm_index(lt, mt);
          cplx udl = 0.0, uq = 0.0;
          for (const auto& [i, v] : dl) udl += u(row, i) * v;
          for (const auto& [i, v] : q) uq += u(row, i) * v;
          const cplx a = std::sqrt(ll / llt) * u(row, src) + kI / std::sqrt(ll * llt) * uq;
          const cplx b = kI / std::sqrt(ll * llt) * udl;
          const int rm = scattering::vector_index(scattering::Polarization::Magnetic, lt, mt, l_max);
          const int rn = scattering::vector_index(scattering::Polarization::Electric, lt, mt, l_max);
          x(rm, cm) = a;
          x(rn, cm) = b;
          x(rm, cn) = b;  // W = -b, times P = -1 on N columns
          x(rn, cn) = -a;
        }
      }
    }
  }
  return x;
}

Eigen::MatrixXd complex_to_real(const Eigen::MatrixXcd& k, int l_max, bool m_diagonal) {
  const int nv = scattering::multipole_count(l_max);
  const int n = 2 * nv;
  if (k.rows() != n || k.cols() != n) throw ValidationError("complex_to_real: size mismatch");
  // Row r of S: real function r as a combination of complex harmonics.
  struct Row {
    int c[2];
    cplx s[2];
    int count;
    int abs_m;
  };
  std::vector<Row> rows(n);
  const double h = 1.0 / std::sqrt(2.0);
  for (int p = 0; p < 2; ++p) {
    for (int l = 1; l <= l_max; ++l) {
      for (int m = -l; m <= l; ++m) {
        const int base = p * nv - 1;
        Row row{};
        const int a = std::abs(m);
        if (m == 0) {
          row = {{base + l * l + l, 0}, {1.0, 0.0}, 1, 0};
        } else if (m > 0) {
          row = {{base + l * l + l + m, base + l * l + l - m}, {sign_pow(m) * h, h}, 2, 0};
        } else {
          row = {{base + l * l + l - a, base + l * l + l + a}, {kI * h, -kI * sign_pow(a) * h}, 2, 0};
        }
        row.abs_m = a;
        rows[base + l * l + l + m] = row;
      }
    }
  }
  // out(r, c) = sum conj(S(r, a)) K(a, b) S(c, b); at most four terms per entry.
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  double imag = 0.0;
  for (int c = 0; c < n; ++c) {
    const Row& rc = rows[c];
    for (int r = 0; r < n; ++r) {
      const Row& rr = rows[r];
      if (m_diagonal && rr.abs_m != rc.abs_m) continue;
      cplx acc = 0.0;
      for (int t = 0; t < rr.count; ++t) {
        const cplx sr = std::conj(rr.s[t]);
        for (int u = 0; u < rc.count; ++u) acc += sr * k(rr.c[t], rc.c[u]) * rc.s[u];
      }
      out(r, c) = acc.real();
      imag = std::max(imag, std::abs(acc.imag()));
    }
  }
  const double scale = out.cwiseAbs().maxCoeff();
  if (imag > 1e-10 * scale) throw PrecisionError("real-basis transform left an imaginary residual");
  return out;
}

}  // namespace detail

Eigen::MatrixXd TranslationMatrix::value() const { return scaled * std::exp(log_scale); }

TranslationMatrix translation_matrix(const materials::Medium& medium, double kappa, const Vec3& d, int l_max) {
  const double kappa_m = medium.index(kappa) * kappa;
  TranslationMatrix t;
  t.kappa = kappa;
  t.displacement = d;
  t.l_max = l_max;
  t.scaled = detail::complex_to_real(detail::vector_translation_complex_scaled(kappa_m, d, l_max), l_max,
                                     d.x() == 0.0 && d.y() == 0.0);
  t.log_scale = -kappa_m * d.norm();
  return t;
}

Eigen::MatrixXd reciprocity_image(const Eigen::MatrixXd& x, int l_max) {
  const int n = 2 * scattering::multipole_count(l_max);
  if (x.rows() != n || x.cols() != n) throw ValidationError("reciprocity_image: size mismatch");
  return x.transpose();
}

std::array<Eigen::MatrixXd, 3> translation_gradient(const materials::Medium& medium, double kappa, const Vec3& d,
                                                     int l_max, double h, bool richardson) {
  const double r = d.norm();
  if (!(r > 0.0)) throw DomainError("translation displacement is zero: objects coincide");
  if (!(h > 0.0) || h >= 0.1 * r) throw ValidationError("finite-difference step must satisfy 0 < h < 0.1 |d|");
  if (h < 1e-8 * r) throw PrecisionError("finite-difference step underflow");
  const double kappa_m = medium.index(kappa) * kappa;
  const double ls0 = -kappa_m * r;
  auto rescaled = [&](const Vec3& dd) {
    TranslationMatrix t = translation_matrix(medium, kappa, dd, l_max);
    return Eigen::MatrixXd(t.scaled * std::exp(t.log_scale - ls0));
  };
  auto central = [&](int j, double step) {
    Vec3 e = Vec3::Zero();
    e[j] = step;
    return Eigen::MatrixXd((rescaled(d + e) - rescaled(d - e)) / (2.0 * step));
  };
  std::array<Eigen::MatrixXd, 3> g;
  for (int j = 0; j < 3; ++j) {
    g[j] = central(j, h);
    if (richardson) g[j] = (4.0 * central(j, 0.5 * h) - g[j]) / 3.0;
  }
  return g;
}

Eigen::Matrix3d momentum_space_G(const materials::Medium& medium, double kappa, const Vec3& k) {
  if (!(kappa > 0.0)) throw DomainError("momentum_space_G requires kappa > 0");
  const double n = medium.index(kappa);
  const double mu = medium.permeability(kappa);
  const double q2 = n * n * kappa * kappa;
  return mu * (Eigen::Matrix3d::Identity() + k * k.transpose() / q2) / (k.squaredNorm() + q2);
}

}  // namespace earnshaw::translation
