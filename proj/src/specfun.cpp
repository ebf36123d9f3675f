#include "earnshaw/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "earnshaw/errors.hpp"

namespace earnshaw::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

void check_order(int lmax, int limit) {
  if (lmax < 0) throw DomainError("negative multipole order");
  if (lmax > limit) {
    throw CapabilityError("multipole order " + std::to_string(lmax) +
                          " exceeds supported maximum " + std::to_string(limit));
  }
}

void check_argument(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("Bessel argument must be positive and finite");
}

// Unscaled power series for i_l(x); every term is positive.
double i_series(int l, double x) {
  double term = 1.0;
  for (int k = 1; k <= l; ++k) term *= x / static_cast<double>(2 * k + 1);
  double sum = term;
  const double h = 0.5 * x * x;
  for (int k = 1; k < 500; ++k) {
    term *= h / (static_cast<double>(k) * static_cast<double>(2 * l + 2 * k + 1));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// i_{top+1} / i_top by the continued fraction r_l = 1 / ((2l+3)/x + r_{l+1}).
double i_ratio_cf(int top, double x) {
  constexpr double tiny = 1e-300;
  double f = (2.0 * top + 3.0) / x;
  double c = f;
  double d = 0.0;
  for (int j = 1; j < 100000; ++j) {
    const double b = (2.0 * (top + j) + 3.0) / x;
    d = b + d;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = b + 1.0 / c;
    if (std::abs(c) < tiny) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

}  // namespace

double ScaledBessel::true_value() const { return value * std::exp(log_scale); }
double ScaledBessel::true_deriv() const { return deriv * std::exp(log_scale); }

ScaledBesselArray mod_sph_bessel_i_array(int lmax, double x) {
  check_order(lmax, kMaxOrder + 2);
  check_argument(x);
  const int top = lmax + 1;
  std::vector<double> v(static_cast<std::size_t>(top) + 1);
  if (x < 2.0) {
    const double scale = std::exp(-x);
    for (int l = 0; l <= top; ++l) v[l] = i_series(l, x) * scale;
  } else {
    std::vector<double> u(static_cast<std::size_t>(top) + 2);
    u[top + 1] = i_ratio_cf(top, x);
    u[top] = 1.0;
    for (int l = top; l >= 1; --l) {
      u[l - 1] = u[l + 1] + (2.0 * l + 1.0) / x * u[l];
      if (u[l - 1] > 1e250) {
        for (int k = l - 1; k <= top + 1; ++k) u[k] *= 1e-250;
      }
    }
    const double i0 = -std::expm1(-2.0 * x) / (2.0 * x);
    const double norm = i0 / u[0];
    for (int l = 0; l <= top; ++l) v[l] = u[l] * norm;
  }
  ScaledBesselArray out;
  out.log_scale = x;
  out.value.assign(v.begin(), v.begin() + lmax + 1);
  out.deriv.resize(static_cast<std::size_t>(lmax) + 1);
  for (int l = 0; l <= lmax; ++l) out.deriv[l] = v[l + 1] + static_cast<double>(l) / x * v[l];
  return out;
}

ScaledBesselArray mod_sph_bessel_k_array(int lmax, double x) {
  if (lmax < 0) throw DomainError("negative multipole order");
  check_argument(x);
  std::vector<double> v(static_cast<std::size_t>(lmax) + 2);
  v[0] = 1.0 / x;
  v[1] = (1.0 + 1.0 / x) / x;
  for (int l = 1; l <= lmax; ++l) v[l + 1] = v[l - 1] + (2.0 * l + 1.0) / x * v[l];
  ScaledBesselArray out;
  out.log_scale = -x;
  out.value.assign(v.begin(), v.begin() + lmax + 1);
  out.deriv.resize(static_cast<std::size_t>(lmax) + 1);
  out.deriv[0] = -v[1];
  for (int l = 1; l <= lmax; ++l) out.deriv[l] = -v[l - 1] - (l + 1.0) / x * v[l];
  return out;
}

ScaledBessel mod_sph_bessel_i(int l, double x) {
  check_order(l, kMaxOrder + 2);
  const auto a = mod_sph_bessel_i_array(l, x);
  return {a.value[l], a.deriv[l], a.log_scale};
}

ScaledBessel mod_sph_bessel_k(int l, double x) {
  check_order(l, 2 * kMaxOrder + 2);
  const auto a = mod_sph_bessel_k_array(l, x);
  return {a.value[l], a.deriv[l], a.log_scale};
}

BesselEval mod_sph_bessel(int l, double x) {
  const auto i = mod_sph_bessel_i(l, x);
  const auto k = mod_sph_bessel_k(l, x);
  return {l, x, i.true_value(), k.true_value(), i.true_deriv(), k.true_deriv()};
}

std::vector<double> normalized_legendre(int lmax, double c) {
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  std::vector<double> p(static_cast<std::size_t>(legendre_index(lmax, lmax)) + 1, 0.0);
  p[0] = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= lmax; ++m) {
    p[legendre_index(m, m)] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[legendre_index(m - 1, m - 1)];
  }
  for (int m = 0; m < lmax; ++m) {
    p[legendre_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * c * p[legendre_index(m, m)];
  }
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 2; l <= lmax; ++l) {
      const double l2 = static_cast<double>(l) * l;
      const double m2 = static_cast<double>(m) * m;
      const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m2) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      p[legendre_index(l, m)] = a * (c * p[legendre_index(l - 1, m)] - b * p[legendre_index(l - 2, m)]);
    }
  }
  return p;
}

std::vector<std::complex<double>> spherical_harmonics(int lmax, double theta, double phi) {
  const auto p = normalized_legendre(lmax, std::cos(theta));
  std::vector<std::complex<double>> y(static_cast<std::size_t>((lmax + 1) * (lmax + 1)));
  for (int l = 0; l <= lmax; ++l) {
    for (int m = 0; m <= l; ++m) {
      const std::complex<double> v = p[legendre_index(l, m)] * std::polar(1.0, m * phi);
      y[lm_index(l, m)] = v;
      if (m > 0) y[lm_index(l, -m)] = ((m % 2) ? -1.0 : 1.0) * std::conj(v);
    }
  }
  return y;
}

std::complex<double> spherical_harmonic(int l, int m, double theta, double phi) {
  if (l < 0 || std::abs(m) > l) throw DomainError("spherical harmonic index out of range");
  const auto p = normalized_legendre(l, std::cos(theta));
  const std::complex<double> v = p[legendre_index(l, std::abs(m))] * std::polar(1.0, std::abs(m) * phi);
  if (m >= 0) return v;
  return ((m % 2) ? -1.0 : 1.0) * std::conj(v);
}

// ---------------------------------------------------------------------------
// Wigner 3j

namespace {

using BigInt = boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

const BigInt& factorial(int n) {
  static const std::vector<BigInt> table = [] {
    std::vector<BigInt> t(6 * kMaxOrder + 16);
    t[0] = 1;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<unsigned>(i);
    return t;
  }();
  if (n < 0 || static_cast<std::size_t>(n) >= table.size()) {
    throw CapabilityError("factorial argument out of supported range");
  }
  return table[static_cast<std::size_t>(n)];
}

double wigner3j_exact(int j1, int j2, int j3, int m1, int m2, int m3) {
  const int t_min = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int t_max = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  if (t_min > t_max) return 0.0;

  const int a = j3 - j2 + m1;
  const int b = j3 - j1 - m2;
  const int c = j1 + j2 - j3;
  const int e = j1 - m1;
  const int f = j2 + m2;

  // Common denominator D; D / den_t is an integer for every t in range.
  const BigInt denom = factorial(t_max) * factorial(a + t_max) * factorial(b + t_max) *
                       factorial(c - t_min) * factorial(e - t_min) * factorial(f - t_min);
  BigInt sum = 0;
  for (int t = t_min; t <= t_max; ++t) {
    const BigInt den_t = factorial(t) * factorial(a + t) * factorial(b + t) * factorial(c - t) *
                         factorial(e - t) * factorial(f - t);
    const BigInt term = denom / den_t;
    if (t % 2) {
      sum -= term;
    } else {
      sum += term;
    }
  }
  if (sum == 0) return 0.0;

  const BigInt num = factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3) *
                     factorial(j1 + m1) * factorial(j1 - m1) * factorial(j2 + m2) * factorial(j2 - m2) *
                     factorial(j3 + m3) * factorial(j3 - m3) * sum * sum;
  const BigInt den = factorial(j1 + j2 + j3 + 1) * denom * denom;
  const BigFloat magnitude = boost::multiprecision::sqrt(BigFloat(num) / BigFloat(den));
  double value = magnitude.convert_to<double>();
  if (sum < 0) value = -value;
  const int phase = j1 - j2 - m3;
  if (((phase % 2) + 2) % 2 == 1) value = -value;
  return value;
}

std::uint64_t pack(const std::array<int, 6>& v) {
  std::uint64_t k = 0;
  for (int i = 0; i < 6; ++i) k = (k << 10) | static_cast<std::uint64_t>(v[i] + 512);
  return k;
}

// Canonical representative under column permutations and m -> -m.
std::pair<std::array<int, 6>, int> canonical(int l1, int l2, int l3, int m1, int m2, int m3) {
  const int odd = (l1 + l2 + l3) % 2;
  const std::array<std::array<int, 2>, 3> cols{{{l1, m1}, {l2, m2}, {l3, m3}}};
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}}};
  std::array<int, 6> best{};
  int best_sign = 1;
  bool first = true;
  for (int p = 0; p < 6; ++p) {
    for (int flip = 0; flip < 2; ++flip) {
      std::array<int, 6> cand{};
      for (int c = 0; c < 3; ++c) {
        cand[c] = cols[perms[p][c]][0];
        cand[3 + c] = flip ? -cols[perms[p][c]][1] : cols[perms[p][c]][1];
      }
      int sign = 1;
      if (odd && p >= 3) sign = -sign;
      if (odd && flip) sign = -sign;
      if (first || cand > best) {
        best = cand;
        best_sign = sign;
        first = false;
      }
    }
  }
  return {best, best_sign};
}

class Wigner3jCache {
 public:
  bool find(std::uint64_t key, double& out) const {
    std::shared_lock lock(mutex_);
    auto it = map_.find(key);
    if (it == map_.end()) return false;
    out = it->second;
    return true;
  }
  void insert(std::uint64_t key, double value) {
    std::unique_lock lock(mutex_);
    map_.emplace(key, value);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, double> map_;
};

Wigner3jCache& cache() {
  static Wigner3jCache c;
  return c;
}

}  // namespace

double wigner3j(int l1, int l2, int l3, int m1, int m2, int m3) {
  if (l1 < 0 || l2 < 0 || l3 < 0) return 0.0;
  if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(m3) > l3) return 0.0;
  if (m1 + m2 + m3 != 0) return 0.0;
  if (l3 < std::abs(l1 - l2) || l3 > l1 + l2) return 0.0;
  if (m1 == 0 && m2 == 0 && m3 == 0 && (l1 + l2 + l3) % 2 == 1) return 0.0;
  if (std::max({l1, l2, l3}) > 2 * kMaxOrder + 2) {
    throw CapabilityError("wigner3j order exceeds supported maximum");
  }

  const auto [canon, sign] = canonical(l1, l2, l3, m1, m2, m3);
  const std::uint64_t key = pack(canon);
  double value = 0.0;
  if (!cache().find(key, value)) {
    value = wigner3j_exact(canon[0], canon[1], canon[2], canon[3], canon[4], canon[5]);
    cache().insert(key, value);
  }
  return sign * value;
}

double gaunt(int l1, int m1, int l2, int m2, int l3, int m3) {
  if (m1 + m2 + m3 != 0) return 0.0;
  const double w0 = wigner3j(l1, l2, l3, 0, 0, 0);
  if (w0 == 0.0) return 0.0;
  const double w = wigner3j(l1, l2, l3, m1, m2, m3);
  if (w == 0.0) return 0.0;
  return std::sqrt((2.0 * l1 + 1.0) * (2.0 * l2 + 1.0) * (2.0 * l3 + 1.0) / (4.0 * kPi)) * w0 * w;
}

}  // namespace earnshaw::specfun
