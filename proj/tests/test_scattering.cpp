#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "earnshaw/errors.hpp"
#include "earnshaw/materials.hpp"
#include "earnshaw/scattering.hpp"

using namespace earnshaw;
using namespace earnshaw::scattering;
using materials::DispersionModel;
using materials::Medium;

namespace {

SphereObject sphere_of(DispersionModel eps, double radius = 1.0, DispersionModel mu = DispersionModel::constant(1.0)) {
  SphereObject s;
  s.radius = radius;
  s.eps = eps;
  s.mu = mu;
  return s;
}

Medium medium_of(double eps, double mu = 1.0) {
  return {DispersionModel::constant(eps), DispersionModel::constant(mu)};
}

}  // namespace

TEST_CASE("matched sphere does not scatter") {
  auto t = mie_tmatrix(sphere_of(DispersionModel::constant(1.7), 0.8, DispersionModel::constant(1.2)),
                       medium_of(1.7, 1.2), 1.3, 10);
  for (int l = 1; l <= 10; ++l) {
    CHECK(std::abs(t.entry(Polarization::Magnetic, l)) < 1e-14);
    CHECK(std::abs(t.entry(Polarization::Electric, l)) < 1e-14);
  }
  CHECK(definiteness(t) == Definiteness::Zero);
}

TEST_CASE("PEC sphere small-argument series") {
  const double R = 0.7;
  for (double kappa : {1e-3, 1e-2, 5e-2}) {
    const double x = kappa * R;
    auto t = mie_tmatrix(sphere_of(DispersionModel::perfect_conductor(), R), Medium::vacuum(), kappa, 3);
    const double mag = x * x * x / 3 + std::pow(x, 5) / 5 - std::pow(x, 6) / 9 + std::pow(x, 7) / 7;
    const double ele = 2 * x * x * x / 3 - std::pow(x, 5) / 5 + 4 * std::pow(x, 6) / 9 - std::pow(x, 7) / 7;
    CHECK(t.entry(Polarization::Magnetic, 1) == doctest::Approx(mag).epsilon(2 * std::pow(x, 5)));
    CHECK(t.entry(Polarization::Electric, 1) == doctest::Approx(ele).epsilon(2 * std::pow(x, 5)));
    // Static limits: electric polarizability R^3, magnetic -R^3/2.
    const double k3 = kappa * kappa * kappa;
    CHECK(t.entry(Polarization::Electric, 1) / k3 == doctest::Approx(2.0 / 3.0 * R * R * R).epsilon(1e-2));
    CHECK(t.entry(Polarization::Magnetic, 1) / k3 == doctest::Approx(-2.0 / 3.0 * (-0.5 * R * R * R)).epsilon(1e-2));
  }
}

TEST_CASE("dielectric sphere signs") {
  auto pos = mie_tmatrix(sphere_of(DispersionModel::constant(2.0)), Medium::vacuum(), 1.0, 8);
  for (int l = 1; l <= 8; ++l) {
    CHECK(pos.entry(Polarization::Magnetic, l) >= 0.0);
    CHECK(pos.entry(Polarization::Electric, l) >= 0.0);
  }
  CHECK(definiteness(pos) == Definiteness::Positive);
  auto neg = mie_tmatrix(sphere_of(DispersionModel::constant(0.5)), Medium::vacuum(), 1.0, 8);
  CHECK(definiteness(neg) == Definiteness::Negative);
  CHECK(definiteness(neg.dense()) == Definiteness::Negative);
  CHECK(to_sign(definiteness(pos.dense())) == 1);
}

TEST_CASE("definiteness of plain matrices") {
  CHECK(definiteness(Eigen::MatrixXd::Zero(4, 4)) == Definiteness::Zero);
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, -1;
  CHECK(definiteness(m) == Definiteness::Mixed);
  m << 2, 1, 1, 2;
  CHECK(definiteness(m) == Definiteness::Positive);
  CHECK(to_string(Definiteness::Mixed) == "mixed");
}

TEST_CASE("definiteness agrees with classification") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const double eps_m = 1.0 + 2.0 * u(rng), mu_m = 0.5 + u(rng);
    Medium med = medium_of(eps_m, mu_m);
    DispersionModel eps_j = DispersionModel::constant(0.2 + 5.0 * u(rng));
    DispersionModel mu_j = DispersionModel::constant(0.2 + 2.0 * u(rng));
    if (trial % 5 == 0) eps_j = DispersionModel::drude(0.5 + 3 * u(rng), 0.1 + u(rng));
    if (trial % 7 == 0) eps_j = DispersionModel::perfect_conductor();
    const double kappa = 0.05 + 3.0 * u(rng), R = 0.2 + 2.0 * u(rng);
    const int l_max = 1 + static_cast<int>(12 * u(rng));
    const double ks[] = {kappa};
    auto c = materials::classify(eps_j, mu_j, med, ks);
    if (!c.sign || *c.sign == 0) continue;
    auto t = mie_tmatrix(sphere_of(eps_j, R, mu_j), med, kappa, l_max);
    CHECK(to_sign(definiteness(t)) == *c.sign);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("entries decay with l") {
  for (double kr : {0.3, 2.0, 8.0}) {
    auto t = mie_tmatrix(sphere_of(DispersionModel::constant(3.0)), Medium::vacuum(), kr, 40);
    auto p = mie_tmatrix(sphere_of(DispersionModel::perfect_conductor()), Medium::vacuum(), kr, 40);
    const int start = std::max(1, static_cast<int>(std::ceil(std::exp(1.0) * kr / 2)));
    for (int l = start; l < 40; ++l) {
      for (auto pol : {Polarization::Magnetic, Polarization::Electric}) {
        CHECK(std::abs(t.scaled(pol, l + 1)) < std::abs(t.scaled(pol, l)));
        CHECK(std::abs(p.scaled(pol, l + 1)) < std::abs(p.scaled(pol, l)));
      }
    }
  }
}

TEST_CASE("large kappa R stays finite in scaled form") {
  auto t = mie_tmatrix(sphere_of(DispersionModel::constant(4.0)), Medium::vacuum(), 400.0, 30);
  for (int l = 1; l <= 30; ++l) CHECK(std::isfinite(t.scaled(Polarization::Electric, l)));
  CHECK(t.log_scale == doctest::Approx(800.0));
}

TEST_CASE("m independence and layout") {
  auto t = mie_tmatrix(sphere_of(DispersionModel::constant(2.5)), Medium::vacuum(), 0.9, 4);
  auto d = t.scaled_diagonal();
  REQUIRE(d.size() == 2 * multipole_count(4));
  for (int l = 1; l <= 4; ++l)
    for (int m = -l; m <= l; ++m) {
      CHECK(d[vector_index(Polarization::Electric, l, m, 4)] == t.electric[l - 1]);
      CHECK(d[vector_index(Polarization::Magnetic, l, m, 4)] == t.magnetic[l - 1]);
    }
}

TEST_CASE("T-matrix errors") {
  auto s = sphere_of(DispersionModel::constant(2.0));
  CHECK_THROWS_AS(mie_tmatrix(s, Medium::vacuum(), 1.0, 200), CapabilityError);
  CHECK_THROWS_AS(mie_tmatrix(s, Medium::vacuum(), 1.0, 0), ValidationError);
  CHECK_THROWS_AS(mie_tmatrix(s, Medium::vacuum(), 0.0, 3), DomainError);
}

TEST_CASE("Fresnel coefficients") {
  auto pec = fresnel_reflection(DispersionModel::perfect_conductor(), DispersionModel::constant(1.0),
                                Medium::vacuum(), 0.7, 2.0);
  CHECK(pec.r_tm == 1.0);
  CHECK(pec.r_te == -1.0);
  auto matched = fresnel_reflection(DispersionModel::constant(2.0), DispersionModel::constant(1.0), medium_of(2.0),
                                    0.7, 0.3);
  CHECK(matched.r_tm == 0.0);
  CHECK(matched.r_te == 0.0);
  auto r = fresnel_reflection(DispersionModel::constant(2.0), DispersionModel::constant(1.0), Medium::vacuum(), 1.3,
                              0.0);
  const double normal = (std::sqrt(2.0) - 1.0) / (std::sqrt(2.0) + 1.0);
  CHECK(std::abs(r.r_tm - normal) < 1e-14);
  CHECK(std::abs(r.r_te + normal) < 1e-14);
  // Large-eps dielectric approaches the conductor.
  auto big = fresnel_reflection(DispersionModel::constant(1e10), DispersionModel::constant(1.0), Medium::vacuum(),
                                1.0, 1.0);
  CHECK(big.r_tm == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(big.r_te == doctest::Approx(-1.0).epsilon(1e-4));
}
