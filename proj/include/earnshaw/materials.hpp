#pragma once

// Imaginary-frequency response functions and the sign classification of
// objects relative to the enveloping medium.
//
// Units: hbar = c = 1. Lengths are in a user-chosen unit L, wavenumbers
// kappa in 1/L, energies in hbar c / L.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace earnshaw::materials {

struct Constant {
  double value = 1.0;
};
/// eps(i kappa) = 1 + omega_p^2 / kappa^2
struct Plasma {
  double omega_p = 0.0;
};
/// eps(i kappa) = 1 + omega_p^2 / (kappa (kappa + gamma))
struct Drude {
  double omega_p = 0.0;
  double gamma = 0.0;
};
struct LorentzOscillator {
  double strength = 0.0;   ///< f_j
  double resonance = 0.0;  ///< omega_j
  double damping = 0.0;    ///< g_j
};
/// eps(i kappa) = 1 + sum_j f_j w_j^2 / (w_j^2 + kappa^2 + g_j kappa)
struct Lorentz {
  std::vector<LorentzOscillator> oscillators;
};
/// eps -> infinity. Kept as its own variant so scattering code can use the
/// exact conductor limit instead of a large number.
struct PerfectConductor {};

class DispersionModel {
 public:
  using Variant = std::variant<Constant, Plasma, Drude, Lorentz, PerfectConductor>;

  DispersionModel() : model_(Constant{1.0}) {}
  DispersionModel(Variant v);  // NOLINT(google-explicit-constructor)

  static DispersionModel constant(double v) { return DispersionModel(Constant{v}); }
  static DispersionModel plasma(double wp) { return DispersionModel(Plasma{wp}); }
  static DispersionModel drude(double wp, double gamma) { return DispersionModel(Drude{wp, gamma}); }
  static DispersionModel lorentz(std::vector<LorentzOscillator> osc) {
    return DispersionModel(Lorentz{std::move(osc)});
  }
  static DispersionModel perfect_conductor() { return DispersionModel(PerfectConductor{}); }

  const Variant& variant() const { return model_; }
  bool is_perfect_conductor() const { return std::holds_alternative<PerfectConductor>(model_); }
  bool is_constant() const { return std::holds_alternative<Constant>(model_); }
  /// Plasma and Drude diverge at kappa = 0.
  bool diverges_at_zero() const;
  std::string describe() const;

 private:
  Variant model_;
};

/// Response function at imaginary frequency i kappa. Returns +infinity for a
/// perfect conductor. Throws DomainError for kappa < 0 and for Plasma/Drude
/// at kappa = 0 (callers evaluate the zero mode at a floor frequency).
double eval_epsilon(const DispersionModel& model, double kappa);

/// Uniform, isotropic background.
struct Medium {
  DispersionModel eps = DispersionModel::constant(1.0);
  DispersionModel mu = DispersionModel::constant(1.0);

  static Medium vacuum() { return {}; }
  double epsilon(double kappa) const { return eval_epsilon(eps, kappa); }
  double permeability(double kappa) const { return eval_epsilon(mu, kappa); }
  /// n_M = sqrt(eps_M mu_M).
  double index(double kappa) const;
};

enum class MaterialClass { ClassI, ClassII, Neutral, Indeterminate };

struct Classification {
  MaterialClass cls = MaterialClass::Indeterminate;
  /// +1, -1, 0; empty when the sign cannot be determined.
  std::optional<int> sign;
};

/// ClassI if eps_J > eps_M and mu_J <= mu_M at every sample, ClassII for the
/// reverse inequalities, Neutral if both match everywhere, otherwise
/// Indeterminate. A perfect conductor is ClassI in any finite medium.
Classification classify(const DispersionModel& object_eps, const DispersionModel& object_mu,
                        const Medium& medium, std::span<const double> kappa_samples);

/// Product s^A s^R, empty when either sign is unknown.
std::optional<int> sign_product(const Classification& a, const Classification& b);

std::string to_string(MaterialClass c);

}  // namespace earnshaw::materials
