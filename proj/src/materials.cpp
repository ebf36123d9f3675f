#include "earnshaw/materials.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "earnshaw/errors.hpp"

namespace earnshaw::materials {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const DispersionModel::Variant& v) {
  std::visit(Overloaded{
                 [](const Constant& c) {
                   if (!(c.value > 0.0) || !std::isfinite(c.value))
                     throw ValidationError("constant response must be positive and finite");
                 },
                 [](const Plasma& p) {
                   if (!(p.omega_p >= 0.0)) throw ValidationError("plasma frequency must be non-negative");
                 },
                 [](const Drude& d) {
                   if (!(d.omega_p >= 0.0) || !(d.gamma >= 0.0))
                     throw ValidationError("Drude parameters must be non-negative");
                 },
                 [](const Lorentz& l) {
                   for (const auto& o : l.oscillators) {
                     if (!(o.strength >= 0.0) || !(o.resonance > 0.0) || !(o.damping >= 0.0))
                       throw ValidationError("Lorentz oscillator parameters out of range");
                   }
                 },
                 [](const PerfectConductor&) {},
             },
             v);
}

// Relative comparison used to decide equality of response functions.
int compare(double a, double b) {
  if (std::isinf(a) && std::isinf(b)) return 0;
  if (std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b))) return 0;
  return a < b ? -1 : 1;
}

}  // namespace

DispersionModel::DispersionModel(Variant v) : model_(std::move(v)) { validate(model_); }

bool DispersionModel::diverges_at_zero() const {
  return std::holds_alternative<Plasma>(model_) || std::holds_alternative<Drude>(model_);
}

std::string DispersionModel::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Constant& c) { os << "constant(" << c.value << ")"; },
                 [&](const Plasma& p) { os << "plasma(omega_p=" << p.omega_p << ")"; },
                 [&](const Drude& d) { os << "drude(omega_p=" << d.omega_p << ", gamma=" << d.gamma << ")"; },
                 [&](const Lorentz& l) { os << "lorentz(" << l.oscillators.size() << " oscillators)"; },
                 [&](const PerfectConductor&) { os << "perfect_conductor"; },
             },
             model_);
  return os.str();
}

double eval_epsilon(const DispersionModel& model, double kappa) {
  if (!(kappa >= 0.0)) throw DomainError("response functions need kappa >= 0");
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.value; },
          [&](const Plasma& p) {
            if (kappa == 0.0)
              throw DomainError("zero-frequency limit: plasma model diverges at kappa = 0; "
                                "evaluate the zero mode at the kappa floor");
            return 1.0 + p.omega_p * p.omega_p / (kappa * kappa);
          },
          [&](const Drude& d) {
            if (kappa == 0.0)
              throw DomainError("zero-frequency limit: Drude model diverges at kappa = 0; "
                                "evaluate the zero mode at the kappa floor");
            return 1.0 + d.omega_p * d.omega_p / (kappa * (kappa + d.gamma));
          },
          [&](const Lorentz& l) {
            double e = 1.0;
            for (const auto& o : l.oscillators) {
              const double w2 = o.resonance * o.resonance;
              e += o.strength * w2 / (w2 + kappa * kappa + o.damping * kappa);
            }
            return e;
          },
          [](const PerfectConductor&) { return std::numeric_limits<double>::infinity(); },
      },
      model.variant());
}

double Medium::index(double kappa) const {
  if (eps.is_perfect_conductor() || mu.is_perfect_conductor())
    throw ValidationError("the medium cannot be a perfect conductor");
  return std::sqrt(epsilon(kappa) * permeability(kappa));
}

Classification classify(const DispersionModel& object_eps, const DispersionModel& object_mu,
                        const Medium& medium, std::span<const double> kappa_samples) {
  if (kappa_samples.empty()) throw DomainError("classification needs at least one kappa sample");
  for (double k : kappa_samples) {
    if (!(k > 0.0)) throw DomainError("classification samples must be positive");
  }
  if (object_eps.is_perfect_conductor()) {
    for (double k : kappa_samples) (void)medium.epsilon(k);
    return {MaterialClass::ClassI, 1};
  }

  bool class1 = true;
  bool class2 = true;
  bool neutral = true;
  for (double k : kappa_samples) {
    const int ce = compare(eval_epsilon(object_eps, k), medium.epsilon(k));
    const int cm = compare(eval_epsilon(object_mu, k), medium.permeability(k));
    class1 = class1 && ce > 0 && cm <= 0;
    class2 = class2 && ce < 0 && cm >= 0;
    neutral = neutral && ce == 0 && cm == 0;
  }
  if (neutral) return {MaterialClass::Neutral, 0};
  if (class1) return {MaterialClass::ClassI, 1};
  if (class2) return {MaterialClass::ClassII, -1};
  return {MaterialClass::Indeterminate, std::nullopt};
}

std::optional<int> sign_product(const Classification& a, const Classification& b) {
  if (!a.sign || !b.sign) return std::nullopt;
  return *a.sign * *b.sign;
}

std::string to_string(MaterialClass c) {
  switch (c) {
    case MaterialClass::ClassI: return "ClassI";
    case MaterialClass::ClassII: return "ClassII";
    case MaterialClass::Neutral: return "Neutral";
    case MaterialClass::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

}  // namespace earnshaw::materials
