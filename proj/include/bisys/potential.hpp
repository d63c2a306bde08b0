#pragma once

#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace bisys {

enum class PotentialKind { Coulomb, Harmonic, PowerLaw };

// Central potential V(r), one of
//   Coulomb   -k/r          (k > 0)
//   Harmonic  kappa*r^2/2   (kappa > 0)
//   PowerLaw  c*r^p         (p > -2, p != 0)
template <typename Scalar = double>
class CentralPotentialT {
  static_assert(std::is_floating_point_v<Scalar>);

 public:
  static CentralPotentialT coulomb(Scalar strength) {
    if (!(strength > Scalar(0)))
      throw std::domain_error("coulomb: strength must be positive");
    return CentralPotentialT(PotentialKind::Coulomb, strength, Scalar(-1));
  }

  static CentralPotentialT harmonic(Scalar stiffness) {
    if (!(stiffness > Scalar(0)))
      throw std::domain_error("harmonic: stiffness must be positive");
    return CentralPotentialT(PotentialKind::Harmonic, stiffness, Scalar(2));
  }

  static CentralPotentialT power_law(Scalar coefficient, Scalar exponent) {
    if (coefficient == Scalar(0) || !std::isfinite(coefficient))
      throw std::domain_error("power_law: coefficient must be finite and nonzero");
    if (!(exponent > Scalar(-2)) || exponent == Scalar(0))
      throw std::domain_error("power_law: exponent must satisfy p > -2, p != 0");
    return CentralPotentialT(PotentialKind::PowerLaw, coefficient, exponent);
  }

  PotentialKind kind() const { return kind_; }
  Scalar coefficient() const { return coeff_; }
  Scalar exponent() const { return exponent_; }

  Scalar operator()(Scalar r) const {
    switch (kind_) {
      case PotentialKind::Coulomb:
        return -coeff_ / r;
      case PotentialKind::Harmonic:
        return Scalar(0.5) * coeff_ * r * r;
      case PotentialKind::PowerLaw:
        return coeff_ * std::pow(r, exponent_);
    }
    return Scalar(0);
  }

  Scalar derivative(Scalar r) const {
    switch (kind_) {
      case PotentialKind::Coulomb:
        return coeff_ / (r * r);
      case PotentialKind::Harmonic:
        return coeff_ * r;
      case PotentialKind::PowerLaw:
        return coeff_ * exponent_ * std::pow(r, exponent_ - Scalar(1));
    }
    return Scalar(0);
  }

  // Length scale of the bound-state problem for a particle of the given mass
  // (hbar = 1): Coulomb 1/(m k), harmonic (m kappa)^(-1/4), generic power law
  // (m |c|)^(-1/(p+2)) by dimensional analysis.
  Scalar characteristic_length(Scalar mass) const {
    if (!(mass > Scalar(0)))
      throw std::domain_error("characteristic_length: mass must be positive");
    switch (kind_) {
      case PotentialKind::Coulomb:
        return Scalar(1) / (mass * coeff_);
      case PotentialKind::Harmonic:
        return std::pow(mass * coeff_, Scalar(-0.25));
      case PotentialKind::PowerLaw:
        return std::pow(mass * std::abs(coeff_), Scalar(-1) / (exponent_ + Scalar(2)));
    }
    return Scalar(1);
  }

 private:
  CentralPotentialT(PotentialKind kind, Scalar coeff, Scalar exponent)
      : kind_(kind), coeff_(coeff), exponent_(exponent) {}

  PotentialKind kind_;
  Scalar coeff_;   // k, kappa, or c
  Scalar exponent_;
};

using CentralPotential = CentralPotentialT<double>;

// The potential seen in an individual coordinate: value(r) = eta*V(r/eta).
// For V = c*r^p this is again a power law with coefficient eta^(1-p)*c, so
// Coulomb maps to Coulomb with strength eta^2*k and harmonic to stiffness
// kappa/eta. The derivative simplifies to V'(r/eta) by the chain rule.
template <typename Scalar = double>
class RescaledPotentialT {
 public:
  RescaledPotentialT(CentralPotentialT<Scalar> base, Scalar eta)
      : base_(base), eta_(eta) {
    if (!(eta > Scalar(0)) || !(eta < Scalar(1)))
      throw std::domain_error("RescaledPotential: eta must lie strictly in (0,1)");
  }

  Scalar eta() const { return eta_; }
  const CentralPotentialT<Scalar>& base() const { return base_; }

  Scalar operator()(Scalar r) const { return eta_ * base_(r / eta_); }
  Scalar derivative(Scalar r) const { return base_.derivative(r / eta_); }

  // Equivalent unrescaled potential with transformed parameters.
  CentralPotentialT<Scalar> closed_form() const {
    switch (base_.kind()) {
      case PotentialKind::Coulomb:
        return CentralPotentialT<Scalar>::coulomb(eta_ * eta_ * base_.coefficient());
      case PotentialKind::Harmonic:
        return CentralPotentialT<Scalar>::harmonic(base_.coefficient() / eta_);
      case PotentialKind::PowerLaw:
        return CentralPotentialT<Scalar>::power_law(
            std::pow(eta_, Scalar(1) - base_.exponent()) * base_.coefficient(),
            base_.exponent());
    }
    return base_;
  }

 private:
  CentralPotentialT<Scalar> base_;
  Scalar eta_;
};

using RescaledPotential = RescaledPotentialT<double>;

}  // namespace bisys
