#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "bisys/errors.hpp"
#include "bisys/richardson.hpp"
#include "bisys/two_body_system.hpp"

namespace bisys {

// Relativistic hydrogen-like level labels: principal n >= 1 and total angular
// momentum j in {1/2, 3/2, ...} with j + 1/2 <= n.
struct DiracLevel {
  int n;
  double j;
};

namespace detail {

template <typename Scalar>
void validate_level(const DiracLevel& level) {
  const double two_j = 2.0 * level.j;
  if (level.n < 1) throw std::domain_error("dirac: n must be a positive integer");
  if (std::abs(two_j - std::round(two_j)) > 1e-9 ||
      std::llround(two_j) % 2 == 0 || level.j < 0.5)
    throw std::domain_error("dirac: j must be half-integral (1/2, 3/2, ...)");
  if (level.j + 0.5 > static_cast<double>(level.n) + 1e-9)
    throw std::domain_error("dirac: j + 1/2 must not exceed n");
}

// Angular defect delta = (j+1/2) - sqrt((j+1/2)^2 - x^2), in the
// subtraction-free form x^2 / (j+1/2 + sqrt((j+1/2)^2 - x^2)).
template <typename Scalar>
Scalar angular_defect(Scalar coupling, const DiracLevel& level) {
  const Scalar jph = Scalar(level.j) + Scalar(0.5);
  if (!(coupling > Scalar(0)))
    throw std::domain_error("dirac: coupling must be positive");
  if (coupling >= jph)
    throw SupercriticalCouplingError(
        "dirac: coupling " + std::to_string(static_cast<double>(coupling)) +
        " reaches j + 1/2; no bound level");
  return coupling * coupling / (jph + std::sqrt((jph - coupling) * (jph + coupling)));
}

}  // namespace detail

// Point-Coulomb Dirac level including rest mass:
//   E = m [1 + x^2/(n - delta)^2]^(-1/2).
template <typename Scalar>
Scalar dirac_energy(Scalar mass, Scalar coupling, const DiracLevel& level) {
  static_assert(std::is_floating_point_v<Scalar>);
  detail::validate_level<Scalar>(level);
  if (!(mass > Scalar(0))) throw std::domain_error("dirac: mass must be positive");
  const Scalar ratio = coupling / (Scalar(level.n) - detail::angular_defect(coupling, level));
  return mass / std::sqrt(Scalar(1) + ratio * ratio);
}

// Binding energy E - m < 0 evaluated without cancellation:
//   E - m = m expm1(-log1p(y)/2),  y = [x/(n - delta)]^2.
template <typename Scalar>
Scalar dirac_binding(Scalar mass, Scalar coupling, const DiracLevel& level) {
  static_assert(std::is_floating_point_v<Scalar>);
  detail::validate_level<Scalar>(level);
  if (!(mass > Scalar(0))) throw std::domain_error("dirac: mass must be positive");
  const Scalar ratio = coupling / (Scalar(level.n) - detail::angular_defect(coupling, level));
  return mass * std::expm1(-std::log1p(ratio * ratio) / Scalar(2));
}

// Mass of the composite in the individual-coordinate prescription: each body
// keeps its full mass and feels the coupling reduced by the other's mass
// fraction, M_bound = E(m1, eta2 x) + E(m2, eta1 x).
template <typename Scalar>
Scalar bound_mass(const TwoBodySystemT<Scalar>& sys, Scalar coupling,
                  const DiracLevel& level) {
  return dirac_energy(sys.m1, sys.eta2 * coupling, level) +
         dirac_energy(sys.m2, sys.eta1 * coupling, level);
}

// Binding part of bound_mass, i.e. M_bound - (m1 + m2), cancellation-free.
template <typename Scalar>
Scalar bound_mass_binding(const TwoBodySystemT<Scalar>& sys, Scalar coupling,
                          const DiracLevel& level) {
  return dirac_binding(sys.m1, sys.eta2 * coupling, level) +
         dirac_binding(sys.m2, sys.eta1 * coupling, level);
}

// Positive mass defect m1 + m2 - M_bound.
template <typename Scalar>
Scalar mass_defect(const TwoBodySystemT<Scalar>& sys, Scalar coupling,
                   const DiracLevel& level) {
  return -bound_mass_binding(sys, coupling, level);
}

// Comparator spectra: the one-body Dirac level of a particle with the reduced
// mass in the full field, optionally with the leading recoil correction
// -mu^2 x^4 / (8 n^4 M) added.
enum class OldPrescription { ReducedMass, ReducedMassPlusRecoil };

template <typename Scalar>
Scalar old_binding(const TwoBodySystemT<Scalar>& sys, Scalar coupling,
                   const DiracLevel& level, OldPrescription variant) {
  Scalar binding = dirac_binding(sys.reduced_mass, coupling, level);
  if (variant == OldPrescription::ReducedMassPlusRecoil) {
    const Scalar x2 = coupling * coupling;
    const Scalar n2 = Scalar(level.n) * Scalar(level.n);
    binding -= sys.reduced_mass * sys.reduced_mass * x2 * x2 /
               (Scalar(8) * n2 * n2 * sys.total_mass);
  }
  return binding;
}

// Level shift of the individual-coordinate prescription against the chosen
// comparator, from the exact closed forms.
template <typename Scalar>
Scalar level_difference_numeric(const TwoBodySystemT<Scalar>& sys, Scalar coupling,
                                const DiracLevel& level, OldPrescription variant) {
  return bound_mass_binding(sys, coupling, level) -
         old_binding(sys, coupling, level, variant);
}

// The closed-form estimate of that shift quoted by the model,
//   D = x^4 M / n^3 { 3/(8n) [1 - rho (1 - rho/3)] - [1 - rho]/(2j+1) },
// with rho = m1 m2 / M^2. Evaluated literally as written.
template <typename Scalar>
Scalar level_difference_formula(const TwoBodySystemT<Scalar>& sys, Scalar coupling,
                                const DiracLevel& level) {
  detail::validate_level<Scalar>(level);
  const Scalar rho = sys.m1 * sys.m2 / (sys.total_mass * sys.total_mass);
  const Scalar n = Scalar(level.n);
  const Scalar x2 = coupling * coupling;
  const Scalar brace =
      Scalar(3) / (Scalar(8) * n) * (Scalar(1) - rho * (Scalar(1) - rho / Scalar(3))) -
      (Scalar(1) - rho) / (Scalar(2) * Scalar(level.j) + Scalar(1));
  return x2 * x2 * sys.total_mass / (n * n * n) * brace;
}

// Coefficient of x^4 in level_difference_numeric, extracted on the halving
// ladder {x, x/2, x/4} with Richardson elimination of the x^6 and x^8 terms.
template <typename Scalar>
Scalar quartic_coefficient(const TwoBodySystemT<Scalar>& sys, Scalar base_coupling,
                           const DiracLevel& level, OldPrescription variant) {
  std::vector<Scalar> rungs(3);
  Scalar x = base_coupling;
  for (auto& g : rungs) {
    const Scalar x4 = x * x * x * x;
    g = level_difference_numeric(sys, x, level, variant) / x4;
    x /= Scalar(2);
  }
  return richardson_limit(std::move(rungs));
}

// Residual x^2 coefficient of level_difference_numeric (should vanish: both
// prescriptions share the reduced-mass Bohr term). Same ladder, applied to
// D(x)/x^2.
template <typename Scalar>
Scalar quadratic_residual(const TwoBodySystemT<Scalar>& sys, Scalar base_coupling,
                          const DiracLevel& level, OldPrescription variant) {
  std::vector<Scalar> rungs(3);
  Scalar x = base_coupling;
  for (auto& g : rungs) {
    g = level_difference_numeric(sys, x, level, variant) / (x * x);
    x /= Scalar(2);
  }
  return richardson_limit(std::move(rungs));
}

template <typename Scalar>
struct SpectrumComparisonT {
  Scalar coupling;
  DiracLevel level;
  Scalar bound_mass;           // E1 + E2
  Scalar mass_defect;          // m1 + m2 - bound_mass
  Scalar old_bound_mass;       // comparator total mass
  Scalar difference_numeric;   // exact closed-form difference of bindings
  Scalar difference_formula;   // quoted x^4 estimate
  OldPrescription variant;
};

using SpectrumComparison = SpectrumComparisonT<double>;

template <typename Scalar>
SpectrumComparisonT<Scalar> compare_spectra(const TwoBodySystemT<Scalar>& sys,
                                            Scalar coupling, const DiracLevel& level,
                                            OldPrescription variant) {
  SpectrumComparisonT<Scalar> cmp;
  cmp.coupling = coupling;
  cmp.level = level;
  cmp.bound_mass = bound_mass(sys, coupling, level);
  cmp.mass_defect = mass_defect(sys, coupling, level);
  cmp.old_bound_mass = sys.total_mass + old_binding(sys, coupling, level, variant);
  cmp.difference_numeric = level_difference_numeric(sys, coupling, level, variant);
  cmp.difference_formula = level_difference_formula(sys, coupling, level);
  cmp.variant = variant;
  return cmp;
}

}  // namespace bisys
