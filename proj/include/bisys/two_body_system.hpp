#pragma once

#include <stdexcept>
#include <type_traits>

namespace bisys {

// Two point masses bound by a central potential. The mass fractions
// eta1 = m1/(m1+m2) and eta2 = m2/(m1+m2) fix the center-of-mass frame
// kinematics: r1 = eta2*r, r2 = -eta1*r for relative coordinate r, and
// every bound-state quantity of body i scales with the opposite fraction.
template <typename Scalar = double>
struct TwoBodySystemT {
  static_assert(std::is_floating_point_v<Scalar>);

  Scalar m1{};
  Scalar m2{};
  Scalar total_mass{};
  Scalar reduced_mass{};
  Scalar eta1{};
  Scalar eta2{};
};

using TwoBodySystem = TwoBodySystemT<double>;

template <typename Scalar>
TwoBodySystemT<Scalar> make_system(Scalar m1, Scalar m2) {
  if (!(m1 > Scalar(0)) || !(m2 > Scalar(0)))
    throw std::domain_error("make_system: masses must be positive and finite");
  TwoBodySystemT<Scalar> sys;
  sys.m1 = m1;
  sys.m2 = m2;
  sys.total_mass = m1 + m2;
  sys.eta1 = m1 / sys.total_mass;
  sys.eta2 = m2 / sys.total_mass;
  // mu = m1*m2/M, written in fraction form to stay finite for extreme ratios
  sys.reduced_mass = sys.eta1 * m2;
  return sys;
}

}  // namespace bisys
