#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "bisys/errors.hpp"
#include "bisys/potential.hpp"
#include "bisys/two_body_system.hpp"

namespace bisys {

template <typename Scalar>
struct ClassicalStateT {
  Eigen::Vector3<Scalar> position;
  Eigen::Vector3<Scalar> velocity;
};

using ClassicalState = ClassicalStateT<double>;

// Time series of one coordinate (relative or individual), one column per sample.
template <typename Scalar>
struct TrajectoryT {
  Eigen::VectorX<Scalar> t;
  Eigen::Matrix3X<Scalar> position;
  Eigen::Matrix3X<Scalar> velocity;
};

using Trajectory = TrajectoryT<double>;

template <typename Scalar>
struct IntegrationOptionsT {
  Scalar r_min = Scalar(1e-9);  // collision guard for singular potentials
  Eigen::Index stride = 1;      // keep every stride-th step
};

using IntegrationOptions = IntegrationOptionsT<double>;

namespace detail {

template <typename Scalar>
bool force_is_singular(const CentralPotentialT<Scalar>& pot) {
  return pot.kind() == PotentialKind::Coulomb ||
         (pot.kind() == PotentialKind::PowerLaw && pot.exponent() < Scalar(1));
}

// Fourth-order Yoshida composition of velocity-Verlet substeps. Accel is
// called with the current position and the current time (for error reports).
template <typename Scalar, typename Accel>
TrajectoryT<Scalar> integrate_yoshida4(const ClassicalStateT<Scalar>& ic,
                                       Scalar t_end, Scalar dt,
                                       Eigen::Index stride, Accel&& accel) {
  if (!(dt > Scalar(0)) || !(t_end > Scalar(0)))
    throw std::domain_error("integrate: t_end and dt must be positive");
  if (stride < 1) throw std::domain_error("integrate: stride must be >= 1");

  const Scalar cbrt2 = std::cbrt(Scalar(2));
  const Scalar w1 = Scalar(1) / (Scalar(2) - cbrt2);
  const Scalar w0 = -cbrt2 * w1;
  const Scalar weights[3] = {w1, w0, w1};

  const auto n_steps = static_cast<Eigen::Index>(std::llround(t_end / dt));
  const Eigen::Index n_samples = n_steps / stride + 1;

  TrajectoryT<Scalar> traj;
  traj.t.resize(n_samples);
  traj.position.resize(3, n_samples);
  traj.velocity.resize(3, n_samples);

  Eigen::Vector3<Scalar> x = ic.position;
  Eigen::Vector3<Scalar> v = ic.velocity;
  Eigen::Vector3<Scalar> a = accel(x, Scalar(0));

  Eigen::Index out = 0;
  traj.t[out] = Scalar(0);
  traj.position.col(out) = x;
  traj.velocity.col(out) = v;
  ++out;

  for (Eigen::Index step = 0; step < n_steps; ++step) {
    const Scalar t0 = Scalar(step) * dt;
    for (const Scalar w : weights) {
      const Scalar h = w * dt;
      v += (h / Scalar(2)) * a;
      x += h * v;
      a = accel(x, t0);
      v += (h / Scalar(2)) * a;
    }
    if ((step + 1) % stride == 0) {
      traj.t[out] = Scalar(step + 1) * dt;
      traj.position.col(out) = x;
      traj.velocity.col(out) = v;
      ++out;
    }
  }
  traj.t.conservativeResize(out);
  traj.position.conservativeResize(3, out);
  traj.velocity.conservativeResize(3, out);
  return traj;
}

}  // namespace detail

// Center-of-mass frame positions r1 = eta2*r, r2 = -eta1*r and likewise for
// velocities, so that m1*v1 + m2*v2 = 0 identically.
template <typename Scalar>
std::pair<ClassicalStateT<Scalar>, ClassicalStateT<Scalar>> derive_individual_ics(
    const TwoBodySystemT<Scalar>& sys, const ClassicalStateT<Scalar>& rel) {
  ClassicalStateT<Scalar> body1{sys.eta2 * rel.position, sys.eta2 * rel.velocity};
  ClassicalStateT<Scalar> body2{-sys.eta1 * rel.position, -sys.eta1 * rel.velocity};
  return {body1, body2};
}

// Relative dynamics: mu r'' = -V'(|r|) r_hat.
template <typename Scalar>
TrajectoryT<Scalar> integrate_relative(const TwoBodySystemT<Scalar>& sys,
                                       const CentralPotentialT<Scalar>& pot,
                                       const ClassicalStateT<Scalar>& ic,
                                       Scalar t_end, Scalar dt,
                                       const IntegrationOptionsT<Scalar>& opts = {}) {
  const bool guard = detail::force_is_singular(pot);
  const Scalar inv_mu = Scalar(1) / sys.reduced_mass;
  auto accel = [&](const Eigen::Vector3<Scalar>& x, Scalar t) {
    const Scalar r = x.norm();
    if (guard && r < opts.r_min)
      throw IntegrationError("integrate_relative: separation below collision guard",
                             static_cast<double>(t));
    return Eigen::Vector3<Scalar>(-inv_mu * pot.derivative(r) / r * x);
  };
  return detail::integrate_yoshida4(ic, t_end, dt, opts.stride, accel);
}

// Individual dynamics of one body in its own coordinate: the potential is the
// eta-rescaled one, eta being the mass fraction of the *other* body, so
// m_i r_i'' = -V'(|r_i|/eta) r_hat.
template <typename Scalar>
TrajectoryT<Scalar> integrate_individual(const TwoBodySystemT<Scalar>& sys,
                                         const CentralPotentialT<Scalar>& pot,
                                         int body,
                                         const ClassicalStateT<Scalar>& ic,
                                         Scalar t_end, Scalar dt,
                                         const IntegrationOptionsT<Scalar>& opts = {}) {
  if (body != 1 && body != 2)
    throw std::domain_error("integrate_individual: body must be 1 or 2");
  const Scalar eta = (body == 1) ? sys.eta2 : sys.eta1;
  const Scalar mass = (body == 1) ? sys.m1 : sys.m2;
  const RescaledPotentialT<Scalar> resc(pot, eta);
  const bool guard = detail::force_is_singular(pot);
  const Scalar guard_radius = opts.r_min * eta;
  auto accel = [&, eta, mass](const Eigen::Vector3<Scalar>& x, Scalar t) {
    const Scalar r = x.norm();
    if (guard && r < guard_radius)
      throw IntegrationError("integrate_individual: separation below collision guard",
                             static_cast<double>(t));
    return Eigen::Vector3<Scalar>(-resc.derivative(r) / (mass * r) * x);
  };
  return detail::integrate_yoshida4(ic, t_end, dt, opts.stride, accel);
}

// The three runs with per-sample conserved quantities on a shared time grid.
template <typename Scalar>
struct TrajectorySetT {
  TrajectoryT<Scalar> relative, body1, body2;
  Eigen::VectorX<Scalar> energy_rel, energy_body1, energy_body2;
  Eigen::Matrix3X<Scalar> angmom_rel, angmom_body1, angmom_body2;
  bool cm_consistent = false;  // individual ICs derived from the relative ones
};

using TrajectorySet = TrajectorySetT<double>;

template <typename Scalar>
TrajectorySetT<Scalar> assemble_trajectory_set(const TwoBodySystemT<Scalar>& sys,
                                               const CentralPotentialT<Scalar>& pot,
                                               TrajectoryT<Scalar> relative,
                                               TrajectoryT<Scalar> body1,
                                               TrajectoryT<Scalar> body2) {
  const Eigen::Index n = relative.t.size();
  if (body1.t.size() != n || body2.t.size() != n ||
      (body1.t - relative.t).cwiseAbs().maxCoeff() != Scalar(0) ||
      (body2.t - relative.t).cwiseAbs().maxCoeff() != Scalar(0))
    throw std::domain_error("assemble_trajectory_set: trajectories must share one time grid");

  TrajectorySetT<Scalar> set;
  set.relative = std::move(relative);
  set.body1 = std::move(body1);
  set.body2 = std::move(body2);

  const RescaledPotentialT<Scalar> pot1(pot, sys.eta2), pot2(pot, sys.eta1);
  set.energy_rel.resize(n);
  set.energy_body1.resize(n);
  set.energy_body2.resize(n);
  set.angmom_rel.resize(3, n);
  set.angmom_body1.resize(3, n);
  set.angmom_body2.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = set.relative.position.col(i);
    const auto v = set.relative.velocity.col(i);
    const auto r1 = set.body1.position.col(i);
    const auto v1 = set.body1.velocity.col(i);
    const auto r2 = set.body2.position.col(i);
    const auto v2 = set.body2.velocity.col(i);
    set.energy_rel[i] = Scalar(0.5) * sys.reduced_mass * v.squaredNorm() + pot(r.norm());
    set.energy_body1[i] = Scalar(0.5) * sys.m1 * v1.squaredNorm() + pot1(r1.norm());
    set.energy_body2[i] = Scalar(0.5) * sys.m2 * v2.squaredNorm() + pot2(r2.norm());
    set.angmom_rel.col(i) = sys.reduced_mass * r.cross(v);
    set.angmom_body1.col(i) = sys.m1 * r1.cross(v1);
    set.angmom_body2.col(i) = sys.m2 * r2.cross(v2);
  }

  const Scalar pos_scale = set.relative.position.colwise().norm().maxCoeff();
  const Scalar vel_scale = set.relative.velocity.colwise().norm().maxCoeff();
  const Scalar tol = Scalar(1e-12);
  set.cm_consistent =
      (set.body1.position.col(0) - sys.eta2 * set.relative.position.col(0)).norm() <= tol * pos_scale &&
      (set.body2.position.col(0) + sys.eta1 * set.relative.position.col(0)).norm() <= tol * pos_scale &&
      (set.body1.velocity.col(0) - sys.eta2 * set.relative.velocity.col(0)).norm() <= tol * vel_scale &&
      (set.body2.velocity.col(0) + sys.eta1 * set.relative.velocity.col(0)).norm() <= tol * vel_scale;
  return set;
}

// Maximum residuals of the individual-vs-relative equivalence over a run.
template <typename Scalar>
struct EquivalenceReportT {
  Scalar max_pos_residual_body1, max_pos_residual_body2;
  Scalar max_energy_residual_body1, max_energy_residual_body2;
  Scalar max_angmom_residual_body1, max_angmom_residual_body2;
  Scalar max_momentum_sum;      // |m1 v1 + m2 v2|, zero in the CM frame
  Scalar max_cm_displacement;   // |eta1 r1 + eta2 r2|
  Scalar energy_drift_rel, energy_drift_body1, energy_drift_body2;
  Scalar position_scale, energy_scale, angmom_scale;
  bool cm_consistent;
};

using EquivalenceReport = EquivalenceReportT<double>;

template <typename Scalar>
EquivalenceReportT<Scalar> check_equivalence(const TrajectorySetT<Scalar>& set,
                                             const TwoBodySystemT<Scalar>& sys) {
  EquivalenceReportT<Scalar> rep;
  rep.cm_consistent = set.cm_consistent;
  rep.position_scale = set.relative.position.colwise().norm().maxCoeff();
  rep.energy_scale = std::abs(set.energy_rel[0]);
  rep.angmom_scale = set.angmom_rel.col(0).norm();

  rep.max_pos_residual_body1 =
      (set.body1.position - sys.eta2 * set.relative.position).colwise().norm().maxCoeff();
  rep.max_pos_residual_body2 =
      (set.body2.position + sys.eta1 * set.relative.position).colwise().norm().maxCoeff();
  rep.max_energy_residual_body1 =
      (set.energy_body1 - sys.eta2 * set.energy_rel).cwiseAbs().maxCoeff();
  rep.max_energy_residual_body2 =
      (set.energy_body2 - sys.eta1 * set.energy_rel).cwiseAbs().maxCoeff();
  rep.max_angmom_residual_body1 =
      (set.angmom_body1 - sys.eta2 * set.angmom_rel).colwise().norm().maxCoeff();
  rep.max_angmom_residual_body2 =
      (set.angmom_body2 - sys.eta1 * set.angmom_rel).colwise().norm().maxCoeff();
  rep.max_momentum_sum =
      (sys.m1 * set.body1.velocity + sys.m2 * set.body2.velocity).colwise().norm().maxCoeff();
  rep.max_cm_displacement =
      (sys.eta1 * set.body1.position + sys.eta2 * set.body2.position).colwise().norm().maxCoeff();

  auto drift = [](const Eigen::VectorX<Scalar>& e) {
    return (e.array() - e[0]).abs().maxCoeff();
  };
  rep.energy_drift_rel = drift(set.energy_rel);
  rep.energy_drift_body1 = drift(set.energy_body1);
  rep.energy_drift_body2 = drift(set.energy_body2);
  return rep;
}

// Circular orbit of the relative problem at radius r0: mu v^2/r0 = V'(r0).
template <typename Scalar>
struct CircularOrbitT {
  ClassicalStateT<Scalar> state;
  Scalar speed;
  Scalar period;
};

using CircularOrbit = CircularOrbitT<double>;

template <typename Scalar>
CircularOrbitT<Scalar> circular_orbit(const TwoBodySystemT<Scalar>& sys,
                                      const CentralPotentialT<Scalar>& pot, Scalar r0) {
  if (!(r0 > Scalar(0))) throw std::domain_error("circular_orbit: r0 must be positive");
  const Scalar slope = pot.derivative(r0);
  if (!(slope > Scalar(0)))
    throw std::domain_error("circular_orbit: potential is not attractive at r0");
  CircularOrbitT<Scalar> orbit;
  orbit.speed = std::sqrt(r0 * slope / sys.reduced_mass);
  orbit.period = Scalar(2) * Scalar(EIGEN_PI) * r0 / orbit.speed;
  orbit.state.position = Eigen::Vector3<Scalar>(r0, Scalar(0), Scalar(0));
  orbit.state.velocity = Eigen::Vector3<Scalar>(Scalar(0), orbit.speed, Scalar(0));
  return orbit;
}

}  // namespace bisys
