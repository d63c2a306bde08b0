#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bisys/classical.hpp"

using namespace bisys;

namespace {

const double kPi = double(EIGEN_PI);

ClassicalState circular_ic(double r0, double speed) {
  return {Eigen::Vector3d(r0, 0, 0), Eigen::Vector3d(0, speed, 0)};
}

}  // namespace

TEST_CASE("circular orbit setup matches the balance condition") {
  const auto sys = make_system(1.0, 1.0);  // mu = 1/2
  const auto pot = CentralPotential::coulomb(1.0);
  const auto orbit = circular_orbit(sys, pot, 1.0);
  CHECK(orbit.speed == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(orbit.period == doctest::Approx(4.442882938158366).epsilon(1e-15));
  const double energy =
      0.5 * sys.reduced_mass * orbit.speed * orbit.speed + pot(1.0);
  CHECK(energy == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("circular orbit rejects bad radii and repulsive slopes") {
  const auto sys = make_system(1.0, 1.0);
  CHECK_THROWS_AS(circular_orbit(sys, CentralPotential::coulomb(1.0), 0.0),
                  std::domain_error);
}

TEST_CASE("circular orbit stays on its circle and conserves energy") {
  const auto sys = make_system(1.0, 1.0);
  const auto pot = CentralPotential::coulomb(1.0);
  const auto orbit = circular_orbit(sys, pot, 1.0);
  const double dt = orbit.period / 2000;
  const auto traj =
      integrate_relative(sys, pot, orbit.state, 10 * orbit.period, dt);

  const Eigen::ArrayXd radii = traj.position.colwise().norm().array();
  CHECK(std::abs(radii.maxCoeff() - 1.0) <= 1e-9);
  CHECK(std::abs(radii.minCoeff() - 1.0) <= 1e-9);

  for (Eigen::Index i = 0; i < traj.t.size(); i += 500) {
    const double E = 0.5 * sys.reduced_mass * traj.velocity.col(i).squaredNorm() +
                     pot(traj.position.col(i).norm());
    CHECK(std::abs(E + 0.5) <= 1e-11);
  }
}

TEST_CASE("integrator converges at fourth order against the analytic circle") {
  const auto sys = make_system(1.0, 1.0);
  const auto pot = CentralPotential::coulomb(1.0);
  const auto orbit = circular_orbit(sys, pot, 1.0);
  const double omega = 2 * kPi / orbit.period;
  auto error_at = [&](double dt) {
    const auto traj = integrate_relative(sys, pot, orbit.state, orbit.period, dt);
    const Eigen::Index i = traj.t.size() - 1;
    const double t = traj.t[i];
    const Eigen::Vector3d exact(std::cos(omega * t), std::sin(omega * t), 0.0);
    return (traj.position.col(i) - exact).norm();
  };
  const double e1 = error_at(orbit.period / 300);
  const double e2 = error_at(orbit.period / 600);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("elliptic orbit returns to its starting point each period") {
  const auto sys = make_system(1.0, 1.0);
  const auto pot = CentralPotential::coulomb(1.0);
  const ClassicalState ic = circular_ic(1.0, 1.0);  // E = -3/4, bound ellipse
  const double period = 2.4183991523122903;  // 2 pi sqrt(mu a^3 / k), a = 2/3
  const double dt = period / 20000;
  const auto traj = integrate_relative(sys, pot, ic, 3 * period, dt);
  const Eigen::Index per_period = traj.t.size() / 3;
  for (int p = 1; p <= 3; ++p) {
    const Eigen::Index i = (p * (traj.t.size() - 1)) / 3;
    CHECK((traj.position.col(i) - ic.position).norm() <= 2e-6);
  }
  (void)per_period;
}

TEST_CASE("harmonic oscillation through the origin follows the cosine solution") {
  const auto sys = make_system(1.0, 1.0);  // mu = 1/2
  const auto pot = CentralPotential::harmonic(2.0);
  const double omega = std::sqrt(pot.coefficient() / sys.reduced_mass);  // 2
  const ClassicalState ic{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d::Zero()};
  const auto traj = integrate_relative(sys, pot, ic, 5.0, 1e-4);
  for (Eigen::Index i = 0; i < traj.t.size(); i += 2000) {
    CHECK(std::abs(traj.position(0, i) - std::cos(omega * traj.t[i])) <= 1e-9);
    CHECK(std::abs(traj.position(1, i)) <= 1e-15);
  }
}

TEST_CASE("individual initial conditions sit on the center-of-mass line") {
  const auto sys = make_system(3.0, 1.0);
  const ClassicalState rel{Eigen::Vector3d(1, 0.5, -2), Eigen::Vector3d(0, 2, 1)};
  const auto [b1, b2] = derive_individual_ics(sys, rel);
  CHECK((b1.position - 0.25 * rel.position).norm() == 0.0);
  CHECK((b2.position + 0.75 * rel.position).norm() == 0.0);
  CHECK((sys.m1 * b1.velocity + sys.m2 * b2.velocity).norm() == 0.0);
  CHECK((sys.eta1 * b1.position + sys.eta2 * b2.position).norm() == 0.0);
}

TEST_CASE("individual trajectories are exact rescalings of the relative one") {
  const auto sys = make_system(3.0, 1.0);
  const auto pot = CentralPotential::coulomb(1.0);
  const auto orbit = circular_orbit(sys, pot, 1.0);
  const double dt = orbit.period / 5000;
  const double t_end = 4 * orbit.period;

  auto rel = integrate_relative(sys, pot, orbit.state, t_end, dt);
  const auto [ic1, ic2] = derive_individual_ics(sys, orbit.state);
  auto b1 = integrate_individual(sys, pot, 1, ic1, t_end, dt);
  auto b2 = integrate_individual(sys, pot, 2, ic2, t_end, dt);
  const auto set = assemble_trajectory_set(sys, pot, std::move(rel), std::move(b1),
                                           std::move(b2));
  CHECK(set.cm_consistent);
  const auto rep = check_equivalence(set, sys);

  // the scaled dynamics agree step by step, so residuals sit at rounding level
  CHECK(rep.max_pos_residual_body1 <= 1e-11 * rep.position_scale);
  CHECK(rep.max_pos_residual_body2 <= 1e-11 * rep.position_scale);
  CHECK(rep.max_energy_residual_body1 <= 1e-11 * rep.energy_scale);
  CHECK(rep.max_energy_residual_body2 <= 1e-11 * rep.energy_scale);
  CHECK(rep.max_angmom_residual_body1 <= 1e-11 * rep.angmom_scale);
  CHECK(rep.max_angmom_residual_body2 <= 1e-11 * rep.angmom_scale);
  CHECK(rep.max_momentum_sum <= 1e-11);
  CHECK(rep.max_cm_displacement <= 1e-11);
  CHECK(rep.energy_drift_rel <= 1e-10 * rep.energy_scale);
}

TEST_CASE("equivalence report flags initial conditions off the collinearity line") {
  const auto sys = make_system(3.0, 1.0);
  const auto pot = CentralPotential::coulomb(1.0);
  const auto orbit = circular_orbit(sys, pot, 1.0);
  const double dt = orbit.period / 1000;
  auto rel = integrate_relative(sys, pot, orbit.state, orbit.period, dt);
  auto [ic1, ic2] = derive_individual_ics(sys, orbit.state);
  ic1.position += Eigen::Vector3d(0.01, 0, 0);
  auto b1 = integrate_individual(sys, pot, 1, ic1, orbit.period, dt);
  auto b2 = integrate_individual(sys, pot, 2, ic2, orbit.period, dt);
  const auto set = assemble_trajectory_set(sys, pot, std::move(rel), std::move(b1),
                                           std::move(b2));
  CHECK_FALSE(set.cm_consistent);
}

TEST_CASE("near collision aborts with the failure time attached") {
  const auto sys = make_system(1.0, 1.0);
  const auto pot = CentralPotential::coulomb(1.0);
  const ClassicalState infall{Eigen::Vector3d(0.05, 0, 0), Eigen::Vector3d(-1, 0, 0)};
  IntegrationOptions opts;
  opts.r_min = 0.01;  // wide guard so the discrete plunge cannot step across it
  try {
    integrate_relative(sys, pot, infall, 10.0, 1e-5, opts);
    FAIL("expected an integration abort");
  } catch (const IntegrationError& err) {
    CHECK(err.time() >= 0.0);
    CHECK(err.time() < 10.0);
  }
}

TEST_CASE("harmonic motion is not subject to the collision guard") {
  const auto sys = make_system(1.0, 1.0);
  const auto pot = CentralPotential::harmonic(1.0);
  const ClassicalState through_zero{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d::Zero()};
  CHECK_NOTHROW(integrate_relative(sys, pot, through_zero, 10.0, 1e-3));
}

TEST_CASE("sampling stride thins the stored trajectory") {
  const auto sys = make_system(1.0, 1.0);
  const auto pot = CentralPotential::harmonic(1.0);
  const ClassicalState ic{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 0.3, 0)};
  IntegrationOptions opts;
  opts.stride = 10;
  const auto traj = integrate_relative(sys, pot, ic, 1.0, 1e-3, opts);
  CHECK(traj.t.size() == 101);
  CHECK(traj.t[1] == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("heavy body barely moves for an extreme mass ratio") {
  const auto sys = make_system(1e6, 1.0);
  const auto pot = CentralPotential::coulomb(1.0);
  const auto orbit = circular_orbit(sys, pot, 1.0);
  const auto [ic1, ic2] = derive_individual_ics(sys, orbit.state);
  const double dt = orbit.period / 2000;
  const auto b1 = integrate_individual(sys, pot, 1, ic1, orbit.period, dt);
  CHECK(b1.position.colwise().norm().maxCoeff() <= 2e-6);
}

TEST_CASE("integration parameters are validated") {
  const auto sys = make_system(1.0, 1.0);
  const auto pot = CentralPotential::coulomb(1.0);
  const ClassicalState ic = circular_ic(1.0, 1.0);
  CHECK_THROWS_AS(integrate_relative(sys, pot, ic, -1.0, 1e-3), std::domain_error);
  CHECK_THROWS_AS(integrate_relative(sys, pot, ic, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(integrate_individual(sys, pot, 3, ic, 1.0, 1e-3), std::domain_error);
}
