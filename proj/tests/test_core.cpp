#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bisys/potential.hpp"
#include "bisys/richardson.hpp"
#include "bisys/sph_bessel.hpp"
#include "bisys/two_body_system.hpp"

using namespace bisys;

TEST_CASE("mass fractions for simple ratios are exact") {
  const auto sys = make_system(3.0, 1.0);
  CHECK(sys.eta1 == 0.75);
  CHECK(sys.eta2 == 0.25);
  CHECK(sys.total_mass == 4.0);
  CHECK(sys.reduced_mass == 0.75);
}

TEST_CASE("mass fractions for an extreme ratio match a higher-precision evaluation") {
  const auto sys = make_system(1836.15267, 1.0);
  // frozen from an 80-bit evaluation of m2/(m1+m2) and m1*m2/(m1+m2)
  CHECK(sys.eta2 == doctest::Approx(5.443205762534695e-4).epsilon(1e-14));
  CHECK(sys.eta1 == doctest::Approx(0.9994556794237466).epsilon(1e-15));
  CHECK(sys.reduced_mass == doctest::Approx(0.9994556794237466).epsilon(1e-15));

  const long double m1 = 1836.15267, m2 = 1.0L;
  const long double eta2_hp = m2 / (m1 + m2);
  const long double mu_hp = m1 * m2 / (m1 + m2);
  CHECK(std::abs(sys.eta2 - double(eta2_hp)) <= 1e-18);
  CHECK(std::abs(sys.reduced_mass - double(mu_hp)) <= 1e-15);
}

TEST_CASE("fraction and reduced-mass identities hold across random mass pairs") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> exp_dist(-6.0, 6.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double m1 = std::pow(10.0, exp_dist(rng));
    const double m2 = std::pow(10.0, exp_dist(rng));
    const auto sys = make_system(m1, m2);
    CHECK(std::abs(sys.eta1 + sys.eta2 - 1.0) <= 4e-16);
    CHECK(std::abs(sys.reduced_mass - sys.eta1 * sys.eta2 * sys.total_mass) <=
          4e-16 * sys.reduced_mass);
    CHECK(sys.reduced_mass <= std::min(m1, m2) * (1 + 1e-15));
    // the mass-weighted square of the opposite fractions collapses to mu
    const double msq = m1 * sys.eta2 * sys.eta2 + m2 * sys.eta1 * sys.eta1;
    CHECK(msq == doctest::Approx(sys.reduced_mass).epsilon(1e-14));
    // and the fourth power to mu(1 - 3 mu/M)
    const double m4 = m1 * std::pow(sys.eta2, 4) + m2 * std::pow(sys.eta1, 4);
    const double rho = sys.reduced_mass / sys.total_mass;
    CHECK(m4 == doctest::Approx(sys.reduced_mass * (1 - 3 * rho)).epsilon(1e-12));
  }
}

TEST_CASE("nonpositive masses are rejected") {
  CHECK_THROWS_AS(make_system(-1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(make_system(1.0, 0.0), std::domain_error);
}

TEST_CASE("potential values and derivatives") {
  const auto coul = CentralPotential::coulomb(2.0);
  CHECK(coul(1.0) == -2.0);
  CHECK(coul(2.0) == -1.0);
  CHECK(coul.derivative(1.0) == 2.0);

  const auto harm = CentralPotential::harmonic(3.0);
  CHECK(harm(2.0) == 6.0);
  CHECK(harm.derivative(2.0) == 6.0);

  const auto pow_pot = CentralPotential::power_law(1.5, -0.5);
  CHECK(pow_pot(4.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(pow_pot.derivative(4.0) == doctest::Approx(-0.09375).epsilon(1e-15));
}

TEST_CASE("potential derivative matches a central difference") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> rdist(0.3, 5.0);
  const auto pots = {CentralPotential::coulomb(1.7), CentralPotential::harmonic(0.9),
                     CentralPotential::power_law(2.0, 1.5),
                     CentralPotential::power_law(0.8, -0.7)};
  for (const auto& pot : pots) {
    for (int i = 0; i < 50; ++i) {
      const double r = rdist(rng);
      const double h = 1e-5 * r;
      const double num = (pot(r + h) - pot(r - h)) / (2 * h);
      CHECK(pot.derivative(r) == doctest::Approx(num).epsilon(1e-8));
    }
  }
}

TEST_CASE("characteristic lengths") {
  CHECK(CentralPotential::coulomb(2.0).characteristic_length(4.0) == 0.125);
  CHECK(CentralPotential::harmonic(4.0).characteristic_length(4.0) ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("invalid potential parameters are rejected") {
  CHECK_THROWS_AS(CentralPotential::coulomb(-1.0), std::domain_error);
  CHECK_THROWS_AS(CentralPotential::harmonic(0.0), std::domain_error);
  CHECK_THROWS_AS(CentralPotential::power_law(1.0, -2.0), std::domain_error);
  CHECK_THROWS_AS(CentralPotential::power_law(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(CentralPotential::power_law(0.0, 1.0), std::domain_error);
}

TEST_CASE("rescaled potential examples") {
  // Coulomb: eta V(r/eta) = -eta^2 k / r
  const RescaledPotential rc(CentralPotential::coulomb(1.0), 0.5);
  CHECK(rc(0.5) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(rc.closed_form().coefficient() == doctest::Approx(0.25).epsilon(1e-15));

  // harmonic: stiffness scales as kappa/eta
  const RescaledPotential rh(CentralPotential::harmonic(2.0), 0.25);
  CHECK(rh(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rh.closed_form().coefficient() == doctest::Approx(8.0).epsilon(1e-15));

  // power law: coefficient scales as eta^(1-p)
  const RescaledPotential rp(CentralPotential::power_law(2.0, 3.0), 0.5);
  CHECK(rp(1.0) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(rp.closed_form().coefficient() == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("rescaled potential equals its closed form everywhere") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> rdist(0.05, 8.0);
  std::uniform_real_distribution<double> edist(0.05, 0.95);
  const auto pots = {CentralPotential::coulomb(1.3), CentralPotential::harmonic(2.1),
                     CentralPotential::power_law(0.7, 1.4),
                     CentralPotential::power_law(1.1, -0.6)};
  for (const auto& pot : pots) {
    for (int i = 0; i < 100; ++i) {
      const double eta = edist(rng);
      const double r = rdist(rng);
      const RescaledPotential resc(pot, eta);
      const auto closed = resc.closed_form();
      CHECK(resc(r) == doctest::Approx(closed(r)).epsilon(1e-13));
      CHECK(resc.derivative(r) == doctest::Approx(closed.derivative(r)).epsilon(1e-13));
      // chain rule form
      CHECK(resc.derivative(r) ==
            doctest::Approx(pot.derivative(r / eta)).epsilon(1e-15));
    }
  }
}

TEST_CASE("rescaling with a fraction near one is the identity") {
  const auto pot = CentralPotential::coulomb(1.0);
  const RescaledPotential resc(pot, 1.0 - 1e-12);
  for (double r : {0.1, 1.0, 7.5})
    CHECK(resc(r) == doctest::Approx(pot(r)).epsilon(1e-11));
}

TEST_CASE("rescaling fraction is validated") {
  const auto pot = CentralPotential::coulomb(1.0);
  CHECK_THROWS_AS(RescaledPotential(pot, 0.0), std::domain_error);
  CHECK_THROWS_AS(RescaledPotential(pot, 1.0), std::domain_error);
  CHECK_THROWS_AS(RescaledPotential(pot, 1.2), std::domain_error);
  CHECK_THROWS_AS(RescaledPotential(pot, -0.5), std::domain_error);
}

TEST_CASE("richardson limit removes even error terms") {
  // g(x) = 3 + 2x^2 + 5x^4 + 7x^6 sampled at 0.8, 0.4, 0.2
  auto g = [](double x) { return 3 + 2 * x * x + 5 * std::pow(x, 4) + 7 * std::pow(x, 6); };
  const double lim = richardson_limit<double>({g(0.8), g(0.4), g(0.2)});
  CHECK(lim == doctest::Approx(3.028672).epsilon(1e-12));  // 3 + residual x^6 term
  // with four rungs the x^6 term is removed as well
  const double lim4 = richardson_limit<double>({g(0.8), g(0.4), g(0.2), g(0.1)});
  CHECK(lim4 == doctest::Approx(3.0).epsilon(1e-10));
  CHECK_THROWS_AS(richardson_limit<double>({1.0}), ExtrapolationError);
}

TEST_CASE("leading curvature extraction is exact through the quartic term") {
  auto g = [](double x) { return 3 + 2 * x * x + 5 * std::pow(x, 4) + 7 * std::pow(x, 6); };
  const double c2 = leading_curvature(g(0.2), g(0.1), g(0.05), 0.2);
  // 2 - (21/64) * 7 * 0.2^4 from the residual x^6 term
  CHECK(c2 == doctest::Approx(1.996325).epsilon(1e-12));
  auto q = [](double x) { return 1 + 4 * x * x + 9 * std::pow(x, 4); };
  CHECK(leading_curvature(q(0.3), q(0.15), q(0.075), 0.3) ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("spherical bessel values match the standard library") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> xdist(0.0, 60.0);
  for (int l = 0; l <= 5; ++l) {
    Eigen::ArrayXd xs(300);
    for (int i = 0; i < 300; ++i) xs[i] = xdist(rng);
    xs[0] = 0.0;
    xs[1] = 1e-8;
    xs[2] = 0.5 * l + 0.25;  // straddle the series/recurrence switch
    const Eigen::ArrayXd mine = sph_bessel_j(l, xs);
    for (int i = 0; i < xs.size(); ++i) {
      const double ref = std::sph_bessel(unsigned(l), xs[i]);
      CHECK(std::abs(mine[i] - ref) <= 1e-13 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("spherical bessel small argument behavior") {
  CHECK(sph_bessel_j(0, 0.0) == 1.0);
  CHECK(sph_bessel_j(1, 0.0) == 0.0);
  CHECK(sph_bessel_j(2, 1e-6) == doctest::Approx(1e-12 / 15.0).epsilon(1e-10));
  CHECK_THROWS_AS(sph_bessel_j(-1, 1.0), std::domain_error);
}
