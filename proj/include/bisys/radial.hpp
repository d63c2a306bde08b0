#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <type_traits>

#include "bisys/errors.hpp"
#include "bisys/potential.hpp"
#include "bisys/two_body_system.hpp"

namespace bisys {

// Uniform grid r_i = i*h, i = 0..n_points, h = r_max/n_points. n_points is
// rounded up to even so that composite Simpson weights apply.
template <typename Scalar>
struct RadialGridT {
  Scalar r_max;
  Eigen::Index n_points;
};

using RadialGrid = RadialGridT<double>;

// r_max = 50 n^2 L and 20000 intervals resolve states up to moderate n; pass
// an explicit grid where more is needed.
template <typename Scalar>
RadialGridT<Scalar> default_grid(Scalar mass, const CentralPotentialT<Scalar>& pot,
                                 int n, Eigen::Index n_points = 20000) {
  return {Scalar(50) * Scalar(n) * Scalar(n) * pot.characteristic_length(mass), n_points};
}

template <typename Scalar>
struct RadialSolutionT {
  Scalar energy;
  Eigen::ArrayX<Scalar> r;  // r[0] = 0
  Eigen::ArrayX<Scalar> u;  // reduced radial wave, unit L2 norm, u[0] = 0
  int n = 0;
  int l = 0;
  int nodes = 0;
  Eigen::Index match_index = 0;
  Scalar energy_tolerance = Scalar(0);
  bool converged = false;
};

using RadialSolution = RadialSolutionT<double>;

// Composite Simpson integral of samples on the uniform grid (even interval count).
template <typename Scalar>
Scalar simpson(const Eigen::ArrayX<Scalar>& y, Scalar h) {
  const Eigen::Index n = y.size() - 1;
  Scalar odd = 0, even = 0;
  for (Eigen::Index i = 1; i < n; i += 2) odd += y[i];
  for (Eigen::Index i = 2; i < n; i += 2) even += y[i];
  return h / Scalar(3) * (y[0] + y[n] + Scalar(4) * odd + Scalar(2) * even);
}

// Expectation value of a radial function in a normalized solution,
// integral of fn(r) u(r)^2 dr. fn may be singular at r = 0; the origin sample
// is dropped (u(0) = 0).
template <typename Scalar, typename F>
Scalar radial_expectation(const RadialSolutionT<Scalar>& sol, F&& fn) {
  Eigen::ArrayX<Scalar> integrand(sol.r.size());
  integrand[0] = Scalar(0);
  for (Eigen::Index i = 1; i < sol.r.size(); ++i)
    integrand[i] = fn(sol.r[i]) * sol.u[i] * sol.u[i];
  return simpson(integrand, sol.r[1]);
}

namespace detail {

// One matched Numerov sweep of u'' = f u at trial energy E, with
// f_i = 2 mass (V_i - E) + l(l+1)/r_i^2. Outward from the r^(l+1) start to the
// outer turning point, inward from the point where the forbidden-region action
// reaches ~60 (tail treated as hard zero beyond it, which keeps the growing
// sweep within ~e^60 of its tiny seed). Returns the matched node count and the
// Numerov defect at the match point.
template <typename Scalar>
struct SweepResult {
  int nodes;
  Scalar defect;        // residual of the three-term relation at the match point
  Scalar u_match;
  Scalar norm2;         // trapezoid estimate of the unnormalized integral u^2 dr
  Eigen::Index match_index;
  Eigen::Index tail_index;
};

template <typename Scalar>
SweepResult<Scalar> numerov_sweep(const Eigen::ArrayX<Scalar>& W, Scalar mass,
                                  Scalar E, Scalar h, int l,
                                  Eigen::ArrayX<Scalar>& f,
                                  Eigen::ArrayX<Scalar>& c,
                                  Eigen::ArrayX<Scalar>& u) {
  const Eigen::Index N = W.size() - 1;
  f = W - Scalar(2) * mass * E;
  f[0] = Scalar(0);  // multiplies u(0) = 0 only
  c = Scalar(1) - (h * h / Scalar(12)) * f;

  Eigen::Index turn = 1;
  for (Eigen::Index i = N; i >= 1; --i) {
    if (f[i] <= Scalar(0)) {
      turn = i;
      break;
    }
  }
  const Eigen::Index m = std::clamp<Eigen::Index>(turn, 2, N - 2);

  Scalar action = 0;
  Eigen::Index tail = N;
  for (Eigen::Index i = m; i <= N; ++i) {
    if (f[i] > Scalar(0)) action += std::sqrt(f[i]) * h;
    if (action >= Scalar(60) && i >= m + 2) {
      tail = i;
      break;
    }
  }

  u.setZero();
  u[1] = std::pow(h, Scalar(l + 1));
  for (Eigen::Index i = 1; i < m; ++i)
    u[i + 1] = ((Scalar(12) - Scalar(10) * c[i]) * u[i] - c[i - 1] * u[i - 1]) / c[i + 1];
  const Scalar u_out_m = u[m];

  u[tail] = Scalar(0);
  u[tail - 1] = Scalar(1e-30);
  for (Eigen::Index i = tail - 1; i > m; --i)
    u[i - 1] = ((Scalar(12) - Scalar(10) * c[i]) * u[i] - c[i + 1] * u[i + 1]) / c[i - 1];
  const Scalar u_in_m = u[m];
  if (u_in_m == Scalar(0) || !std::isfinite(u_in_m))
    throw EigenvalueSearchError("numerov_sweep: degenerate match value");
  const Scalar scale = u_out_m / u_in_m;
  for (Eigen::Index i = m; i <= tail; ++i) u[i] *= scale;
  u[m] = u_out_m;

  SweepResult<Scalar> res;
  res.nodes = 0;
  for (Eigen::Index i = 1; i + 1 < tail; ++i)
    if (u[i] * u[i + 1] < Scalar(0)) ++res.nodes;
  res.defect = c[m + 1] * u[m + 1] - (Scalar(12) - Scalar(10) * c[m]) * u[m] +
               c[m - 1] * u[m - 1];
  res.u_match = u[m];
  res.norm2 = u.square().sum() * h;
  res.match_index = m;
  res.tail_index = tail;
  return res;
}

}  // namespace detail

// Bound level of u'' = [2 mass (V(r) - E) + l(l+1)/r^2] u with n - l - 1 radial
// nodes. Node-count bisection isolates the level, then the first-order energy
// update from the match-point defect refines it to ~1e-13 relative.
template <typename Scalar, typename Potential>
RadialSolutionT<Scalar> solve_radial(Scalar mass, const Potential& pot, int n, int l,
                                     const RadialGridT<Scalar>& grid) {
  static_assert(std::is_floating_point_v<Scalar>);
  if (!(mass > Scalar(0))) throw std::domain_error("solve_radial: mass must be positive");
  if (n < 1 || l < 0 || l > n - 1)
    throw std::domain_error("solve_radial: need n >= 1 and 0 <= l <= n-1");
  if (!(grid.r_max > Scalar(0)) || grid.n_points < 1000)
    throw std::domain_error("solve_radial: need r_max > 0 and n_points >= 1000");

  const Eigen::Index N = grid.n_points + (grid.n_points % 2);
  const Scalar h = grid.r_max / Scalar(N);
  const int target = n - l - 1;

  Eigen::ArrayX<Scalar> r = Eigen::ArrayX<Scalar>::LinSpaced(N + 1, Scalar(0), grid.r_max);
  Eigen::ArrayX<Scalar> W(N + 1);
  W[0] = Scalar(0);
  const Scalar lfac = Scalar(l) * Scalar(l + 1);
  for (Eigen::Index i = 1; i <= N; ++i)
    W[i] = Scalar(2) * mass * pot(r[i]) + lfac / (r[i] * r[i]);

  const Scalar two_m = Scalar(2) * mass;
  Scalar E_lo = W.tail(N).minCoeff() / two_m;
  Scalar E_hi = W[N] / two_m;
  if (!(E_hi > E_lo))
    throw EigenvalueSearchError("solve_radial: empty energy window on this grid");

  Eigen::ArrayX<Scalar> f(N + 1), c(N + 1), u(N + 1);
  auto sweep = [&](Scalar E) { return detail::numerov_sweep(W, mass, E, h, l, f, c, u); };

  if (sweep(E_hi).nodes <= target)
    throw EigenvalueSearchError("solve_radial: grid does not contain the requested level");

  const Scalar scale = std::max(std::abs(E_lo), std::abs(E_hi));
  const Scalar tol = Scalar(1e-13) * scale;
  Scalar E = (E_lo + E_hi) / Scalar(2);
  Scalar dE_last = scale;
  bool converged = false;

  for (int iter = 0; iter < 250 && !converged; ++iter) {
    const auto res = sweep(E);
    if (res.nodes > target) {
      E_hi = E;
      E = (E_lo + E_hi) / Scalar(2);
    } else if (res.nodes < target) {
      E_lo = E;
      E = (E_lo + E_hi) / Scalar(2);
    } else {
      Scalar dE = -(res.defect / h) * res.u_match / (two_m * res.norm2);
      dE_last = dE;
      if (std::abs(dE) <= tol) {
        converged = true;
        break;
      }
      // the sign of the first-order step brackets the level even when the
      // step itself is too large to take
      if (dE > Scalar(0)) E_lo = E; else E_hi = E;
      Scalar next = E + dE;
      if (!(next > E_lo) || !(next < E_hi)) next = (E_lo + E_hi) / Scalar(2);
      E = next;
    }
    if (E_hi - E_lo <= tol) {
      converged = true;
      E = (E_lo + E_hi) / Scalar(2);
    }
  }
  if (!converged)
    throw EigenvalueSearchError("solve_radial: eigenvalue iteration did not converge");

  const auto final_res = sweep(E);
  RadialSolutionT<Scalar> sol;
  sol.energy = E;
  sol.r = std::move(r);
  sol.u = u;
  sol.n = n;
  sol.l = l;
  sol.nodes = final_res.nodes;
  sol.match_index = final_res.match_index;
  sol.energy_tolerance = std::abs(dE_last);
  sol.converged = final_res.nodes == target;
  if (!sol.converged)
    throw EigenvalueSearchError("solve_radial: converged to a level with the wrong node count");

  const Scalar norm = std::sqrt(simpson<Scalar>(sol.u.square(), h));
  sol.u /= norm;
  return sol;
}

// Relative problem: reduced mass in the bare potential.
template <typename Scalar>
RadialSolutionT<Scalar> solve_relative(const TwoBodySystemT<Scalar>& sys,
                                       const CentralPotentialT<Scalar>& pot, int n,
                                       int l, const RadialGridT<Scalar>& grid) {
  return solve_radial(sys.reduced_mass, pot, n, l, grid);
}

template <typename Scalar>
RadialSolutionT<Scalar> solve_relative(const TwoBodySystemT<Scalar>& sys,
                                       const CentralPotentialT<Scalar>& pot, int n,
                                       int l, Eigen::Index n_points = 20000) {
  return solve_relative(sys, pot, n, l, default_grid(sys.reduced_mass, pot, n, n_points));
}

// Individual problem of one body in its own coordinate. The eta^2/(2 m_i)
// kinetic factor is folded into an effective mass m_i/eta^2 so the equation
// keeps the generic radial form with the rescaled potential.
template <typename Scalar>
RadialSolutionT<Scalar> solve_individual(const TwoBodySystemT<Scalar>& sys,
                                         const CentralPotentialT<Scalar>& pot, int body,
                                         int n, int l, const RadialGridT<Scalar>& grid) {
  if (body != 1 && body != 2)
    throw std::domain_error("solve_individual: body must be 1 or 2");
  const Scalar eta = (body == 1) ? sys.eta2 : sys.eta1;
  const Scalar mass = (body == 1) ? sys.m1 : sys.m2;
  const RescaledPotentialT<Scalar> resc(pot, eta);
  return solve_radial(mass / (eta * eta), resc, n, l, grid);
}

// Default grid: eta times the relative-problem default, so the two discrete
// problems correspond point by point under the coordinate scaling.
template <typename Scalar>
RadialSolutionT<Scalar> solve_individual(const TwoBodySystemT<Scalar>& sys,
                                         const CentralPotentialT<Scalar>& pot, int body,
                                         int n, int l, Eigen::Index n_points = 20000) {
  const Scalar eta = (body == 1) ? sys.eta2 : sys.eta1;
  const auto rel_grid = default_grid(sys.reduced_mass, pot, n, n_points);
  return solve_individual(sys, pot, body, n, l,
                          RadialGridT<Scalar>{eta * rel_grid.r_max, n_points});
}

// Cubic (4-point Lagrange) interpolation of uniformly sampled values; x in
// grid units. Returns 0 outside the sampled range.
template <typename Scalar>
Scalar interp_uniform(const Eigen::ArrayX<Scalar>& y, Scalar x) {
  const Eigen::Index n = y.size() - 1;
  if (x < Scalar(0) || x > Scalar(n)) return Scalar(0);
  Eigen::Index i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(x), 1, n - 2) - 1;
  const Scalar t = x - Scalar(i);
  const Scalar w0 = -(t - 1) * (t - 2) * (t - 3) / Scalar(6);
  const Scalar w1 = t * (t - 2) * (t - 3) / Scalar(2);
  const Scalar w2 = -t * (t - 1) * (t - 3) / Scalar(2);
  const Scalar w3 = t * (t - 1) * (t - 2) / Scalar(6);
  return w0 * y[i] + w1 * y[i + 1] + w2 * y[i + 2] + w3 * y[i + 3];
}

// Maximum pointwise deviation of an individual-coordinate eigenfunction from
// the eta-scaled relative one, u_ind(r) vs eta^(-1/2) u_rel(r/eta), after sign
// alignment. Both inputs must be normalized solutions of the same (n, l).
template <typename Scalar>
Scalar compare_scaled_wavefunctions(const RadialSolutionT<Scalar>& rel,
                                    const RadialSolutionT<Scalar>& ind, Scalar eta) {
  if (rel.n != ind.n || rel.l != ind.l)
    throw std::domain_error("compare_scaled_wavefunctions: quantum numbers differ");
  if (!(eta > Scalar(0)) || eta > Scalar(1))
    throw std::domain_error("compare_scaled_wavefunctions: eta must lie in (0,1]");
  const Scalar h_rel = rel.r[1];
  const Scalar inv_sqrt_eta = Scalar(1) / std::sqrt(eta);
  Scalar dot = 0;
  Eigen::ArrayX<Scalar> predicted(ind.r.size());
  for (Eigen::Index i = 0; i < ind.r.size(); ++i) {
    predicted[i] = inv_sqrt_eta * interp_uniform(rel.u, ind.r[i] / (eta * h_rel));
    dot += predicted[i] * ind.u[i];
  }
  const Scalar sign = dot < Scalar(0) ? Scalar(-1) : Scalar(1);
  return (ind.u - sign * predicted).abs().maxCoeff();
}

}  // namespace bisys
