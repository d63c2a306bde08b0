#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bisys/radial.hpp"
#include "bisys/sph_bessel.hpp"
#include "bisys/two_body_system.hpp"

namespace bisys {

// Mean square center-of-mass displacement under the localization weight
// exp(-2 sigma^2 R^2): <R^2> = 3/(4 sigma^2).
template <typename Scalar>
Scalar cm_position_spread(Scalar sigma) {
  if (!(sigma > Scalar(0))) throw std::domain_error("cm_position_spread: sigma must be positive");
  return Scalar(3) / (Scalar(4) * sigma * sigma);
}

// Mean square total momentum under the conjugate weight exp(-Q^2/(2 sigma^2)):
// <Q^2> = 3 sigma^2.
template <typename Scalar>
Scalar total_momentum_spread(Scalar sigma) {
  if (!(sigma > Scalar(0))) throw std::domain_error("total_momentum_spread: sigma must be positive");
  return Scalar(3) * sigma * sigma;
}

// The two spreads trade off against each other; their product is the
// sigma-independent constant 9/4.
template <typename Scalar>
Scalar spread_product(Scalar sigma) {
  return cm_position_spread(sigma) * total_momentum_spread(sigma);
}

template <typename Scalar>
struct MomentumWavefunctionT {
  Eigen::ArrayX<Scalar> k;
  Eigen::ArrayX<Scalar> u;  // reduced momentum-space wave
  int l = 0;
};

using MomentumWavefunction = MomentumWavefunctionT<double>;

// Unitary radial Bessel transform of a reduced wave,
//   g(y) = sqrt(2/pi) * integral f(x) (x y) j_l(x y) dx,
// which is its own inverse, so unit L2 norm is preserved both ways. Simpson
// weights on the uniform source grid; the target grid must respect the source
// resolution (y_max * h_x <= pi), otherwise the kernel is undersampled.
template <typename Scalar>
Eigen::ArrayX<Scalar> bessel_transform(const Eigen::ArrayX<Scalar>& f,
                                       const Eigen::ArrayX<Scalar>& x_grid,
                                       const Eigen::ArrayX<Scalar>& y_grid, int l) {
  if (f.size() != x_grid.size())
    throw std::invalid_argument("bessel_transform: sample/grid size mismatch");
  if (f.size() < 3 || x_grid[0] != Scalar(0))
    throw std::invalid_argument("bessel_transform: need a uniform grid starting at 0");
  const Scalar h = x_grid[1];
  const Scalar y_max = y_grid.maxCoeff();
  if (y_max * h > Scalar(EIGEN_PI))
    throw std::invalid_argument(
        "bessel_transform: target grid exceeds the source Nyquist limit");

  Eigen::ArrayX<Scalar> weights(f.size());
  const Eigen::Index n = f.size() - 1;
  if (n % 2 != 0)
    throw std::invalid_argument("bessel_transform: need an even interval count");
  weights[0] = weights[n] = h / Scalar(3);
  for (Eigen::Index i = 1; i < n; ++i)
    weights[i] = (i % 2 ? Scalar(4) : Scalar(2)) * h / Scalar(3);

  const Eigen::ArrayX<Scalar> wf = weights * f;
  const Scalar front = std::sqrt(Scalar(2) / Scalar(EIGEN_PI));
  Eigen::ArrayX<Scalar> g(y_grid.size());
  for (Eigen::Index j = 0; j < y_grid.size(); ++j) {
    const Eigen::ArrayX<Scalar> arg = y_grid[j] * x_grid;
    g[j] = front * (wf * arg * sph_bessel_j(l, arg)).sum();
  }
  return g;
}

template <typename Scalar>
MomentumWavefunctionT<Scalar> momentum_wavefunction(const RadialSolutionT<Scalar>& sol,
                                                    const Eigen::ArrayX<Scalar>& k_grid) {
  MomentumWavefunctionT<Scalar> mwf;
  mwf.k = k_grid;
  mwf.u = bessel_transform(sol.u, sol.r, k_grid, sol.l);
  mwf.l = sol.l;
  return mwf;
}

template <typename Scalar>
Eigen::ArrayX<Scalar> position_wavefunction(const MomentumWavefunctionT<Scalar>& mwf,
                                            const Eigen::ArrayX<Scalar>& r_grid) {
  return bessel_transform(mwf.u, mwf.k, r_grid, mwf.l);
}

// L2 norm of the momentum-space wave; equals 1 for a transform of a
// normalized bound state (Parseval).
template <typename Scalar>
Scalar parseval_norm(const MomentumWavefunctionT<Scalar>& mwf) {
  return simpson<Scalar>(mwf.u.square(), mwf.k[1]);
}

template <typename Scalar>
struct PowerFitT {
  Scalar slope;
  Scalar slope_error;
  Eigen::Index n_samples;
};

using PowerFit = PowerFitT<double>;

template <typename Scalar>
struct SmallRExponentsT {
  PowerFitT<Scalar> relative;  // log|psi_rel| vs log r
  PowerFitT<Scalar> product;   // log|psi_1(eta2 r) psi_2(eta1 r)| vs log r
};

using SmallRExponents = SmallRExponentsT<double>;

namespace detail {

template <typename Scalar>
PowerFitT<Scalar> loglog_fit(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 3)
    throw std::domain_error("small_r_exponent: fewer than 3 usable samples in the fit window");
  Scalar xm = 0, ym = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= Scalar(n);
  ym /= Scalar(n);
  Scalar sxx = 0, sxy = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  PowerFitT<Scalar> fit;
  fit.slope = sxy / sxx;
  Scalar ss_res = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar r = y[i] - ym - fit.slope * (x[i] - xm);
    ss_res += r * r;
  }
  fit.slope_error = std::sqrt(ss_res / (Scalar(n - 2) * sxx));
  fit.n_samples = n;
  return fit;
}

}  // namespace detail

// Fitted small-r power of the relative probability amplitude and of the
// position-correlated product of the two individual amplitudes, evaluated at
// r_1 = eta2 r, r_2 = eta1 r (the tightly localized center-of-mass regime).
// The fit window is [rel.r[5], window_max] in the relative coordinate; for a
// shared angular momentum l the expected powers are l and 2l.
template <typename Scalar>
SmallRExponentsT<Scalar> small_r_exponent(const RadialSolutionT<Scalar>& rel,
                                          const RadialSolutionT<Scalar>& ind1,
                                          const RadialSolutionT<Scalar>& ind2,
                                          const TwoBodySystemT<Scalar>& sys,
                                          Scalar window_max) {
  if (rel.l != ind1.l || rel.l != ind2.l)
    throw std::domain_error("small_r_exponent: solutions must share l");
  const Scalar r_lo = rel.r[5];
  if (!(window_max > r_lo))
    throw std::domain_error("small_r_exponent: fit window is empty on this grid");
  const Scalar h1 = ind1.r[1], h2 = ind2.r[1];

  std::vector<Scalar> lx, ly_rel, ly_prod;
  for (Eigen::Index i = 5; i < rel.r.size() && rel.r[i] <= window_max; ++i) {
    const Scalar r = rel.r[i];
    const Scalar psi_rel = rel.u[i] / r;
    const Scalar r1 = sys.eta2 * r, r2 = sys.eta1 * r;
    const Scalar psi1 = interp_uniform(ind1.u, r1 / h1) / r1;
    const Scalar psi2 = interp_uniform(ind2.u, r2 / h2) / r2;
    if (psi_rel == Scalar(0) || psi1 * psi2 == Scalar(0)) continue;
    lx.push_back(std::log(r));
    ly_rel.push_back(std::log(std::abs(psi_rel)));
    ly_prod.push_back(std::log(std::abs(psi1 * psi2)));
  }
  SmallRExponentsT<Scalar> out;
  out.relative = detail::loglog_fit(lx, ly_rel);
  out.product = detail::loglog_fit(lx, ly_prod);
  return out;
}

}  // namespace bisys
