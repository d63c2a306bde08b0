#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bisys {

namespace detail {

// ascending series: x^l/(2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)...(2l+1+2k))
template <typename Scalar>
Eigen::ArrayX<Scalar> sph_series(int l, const Eigen::Ref<const Eigen::ArrayX<Scalar>>& x) {
  Scalar dfact = 1;
  for (int i = 3; i <= 2 * l + 1; i += 2) dfact *= Scalar(i);
  const Eigen::ArrayX<Scalar> x2h = Scalar(-0.5) * x.square();
  Eigen::ArrayX<Scalar> term = x.pow(Scalar(l)) / dfact;
  Eigen::ArrayX<Scalar> series = term;
  for (int k = 1; k <= 30; ++k) {
    term *= x2h / (Scalar(k) * Scalar(2 * l + 1 + 2 * k));
    series += term;
  }
  return series;
}

// j0, j1 closed forms and upward recurrence j_{m+1} = (2m+1)/x j_m - j_{m-1}
template <typename Scalar>
Eigen::ArrayX<Scalar> sph_recurrence(int l,
                                     const Eigen::Ref<const Eigen::ArrayX<Scalar>>& x) {
  using Array = Eigen::ArrayX<Scalar>;
  const Array xs = x.max(Scalar(std::numeric_limits<Scalar>::min()));
  Array jm = x.sin() / xs;  // j0
  if (l > 0) {
    Array jc = jm / xs - x.cos() / xs;  // j1
    for (int m = 1; m < l; ++m) {
      Array jn = Scalar(2 * m + 1) / xs * jc - jm;
      jm.swap(jc);
      jc.swap(jn);
    }
    jm.swap(jc);
  }
  return jm;
}

}  // namespace detail

// Spherical Bessel j_l on an array argument. Small arguments (x <= max(1, l),
// where upward recurrence loses accuracy) use the ascending series; the rest
// use the closed-form recurrence. Ascending inputs, the common case for
// transform kernels y * r_grid, let each branch run on just its own subrange;
// otherwise both are evaluated array-wide and merged with a select.
template <typename Scalar>
Eigen::ArrayX<Scalar> sph_bessel_j(int l, const Eigen::ArrayX<Scalar>& x) {
  if (l < 0) throw std::domain_error("sph_bessel_j: l must be >= 0");
  using Array = Eigen::ArrayX<Scalar>;
  const Scalar cut = std::max(Scalar(1), Scalar(l));

  bool ascending = true;
  for (Eigen::Index i = 1; i < x.size() && ascending; ++i)
    ascending = !(x[i] < x[i - 1]);

  if (ascending) {
    const Scalar* begin = x.data();
    const Eigen::Index split = std::upper_bound(begin, begin + x.size(), cut) - begin;
    Array out(x.size());
    if (split > 0) out.head(split) = detail::sph_series<Scalar>(l, x.head(split));
    if (split < x.size())
      out.tail(x.size() - split) =
          detail::sph_recurrence<Scalar>(l, x.tail(x.size() - split));
    return out;
  }
  const Array series = detail::sph_series<Scalar>(l, x);
  const Array jm = detail::sph_recurrence<Scalar>(l, x);
  return (x <= cut).select(series, jm);
}

template <typename Scalar>
Scalar sph_bessel_j(int l, Scalar x) {
  Eigen::ArrayX<Scalar> a(1);
  a[0] = x;
  return sph_bessel_j(l, a)[0];
}

}  // namespace bisys
