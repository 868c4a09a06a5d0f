#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hsg/common.hpp"

namespace hsg {

/// Parameters of the scaled/translated Hermite family in one dimension.
struct BasisParams1D {
  double alpha = 1.0; ///< scaling factor, strictly positive
  double beta = 0.0;  ///< translation

  BasisParams1D() = default;
  BasisParams1D(double a, double b) : alpha(a), beta(b) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw std::invalid_argument("BasisParams1D: alpha must be positive and finite");
    if (!std::isfinite(beta))
      throw std::invalid_argument("BasisParams1D: beta must be finite");
  }
};

/// lambda_n = 2 alpha^2 n, the Sturm-Liouville eigenvalue of the n-th basis function.
inline double eigenvalue(int n, double alpha) {
  if (n < 0)
    throw std::invalid_argument("eigenvalue: n must be >= 0");
  return 2.0 * alpha * alpha * static_cast<double>(n);
}

/// mu_{n,k}: 1 for k = 0, 0 for k > n, otherwise the running product
/// lambda_n lambda_{n-1} ... lambda_{n-k+1}. No explicit factorials.
inline double mu_factor(int n, int k, double alpha) {
  if (n < 0 || k < 0)
    throw std::invalid_argument("mu_factor: n and k must be >= 0");
  if (k == 0)
    return 1.0;
  if (k > n)
    return 0.0;
  double mu = 1.0;
  for (int j = 0; j < k; ++j) {
    mu *= eigenvalue(n - j, alpha);
    if (mu == 0.0)
      return 0.0;
  }
  return mu;
}

/// Physicists' Hermite polynomial H_n(x) by the upward three-term recurrence.
/// Overflow is reported, never returned as infinity.
inline double hermite_poly_eval(int n, double x) {
  if (n < 0)
    throw std::invalid_argument("hermite_poly_eval: n must be >= 0");
  if (!std::isfinite(x))
    throw std::invalid_argument("hermite_poly_eval: x must be finite");
  double prev = 1.0; // H_0
  if (n == 0)
    return prev;
  double cur = 2.0 * x; // H_1
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  if (!std::isfinite(cur))
    throw std::overflow_error("hermite_poly_eval: value out of double range");
  return cur;
}

namespace detail {

// Normalized recurrence shared by all basis evaluators. With
// q_0 = sqrt(alpha) pi^(-1/4) (times the envelope when requested),
// q_{k+1} = t sqrt(2/(k+1)) q_k - sqrt(k/(k+1)) q_{k-1}
// carries the full normalization so no factorial ever appears.
inline void scaled_hermite_series(int nmax, double t, double q0, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
  out[0] = q0;
  if (nmax == 0)
    return;
  out[1] = std::sqrt(2.0) * t * q0;
  for (int k = 1; k < nmax; ++k)
    out[k + 1] = t * std::sqrt(2.0 / (k + 1)) * out[k] -
                 std::sqrt(static_cast<double>(k) / (k + 1)) * out[k - 1];
}

} // namespace detail

/// Values of the basis functions 0..nmax at x (Gaussian envelope included).
inline std::vector<double> basis_values(int nmax, const BasisParams1D& p, double x) {
  const double t = p.alpha * (x - p.beta);
  const double q0 = std::sqrt(p.alpha) * kPiQuarterInv * std::exp(-0.5 * t * t);
  std::vector<double> out;
  detail::scaled_hermite_series(nmax, t, q0, out);
  return out;
}

/// Same values with the envelope exp(-t^2/2) stripped analytically,
/// i.e. sqrt(alpha) times the orthonormal Hermite polynomial at t.
inline std::vector<double> basis_values_bare(int nmax, const BasisParams1D& p, double x) {
  const double t = p.alpha * (x - p.beta);
  const double q0 = std::sqrt(p.alpha) * kPiQuarterInv;
  std::vector<double> out;
  detail::scaled_hermite_series(nmax, t, q0, out);
  return out;
}

/// Single basis function value; stable for n up to several hundred.
inline double basis_eval(int n, const BasisParams1D& p, double x) {
  if (n < 0)
    throw std::invalid_argument("basis_eval: n must be >= 0");
  const double t = p.alpha * (x - p.beta);
  double prev = std::sqrt(p.alpha) * kPiQuarterInv * std::exp(-0.5 * t * t);
  if (n == 0)
    return prev;
  double cur = std::sqrt(2.0) * t * prev;
  for (int k = 1; k < n; ++k) {
    const double next = t * std::sqrt(2.0 / (k + 1)) * cur -
                        std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// One-dimensional spectral coefficient sequence, index 0..N.
using CoeffSeq = std::vector<double>;

/// Coefficients of D^k u where D = d/dx + alpha^2 (x - beta).
/// Entry n-k of the output is sqrt(mu_{n,k}) c_n; length shrinks by k.
inline CoeffSeq lower_D_coeffs(const CoeffSeq& c, int k, const BasisParams1D& p) {
  if (k < 0)
    throw std::invalid_argument("lower_D_coeffs: k must be >= 0");
  if (k == 0)
    return c;
  const int len = static_cast<int>(c.size());
  if (k >= len)
    return {}; // D^k annihilates everything below degree k
  CoeffSeq out(static_cast<std::size_t>(len - k), 0.0);
  for (int n = k; n < len; ++n)
    out[n - k] = std::sqrt(mu_factor(n, k, p.alpha)) * c[n];
  return out;
}

/// Coefficients of x*u; length grows by one.
inline CoeffSeq multiply_x_coeffs(const CoeffSeq& c, const BasisParams1D& p) {
  const int len = static_cast<int>(c.size());
  if (len == 0)
    return {};
  CoeffSeq out(static_cast<std::size_t>(len) + 1, 0.0);
  const double inv2a2 = 1.0 / (2.0 * p.alpha * p.alpha);
  for (int m = 0; m <= len; ++m) {
    double v = 0.0;
    if (m + 1 < len)
      v += std::sqrt(eigenvalue(m + 1, p.alpha)) * inv2a2 * c[m + 1];
    if (m >= 1 && m - 1 < len)
      v += std::sqrt(eigenvalue(m, p.alpha)) * inv2a2 * c[m - 1];
    if (m < len)
      v += p.beta * c[m];
    out[m] = v;
  }
  return out;
}

/// Coefficients of du/dx; length grows by one.
inline CoeffSeq derivative_coeffs(const CoeffSeq& c, const BasisParams1D& p) {
  const int len = static_cast<int>(c.size());
  if (len == 0)
    return {};
  CoeffSeq out(static_cast<std::size_t>(len) + 1, 0.0);
  for (int m = 0; m <= len; ++m) {
    double v = 0.0;
    if (m + 1 < len)
      v += 0.5 * std::sqrt(eigenvalue(m + 1, p.alpha)) * c[m + 1];
    if (m >= 1 && m - 1 < len)
      v -= 0.5 * std::sqrt(eigenvalue(m, p.alpha)) * c[m - 1];
    out[m] = v;
  }
  return out;
}

} // namespace hsg
