#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "hsg/multi_index.hpp"
#include "hsg/spectral.hpp"

namespace hsg {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
};

/// Least-squares line through (log x, log y).
inline SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog: need at least two samples");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
      ss += r * r;
    }
    fit.stderr_slope = std::sqrt(ss / (static_cast<double>(n) - 2.0) / sxx);
  }
  return fit;
}

/// 1D spectral coefficients of f for modes 0..K.
inline std::vector<double> coeffs_1d(const std::function<double(double)>& f, const BasisParams1D& p,
                                     int K, int quad_order = -1) {
  if (quad_order < 0)
    quad_order = K + 24;
  auto set = std::make_shared<IndexSet>(build_full(K, 1));
  BasisParamsND pn;
  pn.axes = {p};
  CoeffVector c = project([&f](const std::vector<double>& x) { return f(x[0]); }, set, pn, quad_order);
  return c.values();
}

/// A product function u(x) = prod_j u_j(x_j) represented by per-axis 1D
/// coefficient arrays; projection tails follow from Parseval without any
/// multidimensional quadrature.
struct SeparableCoeffs {
  std::vector<std::vector<double>> axis; // axis[j][k]

  int dim() const { return static_cast<int>(axis.size()); }

  double norm_sq() const {
    double prod = 1.0;
    for (const auto& a : axis) {
      double s = 0.0;
      for (double v : a)
        s += v * v;
      prod *= s;
    }
    return prod;
  }

  /// || u - P_S u ||, exact up to the 1D truncation at K.
  double tail_error(const IndexSet& s) const {
    double captured = 0.0;
    for (const auto& n : s.members()) {
      double prod = 1.0;
      for (int j = 0; j < dim(); ++j) {
        if (n[j] >= static_cast<int>(axis[j].size()))
          throw std::invalid_argument("tail_error: set degree exceeds the 1D coefficient range");
        const double v = axis[j][n[j]];
        prod *= v * v;
      }
      captured += prod;
    }
    return std::sqrt(std::max(0.0, norm_sq() - captured));
  }
};

inline SeparableCoeffs separable_coeffs(const std::vector<std::function<double(double)>>& factors,
                                        const BasisParamsND& p, int K) {
  SeparableCoeffs sc;
  sc.axis.reserve(factors.size());
  for (std::size_t j = 0; j < factors.size(); ++j)
    sc.axis.push_back(coeffs_1d(factors[j], p.axes[j], K));
  return sc;
}

// ---- fixed test-function suite ----------------------------------------------

inline std::function<double(double)> gauss_factor() {
  return [](double x) { return std::exp(-0.5 * x * x); };
}

inline std::function<double(double)> sin_gauss_factor(double freq = 1.0, double phase = 0.0) {
  return [freq, phase](double x) { return std::sin(freq * x + phase) * std::exp(-0.5 * x * x); };
}

inline std::function<double(double)> poly_gauss_factor() {
  return [](double x) { return (x * x * x - x + 0.5) * std::exp(-0.5 * x * x); };
}

/// Synthetic per-axis coefficient profile a_k = (1+k)^(-s). Products of these
/// have finite mixed smoothness, the regime the hyperbolic-cross estimates
/// are about; entire test functions make the full grid win at any matched
/// cardinality and say nothing about the cross.
inline std::vector<double> algebraic_decay_coeffs(int K, double s) {
  std::vector<double> a(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k)
    a[k] = std::pow(1.0 + k, -s);
  return a;
}

// ---- decay suites -------------------------------------------------------------

struct DecayPoint {
  int n = 0;
  std::size_t cardinality = 0;
  double error = 0.0;
};

/// Full-grid projection decay for u = prod_j sin(x_j) exp(-x_j^2/2), d = 2.
inline std::vector<DecayPoint> full_grid_decay_suite(const std::vector<int>& Ns, double alpha = 1.01) {
  const int d = 2;
  BasisParamsND p = BasisParamsND::uniform(d, alpha);
  const int K = 200;
  SeparableCoeffs u = separable_coeffs({sin_gauss_factor(), sin_gauss_factor()}, p, K);
  std::vector<DecayPoint> out;
  for (int N : Ns) {
    IndexSet s = build_full(N, d);
    out.push_back({N, s.cardinality(), u.tail_error(s)});
  }
  return out;
}

struct PairPoint {
  std::size_t card_a = 0, card_b = 0;
  double err_a = 0.0, err_b = 0.0;
  int n_a = 0, n_b = 0;
};

namespace detail {

// largest RHC whose cardinality does not exceed the target
inline IndexSet rhc_matching_cardinality(std::size_t target, int d, int max_n, int* n_out) {
  int nr = 1;
  IndexSet rhc = build_rhc(1, d);
  for (int cand = 2; cand <= max_n; ++cand) {
    IndexSet next = build_rhc(cand, d);
    if (next.cardinality() > target)
      break;
    nr = cand;
    rhc = std::move(next);
  }
  if (n_out)
    *n_out = nr;
  return rhc;
}

} // namespace detail

/// RHC error at (approximately) the cardinality of the full grid of degree N,
/// d = 3, for the mixed-smoothness representative.
inline std::vector<PairPoint> rhc_vs_full_suite(const std::vector<int>& full_Ns, double s = 3.0) {
  const int d = 3;
  const int K = 200;
  SeparableCoeffs u;
  u.axis.assign(d, algebraic_decay_coeffs(K, s));
  std::vector<PairPoint> out;
  for (int N : full_Ns) {
    IndexSet full = build_full(N, d);
    const std::size_t target = full.cardinality();
    int nr = 1;
    IndexSet rhc = detail::rhc_matching_cardinality(target, d, K, &nr);
    out.push_back({target, rhc.cardinality(), u.tail_error(full), u.tail_error(rhc), N, nr});
  }
  return out;
}

/// OHC(gamma) against RHC at matched cardinality, d = 3, same representative.
inline std::vector<PairPoint> ohc_vs_rhc_suite(double gamma, const std::vector<int>& ohc_Ns,
                                               double s = 3.0) {
  const int d = 3;
  const int K = 200;
  SeparableCoeffs u;
  u.axis.assign(d, algebraic_decay_coeffs(K, s));
  std::vector<PairPoint> out;
  for (int N : ohc_Ns) {
    IndexSet ohc = build_ohc(N, gamma, d);
    const std::size_t target = ohc.cardinality();
    int nr = 1;
    IndexSet rhc = detail::rhc_matching_cardinality(target, d, K, &nr);
    out.push_back({target, rhc.cardinality(), u.tail_error(ohc), u.tail_error(rhc), N, nr});
  }
  return out;
}

/// Projection error of the dimension-adaptive set over a grid of (N1, N2).
/// The test function oscillates fastest in dimension 1, so the full-grid block
/// and the OHC block both control a visible share of the error.
inline std::vector<std::vector<double>> dim_adaptive_error_table(const std::vector<int>& N1s,
                                                                 const std::vector<int>& N2s,
                                                                 double gamma = 0.5,
                                                                 double alpha = 1.01) {
  const int d = 3, d1 = 1;
  BasisParamsND p = BasisParamsND::uniform(d, alpha);
  const int K = 200;
  SeparableCoeffs u = separable_coeffs(
      {sin_gauss_factor(4.0, 0.3), sin_gauss_factor(2.0, 0.1), sin_gauss_factor(2.0, -0.2)}, p, K);
  std::vector<std::vector<double>> table(N1s.size(), std::vector<double>(N2s.size(), 0.0));
  for (std::size_t i = 0; i < N1s.size(); ++i)
    for (std::size_t j = 0; j < N2s.size(); ++j) {
      IndexSet s = build_dim_adaptive(N1s[i], d1, N2s[j], gamma, d);
      table[i][j] = u.tail_error(s);
    }
  return table;
}

} // namespace hsg
