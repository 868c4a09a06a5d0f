#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hsg/common.hpp"
#include "hsg/multi_index.hpp"
#include "hsg/spectral.hpp"

namespace hsg {

/// coeff * prod_j x_j^(exponents_j)
struct Monomial {
  MultiIndex exponents;
  double coefficient = 0.0;
};

/// Polynomial in x as a sum of monomials.
struct Polynomial {
  std::vector<Monomial> terms;

  bool is_zero() const {
    for (const auto& t : terms)
      if (t.coefficient != 0.0)
        return false;
    return true;
  }

  int total_degree() const {
    int deg = 0;
    for (const auto& t : terms)
      if (t.coefficient != 0.0)
        deg = std::max(deg, norm_l1(t.exponents));
    return deg;
  }

  static Polynomial zero() { return {}; }

  static Polynomial constant(int d, double c) {
    Polynomial p;
    if (c != 0.0)
      p.terms.push_back({MultiIndex(static_cast<std::size_t>(d), 0), c});
    return p;
  }

  double eval(const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& t : terms) {
      double v = t.coefficient;
      for (std::size_t j = 0; j < t.exponents.size(); ++j)
        for (int e = 0; e < t.exponents[j]; ++e)
          v *= x[j];
      s += v;
    }
    return s;
  }
};

namespace detail {

// Smallest eigenvalue of a small symmetric matrix by cyclic Jacobi rotations.
inline double symmetric_min_eigenvalue(std::vector<double> a, int d) {
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        off += a[i * d + j] * a[i * d + j];
    if (off < 1e-30)
      break;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) {
        const double apq = a[p * d + q];
        if (apq == 0.0)
          continue;
        const double theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < d; ++k) {
          const double akp = a[k * d + p], akq = a[k * d + q];
          a[k * d + p] = c * akp - s * akq;
          a[k * d + q] = s * akp + c * akq;
        }
        for (int k = 0; k < d; ++k) {
          const double apk = a[p * d + k], aqk = a[q * d + k];
          a[p * d + k] = c * apk - s * aqk;
          a[q * d + k] = s * apk + c * aqk;
        }
      }
  }
  double mn = a[0];
  for (int i = 1; i < d; ++i)
    mn = std::min(mn, a[i * d + i]);
  return mn;
}

} // namespace detail

inline constexpr int kMaxPolynomialDegree = 8;

/// Constant-diffusion operator L u = -div(A grad u) + b . grad u + c u.
struct OperatorSpec {
  int dim = 0;
  std::vector<double> diffusion; // d x d, row-major, constant
  std::vector<Polynomial> drift; // size d
  Polynomial potential;
};

inline OperatorSpec make_operator_spec(int d, std::vector<double> diffusion,
                                       std::vector<Polynomial> drift, Polynomial potential) {
  if (d < 1)
    throw std::invalid_argument("make_operator_spec: d must be >= 1");
  if (diffusion.size() != static_cast<std::size_t>(d) * d)
    throw std::invalid_argument("make_operator_spec: diffusion must be d x d");
  if (drift.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("make_operator_spec: drift must have d components");
  double scale = 1.0;
  for (double v : diffusion)
    scale = std::max(scale, std::abs(v));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::abs(diffusion[i * d + j] - diffusion[j * d + i]) > 1e-14 * scale)
        throw std::invalid_argument("make_operator_spec: diffusion matrix is not symmetric");
  if (detail::symmetric_min_eigenvalue(diffusion, d) < -1e-12 * scale)
    throw std::invalid_argument("make_operator_spec: diffusion matrix is not positive semidefinite");
  for (const auto& b : drift)
    if (b.total_degree() > kMaxPolynomialDegree)
      throw std::invalid_argument("make_operator_spec: drift degree exceeds the assembly guard");
  if (potential.total_degree() > kMaxPolynomialDegree)
    throw std::invalid_argument("make_operator_spec: potential degree exceeds the assembly guard");
  OperatorSpec op;
  op.dim = d;
  op.diffusion = std::move(diffusion);
  op.drift = std::move(drift);
  op.potential = std::move(potential);
  return op;
}

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Sparse matrix stored by nonzero entries, row-major sorted, with a CSR
/// row index for matrix-vector products.
class SparseOperator {
public:
  SparseOperator() = default;

  SparseOperator(std::size_t size, std::vector<Triplet> entries) : size_(size), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& t = entries_[i];
      if (t.row >= size_ || t.col >= size_)
        throw std::invalid_argument("SparseOperator: entry out of range");
      if (!std::isfinite(t.value))
        throw std::invalid_argument("SparseOperator: non-finite entry");
      if (i > 0 && entries_[i - 1].row == t.row && entries_[i - 1].col == t.col)
        throw std::invalid_argument("SparseOperator: duplicate (row, col) pair");
    }
    row_ptr_.assign(size_ + 1, 0);
    for (const auto& t : entries_)
      ++row_ptr_[t.row + 1];
    for (std::size_t r = 0; r < size_; ++r)
      row_ptr_[r + 1] += row_ptr_[r];
  }

  std::size_t size() const { return size_; }
  const std::vector<Triplet>& entries() const { return entries_; }

  void matvec(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(size_, 0.0);
    for (const auto& t : entries_)
      y[t.row] += t.value * x[t.col];
  }

  std::size_t max_row_nonzeros() const {
    std::size_t mx = 0;
    for (std::size_t r = 0; r < size_; ++r)
      mx = std::max(mx, row_ptr_[r + 1] - row_ptr_[r]);
    return mx;
  }

  /// Coordinate text format: one "row col value" triple per line, row-major.
  void write(std::ostream& os) const {
    for (const auto& t : entries_)
      os << t.row << " " << t.col << " " << format_g17(t.value) << "\n";
  }

private:
  std::size_t size_ = 0;
  std::vector<Triplet> entries_;
  std::vector<std::size_t> row_ptr_;
};

namespace detail {

using SparseCoeffs = std::unordered_map<MultiIndex, double, MultiIndexHash>;

inline void add_to(SparseCoeffs& acc, const MultiIndex& n, double v) {
  if (v == 0.0)
    return;
  acc[n] += v;
}

// d/dx_j on a coefficient map: e_n -> 1/2 sqrt(l_n) e_{n-1} - 1/2 sqrt(l_{n+1}) e_{n+1}.
inline SparseCoeffs apply_derivative_axis(const SparseCoeffs& in, int axis, const BasisParams1D& p) {
  SparseCoeffs out;
  out.reserve(in.size() * 2);
  MultiIndex m;
  for (const auto& [n, v] : in) {
    const int k = n[axis];
    if (k >= 1) {
      m = n;
      m[axis] = k - 1;
      add_to(out, m, 0.5 * std::sqrt(eigenvalue(k, p.alpha)) * v);
    }
    m = n;
    m[axis] = k + 1;
    add_to(out, m, -0.5 * std::sqrt(eigenvalue(k + 1, p.alpha)) * v);
  }
  return out;
}

// x_j on a coefficient map: e_n -> beta e_n + sqrt(l_n)/(2a^2) e_{n-1} + sqrt(l_{n+1})/(2a^2) e_{n+1}.
inline SparseCoeffs apply_multiply_x_axis(const SparseCoeffs& in, int axis, const BasisParams1D& p) {
  SparseCoeffs out;
  out.reserve(in.size() * 3);
  const double inv2a2 = 1.0 / (2.0 * p.alpha * p.alpha);
  MultiIndex m;
  for (const auto& [n, v] : in) {
    const int k = n[axis];
    if (p.beta != 0.0)
      add_to(out, n, p.beta * v);
    if (k >= 1) {
      m = n;
      m[axis] = k - 1;
      add_to(out, m, std::sqrt(eigenvalue(k, p.alpha)) * inv2a2 * v);
    }
    m = n;
    m[axis] = k + 1;
    add_to(out, m, std::sqrt(eigenvalue(k + 1, p.alpha)) * inv2a2 * v);
  }
  return out;
}

inline void accumulate(SparseCoeffs& acc, double scale, const SparseCoeffs& x) {
  for (const auto& [n, v] : x)
    add_to(acc, n, scale * v);
}

inline SparseCoeffs apply_polynomial(const SparseCoeffs& in, const Polynomial& poly,
                                     const BasisParamsND& p) {
  SparseCoeffs out;
  for (const auto& term : poly.terms) {
    if (term.coefficient == 0.0)
      continue;
    SparseCoeffs cur = in;
    for (std::size_t j = 0; j < term.exponents.size(); ++j)
      for (int e = 0; e < term.exponents[j]; ++e)
        cur = apply_multiply_x_axis(cur, static_cast<int>(j), p.axes[j]);
    accumulate(out, term.coefficient, cur);
  }
  return out;
}

} // namespace detail

/// Galerkin matrix M with M[m][n] = <-L H_n, H_m>, so the semidiscrete system
/// reads da/dt = M a + f_hat. Assembly runs entirely in coefficient space:
/// operators are composed on the extended index range and truncated to the set
/// once at read-off.
inline SparseOperator assemble(const OperatorSpec& op, std::shared_ptr<const IndexSet> set,
                               const BasisParamsND& p) {
  const IndexSet& s = *set;
  if (op.dim != s.dim() || p.dim() != s.dim())
    throw std::invalid_argument("assemble: dimension mismatch");
  if (!s.is_downward_closed())
    throw std::invalid_argument("assemble: index set must be downward closed");
  const int d = s.dim();
  std::vector<Triplet> triplets;
  const auto& members = s.members();
  for (std::size_t col = 0; col < members.size(); ++col) {
    detail::SparseCoeffs unit;
    unit.emplace(members[col], 1.0);
    detail::SparseCoeffs applied; // coefficients of L e_col
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double a_ij = op.diffusion[i * d + j];
        if (a_ij == 0.0)
          continue;
        auto tmp = detail::apply_derivative_axis(unit, j, p.axes[j]);
        tmp = detail::apply_derivative_axis(tmp, i, p.axes[i]);
        detail::accumulate(applied, -a_ij, tmp);
      }
    for (int i = 0; i < d; ++i) {
      if (op.drift[i].is_zero())
        continue;
      auto tmp = detail::apply_derivative_axis(unit, i, p.axes[i]);
      tmp = detail::apply_polynomial(tmp, op.drift[i], p);
      detail::accumulate(applied, 1.0, tmp);
    }
    if (!op.potential.is_zero())
      detail::accumulate(applied, 1.0, detail::apply_polynomial(unit, op.potential, p));
    for (const auto& [m, v] : applied) {
      const std::size_t row = s.index_of(m);
      if (row != IndexSet::npos && v != 0.0)
        triplets.push_back({row, col, -v});
    }
  }
  return SparseOperator(s.cardinality(), std::move(triplets));
}

/// Sampled range of the Rayleigh quotient u^T B u / u^T u of the symmetric
/// part of the bilinear form B = -(M + M^T)/2 (assemble returns M = <-L .,.>).
/// A numeric spot check for coercivity of the assembled operator; positivity
/// of the minimum over many samples is evidence, not proof.
struct RayleighRange {
  double min_quotient = 0.0;
  double max_quotient = 0.0;
};

inline RayleighRange rayleigh_spot_check(const SparseOperator& M, int samples = 64,
                                         unsigned seed = 2024) {
  if (M.size() == 0)
    throw std::invalid_argument("rayleigh_spot_check: empty operator");
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  RayleighRange range;
  range.min_quotient = std::numeric_limits<double>::infinity();
  range.max_quotient = -std::numeric_limits<double>::infinity();
  std::vector<double> u(M.size()), v;
  for (int s = 0; s < samples; ++s) {
    double norm_sq = 0.0;
    for (auto& x : u) {
      x = g(rng);
      norm_sq += x * x;
    }
    M.matvec(u, v);
    double quad = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      quad -= u[i] * v[i]; // u^T (-M) u; the symmetric part is implicit in the quadratic form
    const double q = quad / norm_sq;
    range.min_quotient = std::min(range.min_quotient, q);
    range.max_quotient = std::max(range.max_quotient, q);
  }
  return range;
}

// ---- time integration -------------------------------------------------------

using TimeProfile = std::function<double(double)>;

/// Sum of terms profile_k(t) * coeffs_k, all sharing one index set.
struct SeparableSource {
  struct Term {
    TimeProfile profile;
    CoeffVector coeffs;
  };
  std::vector<Term> terms;

  void eval(double t, std::vector<double>& out) const {
    for (const auto& term : terms) {
      const double a = term.profile(t);
      const auto& v = term.coeffs.values();
      for (std::size_t i = 0; i < v.size(); ++i)
        out[i] += a * v[i];
    }
  }
};

/// Projects each spatial factor once; time profiles are stored unevaluated.
inline SeparableSource source_project(const std::vector<std::pair<TimeProfile, ScalarField>>& parts,
                                      std::shared_ptr<const IndexSet> set, const BasisParamsND& p,
                                      int quad_order) {
  SeparableSource src;
  for (const auto& [profile, field] : parts)
    src.terms.push_back({profile, project(field, set, p, quad_order)});
  return src;
}

/// Raised when the two-step scheme detects a diverging iterate.
struct IntegrationBlowup : std::runtime_error {
  explicit IntegrationBlowup(const std::string& msg) : std::runtime_error(msg) {}
};

struct LeapfrogOptions {
  double blowup_factor = 1e6;
  bool stability_warning = true;
  std::ostream* warn_stream = &std::cerr;
};

namespace detail {

inline double power_iteration_radius(const SparseOperator& M, int steps = 20) {
  if (M.size() == 0)
    return 0.0;
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(M.size()), w;
  for (auto& x : v)
    x = u(rng);
  double rho = 0.0;
  for (int it = 0; it < steps; ++it) {
    M.matvec(v, w);
    double norm = 0.0;
    for (double x : w)
      norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0)
      return 0.0;
    rho = norm;
    double vnorm = 0.0;
    for (double x : v)
      vnorm += x * x;
    vnorm = std::sqrt(vnorm);
    rho = norm / (vnorm > 0.0 ? vnorm : 1.0);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = w[i] / norm;
  }
  return rho;
}

inline double vec_norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v)
    s += x * x;
  return std::sqrt(s);
}

} // namespace detail

/// Leapfrog (central difference) integration of da/dt = M a + f_hat(t) from 0
/// to T: a^{m+1} = a^{m-1} + 2 dt (M a^m + f_hat(t_m)), with a second-order
/// Taylor bootstrap for the first step and linear interpolation when T/dt is
/// not integral.
inline CoeffVector integrate_leapfrog(const SparseOperator& M, const SeparableSource& src,
                                      const CoeffVector& a0, double dt, double T,
                                      const LeapfrogOptions& opts = {}) {
  if (!(dt > 0.0) || !(T > 0.0))
    throw std::invalid_argument("integrate_leapfrog: dt and T must be positive");
  const double ratio = T / dt;
  if (ratio > 1e9)
    throw std::invalid_argument("integrate_leapfrog: more than 1e9 steps requested");
  if (M.size() != a0.size())
    throw std::invalid_argument("integrate_leapfrog: size mismatch");
  for (const auto& term : src.terms)
    if (term.coeffs.size() != a0.size())
      throw std::invalid_argument("integrate_leapfrog: source size mismatch");

  if (opts.stability_warning) {
    const double rho = detail::power_iteration_radius(M);
    if (dt * rho > 2.0 && opts.warn_stream)
      (*opts.warn_stream) << "integrate_leapfrog: dt * estimated spectral radius = " << dt * rho
                          << " > 2, the scheme may be unstable\n";
  }

  long long steps = std::llround(ratio);
  bool integral = std::abs(ratio - static_cast<double>(steps)) <= 1e-9 * std::max(1.0, ratio);
  if (!integral)
    steps = static_cast<long long>(std::ceil(ratio));
  if (steps < 1)
    steps = 1;

  const std::size_t n = a0.size();
  const double guard = opts.blowup_factor * (detail::vec_norm2(a0.values()) + 1.0);

  std::vector<double> prev = a0.values();
  std::vector<double> f(n, 0.0), r0(n), mr0, cur(n), next(n), tmp;

  // bootstrap: a^1 = a^0 + dt r0 + dt^2/2 (M r0 + f'(0)), f'(0) by central difference
  src.eval(0.0, f);
  M.matvec(prev, r0);
  for (std::size_t i = 0; i < n; ++i)
    r0[i] += f[i];
  M.matvec(r0, mr0);
  std::vector<double> fdot(n, 0.0);
  {
    std::vector<double> fp(n, 0.0), fm(n, 0.0);
    src.eval(dt, fp);
    src.eval(-dt, fm);
    for (std::size_t i = 0; i < n; ++i)
      fdot[i] = (fp[i] - fm[i]) / (2.0 * dt);
  }
  for (std::size_t i = 0; i < n; ++i)
    cur[i] = prev[i] + dt * r0[i] + 0.5 * dt * dt * (mr0[i] + fdot[i]);

  for (long long m = 1; m < steps; ++m) {
    const double t = static_cast<double>(m) * dt;
    f.assign(n, 0.0);
    src.eval(t, f);
    M.matvec(cur, tmp);
    for (std::size_t i = 0; i < n; ++i)
      next[i] = prev[i] + 2.0 * dt * (tmp[i] + f[i]);
    if (detail::vec_norm2(next) > guard)
      throw IntegrationBlowup("integrate_leapfrog: solution norm exceeded the blowup guard at step " +
                              std::to_string(m + 1));
    prev.swap(cur);
    cur.swap(next);
  }

  if (!integral) {
    const double t_last = static_cast<double>(steps) * dt;
    const double tau = 1.0 - (t_last - T) / dt; // in (0,1]
    for (std::size_t i = 0; i < n; ++i)
      cur[i] = prev[i] + tau * (cur[i] - prev[i]);
  }
  return CoeffVector(a0.set_ptr(), std::move(cur));
}

// ---- the convergence experiment ---------------------------------------------

/// L = -Laplacian + sum_i x_i^2 (A = I, b = 0, c = |x|^2).
inline OperatorSpec experiment_operator(int d) {
  std::vector<double> A(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i)
    A[i * d + i] = 1.0;
  Polynomial c;
  for (int i = 0; i < d; ++i) {
    MultiIndex e(static_cast<std::size_t>(d), 0);
    e[i] = 2;
    c.terms.push_back({e, 1.0});
  }
  return make_operator_spec(d, std::move(A), std::vector<Polynomial>(static_cast<std::size_t>(d)),
                            std::move(c));
}

inline ScalarField experiment_initial(int d) {
  return [d](const std::vector<double>& x) {
    double s = 0.0, q = 0.0;
    for (int i = 0; i < d; ++i) {
      s += x[i];
      q += x[i] * x[i];
    }
    return s * std::exp(-0.5 * q);
  };
}

/// f(x,t) = [cos t + d sin t + (d+2) sum_i x_i] exp(-|x|^2/2) split into its
/// three separable (time profile, spatial factor) parts.
inline std::vector<std::pair<TimeProfile, ScalarField>> experiment_source(int d) {
  auto gauss = [d](const std::vector<double>& x) {
    double q = 0.0;
    for (int i = 0; i < d; ++i)
      q += x[i] * x[i];
    return std::exp(-0.5 * q);
  };
  auto gauss_scaled = [gauss, d](const std::vector<double>& x) { return d * gauss(x); };
  auto linear = [gauss, d](const std::vector<double>& x) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      s += x[i];
    return (d + 2) * s * gauss(x);
  };
  return {
      {[](double t) { return std::cos(t); }, gauss},
      {[](double t) { return std::sin(t); }, gauss_scaled},
      {[](double) { return 1.0; }, linear},
  };
}

inline ScalarField experiment_exact(int d, double t) {
  const double st = std::sin(t);
  return [d, st](const std::vector<double>& x) {
    double s = 0.0, q = 0.0;
    for (int i = 0; i < d; ++i) {
      s += x[i];
      q += x[i] * x[i];
    }
    return (s + st) * std::exp(-0.5 * q);
  };
}

/// Index set used by the convergence experiment at a given level: the Smolyak
/// union with max level L + d under the one-degree-per-level rule, i.e. the
/// total-degree set { n : |n|_1 <= L }.
inline IndexSet experiment_index_set(int d, int level) {
  if (level < 0)
    throw std::invalid_argument("experiment_index_set: level must be >= 0");
  return smolyak_union_index_set(d, build_smolyak(level + d, d));
}

struct ExperimentResult {
  CoeffVector solution;
  double error = 0.0;
  std::size_t dof = 0;
};

/// Builds the reference parabolic problem on the given set, integrates to T,
/// and reports the L2 error against the closed-form solution.
inline ExperimentResult solve_experiment(int d, const IndexSet& index_set, const BasisParamsND& p,
                                         double dt, double T, int proj_quad_order = -1,
                                         int err_quad_order = -1,
                                         const LeapfrogOptions& opts = {}) {
  auto set = std::make_shared<IndexSet>(index_set);
  const int maxdeg = set->max_degree();
  if (proj_quad_order < 0)
    proj_quad_order = maxdeg + 16;
  if (err_quad_order < 0)
    err_quad_order = 2 * maxdeg + 8;

  const OperatorSpec op = experiment_operator(d);
  const SparseOperator M = assemble(op, set, p);
  const CoeffVector a0 = project(experiment_initial(d), set, p, proj_quad_order);
  const SeparableSource src = source_project(experiment_source(d), set, p, proj_quad_order);
  CoeffVector u = integrate_leapfrog(M, src, a0, dt, T, opts);
  const double err = l2_error_vs_function(u, p, experiment_exact(d, T), err_quad_order);
  return {std::move(u), err, set->cardinality()};
}

} // namespace hsg
