#pragma once

#include <cmath>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsg/common.hpp"
#include "hsg/hermite.hpp"
#include "hsg/multi_index.hpp"
#include "hsg/quadrature.hpp"

namespace hsg {

/// Per-dimension basis parameters.
struct BasisParamsND {
  std::vector<BasisParams1D> axes;

  BasisParamsND() = default;
  explicit BasisParamsND(std::vector<BasisParams1D> a) : axes(std::move(a)) {}

  static BasisParamsND uniform(int d, double alpha, double beta = 0.0) {
    BasisParamsND p;
    p.axes.assign(static_cast<std::size_t>(d), BasisParams1D(alpha, beta));
    return p;
  }

  int dim() const { return static_cast<int>(axes.size()); }
};

/// Spectral coefficients aligned with the lexicographic member order of an IndexSet.
class CoeffVector {
public:
  CoeffVector() = default;
  CoeffVector(std::shared_ptr<const IndexSet> set, std::vector<double> values)
      : set_(std::move(set)), values_(std::move(values)) {
    if (!set_)
      throw std::invalid_argument("CoeffVector: null index set");
    if (values_.size() != set_->cardinality())
      throw std::invalid_argument("CoeffVector: value count does not match the index set");
    for (double v : values_)
      if (!std::isfinite(v))
        throw std::invalid_argument("CoeffVector: non-finite coefficient");
  }

  static CoeffVector zeros(std::shared_ptr<const IndexSet> set) {
    std::vector<double> v(set->cardinality(), 0.0);
    return CoeffVector(std::move(set), std::move(v));
  }

  static CoeffVector unit(std::shared_ptr<const IndexSet> set, const MultiIndex& n) {
    const std::size_t pos = set->index_of(n);
    if (pos == IndexSet::npos)
      throw std::invalid_argument("CoeffVector::unit: index not in set");
    std::vector<double> v(set->cardinality(), 0.0);
    v[pos] = 1.0;
    return CoeffVector(std::move(set), std::move(v));
  }

  const IndexSet& set() const { return *set_; }
  std::shared_ptr<const IndexSet> set_ptr() const { return set_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double at(const MultiIndex& n) const {
    const std::size_t pos = set_->index_of(n);
    return pos == IndexSet::npos ? 0.0 : values_[pos];
  }

private:
  std::shared_ptr<const IndexSet> set_;
  std::vector<double> values_;
};

using ScalarField = std::function<double(const std::vector<double>&)>;

namespace detail {

// Per-axis data for tensor quadrature: mapped nodes, envelope-compensated
// weights (the basis Gaussian is folded analytically, sampled values are
// never divided by it), and bare basis value tables B[k][i].
struct AxisQuadData {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<std::vector<double>> basis; // basis[k][i]
};

inline AxisQuadData make_axis_data(const QuadratureRule1D& base, const BasisParams1D& p,
                                   int max_degree, double envelope_power, bool bare_basis) {
  AxisQuadData ax;
  const int q = base.order();
  ax.nodes.resize(static_cast<std::size_t>(q));
  ax.weights = envelope_weights(base, envelope_power);
  for (int i = 0; i < q; ++i) {
    ax.nodes[i] = p.beta + base.nodes[i] / p.alpha;
    ax.weights[i] /= p.alpha;
  }
  ax.basis.assign(static_cast<std::size_t>(max_degree) + 1, std::vector<double>(q));
  for (int i = 0; i < q; ++i) {
    const std::vector<double> col = bare_basis ? basis_values_bare(max_degree, p, ax.nodes[i])
                                               : basis_values(max_degree, p, ax.nodes[i]);
    for (int k = 0; k <= max_degree; ++k)
      ax.basis[k][i] = col[k];
  }
  return ax;
}

template <class Body>
inline void for_each_grid_point(const std::vector<AxisQuadData>& axes, const Body& body) {
  const int d = static_cast<int>(axes.size());
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  for (;;) {
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      x[j] = axes[j].nodes[idx[j]];
      w *= axes[j].weights[idx[j]];
    }
    body(x, idx, w);
    int j = d - 1;
    for (; j >= 0; --j) {
      if (++idx[j] < static_cast<int>(axes[j].nodes.size()))
        break;
      idx[j] = 0;
    }
    if (j < 0)
      break;
  }
}

} // namespace detail

/// Orthogonal projection coefficients of f onto the span of the index set,
/// computed with a tensor Gauss-Hermite rule of the given order per dimension.
inline CoeffVector project(const ScalarField& f, std::shared_ptr<const IndexSet> set,
                           const BasisParamsND& p, int quad_order) {
  const IndexSet& s = *set;
  if (p.dim() != s.dim())
    throw std::invalid_argument("project: parameter dimension mismatch");
  const int maxdeg = s.max_degree();
  if (quad_order < maxdeg + 1)
    throw std::invalid_argument("project: quad_order must be at least max degree + 1");
  const int d = s.dim();
  const QuadratureRule1D base = gauss_hermite_rule(quad_order);
  std::vector<detail::AxisQuadData> axes;
  axes.reserve(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    axes.push_back(detail::make_axis_data(base, p.axes[j], s.max_degree(j), 0.5, true));

  std::vector<double> vals(s.cardinality(), 0.0);
  const auto& members = s.members();
  detail::for_each_grid_point(axes, [&](const std::vector<double>& x, const std::vector<int>& idx,
                                        double w) {
    const double fw = f(x) * w;
    if (fw == 0.0)
      return;
    for (std::size_t m = 0; m < members.size(); ++m) {
      double prod = fw;
      const MultiIndex& n = members[m];
      for (int j = 0; j < d; ++j)
        prod *= axes[j].basis[n[j]][idx[j]];
      vals[m] += prod;
    }
  });
  return CoeffVector(std::move(set), std::move(vals));
}

/// Pointwise evaluation of the expansion; per-dimension basis values are
/// computed once per call.
inline double evaluate(const CoeffVector& c, const BasisParamsND& p, const std::vector<double>& x) {
  const IndexSet& s = c.set();
  if (p.dim() != s.dim() || static_cast<int>(x.size()) != s.dim())
    throw std::invalid_argument("evaluate: dimension mismatch");
  const int d = s.dim();
  std::vector<std::vector<double>> table(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    table[j] = basis_values(s.max_degree(j), p.axes[j], x[j]);
  double sum = 0.0;
  const auto& members = s.members();
  for (std::size_t m = 0; m < members.size(); ++m) {
    double prod = c[m];
    for (int j = 0; j < d; ++j)
      prod *= table[j][members[m][j]];
    sum += prod;
  }
  return sum;
}

/// Parseval: sqrt of the coefficient sum of squares.
inline double l2_norm(const CoeffVector& c) {
  double s = 0.0;
  for (double v : c.values())
    s += v * v;
  return std::sqrt(s);
}

/// ( sum_j sum_n mu_{n_j,m}(alpha_j) |u_n|^2 )^(1/2), entirely in coefficient space.
inline double sobolev_seminorm(const CoeffVector& c, const BasisParamsND& p, int m) {
  const IndexSet& s = c.set();
  if (p.dim() != s.dim())
    throw std::invalid_argument("sobolev_seminorm: dimension mismatch");
  if (m < 0)
    throw std::invalid_argument("sobolev_seminorm: m must be >= 0");
  const int d = s.dim();
  std::vector<std::vector<double>> mu(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const int maxdeg = s.max_degree(j);
    mu[j].resize(static_cast<std::size_t>(maxdeg) + 1);
    for (int k = 0; k <= maxdeg; ++k)
      mu[j][k] = mu_factor(k, m, p.axes[j].alpha);
  }
  double total = 0.0;
  const auto& members = s.members();
  for (std::size_t i = 0; i < members.size(); ++i) {
    const double v2 = c[i] * c[i];
    for (int j = 0; j < d; ++j)
      total += mu[j][members[i][j]] * v2;
  }
  return std::sqrt(total);
}

/// ( sum_{|k|_inf = r, 0 <= k <= r} sum_n prod_j mu_{n_j,k_j} |u_n|^2 )^(1/2).
inline double korobov_seminorm(const CoeffVector& c, const BasisParamsND& p, int r) {
  const IndexSet& s = c.set();
  if (p.dim() != s.dim())
    throw std::invalid_argument("korobov_seminorm: dimension mismatch");
  if (r < 0)
    throw std::invalid_argument("korobov_seminorm: r must be >= 0");
  const int d = s.dim();
  if (r == 0)
    return l2_norm(c);
  // mu table per axis: mu[j][k][deg]
  std::vector<std::vector<std::vector<double>>> mu(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const int maxdeg = s.max_degree(j);
    mu[j].resize(static_cast<std::size_t>(r) + 1);
    for (int k = 0; k <= r; ++k) {
      mu[j][k].resize(static_cast<std::size_t>(maxdeg) + 1);
      for (int deg = 0; deg <= maxdeg; ++deg)
        mu[j][k][deg] = mu_factor(deg, k, p.axes[j].alpha);
    }
  }
  const auto& members = s.members();
  double total = 0.0;
  MultiIndex k(static_cast<std::size_t>(d), 0);
  std::function<void(int, bool)> rec = [&](int axis, bool has_r) {
    if (axis == d) {
      if (!has_r)
        return;
      for (std::size_t i = 0; i < members.size(); ++i) {
        double prod = c[i] * c[i];
        for (int j = 0; j < d; ++j)
          prod *= mu[j][k[j]][members[i][j]];
        total += prod;
      }
      return;
    }
    for (int v = 0; v <= r; ++v) {
      k[axis] = v;
      rec(axis + 1, has_r || v == r);
    }
    k[axis] = 0;
  };
  rec(0, false);
  return std::sqrt(total);
}

/// sqrt of the tensor-quadrature integral of |u - f_exact|^2.
inline double l2_error_vs_function(const CoeffVector& c, const BasisParamsND& p,
                                   const ScalarField& f_exact, int quad_order) {
  const IndexSet& s = c.set();
  if (p.dim() != s.dim())
    throw std::invalid_argument("l2_error_vs_function: dimension mismatch");
  const int maxdeg = s.max_degree();
  if (quad_order < 2 * maxdeg)
    throw std::invalid_argument("l2_error_vs_function: quad_order must be at least twice the max degree");
  const int d = s.dim();
  const QuadratureRule1D base = gauss_hermite_rule(quad_order);
  std::vector<detail::AxisQuadData> axes;
  axes.reserve(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    axes.push_back(detail::make_axis_data(base, p.axes[j], s.max_degree(j), 1.0, false));

  const auto& members = s.members();
  double total = 0.0;
  detail::for_each_grid_point(axes, [&](const std::vector<double>& x, const std::vector<int>& idx,
                                        double w) {
    double u = 0.0;
    for (std::size_t m = 0; m < members.size(); ++m) {
      double prod = c[m];
      const MultiIndex& n = members[m];
      for (int j = 0; j < d; ++j)
        prod *= axes[j].basis[n[j]][idx[j]];
      u += prod;
    }
    const double diff = u - f_exact(x);
    total += w * diff * diff;
  });
  return std::sqrt(std::max(0.0, total));
}

/// Text format: the index set block, a blank line, then one coefficient per line.
inline void write_coeffs(const CoeffVector& c, std::ostream& os) {
  c.set().write(os);
  os << "\n";
  for (double v : c.values())
    os << format_g17(v) << "\n";
}

inline CoeffVector read_coeffs(std::istream& is) {
  auto set = std::make_shared<IndexSet>(IndexSet::read(is)); // stops at the blank line
  std::vector<double> vals;
  vals.reserve(set->cardinality());
  std::string line;
  while (vals.size() < set->cardinality() && std::getline(is, line)) {
    if (line.empty())
      continue;
    vals.push_back(std::stod(line));
  }
  if (vals.size() != set->cardinality())
    throw std::runtime_error("read_coeffs: truncated coefficient block");
  return CoeffVector(std::move(set), std::move(vals));
}

} // namespace hsg
