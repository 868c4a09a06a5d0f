#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsg/common.hpp"
#include "hsg/hermite.hpp"
#include "hsg/multi_index.hpp"

namespace hsg {

/// Gauss-Hermite rule for the weight exp(-x^2): ascending nodes, positive weights.
struct QuadratureRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with shifts.
// diag has n entries, sub has n-1. Classic tql1-style sweep.
inline std::vector<double> tridiag_eigenvalues(std::vector<double> diag, std::vector<double> sub) {
  const int n = static_cast<int>(diag.size());
  sub.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    for (;;) {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(sub[m]) <= std::numeric_limits<double>::epsilon() * dd)
          break;
      }
      if (m == l)
        break;
      if (iter++ == 80)
        throw std::runtime_error("tridiag_eigenvalues: QL iteration did not converge");
      double g = (diag[l + 1] - diag[l]) / (2.0 * sub[l]);
      double r = std::hypot(g, 1.0);
      g = diag[m] - diag[l] + sub[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
      double s = 1.0, c = 1.0, p = 0.0;
      for (int i = m - 1; i >= l; --i) {
        double f = s * sub[i];
        const double b = c * sub[i];
        r = std::hypot(f, g);
        sub[i + 1] = r;
        if (r == 0.0) {
          diag[i + 1] -= p;
          sub[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[i + 1] - p;
        r = (diag[i] - g) * s + 2.0 * c * b;
        p = s * r;
        diag[i + 1] = g + p;
        g = c * r - b;
      }
      if (r == 0.0 && m - 1 >= l)
        continue;
      diag[l] -= p;
      sub[l] = g;
      sub[m] = 0.0;
    }
  }
  return diag;
}

// Orthonormal Hermite function values q_k(x) = H_k(x) exp(-x^2/2) / sqrt(2^k k! sqrt(pi)).
// Bounded for all x, so usable at any order without overflow.
inline void hermite_function_series(int nmax, double x, std::vector<double>& q) {
  scaled_hermite_series(nmax, x, kPiQuarterInv * std::exp(-0.5 * x * x), q);
}

} // namespace detail

/// Nodes are the roots of H_order, computed from the symmetric tridiagonal
/// (Golub-Welsch) eigenproblem with one Newton polish per node; weights from
/// the Christoffel formula evaluated through the bounded Hermite functions.
inline QuadratureRule1D gauss_hermite_rule(int order) {
  if (order < 1 || order > 500)
    throw std::invalid_argument("gauss_hermite_rule: order must be in [1, 500]");
  QuadratureRule1D rule;
  if (order == 1) {
    rule.nodes = {0.0};
    rule.weights = {kSqrtPi};
    return rule;
  }
  std::vector<double> diag(static_cast<std::size_t>(order), 0.0);
  std::vector<double> sub(static_cast<std::size_t>(order) - 1);
  for (int k = 1; k < order; ++k)
    sub[k - 1] = std::sqrt(0.5 * k);
  std::vector<double> nodes = detail::tridiag_eigenvalues(std::move(diag), std::move(sub));
  std::sort(nodes.begin(), nodes.end());
  // symmetrize the +/- pairs, pin the middle node of odd rules to zero
  for (int i = 0; i < order / 2; ++i) {
    const double s = 0.5 * (nodes[order - 1 - i] - nodes[i]);
    nodes[i] = -s;
    nodes[order - 1 - i] = s;
  }
  if (order % 2 == 1)
    nodes[order / 2] = 0.0;

  rule.nodes.resize(nodes.size());
  rule.weights.resize(nodes.size());
  std::vector<double> q;
  for (int i = 0; i < order; ++i) {
    double x = nodes[i];
    detail::hermite_function_series(order, x, q);
    // Newton on q_order (same zeros as H_order); q' = sqrt(2n) q_{n-1} - x q_n
    const double deriv = std::sqrt(2.0 * order) * q[order - 1] - x * q[order];
    if (deriv != 0.0)
      x -= q[order] / deriv;
    detail::hermite_function_series(order - 1, x, q);
    rule.nodes[i] = x;
    // w = 1 / (n p_{n-1}^2) = exp(-x^2) / (n q_{n-1}^2)
    rule.weights[i] = std::exp(-x * x) / (order * q[order - 1] * q[order - 1]);
  }
  // polished nodes keep the +/- symmetry exactly
  for (int i = 0; i < order / 2; ++i) {
    const double s = 0.5 * (rule.nodes[order - 1 - i] - rule.nodes[i]);
    rule.nodes[i] = -s;
    rule.nodes[order - 1 - i] = s;
    const double w = 0.5 * (rule.weights[i] + rule.weights[order - 1 - i]);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1)
    rule.nodes[order / 2] = 0.0;
  return rule;
}

/// Affine map to the weight exp(-alpha^2 (x-beta)^2): x_i = beta + t_i/alpha,
/// w_i = w_i/alpha.
inline QuadratureRule1D map_rule(const QuadratureRule1D& r, const BasisParams1D& p) {
  QuadratureRule1D out;
  out.nodes.reserve(r.nodes.size());
  out.weights.reserve(r.weights.size());
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    out.nodes.push_back(p.beta + r.nodes[i] / p.alpha);
    out.weights.push_back(r.weights[i] / p.alpha);
  }
  return out;
}

/// Weights of the base rule multiplied by exp(power * x_i^2), computed without
/// forming either overflow-prone factor. power = 1 gives 1/(n q_{n-1}^2),
/// which stays O(1) at every order.
inline std::vector<double> envelope_weights(const QuadratureRule1D& base, double power) {
  const int n = base.order();
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = base.weights[0]; // node at 0, exp factor is 1
    return out;
  }
  std::vector<double> q;
  for (int i = 0; i < n; ++i) {
    const double x = base.nodes[i];
    detail::hermite_function_series(n - 1, x, q);
    out[i] = std::exp((power - 1.0) * x * x) / (n * q[n - 1] * q[n - 1]);
  }
  return out;
}

// ---- point sets ------------------------------------------------------------

/// Deduplicated collection of d-dimensional quadrature abscissas.
struct PointSet {
  int dim = 0;
  std::vector<std::vector<double>> points;
  std::string origin_rule;
  std::size_t count() const { return points.size(); }
};

namespace detail {

inline void sort_dedup_points(std::vector<std::vector<double>>& pts, double tol) {
  std::sort(pts.begin(), pts.end());
  std::vector<std::vector<double>> out;
  out.reserve(pts.size());
  for (auto& p : pts) {
    if (!out.empty()) {
      bool same = true;
      for (std::size_t j = 0; j < p.size(); ++j)
        if (std::abs(p[j] - out.back()[j]) > tol) {
          same = false;
          break;
        }
      if (same)
        continue;
    }
    out.push_back(std::move(p));
  }
  pts = std::move(out);
}

// Cache of base rules; construction of a rule is pure so sharing is safe.
class RuleCache {
public:
  const QuadratureRule1D& get(int order) {
    auto it = rules_.find(order);
    if (it == rules_.end())
      it = rules_.emplace(order, gauss_hermite_rule(order)).first;
    return it->second;
  }

private:
  std::map<int, QuadratureRule1D> rules_;
};

template <class OrderOf>
inline void append_tensor_grid(std::vector<std::vector<double>>& pts, int d,
                               const OrderOf& order_of, const std::vector<BasisParams1D>& p,
                               RuleCache& cache) {
  std::vector<const QuadratureRule1D*> axes(static_cast<std::size_t>(d));
  std::vector<QuadratureRule1D> mapped(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    mapped[j] = map_rule(cache.get(order_of(j)), p[j]);
    axes[j] = &mapped[j];
  }
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      x[j] = axes[j]->nodes[idx[j]];
    pts.push_back(std::move(x));
    int j = d - 1;
    for (; j >= 0; --j) {
      if (++idx[j] < axes[j]->order())
        break;
      idx[j] = 0;
    }
    if (j < 0)
      break;
  }
}

} // namespace detail

inline constexpr double kPointDedupTol = 1e-12;

/// Tensor grid of one rule order used in every dimension.
inline PointSet full_grid_points(int order, int d, const std::vector<BasisParams1D>& p,
                                 std::size_t cap = kDefaultMemberCap) {
  if (static_cast<int>(p.size()) != d)
    throw std::invalid_argument("full_grid_points: parameter dimension mismatch");
  const long double total = std::pow(static_cast<long double>(order), d);
  if (total > static_cast<long double>(cap))
    throw std::length_error("full_grid_points: grid exceeds the point cap");
  PointSet ps;
  ps.dim = d;
  ps.origin_rule = "full order=" + std::to_string(order);
  detail::RuleCache cache;
  detail::append_tensor_grid(ps.points, d, [order](int) { return order; }, p, cache);
  detail::sort_dedup_points(ps.points, kPointDedupTol);
  return ps;
}

/// Union of the tensor grids of the Smolyak terms; 1D level i contributes a
/// rule with level_to_order(i) points.
inline PointSet sparse_point_union(int d, const std::vector<SmolyakTerm>& terms,
                                   const LevelToOrder& level_to_order,
                                   const std::vector<BasisParams1D>& p,
                                   std::size_t cap = kDefaultMemberCap) {
  if (static_cast<int>(p.size()) != d)
    throw std::invalid_argument("sparse_point_union: parameter dimension mismatch");
  PointSet ps;
  ps.dim = d;
  ps.origin_rule = "smolyak_terms";
  detail::RuleCache cache;
  for (const auto& term : terms) {
    bool empty = false;
    for (int j = 0; j < d; ++j)
      if (level_to_order(term.levels[j]) <= 0)
        empty = true;
    if (empty)
      continue;
    detail::append_tensor_grid(
        ps.points, d, [&](int j) { return level_to_order(term.levels[j]); }, p, cache);
    if (ps.points.size() > cap)
      throw std::length_error("sparse_point_union: point cap exceeded");
  }
  detail::sort_dedup_points(ps.points, kPointDedupTol);
  return ps;
}

/// Union over set members n of tensor grids with n_j + 1 points per dimension.
inline PointSet sparse_point_union(const IndexSet& s, const std::vector<BasisParams1D>& p,
                                   std::size_t cap = kDefaultMemberCap) {
  if (static_cast<int>(p.size()) != s.dim())
    throw std::invalid_argument("sparse_point_union: parameter dimension mismatch");
  PointSet ps;
  ps.dim = s.dim();
  ps.origin_rule = std::string("index_set kind=") + to_string(s.kind());
  detail::RuleCache cache;
  for (const auto& n : s.members()) {
    detail::append_tensor_grid(ps.points, s.dim(), [&](int j) { return n[j] + 1; }, p, cache);
    if (ps.points.size() > cap)
      throw std::length_error("sparse_point_union: point cap exceeded");
  }
  detail::sort_dedup_points(ps.points, kPointDedupTol);
  return ps;
}

/// CSV export, one point per row, 17 significant digits.
inline void write_points_csv(const PointSet& ps, std::ostream& os) {
  for (int j = 0; j < ps.dim; ++j)
    os << (j ? "," : "") << "x" << j + 1;
  os << "\n";
  for (const auto& pt : ps.points) {
    for (int j = 0; j < ps.dim; ++j)
      os << (j ? "," : "") << format_g17(pt[j]);
    os << "\n";
  }
}

} // namespace hsg
