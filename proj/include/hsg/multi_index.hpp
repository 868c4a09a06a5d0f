#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hsg/common.hpp"

namespace hsg {

/// A d-tuple of nonnegative integers.
using MultiIndex = std::vector<int>;

inline int norm_l1(const MultiIndex& n) {
  int s = 0;
  for (int v : n)
    s += v;
  return s;
}

inline int norm_linf(const MultiIndex& n) {
  int m = 0;
  for (int v : n)
    m = std::max(m, v);
  return m;
}

/// |n|_mix = prod_j max(1, n_j); always >= 1.
inline long long norm_mix(const MultiIndex& n) {
  long long p = 1;
  for (int v : n)
    p *= std::max(1, v);
  return p;
}

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& n) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int v : n)
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

enum class SetKind { full, rhc, ohc, dim_adaptive, smolyak_union, explicit_set };

inline const char* to_string(SetKind k) {
  switch (k) {
  case SetKind::full: return "full";
  case SetKind::rhc: return "rhc";
  case SetKind::ohc: return "ohc";
  case SetKind::dim_adaptive: return "dim_adaptive";
  case SetKind::smolyak_union: return "smolyak_union";
  case SetKind::explicit_set: return "explicit";
  }
  return "?";
}

inline SetKind set_kind_from_string(const std::string& s) {
  if (s == "full") return SetKind::full;
  if (s == "rhc") return SetKind::rhc;
  if (s == "ohc") return SetKind::ohc;
  if (s == "dim_adaptive") return SetKind::dim_adaptive;
  if (s == "smolyak_union") return SetKind::smolyak_union;
  if (s == "explicit") return SetKind::explicit_set;
  throw std::invalid_argument("unknown index set kind: " + s);
}

/// Defining parameters, fields used depend on the kind.
struct IndexSetParams {
  int n = 0;          // N (full, rhc, ohc)
  double gamma = 0.0; // ohc, dim_adaptive
  int n1 = 0;         // dim_adaptive
  int d1 = 0;         // dim_adaptive
  int n2 = 0;         // dim_adaptive
  int level = 0;      // smolyak_union
};

/// gamma sentinel selecting the full grid.
inline constexpr double kGammaFullGrid = -std::numeric_limits<double>::infinity();

inline constexpr std::size_t kDefaultMemberCap = 100000000; // 1e8

// ---- membership predicates ------------------------------------------------

inline bool full_member(const MultiIndex& n, int N) { return norm_linf(n) <= N; }

inline bool rhc_member(const MultiIndex& n, int N) { return norm_mix(n) <= N; }

/// |n|_mix |n|_inf^(-gamma) <= N^(1-gamma), compared in log form with a small
/// inclusive slack so exact boundary members are kept. The zero index is
/// always a member.
inline bool ohc_member(const MultiIndex& n, int N, double gamma) {
  if (std::isinf(gamma) && gamma < 0.0)
    return full_member(n, N);
  const int inf = norm_linf(n);
  if (inf == 0)
    return true;
  const double lhs = std::log(static_cast<double>(norm_mix(n))) -
                     gamma * std::log(static_cast<double>(inf));
  const double rhs = (1.0 - gamma) * std::log(static_cast<double>(N));
  return lhs <= rhs + 1e-9;
}

/// Full box on the first d1 coordinates, OHC on the rest.
inline bool dim_adaptive_member(const MultiIndex& n, int N1, int d1, int N2, double gamma) {
  for (int i = 0; i < d1; ++i)
    if (n[i] > N1)
      return false;
  if (d1 == static_cast<int>(n.size()))
    return true;
  MultiIndex tail(n.begin() + d1, n.end());
  return ohc_member(tail, N2, gamma);
}

namespace detail {

// Enumerates a downward-closed set by recursive descent: coordinate j grows
// until the minimal completion (remaining coordinates zero) leaves the set.
// Visits only members plus one probe per exhausted axis.
template <class Pred>
inline void enumerate_downward_closed(int d, const Pred& member, std::size_t cap,
                                      std::vector<MultiIndex>& out) {
  MultiIndex cur(static_cast<std::size_t>(d), 0);
  std::function<void(int)> rec = [&](int axis) {
    if (axis == d) {
      out.push_back(cur);
      if (out.size() > cap)
        throw std::length_error("index set exceeds the configured member cap");
      return;
    }
    for (int v = 0;; ++v) {
      cur[axis] = v;
      if (!member(cur))
        break;
      rec(axis + 1);
    }
    cur[axis] = 0;
  };
  rec(0);
}

} // namespace detail

/// Immutable finite collection of multi-indices in lexicographic order.
class IndexSet {
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  IndexSet() = default;

  static IndexSet from_members(int dim, SetKind kind, IndexSetParams params,
                               std::vector<MultiIndex> members) {
    IndexSet s;
    s.dim_ = dim;
    s.kind_ = kind;
    s.params_ = params;
    std::sort(members.begin(), members.end());
    s.members_ = std::move(members);
    s.lookup_.reserve(s.members_.size());
    for (std::size_t i = 0; i < s.members_.size(); ++i) {
      if (static_cast<int>(s.members_[i].size()) != dim)
        throw std::invalid_argument("IndexSet: member dimension mismatch");
      if (!s.lookup_.emplace(s.members_[i], i).second)
        throw std::invalid_argument("IndexSet: duplicate member");
    }
    return s;
  }

  int dim() const { return dim_; }
  SetKind kind() const { return kind_; }
  const IndexSetParams& params() const { return params_; }
  std::size_t cardinality() const { return members_.size(); }
  const std::vector<MultiIndex>& members() const { return members_; }

  bool contains(const MultiIndex& n) const { return lookup_.count(n) != 0; }

  std::size_t index_of(const MultiIndex& n) const {
    auto it = lookup_.find(n);
    return it == lookup_.end() ? npos : it->second;
  }

  /// Largest degree appearing in the given axis.
  int max_degree(int axis) const {
    int m = 0;
    for (const auto& n : members_)
      m = std::max(m, n[axis]);
    return m;
  }

  /// Largest degree over all axes and members.
  int max_degree() const {
    int m = 0;
    for (const auto& n : members_)
      m = std::max(m, norm_linf(n));
    return m;
  }

  bool is_downward_closed() const {
    MultiIndex probe;
    for (const auto& n : members_) {
      for (int j = 0; j < dim_; ++j) {
        if (n[j] == 0)
          continue;
        probe = n;
        probe[j] -= 1;
        if (!contains(probe))
          return false;
      }
    }
    return true;
  }

  /// Line-oriented text format: header, then one index per line.
  void write(std::ostream& os) const {
    os << "dim=" << dim_ << " kind=" << to_string(kind_) << " params=" << params_text() << "\n";
    for (const auto& n : members_) {
      for (int j = 0; j < dim_; ++j)
        os << (j ? " " : "") << n[j];
      os << "\n";
    }
  }

  static IndexSet read(std::istream& is) {
    std::string header;
    if (!std::getline(is, header))
      throw std::runtime_error("IndexSet::read: missing header");
    std::istringstream hs(header);
    std::string tok;
    int dim = -1;
    SetKind kind = SetKind::explicit_set;
    std::string params_text;
    while (hs >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("IndexSet::read: malformed header token: " + tok);
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "dim")
        dim = std::stoi(val);
      else if (key == "kind")
        kind = set_kind_from_string(val);
      else if (key == "params")
        params_text = val;
    }
    if (dim <= 0)
      throw std::runtime_error("IndexSet::read: bad dimension");
    IndexSetParams params = parse_params(kind, params_text);
    std::vector<MultiIndex> members;
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty())
        break;
      std::istringstream ls(line);
      MultiIndex n;
      int v;
      while (ls >> v)
        n.push_back(v);
      if (static_cast<int>(n.size()) != dim)
        throw std::runtime_error("IndexSet::read: wrong entry count in line: " + line);
      members.push_back(std::move(n));
    }
    return from_members(dim, kind, params, std::move(members));
  }

private:
  std::string params_text() const {
    std::ostringstream os;
    switch (kind_) {
    case SetKind::full:
    case SetKind::rhc:
      os << "N=" << params_.n;
      break;
    case SetKind::ohc:
      os << "N=" << params_.n << ";gamma=" << format_gamma(params_.gamma);
      break;
    case SetKind::dim_adaptive:
      os << "N1=" << params_.n1 << ";d1=" << params_.d1 << ";N2=" << params_.n2
         << ";gamma=" << format_gamma(params_.gamma);
      break;
    case SetKind::smolyak_union:
      os << "L=" << params_.level;
      break;
    case SetKind::explicit_set:
      os << "-";
      break;
    }
    return os.str();
  }

  static std::string format_gamma(double g) {
    if (std::isinf(g) && g < 0.0)
      return "-inf";
    return format_g17(g);
  }

  static double parse_gamma(const std::string& s) {
    if (s == "-inf")
      return kGammaFullGrid;
    return std::stod(s);
  }

  static IndexSetParams parse_params(SetKind kind, const std::string& text) {
    IndexSetParams p;
    if (text == "-" || text.empty())
      return p;
    std::istringstream ts(text);
    std::string item;
    while (std::getline(ts, item, ';')) {
      auto eq = item.find('=');
      if (eq == std::string::npos)
        continue;
      const std::string key = item.substr(0, eq);
      const std::string val = item.substr(eq + 1);
      if (key == "N")
        p.n = std::stoi(val);
      else if (key == "gamma")
        p.gamma = parse_gamma(val);
      else if (key == "N1")
        p.n1 = std::stoi(val);
      else if (key == "d1")
        p.d1 = std::stoi(val);
      else if (key == "N2")
        p.n2 = std::stoi(val);
      else if (key == "L")
        p.level = std::stoi(val);
    }
    (void)kind;
    return p;
  }

  int dim_ = 0;
  SetKind kind_ = SetKind::explicit_set;
  IndexSetParams params_{};
  std::vector<MultiIndex> members_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> lookup_;
};

// ---- builders --------------------------------------------------------------

/// Full tensor grid { n : |n|_inf <= N }; cardinality (N+1)^d.
inline IndexSet build_full(int N, int d, std::size_t cap = kDefaultMemberCap) {
  if (d < 1)
    throw std::invalid_argument("build_full: d must be >= 1");
  if (N < 0)
    throw std::invalid_argument("build_full: N must be >= 0");
  const long double size = std::pow(static_cast<long double>(N) + 1.0L, d);
  if (size > static_cast<long double>(cap))
    throw std::length_error("build_full: (N+1)^d exceeds the member cap");
  std::vector<MultiIndex> members;
  members.reserve(static_cast<std::size_t>(size));
  detail::enumerate_downward_closed(
      d, [N](const MultiIndex& n) { return full_member(n, N); }, cap, members);
  IndexSetParams params;
  params.n = N;
  return IndexSet::from_members(d, SetKind::full, params, std::move(members));
}

/// Regular hyperbolic cross { n : |n|_mix <= N }.
inline IndexSet build_rhc(int N, int d, std::size_t cap = kDefaultMemberCap) {
  if (d < 1)
    throw std::invalid_argument("build_rhc: d must be >= 1");
  if (N < 1)
    throw std::invalid_argument("build_rhc: N must be >= 1");
  std::vector<MultiIndex> members;
  detail::enumerate_downward_closed(
      d, [N](const MultiIndex& n) { return rhc_member(n, N); }, cap, members);
  IndexSetParams params;
  params.n = N;
  return IndexSet::from_members(d, SetKind::rhc, params, std::move(members));
}

/// Optimized hyperbolic cross { n : |n|_mix |n|_inf^(-gamma) <= N^(1-gamma) }.
/// gamma = -infinity selects the full grid; gamma >= 1 is rejected.
inline IndexSet build_ohc(int N, double gamma, int d, std::size_t cap = kDefaultMemberCap) {
  if (d < 1)
    throw std::invalid_argument("build_ohc: d must be >= 1");
  if (N < 1)
    throw std::invalid_argument("build_ohc: N must be >= 1");
  if (!(gamma < 1.0))
    throw std::invalid_argument("build_ohc: gamma must be < 1");
  std::vector<MultiIndex> members;
  detail::enumerate_downward_closed(
      d, [N, gamma](const MultiIndex& n) { return ohc_member(n, N, gamma); }, cap, members);
  IndexSetParams params;
  params.n = N;
  params.gamma = gamma;
  return IndexSet::from_members(d, SetKind::ohc, params, std::move(members));
}

/// Full box of width N1 on the first d1 coordinates, OHC(N2, gamma) on the rest.
inline IndexSet build_dim_adaptive(int N1, int d1, int N2, double gamma, int d,
                                   std::size_t cap = kDefaultMemberCap) {
  if (d < 1 || d1 < 0 || d1 > d)
    throw std::invalid_argument("build_dim_adaptive: need 0 <= d1 <= d");
  if (N1 < 0 || N2 < 1)
    throw std::invalid_argument("build_dim_adaptive: need N1 >= 0 and N2 >= 1");
  if (!(gamma < 1.0))
    throw std::invalid_argument("build_dim_adaptive: gamma must be < 1");
  std::vector<MultiIndex> members;
  detail::enumerate_downward_closed(
      d,
      [=](const MultiIndex& n) { return dim_adaptive_member(n, N1, d1, N2, gamma); },
      cap, members);
  IndexSetParams params;
  params.n1 = N1;
  params.d1 = d1;
  params.n2 = N2;
  params.gamma = gamma;
  return IndexSet::from_members(d, SetKind::dim_adaptive, params, std::move(members));
}

// ---- Smolyak combination ---------------------------------------------------

inline long long binomial(int n, int k) {
  if (k < 0 || k > n)
    return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

/// One term of the combination formula: a level vector i >= 1 and its
/// signed coefficient (-1)^(L-|i|_1) binom(d-1, L-|i|_1).
struct SmolyakTerm {
  MultiIndex levels;
  long long coefficient = 0;
};

/// All level vectors with L-d+1 <= |i|_1 <= L. Empty when L < d.
inline std::vector<SmolyakTerm> build_smolyak(int L, int d) {
  if (d < 1)
    throw std::invalid_argument("build_smolyak: d must be >= 1");
  std::vector<SmolyakTerm> terms;
  if (L < d)
    return terms;
  MultiIndex cur(static_cast<std::size_t>(d), 1);
  std::function<void(int, int)> rec = [&](int axis, int sum) {
    if (axis == d) {
      if (sum >= L - d + 1) {
        SmolyakTerm t;
        t.levels = cur;
        const int r = L - sum;
        t.coefficient = ((r % 2 == 0) ? 1 : -1) * binomial(d - 1, r);
        if (t.coefficient != 0)
          terms.push_back(std::move(t));
      }
      return;
    }
    // remaining axes contribute at least 1 each
    for (int v = 1; sum + v + (d - axis - 1) <= L; ++v) {
      cur[axis] = v;
      rec(axis + 1, sum + v);
    }
    cur[axis] = 1;
  };
  rec(0, 0);
  return terms;
}

/// Number of degrees contributed by 1D level i. The default rule adds one
/// degree per level: level i covers degrees 0..i-1.
using LevelToOrder = std::function<int(int)>;

inline int default_level_to_order(int level) { return level; }

/// Union over terms of the tensor boxes of per-dimension degree ranges.
inline IndexSet smolyak_union_index_set(int d, const std::vector<SmolyakTerm>& terms,
                                        const LevelToOrder& level_to_order = default_level_to_order) {
  std::unordered_set<MultiIndex, MultiIndexHash> seen;
  MultiIndex cur(static_cast<std::size_t>(d), 0);
  int max_level = 0;
  for (const auto& term : terms) {
    max_level = std::max(max_level, norm_l1(term.levels));
    std::vector<int> counts(static_cast<std::size_t>(d));
    bool empty = false;
    for (int j = 0; j < d; ++j) {
      counts[j] = level_to_order(term.levels[j]);
      if (counts[j] <= 0)
        empty = true;
    }
    if (empty)
      continue;
    std::function<void(int)> rec = [&](int axis) {
      if (axis == d) {
        seen.insert(cur);
        return;
      }
      for (int v = 0; v < counts[axis]; ++v) {
        cur[axis] = v;
        rec(axis + 1);
      }
      cur[axis] = 0;
    };
    rec(0);
  }
  std::vector<MultiIndex> members(seen.begin(), seen.end());
  IndexSetParams params;
  params.level = max_level;
  return IndexSet::from_members(d, SetKind::smolyak_union, params, std::move(members));
}

/// Wrap an explicit member list (used by tests and deserialization helpers).
inline IndexSet make_explicit_set(int d, std::vector<MultiIndex> members) {
  return IndexSet::from_members(d, SetKind::explicit_set, IndexSetParams{}, std::move(members));
}

} // namespace hsg
