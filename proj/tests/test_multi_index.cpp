#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hsg/multi_index.hpp"

using namespace hsg;

namespace {

// brute-force filter of the full box [0, box]^d by a predicate
template <class Pred>
std::vector<MultiIndex> brute_force(int box, int d, const Pred& pred) {
  std::vector<MultiIndex> out;
  MultiIndex cur(d, 0);
  std::function<void(int)> rec = [&](int axis) {
    if (axis == d) {
      if (pred(cur))
        out.push_back(cur);
      return;
    }
    for (int v = 0; v <= box; ++v) {
      cur[axis] = v;
      rec(axis + 1);
    }
    cur[axis] = 0;
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

bool is_subset(const IndexSet& a, const IndexSet& b) {
  for (const auto& n : a.members())
    if (!b.contains(n))
      return false;
  return true;
}

} // namespace

TEST_CASE("multi-index norms") {
  MultiIndex n{3, 0, 2};
  CHECK(norm_l1(n) == 5);
  CHECK(norm_linf(n) == 3);
  CHECK(norm_mix(n) == 6); // max(1,0) = 1
  CHECK(norm_mix(MultiIndex{0, 0}) == 1);
}

TEST_CASE("full grid") {
  IndexSet s = build_full(1, 2);
  REQUIRE(s.cardinality() == 4);
  CHECK(s.members()[0] == MultiIndex{0, 0});
  CHECK(s.contains(MultiIndex{1, 1}));

  CHECK(build_full(31, 3).cardinality() == 32768u); // 32^3
  IndexSet z = build_full(0, 5);
  REQUIRE(z.cardinality() == 1);
  CHECK(z.members()[0] == MultiIndex(5, 0));

  // explicit size guard, never silent truncation
  CHECK_THROWS_AS((void)build_full(100, 5), std::length_error);
}

TEST_CASE("regular hyperbolic cross counts") {
  const std::size_t expect[] = {176, 712, 2485, 7922};
  for (int d = 2; d <= 5; ++d)
    CHECK(build_rhc(31, d).cardinality() == expect[d - 2]);

  IndexSet s1 = build_rhc(3, 1);
  REQUIRE(s1.cardinality() == 4);
  CHECK(s1.members() == std::vector<MultiIndex>{{0}, {1}, {2}, {3}});
}

TEST_CASE("optimized hyperbolic cross") {
  const std::size_t expect[] = {136, 440, 1264, 3392};
  for (int d = 2; d <= 5; ++d)
    CHECK(build_ohc(31, 0.5, d).cardinality() == expect[d - 2]);

  // gamma = 0 coincides with the RHC
  IndexSet ohc0 = build_ohc(31, 0.0, 4);
  IndexSet rhc = build_rhc(31, 4);
  CHECK(ohc0.cardinality() == 2485u);
  CHECK(ohc0.members() == rhc.members());

  // gamma = -infinity selects the full grid
  CHECK(build_ohc(5, kGammaFullGrid, 3).members() == build_full(5, 3).members());

  CHECK_THROWS_AS((void)build_ohc(31, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS((void)build_ohc(31, 1.5, 2), std::invalid_argument);

  IndexSet s = build_ohc(31, 0.5, 2);
  CHECK(s.contains(MultiIndex{31, 0}));  // 31 * 31^{-1/2} = 31^{1/2}, boundary member
  CHECK(!s.contains(MultiIndex{2, 31})); // 62 * 31^{-1/2} > 31^{1/2}
}

TEST_CASE("dimension-adaptive set") {
  IndexSet all_full = build_dim_adaptive(3, 3, 5, 0.5, 3);
  CHECK(all_full.members() == build_full(3, 3).members());

  IndexSet all_ohc = build_dim_adaptive(3, 0, 7, 0.5, 3);
  CHECK(all_ohc.members() == build_ohc(7, 0.5, 3).members());

  IndexSet mixed = build_dim_adaptive(3, 1, 7, 0.5, 3);
  auto brute = brute_force(7, 3, [](const MultiIndex& n) {
    return dim_adaptive_member(n, 3, 1, 7, 0.5);
  });
  CHECK(mixed.members() == brute);

  CHECK_THROWS_AS((void)build_dim_adaptive(3, 4, 5, 0.5, 3), std::invalid_argument);
}

TEST_CASE("predicate-enumeration agreement") {
  CHECK(build_full(9, 3).members() ==
        brute_force(9, 3, [](const MultiIndex& n) { return full_member(n, 9); }));
  CHECK(build_rhc(12, 3).members() ==
        brute_force(12, 3, [](const MultiIndex& n) { return rhc_member(n, 12); }));
  CHECK(build_ohc(12, 0.3, 3).members() ==
        brute_force(12, 3, [](const MultiIndex& n) { return ohc_member(n, 12, 0.3); }));
  CHECK(build_ohc(12, -0.7, 3).members() ==
        brute_force(12, 3, [](const MultiIndex& n) { return ohc_member(n, 12, -0.7); }));
  CHECK(build_dim_adaptive(4, 1, 9, 0.25, 3).members() ==
        brute_force(9, 3, [](const MultiIndex& n) {
          return dim_adaptive_member(n, 4, 1, 9, 0.25);
        }));
}

TEST_CASE("membership agrees with predicate on random non-members") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> uv(0, 40);
  struct Probe {
    IndexSet set;
    std::function<bool(const MultiIndex&)> pred;
  };
  std::vector<Probe> probes;
  probes.push_back({build_full(9, 3), [](const MultiIndex& n) { return full_member(n, 9); }});
  probes.push_back({build_rhc(16, 3), [](const MultiIndex& n) { return rhc_member(n, 16); }});
  probes.push_back({build_ohc(16, 0.4, 3), [](const MultiIndex& n) { return ohc_member(n, 16, 0.4); }});
  probes.push_back({build_dim_adaptive(4, 1, 9, 0.25, 3),
                    [](const MultiIndex& n) { return dim_adaptive_member(n, 4, 1, 9, 0.25); }});
  for (const auto& probe : probes) {
    int checked = 0;
    while (checked < 1000) {
      MultiIndex n{uv(rng), uv(rng), uv(rng)};
      const bool pred = probe.pred(n);
      CHECK(probe.set.contains(n) == pred);
      if (!pred)
        ++checked;
    }
  }
}

TEST_CASE("downward closure") {
  CHECK(build_full(4, 3).is_downward_closed());
  CHECK(build_rhc(10, 3).is_downward_closed());
  CHECK(build_ohc(10, 0.5, 3).is_downward_closed());
  CHECK(build_ohc(10, -1.0, 3).is_downward_closed());
  CHECK(build_dim_adaptive(2, 1, 6, 0.5, 3).is_downward_closed());
  CHECK(smolyak_union_index_set(2, build_smolyak(6, 2)).is_downward_closed());
  CHECK(!make_explicit_set(2, {{0, 0}, {2, 0}}).is_downward_closed());
}

TEST_CASE("monotonicity and nesting") {
  for (int d : {2, 3, 4}) {
    // growing N
    CHECK(is_subset(build_ohc(8, 0.5, d), build_ohc(16, 0.5, d)));
    CHECK(is_subset(build_ohc(16, 0.5, d), build_ohc(31, 0.5, d)));
    // shrinking gamma enlarges the set
    CHECK(is_subset(build_ohc(16, 0.6, d), build_ohc(16, 0.3, d)));
    CHECK(is_subset(build_ohc(16, 0.3, d), build_ohc(16, 0.0, d)));
  }
  // OHC(gamma in (0,1)) within RHC = OHC(0) within the full grid
  IndexSet ohc = build_ohc(16, 0.5, 3);
  IndexSet rhc = build_rhc(16, 3);
  IndexSet full = build_full(16, 3);
  CHECK(is_subset(ohc, rhc));
  CHECK(build_ohc(16, 0.0, 3).members() == rhc.members());
  CHECK(is_subset(rhc, full));
}

TEST_CASE("rhc cardinality growth stays in a bounded band") {
  for (int d : {2, 3}) {
    double lo = 1e300, hi = 0.0;
    for (int N : {8, 16, 32, 64, 128}) {
      const double ratio =
          static_cast<double>(build_rhc(N, d).cardinality()) /
          (N * std::pow(std::log(static_cast<double>(N)), d - 1));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(hi / lo < 4.0);
  }
}

TEST_CASE("smolyak terms") {
  auto t1 = build_smolyak(4, 1);
  REQUIRE(t1.size() == 1);
  CHECK(t1[0].levels == MultiIndex{4});
  CHECK(t1[0].coefficient == 1);

  auto t2 = build_smolyak(3, 2);
  REQUIRE(t2.size() == 3);
  for (const auto& t : t2) {
    if (norm_l1(t.levels) == 3)
      CHECK(t.coefficient == 1);
    else {
      CHECK(t.levels == MultiIndex{1, 1});
      CHECK(t.coefficient == -1);
    }
  }

  CHECK(build_smolyak(2, 3).empty()); // L < d
}

TEST_CASE("smolyak telescoping identity") {
  // every lattice point of the union of boxes [1, i] is covered with total
  // coefficient exactly one
  for (int d = 1; d <= 4; ++d)
    for (int L = d; L <= d + 5; ++L) {
      auto terms = build_smolyak(L, d);
      MultiIndex q(d, 1);
      std::function<void(int, int)> rec = [&](int axis, int sum) {
        if (axis == d) {
          long long total = 0;
          for (const auto& t : terms) {
            bool inside = true;
            for (int j = 0; j < d; ++j)
              if (q[j] > t.levels[j]) {
                inside = false;
                break;
              }
            if (inside)
              total += t.coefficient;
          }
          CHECK(total == 1);
          return;
        }
        for (int v = 1; sum + v + (d - axis - 1) <= L; ++v) {
          q[axis] = v;
          rec(axis + 1, sum + v);
        }
        q[axis] = 1;
      };
      if (L >= d)
        rec(0, 0);
    }
}

TEST_CASE("smolyak union index set") {
  IndexSet s1 = smolyak_union_index_set(1, build_smolyak(3, 1));
  CHECK(s1.members() == std::vector<MultiIndex>{{0}, {1}, {2}});

  IndexSet s2 = smolyak_union_index_set(2, build_smolyak(2, 2));
  REQUIRE(s2.cardinality() == 1);
  CHECK(s2.members()[0] == MultiIndex{0, 0});

  // union oracle: n is covered iff some term box contains it
  auto terms = build_smolyak(4, 2);
  IndexSet s3 = smolyak_union_index_set(2, terms);
  auto brute = brute_force(4, 2, [&](const MultiIndex& n) {
    for (const auto& t : terms) {
      bool inside = true;
      for (int j = 0; j < 2; ++j)
        if (n[j] > t.levels[j] - 1)
          inside = false;
      if (inside)
        return true;
    }
    return false;
  });
  CHECK(s3.members() == brute);
  CHECK(s3.is_downward_closed());
}

TEST_CASE("iteration order and lookups") {
  IndexSet s = build_full(1, 2);
  REQUIRE(s.cardinality() == 4);
  CHECK(s.members()[0] == MultiIndex{0, 0});
  CHECK(s.members()[1] == MultiIndex{0, 1});
  CHECK(s.index_of(MultiIndex{1, 0}) == 2);
  CHECK(s.index_of(MultiIndex{2, 2}) == IndexSet::npos);
  CHECK(build_rhc(31, 3).cardinality() == 712u);
}

TEST_CASE("member cap raises an explicit error") {
  CHECK_THROWS_AS((void)build_rhc(1000, 4, 10000), std::length_error);
}

TEST_CASE("deserialization rejects malformed input") {
  {
    std::istringstream is("");
    CHECK_THROWS_AS((void)IndexSet::read(is), std::runtime_error);
  }
  {
    std::istringstream is("dim=2 kind=rhc params=N=31\n0 0 0\n");
    CHECK_THROWS_AS((void)IndexSet::read(is), std::runtime_error); // wrong entry count
  }
  {
    std::istringstream is("dim=2 kind=nosuch params=-\n0 0\n");
    CHECK_THROWS_AS((void)IndexSet::read(is), std::invalid_argument);
  }
  {
    std::istringstream is("dim=2 kind=explicit params=-\n0 0\n0 0\n");
    CHECK_THROWS_AS((void)IndexSet::read(is), std::invalid_argument); // duplicate member
  }
}

TEST_CASE("serialization round trip") {
  for (const IndexSet& s :
       {build_full(3, 2), build_rhc(6, 3), build_ohc(9, 0.1, 2), build_ohc(5, kGammaFullGrid, 2),
        build_dim_adaptive(2, 1, 5, 0.25, 3), smolyak_union_index_set(2, build_smolyak(5, 2)),
        make_explicit_set(2, {{0, 0}, {0, 1}, {4, 7}})}) {
    std::ostringstream os;
    s.write(os);
    std::istringstream is(os.str());
    IndexSet back = IndexSet::read(is);
    CHECK(back.dim() == s.dim());
    CHECK(back.kind() == s.kind());
    CHECK(back.members() == s.members());
    // bit-exact: a second write reproduces the bytes
    std::ostringstream os2;
    back.write(os2);
    CHECK(os2.str() == os.str());
  }
}
