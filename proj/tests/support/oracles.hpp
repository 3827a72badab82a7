#pragma once
// Brute-force reference implementations used by the tests. Nothing here calls
// into the library: groups are rebuilt from their defining formulas and every
// search is plain enumeration.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace oracle {

using Q = boost::rational<std::int64_t>;
using Set = std::set<int>;

struct Group {
  int order = 0;
  std::function<int(int, int)> mul;
  int identity = 0;

  int inv(int a) const {
    for (int b = 0; b < order; ++b)
      if (mul(a, b) == identity) return b;
    return -1;
  }
};

inline Group cyclic(int n) { return {n, [n](int a, int b) { return (a + b) % n; }, 0}; }

/// D_n acting on Z_n: index j is x ↦ x + j, index n + j is x ↦ −(x + j).
/// Products are composition of these maps, located by their permutation.
inline Group dihedral(int n) {
  auto perm = [n](int e) {
    std::vector<int> p(n);
    for (int x = 0; x < n; ++x) p[x] = e < n ? (x + e) % n : (n - (x + e - n) % n) % n;
    return p;
  };
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<int>> perms;
  for (int e = 0; e < 2 * n; ++e) {
    perms.push_back(perm(e));
    index[perms.back()] = e;
  }
  return {2 * n,
          [perms, index, n](int a, int b) {
            std::vector<int> c(n);
            for (int x = 0; x < n; ++x) c[x] = perms[a][perms[b][x]];
            return index.at(c);
          },
          0};
}

/// Unitriangular 3×3 matrices over Z/p; index a p² + b p + c for
/// [[1, a, c], [0, 1, b], [0, 0, 1]].
inline Group heisenberg(int p) {
  return {p * p * p,
          [p](int x, int y) {
            int m1[3][3] = {{1, x / (p * p), x % p}, {0, 1, (x / p) % p}, {0, 0, 1}};
            int m2[3][3] = {{1, y / (p * p), y % p}, {0, 1, (y / p) % p}, {0, 0, 1}};
            int r[3][3] = {};
            for (int i = 0; i < 3; ++i)
              for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) r[i][j] = (r[i][j] + m1[i][k] * m2[k][j]) % p;
            return r[0][1] * p * p + r[1][2] * p + r[0][2];
          },
          0};
}

/// Word length of every element by breadth-first search.
inline std::vector<int> word_lengths(const Group& g, const std::vector<int>& gens) {
  std::vector<int> d(g.order, -1);
  std::queue<int> q;
  d[g.identity] = 0;
  q.push(g.identity);
  while (!q.empty()) {
    const int x = q.front();
    q.pop();
    for (int s : gens) {
      const int y = g.mul(x, s);
      if (d[y] < 0) {
        d[y] = d[x] + 1;
        q.push(y);
      }
    }
  }
  return d;
}

struct Metric {
  Group g;
  std::vector<int> len;
  int dist(int x, int y) const { return len[g.mul(g.inv(x), y)]; }
};

inline Metric cyclic_metric(int n) { return {cyclic(n), word_lengths(cyclic(n), {1, n - 1})}; }
inline Metric dihedral_metric(int n) {
  auto g = dihedral(n);
  return {g, word_lengths(g, {n, 1, n - 1})};
}
inline Metric heisenberg_metric(int p) {
  auto g = heisenberg(p);
  return {g, word_lengths(g, {p * p, (p - 1) * p * p, p, (p - 1) * p})};
}

inline Set ball(const Metric& m, Q r) {
  Set out;
  for (int x = 0; x < m.g.order; ++x)
    if (Q(m.len[x]) <= r) out.insert(x);
  return out;
}

inline Set product(const Group& g, const Set& x, const Set& y) {
  Set out;
  for (int a : x)
    for (int b : y) out.insert(g.mul(a, b));
  return out;
}

inline Set power(const Group& g, const Set& x, int n) {
  Set out{g.identity};
  for (int k = 0; k < n; ++k) out = product(g, out, x);
  return out;
}

inline Set inverse(const Group& g, const Set& x) {
  Set out;
  for (int a : x) out.insert(g.inv(a));
  return out;
}

inline bool subset(const Set& a, const Set& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

inline std::vector<int> elems(const Set& s) { return {s.begin(), s.end()}; }

/// Largest subset of `pool` in which every pair is compatible; plain
/// include/exclude recursion with a size bound.
inline std::size_t max_compatible(const std::vector<int>& pool, const std::function<bool(int, int)>& ok) {
  std::size_t best = 0;
  std::vector<int> cur;
  std::function<void(std::size_t)> go = [&](std::size_t k) {
    if (cur.size() + (pool.size() - k) <= best) return;
    if (k == pool.size()) {
      best = cur.size();
      return;
    }
    const int x = pool[k];
    if (std::all_of(cur.begin(), cur.end(), [&](int y) { return ok(x, y); })) {
      cur.push_back(x);
      go(k + 1);
      cur.pop_back();
    }
    go(k + 1);
  };
  go(0);
  return best;
}

/// N_r(Y): points pairwise more than r apart.
inline std::size_t packing(const Metric& m, const Set& y, Q r) {
  return max_compatible(elems(y), [&](int a, int b) { return Q(m.dist(a, b)) > r; });
}

/// Largest subset of X with no quotient x⁻¹x' (either order) in Y.
inline std::size_t thickness(const Group& g, const Set& y, const Set& x) {
  return max_compatible(elems(x), [&](int a, int b) {
    return !y.count(g.mul(g.inv(a), b)) && !y.count(g.mul(g.inv(b), a));
  });
}

/// Least number of left translates gY covering X (g ranging over the group).
inline std::size_t min_cover(const Group& g, const Set& y, const Set& x) {
  if (x.empty()) return 0;
  for (std::size_t k = 1;; ++k) {
    std::function<bool(std::size_t, Set)> go = [&](std::size_t left, Set rest) {
      if (rest.empty()) return true;
      if (left == 0) return false;
      const int first = *rest.begin();
      // Some translate must contain the least uncovered point.
      for (int h = 0; h < g.order; ++h) {
        Set t = product(g, Set{h}, y);
        if (!t.count(first)) continue;
        Set next;
        for (int e : rest)
          if (!t.count(e)) next.insert(e);
        if (go(left - 1, next)) return true;
      }
      return false;
    };
    if (go(k, x)) return k;
  }
}

/// Least α with q^α ≤ ratio, by repeated exact multiplication.
inline std::int64_t least_power(Q q_in, Q ratio_in) {
  using Big = boost::multiprecision::cpp_rational;
  const Big q(q_in.numerator(), q_in.denominator());
  const Big ratio(ratio_in.numerator(), ratio_in.denominator());
  std::int64_t alpha = 0;
  Big v(1);
  while (v > ratio) {
    v *= q;
    ++alpha;
  }
  return alpha;
}

}  // namespace oracle
