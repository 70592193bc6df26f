#pragma once

// Brute-force reference computations for the test suites. Nothing here calls
// into the library beyond the graph accessors, so each routine is an
// independent check of what the library computes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sandlab/graph.hpp"
#include "sandlab/rng.hpp"

namespace oracle {

using sandlab::EdgeCount;
using sandlab::SinkedMultigraph;
using Config = std::vector<std::int64_t>;

struct Edge {
  int a, b;
};

// One entry per parallel edge, sink included as vertex n.
inline std::vector<Edge> edge_copies(const SinkedMultigraph& g) {
  std::vector<Edge> out;
  for (const auto& e : g.edge_list())
    for (int k = 0; k < e.count; ++k) out.push_back({e.x, e.y});
  return out;
}

struct UnionFind {
  std::vector<int> p;
  std::vector<std::pair<int, int>> undo;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) const {
    while (p[x] != x) x = p[x];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    undo.push_back({a, p[a]});
    p[a] = b;
    return true;
  }
  void rollback() {
    p[undo.back().first] = undo.back().second;
    undo.pop_back();
  }
};

// Depth-first enumeration of spanning trees (edge subsets of size |V|).
inline std::int64_t count_spanning_trees(const SinkedMultigraph& g) {
  const auto edges = edge_copies(g);
  const int total = g.size() + 1;
  const int need = total - 1;
  UnionFind uf(total);
  std::int64_t count = 0;
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int taken) {
    if (taken == need) {
      ++count;
      return;
    }
    if (int(edges.size() - i) < need - taken) return;
    if (uf.unite(edges[i].a, edges[i].b)) {
      rec(i + 1, taken + 1);
      uf.rollback();
    }
    rec(i + 1, taken);
  };
  rec(0, 0);
  return count;
}

// Connected sinked multigraph on n non-sink vertices. Every vertex gets at
// least one sink edge with probability sink_p, and vertex 0 always does.
inline SinkedMultigraph random_multigraph(sandlab::Rng& rng, int n, int max_mult = 2, double edge_p = 0.5,
                                          double sink_p = 0.4) {
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> mult(1, max_mult);
  for (;;) {
    std::vector<EdgeCount> e;
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y)
        if (u(rng) < edge_p) e.push_back({x, y, mult(rng)});
    for (int x = 0; x < n; ++x)
      if (x == 0 || u(rng) < sink_p) e.push_back({x, n, mult(rng)});
    // connectivity through the sink
    UnionFind uf(n + 1);
    for (const auto& ed : e) uf.unite(ed.x, ed.y);
    bool ok = true;
    for (int x = 0; x < n; ++x) ok = ok && uf.find(x) == uf.find(n);
    if (ok) return SinkedMultigraph(n, e);
  }
}

// Toppling written out directly, one vertex at a time.
inline void relax(const SinkedMultigraph& g, Config& eta, Config* odo = nullptr) {
  bool again = true;
  while (again) {
    again = false;
    for (int x = 0; x < g.size(); ++x)
      while (eta[x] >= g.degree(x)) {
        eta[x] -= g.degree(x);
        for (const auto& nb : g.neighbors(x))
          if (nb.v < g.size()) eta[nb.v] += nb.mult;
        if (odo) ++(*odo)[x];
        again = true;
      }
  }
}

// eta stable is recurrent iff adding one chip per sink edge and relaxing
// returns eta (every vertex then topples exactly once).
inline bool recurrent_by_sink_addition(const SinkedMultigraph& g, const Config& eta) {
  Config t = eta;
  for (int x = 0; x < g.size(); ++x) t[x] += g.sink_edges(x);
  relax(g, t);
  return t == eta;
}

inline std::vector<Config> all_stable(const SinkedMultigraph& g) {
  std::vector<Config> out;
  Config c(g.size(), 0);
  for (;;) {
    out.push_back(c);
    int i = 0;
    while (i < g.size() && ++c[i] == g.degree(i)) c[i++] = 0;
    if (i == g.size()) break;
  }
  return out;
}

inline std::vector<Config> recurrents(const SinkedMultigraph& g) {
  std::vector<Config> out;
  for (const auto& c : all_stable(g))
    if (recurrent_by_sink_addition(g, c)) out.push_back(c);
  return out;
}

// Orientations of every edge copy; acyclic with the sink as the only vertex
// without outgoing edges.
inline std::int64_t acyclic_orientations_unique_sink(const SinkedMultigraph& g) {
  const auto edges = edge_copies(g);
  const int total = g.size() + 1;
  const int m = int(edges.size());
  std::int64_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << m); ++mask) {
    std::vector<std::vector<int>> out(total);
    std::vector<int> outdeg(total, 0);
    for (int i = 0; i < m; ++i) {
      int a = edges[i].a, b = edges[i].b;
      if (mask >> i & 1) std::swap(a, b);
      out[a].push_back(b);
      ++outdeg[a];
    }
    bool ok = outdeg[g.sink()] == 0;
    for (int v = 0; v < g.size() && ok; ++v) ok = outdeg[v] > 0;
    if (!ok) continue;
    // Kahn
    std::vector<int> indeg(total, 0);
    for (int v = 0; v < total; ++v)
      for (int w : out[v]) ++indeg[w];
    std::vector<int> st;
    for (int v = 0; v < total; ++v)
      if (!indeg[v]) st.push_back(v);
    int seen = 0;
    while (!st.empty()) {
      int v = st.back();
      st.pop_back();
      ++seen;
      for (int w : out[v])
        if (--indeg[w] == 0) st.push_back(w);
    }
    if (seen == total) ++count;
  }
  return count;
}

// H(v) = sum over connected spanning edge sets A of v^(|A| - |V| + 1), with the
// sink counted in |V|.
inline std::vector<std::int64_t> connected_spanning_poly(const SinkedMultigraph& g) {
  const auto edges = edge_copies(g);
  const int total = g.size() + 1;
  const int m = int(edges.size());
  std::vector<std::int64_t> h(m - total + 2, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << m); ++mask) {
    UnionFind uf(total);
    int comps = total, size = 0;
    for (int i = 0; i < m; ++i)
      if (mask >> i & 1) {
        ++size;
        if (uf.unite(edges[i].a, edges[i].b)) --comps;
      }
    if (comps == 1) ++h[size - total + 1];
  }
  return h;
}

// P[S_m = (x, y)] for the simple walk on Z^2, exact.
inline double walk_probability(int m, int x, int y) {
  x = std::abs(x);
  y = std::abs(y);
  if ((m + x + y) % 2 || x + y > m) return 0.0;
  // C(m, (m+x+y)/2) C(m, (m+x-y)/2) / 4^m, via logs of factorials
  auto lchoose = [](int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); };
  return std::exp(lchoose(m, (m + x + y) / 2) + lchoose(m, (m + x - y) / 2) - m * std::log(4.0));
}

// sum_m r^m P[S_m = (k, l)] / 4, truncated once the terms drop below 1e-18.
inline double killed_green_series(int k, int l, double r) {
  double s = 0;
  for (int m = 0; m < 200000; ++m) {
    const double t = std::pow(r, m) * walk_probability(m, k, l);
    s += t;
    if (m > std::abs(k) + std::abs(l) + 10 && std::pow(r, m) < 1e-18) break;
  }
  return s / 4.0;
}

// Loop counting on a digraph with sink column. arcs[x][y], y = n is the sink.
// A rotor configuration picks one outgoing arc copy per vertex. Returns, for
// each k, the number of configurations with exactly k cycles such that every
// cycle uses a marked arc and every marked arc lies on a cycle.
inline std::map<int, std::int64_t> rotor_loop_counts(const std::vector<std::vector<int>>& arcs,
                                                     const std::set<std::pair<int, int>>& marked) {
  const int n = int(arcs.size());
  std::vector<std::vector<int>> choices(n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y <= n; ++y)
      for (int c = 0; c < arcs[x][y]; ++c) choices[x].push_back(y);
  std::map<int, std::int64_t> out;
  for (int x = 0; x < n; ++x)
    if (choices[x].empty()) return out;
  std::vector<int> pick(n, 0);
  for (;;) {
    std::vector<int> to(n);
    for (int x = 0; x < n; ++x) to[x] = choices[x][pick[x]];
    // cycles of the functional graph
    std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
    std::vector<char> on_cycle(n, 0);
    int cycles = 0;
    bool all_marked = true;
    for (int s = 0; s < n; ++s) {
      std::vector<int> path;
      int v = s;
      while (v < n && state[v] == 0) {
        state[v] = 1;
        path.push_back(v);
        v = to[v];
      }
      if (v < n && state[v] == 1) {
        ++cycles;
        bool has_mark = false;
        int u = v;
        do {
          on_cycle[u] = 1;
          if (marked.count({u, to[u]})) has_mark = true;
          u = to[u];
        } while (u != v);
        all_marked = all_marked && has_mark;
      }
      for (int p : path) state[p] = 2;
    }
    bool marks_on_cycles = true;
    for (const auto& [a, b] : marked) marks_on_cycles = marks_on_cycles && on_cycle[a] && to[a] == b;
    if (all_marked && marks_on_cycles) ++out[cycles];
    int i = 0;
    while (i < n && ++pick[i] == int(choices[i].size())) pick[i++] = 0;
    if (i == n) break;
  }
  return out;
}

// Smith normal form diagonal by elementary operations on a small integer matrix.
inline std::vector<long long> smith_diagonal(std::vector<std::vector<long long>> a) {
  const int n = int(a.size());
  std::vector<long long> d;
  for (int t = 0; t < n; ++t) {
    // move a smallest nonzero entry of the trailing block to (t, t)
    for (;;) {
      int pr = -1, pc = -1;
      for (int i = t; i < n; ++i)
        for (int j = t; j < n; ++j)
          if (a[i][j] != 0 && (pr < 0 || std::llabs(a[i][j]) < std::llabs(a[pr][pc]))) {
            pr = i;
            pc = j;
          }
      if (pr < 0) return d;
      std::swap(a[t], a[pr]);
      for (auto& row : a) std::swap(row[t], row[pc]);
      bool clean = true;
      for (int i = t + 1; i < n; ++i) {
        const long long q = a[i][t] / a[t][t];
        for (int j = t; j < n; ++j) a[i][j] -= q * a[t][j];
        if (a[i][t]) clean = false;
      }
      for (int j = t + 1; j < n; ++j) {
        const long long q = a[t][j] / a[t][t];
        for (int i = t; i < n; ++i) a[i][j] -= q * a[i][t];
        if (a[t][j]) clean = false;
      }
      if (!clean) continue;
      // divisibility of the remaining block
      int bad = -1;
      for (int i = t + 1; i < n && bad < 0; ++i)
        for (int j = t + 1; j < n; ++j)
          if (a[i][j] % a[t][t]) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      for (int j = t; j < n; ++j) a[t][j] += a[bad][j];
    }
    d.push_back(std::llabs(a[t][t]));
  }
  return d;
}

}  // namespace oracle
