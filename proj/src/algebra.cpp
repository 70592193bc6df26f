#include "sandlab/algebra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>

#include "sandlab/errors.hpp"

namespace sandlab {

namespace {

// Round-synchronous burning. Vertices in `blocked` never burn. Returns the
// rounds; `burnt` is updated and `du` holds edge counts into the unburnt set.
std::vector<std::vector<int>> burn_rounds(const SinkedMultigraph& g, const Sandpile& eta,
                                          std::vector<char>& burnt, std::vector<int>& du,
                                          const std::vector<char>* blocked) {
  const int n = g.size();
  std::vector<std::vector<int>> rounds;
  std::vector<int> cur;
  for (int x = 0; x < n; ++x)
    if (!burnt[x] && !(blocked && (*blocked)[x]) && eta[x] >= du[x]) cur.push_back(x);
  std::vector<char> seen(n, 0);
  while (!cur.empty()) {
    for (int x : cur) burnt[x] = 1;
    std::vector<int> next;
    for (int x : cur)
      for (const auto& nb : g.neighbors(x)) {
        if (nb.v >= n || burnt[nb.v]) continue;
        du[nb.v] -= nb.mult;
        if (!seen[nb.v]) {
          seen[nb.v] = 1;
          next.push_back(nb.v);
        }
      }
    std::vector<int> burnable;
    for (int y : next) {
      seen[y] = 0;
      if (!(blocked && (*blocked)[y]) && eta[y] >= du[y]) burnable.push_back(y);
    }
    std::sort(burnable.begin(), burnable.end());
    rounds.push_back(std::move(cur));
    cur = std::move(burnable);
  }
  return rounds;
}

std::vector<int> initial_du(const SinkedMultigraph& g) {
  std::vector<int> du(g.size());
  for (int x = 0; x < g.size(); ++x) du[x] = g.degree(x) - g.sink_edges(x);
  return du;
}

void require_recurrent(const SinkedMultigraph& g, const Sandpile& eta) {
  if (!is_recurrent(g, eta)) throw InvalidArgument("sandpile is not recurrent");
}

// Edge choice from the F_x / m_x rule. key[] orders burn events, with the
// sink at key 0; prev(y) tells whether y belongs to the round before x.
template <class Prev>
void choose_edge(const SinkedMultigraph& g, const Sandpile& eta, const std::vector<int>& key, int x, Prev prev,
                 SpanningTree& tree) {
  int m = 0;
  for (const auto& nb : g.neighbors(x))
    if (key[nb.v] < key[x]) m += nb.mult;
  const std::int64_t i = eta[x] - (g.degree(x) - m);
  std::int64_t seen = 0;
  auto slots = g.slots(x);
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (!prev(slots[s])) continue;
    if (seen == i) {
      tree.parent[x] = slots[s];
      tree.parallel[x] = g.slot_parallel(x, int(s));
      return;
    }
    ++seen;
  }
  throw InvariantViolation("burning bijection: edge index out of range at vertex " + std::to_string(x));
}

std::vector<std::vector<int>> children_of(const SinkedMultigraph& g, const SpanningTree& t) {
  std::vector<std::vector<int>> ch(g.size() + 1);
  for (int x = 0; x <= g.size(); ++x)
    if (t.parent[x] >= 0) ch[t.parent[x]].push_back(x);
  return ch;
}

// Depth of every vertex along parent pointers; -1 marks vertices that never
// reach the root.
std::vector<int> depths(const SinkedMultigraph& g, const SpanningTree& t) {
  const int total = g.size() + 1;
  std::vector<int> d(total, -2);  // -2 unvisited, -3 on the current path
  d[t.root] = 0;
  std::vector<int> path;
  for (int s = 0; s < total; ++s) {
    int v = s;
    path.clear();
    while (d[v] == -2) {
      d[v] = -3;
      path.push_back(v);
      v = t.parent[v];
      if (v < 0 || v >= total) break;
    }
    int base = (v >= 0 && v < total && d[v] >= 0) ? d[v] : -1;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      d[*it] = base < 0 ? -1 : ++base;
    }
  }
  return d;
}

}  // namespace

BurnResult burning_test(const SinkedMultigraph& g, const Sandpile& eta) {
  if (!is_stable(g, eta)) throw PreconditionError("burning test requires a stable sandpile");
  std::vector<char> burnt(g.size(), 0);
  auto du = initial_du(g);
  BurnResult r;
  r.record.rounds = burn_rounds(g, eta, burnt, du, nullptr);
  for (int x = 0; x < g.size(); ++x)
    if (!burnt[x]) r.record.unburnt.push_back(x);
  r.recurrent = r.record.unburnt.empty();
  return r;
}

bool is_recurrent(const SinkedMultigraph& g, const Sandpile& eta) { return burning_test(g, eta).recurrent; }

std::vector<Sandpile> enumerate_recurrent(const SinkedMultigraph& g, double bound) {
  const int n = g.size();
  double space = 1;
  for (int x = 0; x < n; ++x) space *= g.degree(x);
  if (space > bound) throw SizeError("recurrent enumeration space too large");
  std::vector<Sandpile> out;
  Sandpile eta(n, 0);
  for (;;) {
    if (is_recurrent(g, eta)) out.push_back(eta);
    int i = n - 1;
    while (i >= 0 && eta[i] == g.degree(i) - 1) eta[i--] = 0;
    if (i < 0) break;
    ++eta[i];
  }
  return out;
}

SpanningTree bijection_to_tree(const SinkedMultigraph& g, const Sandpile& eta) {
  const int n = g.size();
  auto burn = burning_test(g, eta);
  if (!burn.recurrent) throw InvalidArgument("sandpile is not recurrent");
  std::vector<int> key(n + 1, 0);
  for (std::size_t t = 0; t < burn.record.rounds.size(); ++t)
    for (int x : burn.record.rounds[t]) key[x] = int(t) + 1;
  SpanningTree tree;
  tree.root = g.sink();
  tree.parent.assign(n + 1, -1);
  tree.parallel.assign(n + 1, 0);
  tree.burn_time = key;
  for (int x = 0; x < n; ++x) choose_edge(g, eta, key, x, [&](int y) { return key[y] == key[x] - 1; }, tree);
  return tree;
}

void validate_tree(const SinkedMultigraph& g, const SpanningTree& tree) {
  const int n = g.size();
  if (tree.root != g.sink()) throw InvalidArgument("tree must be rooted at the sink");
  if (int(tree.parent.size()) != n + 1 || int(tree.parallel.size()) != n + 1)
    throw InvalidArgument("tree arrays have the wrong size");
  if (tree.parent[n] != -1) throw InvalidArgument("root has a parent");
  for (int x = 0; x < n; ++x) {
    int p = tree.parent[x];
    if (p < 0 || p > n || tree.parallel[x] < 0 || tree.parallel[x] >= g.multiplicity(x, p))
      throw InvalidArgument("tree edge at vertex " + std::to_string(x) + " is not an edge of the graph");
  }
  auto d = depths(g, tree);
  for (int x = 0; x < n; ++x)
    if (d[x] < 0) throw InvalidArgument("parent map contains a cycle");
}

Sandpile tree_to_sandpile(const SinkedMultigraph& g, const SpanningTree& tree) {
  validate_tree(g, tree);
  const int n = g.size();
  auto d = depths(g, tree);
  Sandpile eta(n);
  for (int x = 0; x < n; ++x) {
    int m = 0;
    for (const auto& nb : g.neighbors(x))
      if (d[nb.v] < d[x]) m += nb.mult;
    const int target = g.slot_of(x, tree.parent[x], tree.parallel[x]);
    int i = 0;
    auto slots = g.slots(x);
    for (int s = 0; s < target; ++s)
      if (d[slots[s]] == d[x] - 1) ++i;
    eta[x] = g.degree(x) - m + i;
  }
  return eta;
}

AnchoredResult anchored_bijection(const SinkedMultigraph& g, const Sandpile& eta, const std::vector<int>& q) {
  const int n = g.size();
  require_recurrent(g, eta);
  std::vector<char> blocked(n, 0);
  for (int v : q) {
    if (v < 0 || v >= n) throw InvalidArgument("anchor vertex out of range");
    blocked[v] = 1;
  }
  std::vector<char> burnt(n, 0);
  auto du = initial_du(g);
  auto phase1 = burn_rounds(g, eta, burnt, du, &blocked);
  auto phase2 = burn_rounds(g, eta, burnt, du, nullptr);

  const int t1 = int(phase1.size());
  std::vector<int> key(n + 1, 0);
  std::vector<char> in_phase2(n + 1, 0);
  for (int t = 0; t < t1; ++t)
    for (int x : phase1[t]) key[x] = t + 1;
  for (std::size_t t = 0; t < phase2.size(); ++t)
    for (int x : phase2[t]) {
      key[x] = t1 + int(t) + 1;
      in_phase2[x] = 1;
    }

  AnchoredResult out;
  SpanningTree& tree = out.tree;
  tree.root = g.sink();
  tree.parent.assign(n + 1, -1);
  tree.parallel.assign(n + 1, 0);
  for (int x = 0; x < n; ++x) {
    if (in_phase2[x] && key[x] == t1 + 1)
      choose_edge(g, eta, key, x, [&](int y) { return key[y] <= t1; }, tree);
    else
      choose_edge(g, eta, key, x, [&](int y) { return key[y] == key[x] - 1; }, tree);
    if (in_phase2[x]) out.w.push_back(x);
  }
  tree.burn_time = depths(g, tree);
  out.phase_one_rounds = t1;
  return out;
}

std::vector<int> descendants(const SinkedMultigraph& g, const SpanningTree& tree, const std::vector<int>& q) {
  auto ch = children_of(g, tree);
  std::vector<char> mark(g.size() + 1, 0);
  std::vector<int> stack;
  for (int v : q)
    if (!mark[v]) {
      mark[v] = 1;
      stack.push_back(v);
    }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int c : ch[v])
      if (!mark[c]) {
        mark[c] = 1;
        stack.push_back(c);
      }
  }
  std::vector<int> out;
  for (int x = 0; x < g.size(); ++x)
    if (mark[x]) out.push_back(x);
  return out;
}

Sandpile epsilon_config(const SinkedMultigraph& g) {
  Sandpile delta(g.size());
  for (int x = 0; x < g.size(); ++x) delta[x] = g.degree(x);
  auto st = stabilize(g, delta);
  for (int x = 0; x < g.size(); ++x) delta[x] -= st.result[x];
  return delta;
}

Sandpile group_add(const SinkedMultigraph& g, const Sandpile& a, const Sandpile& b) {
  require_recurrent(g, a);
  require_recurrent(g, b);
  Sandpile s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
  return stabilize(g, std::move(s)).result;
}

Sandpile group_identity(const SinkedMultigraph& g) {
  auto eps = epsilon_config(g);
  std::int64_t k = 0;
  for (int x = 0; x < g.size(); ++x) k = std::max(k, (g.degree(x) - 1 + eps[x] - 1) / eps[x]);
  for (auto& v : eps) v *= k;
  return stabilize(g, std::move(eps)).result;
}

Sandpile group_inverse(const SinkedMultigraph& g, const Sandpile& a) {
  require_recurrent(g, a);
  auto eps = epsilon_config(g);
  std::int64_t k = 0;
  for (int x = 0; x < g.size(); ++x) k = std::max(k, (g.degree(x) - 1 + a[x] + eps[x] - 1) / eps[x]);
  Sandpile s(a.size());
  for (int x = 0; x < g.size(); ++x) s[x] = k * eps[x] - a[x];
  return stabilize(g, std::move(s)).result;
}

Poly mass_generating_function(const SinkedMultigraph& g, double bound) {
  Poly p;
  for (const auto& eta : enumerate_recurrent(g, bound)) {
    std::size_t m = std::size_t(mass(eta));
    if (p.size() <= m) p.resize(m + 1, 0);
    ++p[m];
  }
  return p;
}

namespace {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

}  // namespace

Poly connected_subgraph_poly(const SinkedMultigraph& g, int max_edges) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : g.edge_list())
    for (int c = 0; c < e.count; ++c) edges.emplace_back(e.x, e.y);
  const int m = int(edges.size());
  if (m > max_edges) throw SizeError("too many edges for subset enumeration");
  const int nv = g.size() + 1;
  Poly h(std::max(1, m - g.size() + 1), 0);
  for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << m); ++mask) {
    const int k = std::popcount(mask);
    if (k < nv - 1) continue;
    Dsu d(nv);
    int comps = nv;
    for (int i = 0; i < m; ++i)
      if ((mask >> i & 1) && d.unite(edges[i].first, edges[i].second)) --comps;
    if (comps == 1) ++h[k - g.size()];
  }
  return h;
}

Poly shift_substitute(const Poly& p, int shift) {
  Poly out(p.size() + shift, 0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::int64_t binom = 1;
    for (std::size_t j = 0; j <= k; ++j) {
      // C(k, j) (-1)^(k-j)
      std::int64_t term = ((k - j) % 2 ? -binom : binom) * p[k];
      out[j + shift] += term;
      binom = binom * std::int64_t(k - j) / std::int64_t(j + 1);
    }
  }
  while (out.size() > 1 && out.back() == 0) out.pop_back();
  return out;
}

std::int64_t acyclic_orientation_count(const SinkedMultigraph& g, int max_edges) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : g.edge_list()) edges.emplace_back(e.x, e.y);
  const int m = int(edges.size());
  if (m > max_edges) throw SizeError("too many edges for orientation enumeration");
  const int nv = g.size() + 1;
  const int s = g.sink();
  std::int64_t count = 0;
  std::vector<int> outdeg(nv), indeg(nv);
  std::vector<std::vector<int>> out(nv);
  std::vector<int> stack;
  for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << m); ++mask) {
    std::fill(outdeg.begin(), outdeg.end(), 0);
    std::fill(indeg.begin(), indeg.end(), 0);
    for (auto& o : out) o.clear();
    for (int i = 0; i < m; ++i) {
      int a = edges[i].first, b = edges[i].second;
      if (mask >> i & 1) std::swap(a, b);
      out[a].push_back(b);
      ++outdeg[a];
      ++indeg[b];
    }
    bool unique_sink = outdeg[s] == 0;
    for (int v = 0; v < nv && unique_sink; ++v)
      if (v != s && outdeg[v] == 0) unique_sink = false;
    if (!unique_sink) continue;
    stack.clear();
    for (int v = 0; v < nv; ++v)
      if (indeg[v] == 0) stack.push_back(v);
    int removed = 0;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      ++removed;
      for (int w : out[v])
        if (--indeg[w] == 0) stack.push_back(w);
    }
    if (removed == nv) ++count;
  }
  return count;
}

}  // namespace sandlab
