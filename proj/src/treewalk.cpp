#include "sandlab/treewalk.hpp"

#include <cmath>

#include "sandlab/errors.hpp"
#include "sandlab/linalg.hpp"
#include "sandlab/parallel.hpp"

namespace sandlab {

std::vector<int> loop_erase(const SinkedMultigraph& g, const std::vector<int>& path) {
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] < 0 || path[i] > g.size()) throw InvalidArgument("path vertex out of range");
    if (i > 0 && g.multiplicity(path[i - 1], path[i]) == 0)
      throw InvalidArgument("path step " + std::to_string(i) + " is not an edge");
  }
  return loop_erase<int>(path);
}

void wilson_ust(const SinkedMultigraph& g, int root, Rng& rng, SpanningTree& tree) {
  const int total = g.size() + 1;
  if (root < 0) root = g.sink();
  if (root >= total) throw InvalidArgument("root out of range");
  tree.root = root;
  tree.parent.assign(total, -1);
  tree.parallel.assign(total, 0);
  tree.burn_time.clear();
  std::vector<char> in_tree(total, 0);
  std::vector<int> next(total, 0);
  in_tree[root] = 1;
  for (int start = 0; start < total; ++start) {
    int u = start;
    while (!in_tree[u]) {
      const int s = int(uniform_below(rng, std::uint32_t(g.degree(u))));
      next[u] = s;
      u = g.slot_target(u, s);
    }
    u = start;
    while (!in_tree[u]) {
      in_tree[u] = 1;
      const int s = next[u];
      tree.parent[u] = g.slot_target(u, s);
      tree.parallel[u] = g.slot_parallel(u, s);
      u = tree.parent[u];
    }
  }
}

void wilson_ust(const SinkedMultigraph& g, int root, std::span<const int> starts, Rng& rng, SpanningTree& tree) {
  const int total = g.size() + 1;
  if (root < 0) root = g.sink();
  if (root >= total) throw InvalidArgument("root out of range");
  for (int v : starts)
    if (v < 0 || v >= total) throw InvalidArgument("start vertex out of range");
  tree.root = root;
  tree.parent.assign(total, -1);
  tree.parallel.assign(total, 0);
  tree.burn_time.clear();
  std::vector<char> in_tree(total, 0);
  std::vector<int> next(total, 0);
  in_tree[root] = 1;
  for (int start : starts) {
    int u = start;
    while (!in_tree[u]) {
      const int s = int(uniform_below(rng, std::uint32_t(g.degree(u))));
      next[u] = s;
      u = g.slot_target(u, s);
    }
    u = start;
    while (!in_tree[u]) {
      in_tree[u] = 1;
      const int s = next[u];
      tree.parent[u] = g.slot_target(u, s);
      tree.parallel[u] = g.slot_parallel(u, s);
      u = tree.parent[u];
    }
  }
}

std::vector<int> closed_neighbourhood(const SinkedMultigraph& g, const std::vector<int>& sites) {
  const int n = g.size();
  std::vector<char> seen(n, 0);
  std::vector<int> out;
  for (int x : sites) {
    if (x < 0 || x >= n) throw InvalidArgument("site out of range");
    if (!seen[x]) {
      seen[x] = 1;
      out.push_back(x);
    }
  }
  for (int x : sites)
    for (const auto& nb : g.neighbors(x))
      if (nb.v < n && !seen[nb.v]) {
        seen[nb.v] = 1;
        out.push_back(nb.v);
      }
  return out;
}

std::vector<int> sample_heights_at(const SinkedMultigraph& g, const std::vector<int>& sites, Rng& rng) {
  const std::vector<int> starts = closed_neighbourhood(g, sites);
  SpanningTree t;
  wilson_ust(g, g.sink(), starts, rng, t);
  const int total = g.size() + 1;
  std::vector<int> depth(total, -1);
  depth[t.root] = 0;
  std::vector<int> path;
  auto depth_of = [&](int v) {
    path.clear();
    while (depth[v] < 0) {
      path.push_back(v);
      v = t.parent[v];
    }
    int d = depth[v];
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth[*it] = ++d;
  };
  for (int v : starts) depth_of(v);
  // same rule as tree_to_sandpile
  std::vector<int> out;
  out.reserve(sites.size());
  for (int x : sites) {
    int m = 0;
    for (const auto& nb : g.neighbors(x))
      if (depth[nb.v] < depth[x]) m += nb.mult;
    const int target = g.slot_of(x, t.parent[x], t.parallel[x]);
    auto slots = g.slots(x);
    int i = 0;
    for (int s = 0; s < target; ++s)
      if (depth[slots[s]] == depth[x] - 1) ++i;
    out.push_back(g.degree(x) - m + i);
  }
  return out;
}

HeightFrequencies height_frequencies(int n, int window, std::int64_t samples, std::uint64_t seed, int d) {
  if (window < 0 || window > n) throw InvalidArgument("window must lie inside the box");
  if (samples < 2) throw InvalidArgument("need at least two samples");
  const SinkedMultigraph g = wired_box(n, d);
  std::vector<int> sites;
  for (int x = 0; x < g.size(); ++x) {
    bool inside = true;
    for (int c : g.coord(x)) inside = inside && std::abs(c) <= window;
    if (inside) sites.push_back(x);
  }
  const int levels = 2 * d;
  constexpr std::int64_t chunk = 1000;
  const int replicas = int((samples + chunk - 1) / chunk);
  // per replica: sums of the window fractions and of their squares, plus the mean height
  std::vector<std::vector<double>> s1(replicas), s2(replicas);
  for_each_replica(replicas, [&](int r) {
    Rng rng = make_rng(seed, std::uint64_t(r));
    s1[r].assign(levels + 1, 0.0);
    s2[r].assign(levels + 1, 0.0);
    const std::int64_t m = std::min(chunk, samples - r * chunk);
    std::vector<std::int64_t> count(levels);
    for (std::int64_t i = 0; i < m; ++i) {
      std::fill(count.begin(), count.end(), 0);
      for (int h : sample_heights_at(g, sites, rng)) ++count[h];
      double hsum = 0;
      for (int h = 0; h < levels; ++h) {
        const double f = double(count[h]) / double(sites.size());
        s1[r][h] += f;
        s2[r][h] += f * f;
        hsum += h * f;
      }
      s1[r][levels] += hsum;
      s2[r][levels] += hsum * hsum;
    }
  });
  HeightFrequencies out;
  out.n = n;
  out.window = window;
  out.samples = samples;
  const double N = double(samples);
  for (int h = 0; h <= levels; ++h) {
    double a = 0, b = 0;
    for (int r = 0; r < replicas; ++r) {
      a += s1[r][h];
      b += s2[r][h];
    }
    const double mean = a / N;
    const double var = std::max(0.0, (b - a * a / N) / (N - 1));
    if (h < levels) {
      out.prob.push_back(mean);
      out.std_error.push_back(std::sqrt(var / N));
    } else {
      out.mean = mean;
      out.mean_std_error = std::sqrt(var / N);
    }
  }
  return out;
}

SpanningTree wilson_ust(const SinkedMultigraph& g, int root, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  SpanningTree t;
  wilson_ust(g, root, rng, t);
  // burn times along the tree
  const int total = g.size() + 1;
  t.burn_time.assign(total, -1);
  t.burn_time[t.root] = 0;
  std::vector<int> path;
  for (int s = 0; s < total; ++s) {
    int v = s;
    path.clear();
    while (t.burn_time[v] < 0) {
      path.push_back(v);
      v = t.parent[v];
    }
    int d = t.burn_time[v];
    for (auto it = path.rbegin(); it != path.rend(); ++it) t.burn_time[*it] = ++d;
  }
  return t;
}

Sandpile sample_recurrent(const SinkedMultigraph& g, Rng& rng) {
  SpanningTree t;
  wilson_ust(g, g.sink(), rng, t);
  return tree_to_sandpile(g, t);
}

Sandpile sample_recurrent(const SinkedMultigraph& g, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_recurrent(g, rng);
}

TransferCurrent::TransferCurrent(const SinkedMultigraph& g) : g_(&g) {
  if (g.size() > 4000) throw SizeError("transfer current limited to 4000 vertices");
  Eigen::MatrixXd lap = reduced_laplacian(g).cast<double>();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(lap);
  if (ldlt.info() != Eigen::Success) throw InvariantViolation("reduced Laplacian factorisation failed");
  ginv_ = ldlt.solve(Eigen::MatrixXd::Identity(g.size(), g.size()));
}

double TransferCurrent::inv(int a, int b) const {
  if (a == g_->sink() || b == g_->sink()) return 0.0;
  return ginv_(a, b);
}

void TransferCurrent::check_edge(const OrientedEdge& e) const {
  const int total = g_->size() + 1;
  if (e.tail < 0 || e.tail >= total || e.head < 0 || e.head >= total || e.tail == e.head)
    throw InvalidArgument("edge endpoints out of range");
  if (e.parallel < 0 || e.parallel >= g_->multiplicity(e.tail, e.head)) throw InvalidArgument("no such edge");
}

double TransferCurrent::operator()(const OrientedEdge& e, const OrientedEdge& f) const {
  check_edge(e);
  check_edge(f);
  return inv(f.tail, e.tail) - inv(f.tail, e.head) - inv(f.head, e.tail) + inv(f.head, e.head);
}

double transfer_current(const SinkedMultigraph& g, const OrientedEdge& e, const OrientedEdge& f) {
  return TransferCurrent(g)(e, f);
}

static bool same_edge(const OrientedEdge& a, const OrientedEdge& b) {
  if (a.parallel != b.parallel) return false;
  return (a.tail == b.tail && a.head == b.head) || (a.tail == b.head && a.head == b.tail);
}

double tree_event_probability(const TransferCurrent& y, const std::vector<OrientedEdge>& present,
                              const std::vector<OrientedEdge>& absent) {
  std::vector<OrientedEdge> all = present;
  all.insert(all.end(), absent.begin(), absent.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    y.check_edge(all[i]);
    for (std::size_t j = 0; j < i; ++j)
      if (same_edge(all[i], all[j])) throw InvalidArgument("edge listed twice in a tree event");
  }
  const int k = int(all.size());
  if (k == 0) return 1.0;
  std::vector<std::vector<long double>> m(k, std::vector<long double>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      long double v = y(all[i], all[j]);
      m[i][j] = i < int(present.size()) ? v : (i == j ? 1.0L : 0.0L) - v;
    }
  return double(det_extended(m, k));
}

double tree_event_probability(const SinkedMultigraph& g, const std::vector<OrientedEdge>& present,
                              const std::vector<OrientedEdge>& absent) {
  return tree_event_probability(TransferCurrent(g), present, absent);
}

int lerw_neighbour_count(int radius, Rng& rng) {
  if (radius < 2) throw InvalidArgument("radius must be at least 2");
  const int w = 2 * radius + 1;
  thread_local std::vector<int> mark;
  thread_local std::vector<int> path;
  if (mark.size() != std::size_t(w) * w) mark.assign(std::size_t(w) * w, 0);
  path.clear();
  auto cell = [&](int x, int y) { return (x + radius) * w + (y + radius); };
  int x = 0, y = 0;
  path.push_back(cell(0, 0));
  mark[path.back()] = 1;
  std::uint64_t bits = 0;
  int left = 0;
  for (;;) {
    if (left == 0) {
      bits = rng();
      left = 32;
    }
    const int dir = int(bits & 3);
    bits >>= 2;
    --left;
    switch (dir) {
      case 0: --x; break;
      case 1: --y; break;
      case 2: ++y; break;
      default: ++x; break;
    }
    if (x < -radius || x > radius || y < -radius || y > radius) break;
    const int c = cell(x, y);
    if (mark[c]) {
      const std::size_t keep = std::size_t(mark[c]);
      for (std::size_t i = keep; i < path.size(); ++i) mark[path[i]] = 0;
      path.resize(keep);
    } else {
      path.push_back(c);
      mark[c] = int(path.size());
    }
  }
  int count = (mark[cell(-1, 0)] > 0) + (mark[cell(1, 0)] > 0) + (mark[cell(0, -1)] > 0) + (mark[cell(0, 1)] > 0);
  for (int c : path) mark[c] = 0;
  return count;
}

LoopingEstimate looping_constant_estimate(int radius, std::int64_t samples, std::uint64_t seed) {
  if (radius < 2) throw InvalidArgument("radius must be at least 2");
  if (samples < 0) throw InvalidArgument("sample count must be nonnegative");
  constexpr std::int64_t chunk = 1000;
  const int replicas = int((samples + chunk - 1) / chunk);
  std::vector<std::int64_t> sum(replicas, 0), sum2(replicas, 0);
  for_each_replica(replicas, [&](int r) {
    Rng rng = make_rng(seed, std::uint64_t(r));
    const std::int64_t m = std::min(chunk, samples - r * chunk);
    for (std::int64_t i = 0; i < m; ++i) {
      int c = lerw_neighbour_count(radius, rng);
      sum[r] += c;
      sum2[r] += c * c;
    }
  });
  LoopingEstimate e;
  e.radius = radius;
  e.samples = samples;
  if (samples == 0) return e;
  double s = 0, s2 = 0;
  for (int r = 0; r < replicas; ++r) {
    s += double(sum[r]);
    s2 += double(sum2[r]);
  }
  e.mean = s / double(samples);
  const double var = samples > 1 ? (s2 - s * s / double(samples)) / double(samples - 1) : 0.0;
  e.std_error = std::sqrt(std::max(0.0, var) / double(samples));
  e.zeta = 2.0 + (e.mean - 1.0) / 2.0;
  return e;
}

std::vector<LoopingEstimate> looping_bias_trace(const std::vector<int>& radii, std::int64_t samples,
                                                std::uint64_t seed) {
  std::vector<LoopingEstimate> out;
  for (int r : radii) out.push_back(looping_constant_estimate(r, samples, stream_seed(seed, 0x10000u + std::uint64_t(r))));
  return out;
}

}  // namespace sandlab
