#pragma once

#include <cstdint>
#include <vector>

#include "sandlab/graph.hpp"
#include "sandlab/sandpile.hpp"

namespace sandlab {

// Arrays are indexed by vertex including the sink (size n+1).
// parent[root] = -1; parallel[x] picks among parallel edges to parent[x].
// burn_time is the tree distance to the root.
struct SpanningTree {
  int root = -1;
  std::vector<int> parent;
  std::vector<int> parallel;
  std::vector<int> burn_time;
};

struct BurnRecord {
  std::vector<std::vector<int>> rounds;  // B_1, B_2, ...
  std::vector<int> unburnt;
};

struct BurnResult {
  bool recurrent = false;
  BurnRecord record;
};

BurnResult burning_test(const SinkedMultigraph& g, const Sandpile& eta);
bool is_recurrent(const SinkedMultigraph& g, const Sandpile& eta);

std::vector<Sandpile> enumerate_recurrent(const SinkedMultigraph& g, double bound = 1e7);

SpanningTree bijection_to_tree(const SinkedMultigraph& g, const Sandpile& eta);
Sandpile tree_to_sandpile(const SinkedMultigraph& g, const SpanningTree& tree);
// Throws InvalidArgument unless tree is a spanning tree of g rooted at the sink.
void validate_tree(const SinkedMultigraph& g, const SpanningTree& tree);

struct AnchoredResult {
  SpanningTree tree;
  std::vector<int> w;       // burnt in the second phase, ascending
  int phase_one_rounds = 0;
};

AnchoredResult anchored_bijection(const SinkedMultigraph& g, const Sandpile& eta, const std::vector<int>& q);

// Vertices whose tree path to the root passes through q (q included).
std::vector<int> descendants(const SinkedMultigraph& g, const SpanningTree& tree, const std::vector<int>& q);

Sandpile group_add(const SinkedMultigraph& g, const Sandpile& a, const Sandpile& b);
Sandpile group_identity(const SinkedMultigraph& g);
Sandpile group_inverse(const SinkedMultigraph& g, const Sandpile& a);
// ε = δ − δ°, where δ is the degree configuration; ε lies in the row span of Δ′.
Sandpile epsilon_config(const SinkedMultigraph& g);

using Poly = std::vector<std::int64_t>;  // coefficient of y^k at index k

Poly mass_generating_function(const SinkedMultigraph& g, double bound = 1e7);
Poly connected_subgraph_poly(const SinkedMultigraph& g, int max_edges = 20);
std::int64_t acyclic_orientation_count(const SinkedMultigraph& g, int max_edges = 22);

// y^shift · p(y − 1), expanded exactly.
Poly shift_substitute(const Poly& p, int shift);

}  // namespace sandlab
