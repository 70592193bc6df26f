#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "sandlab/algebra.hpp"
#include "sandlab/graph.hpp"
#include "sandlab/rng.hpp"

namespace sandlab {

// Chronological loop erasure of any sequence of comparable vertices.
template <class T>
std::vector<T> loop_erase(const std::vector<T>& path) {
  std::vector<T> out;
  std::map<T, std::size_t> pos;
  for (const T& v : path) {
    auto it = pos.find(v);
    if (it != pos.end()) {
      for (std::size_t i = it->second + 1; i < out.size(); ++i) pos.erase(out[i]);
      out.resize(it->second + 1);
    } else {
      pos.emplace(v, out.size());
      out.push_back(v);
    }
  }
  return out;
}

// Same, after checking that consecutive vertices are adjacent in g.
std::vector<int> loop_erase(const SinkedMultigraph& g, const std::vector<int>& path);

// Wilson's algorithm rooted at `root` (the sink when root < 0). Vertices are
// started in canonical order, the sink last.
SpanningTree wilson_ust(const SinkedMultigraph& g, int root, std::uint64_t seed);
void wilson_ust(const SinkedMultigraph& g, int root, Rng& rng, SpanningTree& tree);

// Walks are started only from `starts`, in that order. Vertices that end up
// outside the tree keep parent -1; this is the marginal of the full sampler
// on the branches through `starts`.
void wilson_ust(const SinkedMultigraph& g, int root, std::span<const int> starts, Rng& rng, SpanningTree& tree);

// sites first, then their non-sink neighbours, without repeats.
std::vector<int> closed_neighbourhood(const SinkedMultigraph& g, const std::vector<int>& sites);

// Heights at `sites` of a uniform recurrent sample. Only the branches from
// closed_neighbourhood(sites) are generated.
std::vector<int> sample_heights_at(const SinkedMultigraph& g, const std::vector<int>& sites, Rng& rng);

struct HeightFrequencies {
  int n = 0;
  int window = 0;
  std::int64_t samples = 0;
  std::vector<double> prob;       // prob[h], h = 0 .. 2d-1, averaged over the window
  std::vector<double> std_error;  // across samples of the window average
  double mean = 0;
  double mean_std_error = 0;
};

// Box(n) in dimension d, window [-window, window]^d.
HeightFrequencies height_frequencies(int n, int window, std::int64_t samples, std::uint64_t seed, int d = 2);

Sandpile sample_recurrent(const SinkedMultigraph& g, std::uint64_t seed);
Sandpile sample_recurrent(const SinkedMultigraph& g, Rng& rng);

struct OrientedEdge {
  int tail;
  int head;
  int parallel = 0;
  bool operator==(const OrientedEdge&) const = default;
};

// Y(e, f): current through f when a unit current enters at tail(e) and
// leaves at head(e). Dense inverse, intended for graphs up to a few thousand vertices.
class TransferCurrent {
 public:
  explicit TransferCurrent(const SinkedMultigraph& g);
  double operator()(const OrientedEdge& e, const OrientedEdge& f) const;
  void check_edge(const OrientedEdge& e) const;

 private:
  double inv(int a, int b) const;
  const SinkedMultigraph* g_;
  Eigen::MatrixXd ginv_;
};

double transfer_current(const SinkedMultigraph& g, const OrientedEdge& e, const OrientedEdge& f);

double tree_event_probability(const SinkedMultigraph& g, const std::vector<OrientedEdge>& present,
                              const std::vector<OrientedEdge>& absent);
double tree_event_probability(const TransferCurrent& y, const std::vector<OrientedEdge>& present,
                              const std::vector<OrientedEdge>& absent);

// Loop-erased walk from the origin of Z^2 until it leaves [-R, R]^2.
// Returns the number of neighbours of the origin on the erased path.
int lerw_neighbour_count(int radius, Rng& rng);

struct LoopingEstimate {
  int radius = 0;
  std::int64_t samples = 0;
  double mean = 0;
  double std_error = 0;
  double zeta = 0;  // 2 + (mean - 1) / 2
};

LoopingEstimate looping_constant_estimate(int radius, std::int64_t samples, std::uint64_t seed);
std::vector<LoopingEstimate> looping_bias_trace(const std::vector<int>& radii, std::int64_t samples,
                                                std::uint64_t seed);

}  // namespace sandlab
