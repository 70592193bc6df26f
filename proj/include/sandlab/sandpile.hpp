#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sandlab/graph.hpp"
#include "sandlab/rng.hpp"

namespace sandlab {

using Sandpile = std::vector<std::int64_t>;
using Odometer = std::vector<std::int64_t>;

bool is_stable(const SinkedMultigraph& g, const Sandpile& eta);
Sandpile max_stable(const SinkedMultigraph& g);
std::int64_t mass(const Sandpile& eta);

Sandpile topple(const SinkedMultigraph& g, const Sandpile& eta, int x);

struct Stabilization {
  Sandpile result;
  Odometer odometer;
};

// Parallel sweep: every round topples each vertex that was unstable when the
// round began, as many times as its height allows.
Stabilization stabilize(const SinkedMultigraph& g, Sandpile xi);
// In-place variant used by the Monte Carlo loops. Appends newly toppled
// vertices to *toppled when it is given.
void stabilize_in_place(const SinkedMultigraph& g, Sandpile& h, Odometer& odo,
                        std::vector<int>* toppled = nullptr);

struct AvalancheReport {
  Odometer odometer;
  std::vector<int> toppled;  // Av, ascending
  std::int64_t size = 0;     // S
  double radius = 0;
  std::vector<std::vector<int>> waves;
};

struct AddResult {
  Sandpile state;
  AvalancheReport report;
};

AddResult add(const SinkedMultigraph& g, const Sandpile& eta, int x);
AddResult wave_decompose(const SinkedMultigraph& g, const Sandpile& eta, int x);

// Distance used for the avalanche radius: Euclidean on grids, hop count otherwise.
double avalanche_radius(const SinkedMultigraph& g, int z, const std::vector<int>& toppled);

struct MarkovSummary {
  Sandpile final_state;
  std::int64_t steps = 0;
  std::map<Sandpile, std::int64_t> visits;  // filled for graphs with at most 12 vertices
  double mean_size = 0;
  double mean_toppled = 0;
  std::vector<std::string> warnings;
};

// Empty p means uniform. Starts from the maximal stable state unless
// an initial state is given.
MarkovSummary markov_run(const SinkedMultigraph& g, std::vector<double> p, std::int64_t steps,
                         std::uint64_t seed, const Sandpile* initial = nullptr);

struct DharRow {
  int y;
  double mean;
  double exact;
  double std_error;
  double z;
};

std::vector<DharRow> dhar_formula_check(const SinkedMultigraph& g, int x, std::int64_t samples,
                                        std::uint64_t seed);

struct AvalancheStatsRow {
  int n = 0;
  std::int64_t samples = 0;
  double mean_size = 0;
  double second_moment_size = 0;
  double mean_toppled = 0;
  double mean_radius = 0;
  std::int64_t size_q50 = 0, size_q90 = 0, size_q99 = 0, size_max = 0;
};

std::vector<AvalancheStatsRow> avalanche_statistics(const std::vector<int>& n_list, std::int64_t samples,
                                                    std::uint64_t seed, int d = 2);
std::string avalanche_statistics_csv(const std::vector<AvalancheStatsRow>& rows);

// Exhaustive search over u in [0, bound]^V; throws SizeError when the
// box would exceed max_candidates.
bool least_action_check(const SinkedMultigraph& g, const Sandpile& xi, std::int64_t max_candidates = 20'000'000);

}  // namespace sandlab
