#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sandlab/graph.hpp"
#include "sandlab/sandpile.hpp"

namespace sandlab {

// Fields over the cube [-window, window]^d, row-major with the first coordinate slowest.
struct LatticeField {
  int dim = 2;
  int window = 0;
  int side() const { return 2 * window + 1; }
  std::size_t index(const std::vector<int>& p) const;
  bool contains(const std::vector<int>& p) const;
  std::vector<int> point(std::size_t idx) const;
  std::size_t volume() const;
};

struct RelaxationResult {
  LatticeField field;
  std::int64_t n = 0;
  std::int64_t background = 0;
  std::vector<std::int64_t> height;
  std::vector<std::int64_t> odometer;
  std::vector<char> visited;  // received or toppled at least once, plus the origin
  std::int64_t visited_count = 0;
  std::int64_t topplings = 0;

  std::int64_t height_at(const std::vector<int>& p) const;
  std::int64_t odometer_at(const std::vector<int>& p) const;
  // sup { rho : { |x| < rho } is inside the visited set }
  double inner_radius() const;
  int outer_sup_radius() const;
  double outer_radius() const;
};

// n particles at the origin on top of the constant background h (possibly
// negative). Requires h <= 2d - 2; the window doubles when the frozen rim is
// reached, so the result is the stabilization on all of Z^d.
RelaxationResult relax_point_mass(std::int64_t n, std::int64_t h = 0, int d = 2);

struct DivisibleResult {
  LatticeField field;
  double initial_mass = 0;
  double tol = 0;
  std::vector<double> mass;
  std::vector<char> occupied;  // mass >= 1 - tol
  std::int64_t occupied_count = 0;
  std::int64_t sweeps = 0;
  double total_mass = 0;

  double inner_radius() const;  // sup { rho : { |x| < rho } inside D_m }
  double outer_radius() const;  // max |x| over D_m
};

DivisibleResult divisible_sandpile(double m, int d = 2, double tol = 1e-8);

struct Profile {
  int dim = 2;
  int mesh = 0;        // cells per axis
  double extent = 0;   // mesh covers [-extent, extent]^d
  std::int64_t n = 0;
  std::vector<double> values;  // cell averages
  double cell_volume() const;
  double integral() const;
  double max_value() const;
  double min_value() const;
};

// extent <= 0 picks the smallest extent covering the support.
Profile scaled_profile(std::int64_t n, int d = 2, int mesh = 64, double extent = 0);
double profile_l1_distance(const Profile& a, const Profile& b);

struct Background {
  enum class Kind { Constant, Lambda, Bernoulli };
  Kind kind = Kind::Constant;
  int base = 2;             // constant part
  int m = 2;                // Lambda(m) modulus
  double eps = 0.1;         // Bernoulli parameter
  std::uint64_t seed = 0;   // Bernoulli field seed
  int value(const std::vector<int>& p, int d) const;
  std::string describe() const;
};

struct ExplosionVerdict {
  bool reached_boundary = false;
  std::int64_t topplings = 0;
  int toppled_radius = 0;  // largest sup-norm of a toppled site
  int max_radius = 0;
  std::string verdict;
  std::string caveat;
};

ExplosionVerdict explosion_probe(const Background& bg, std::int64_t n_chips, int max_radius, int d = 2);

struct MassLaw {
  std::vector<int> values;
  std::vector<double> probs;
  double mean() const;
  std::string describe() const;
};

struct ProbePoint {
  int L = 0;
  std::int64_t odometer_at_origin = 0;
  std::int64_t topplings = 0;
};

// d = 1 only: i.i.d. heights on [-L, L] with absorbing ends, nested boxes
// sharing one sample.
std::vector<ProbePoint> stabilizability_probe(int d, const MassLaw& law, const std::vector<int>& sizes,
                                              std::uint64_t seed);
// "bounded", "diverging" or "inconclusive"
std::string classify_trace(const std::vector<ProbePoint>& trace);

struct DissipativeCheck {
  int gamma = 0;
  int n = 0;
  std::vector<DharRow> rows;
  double green_origin = 0;
  double max_abs_z = 0;
};

DissipativeCheck dissipative_green_check(int gamma, int d, int n, std::int64_t samples, std::uint64_t seed);
// Mean avalanche size from the origin on Box(n) for each gamma.
std::vector<std::pair<int, double>> dissipative_mean_size(const std::vector<int>& gammas, int n, int d,
                                                          std::int64_t samples, std::uint64_t seed);

}  // namespace sandlab
