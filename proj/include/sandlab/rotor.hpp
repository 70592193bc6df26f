#pragma once

#include <cstdint>
#include <vector>

#include "sandlab/graph.hpp"
#include "sandlab/sandpile.hpp"

namespace sandlab {

// rotor[x] is a slot index of x (see SinkedMultigraph::slots); the cyclic
// order is the slot order.
using RotorConfig = std::vector<int>;

struct RotorStep {
  RotorConfig rotors;
  int position;
};

RotorStep rotor_step(const SinkedMultigraph& g, RotorConfig rho, int w);

// Routes every chip to the sink. Chips may be given as any nonnegative vector.
RotorConfig chip_stabilize(const SinkedMultigraph& g, RotorConfig rho, const Sandpile& chips);

bool is_acyclic(const SinkedMultigraph& g, const RotorConfig& rho);

// Action of the class of eta; eta may have negative entries, in which case a
// multiple of the zero-class vector epsilon is added first.
RotorConfig group_action(const SinkedMultigraph& g, const Sandpile& eta, const RotorConfig& rho);

enum class RotorInit { Constant, Random };

struct Aggregate {
  int dim = 2;
  int window = 0;                          // final half-width of the simulated box
  std::vector<std::vector<int>> occupied;  // coordinates, sorted
  std::int64_t steps = 0;
};

// n chips released from the origin of Z^d; each walks by rotor-router until
// it finds an empty site. Rotors follow the neighbour order -e_1, ..., -e_d,
// +e_d, ..., +e_1.
Aggregate rotor_aggregate(std::int64_t n, int d = 2, RotorInit init = RotorInit::Constant, std::uint64_t seed = 0);

}  // namespace sandlab
