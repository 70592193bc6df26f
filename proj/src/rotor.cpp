#include "sandlab/rotor.hpp"

#include <algorithm>
#include <cmath>

#include "sandlab/algebra.hpp"
#include "sandlab/errors.hpp"
#include "sandlab/rng.hpp"

namespace sandlab {

static void check_rotors(const SinkedMultigraph& g, const RotorConfig& rho) {
  if (int(rho.size()) != g.size()) throw InvalidArgument("rotor configuration has the wrong size");
  for (int x = 0; x < g.size(); ++x)
    if (rho[x] < 0 || rho[x] >= g.degree(x)) throw InvalidArgument("rotor slot out of range");
}

RotorStep rotor_step(const SinkedMultigraph& g, RotorConfig rho, int w) {
  check_rotors(g, rho);
  if (w == g.sink()) throw InvalidArgument("chips stop at the sink");
  if (w < 0 || w >= g.size()) throw InvalidArgument("vertex out of range");
  rho[w] = (rho[w] + 1) % g.degree(w);
  const int next = g.slot_target(w, rho[w]);
  return {std::move(rho), next};
}

RotorConfig chip_stabilize(const SinkedMultigraph& g, RotorConfig rho, const Sandpile& chips) {
  check_rotors(g, rho);
  const int n = g.size();
  if (int(chips.size()) != n) throw InvalidArgument("chip vector has the wrong size");
  Sandpile c = chips;
  std::vector<int> active;
  std::vector<char> queued(n, 0);
  for (int x = 0; x < n; ++x) {
    if (c[x] < 0) throw InvalidArgument("chip counts must be nonnegative");
    if (c[x] > 0) {
      active.push_back(x);
      queued[x] = 1;
    }
  }
  while (!active.empty()) {
    const int x = active.back();
    active.pop_back();
    queued[x] = 0;
    const std::int64_t k = c[x];
    c[x] = 0;
    const int deg = g.degree(x);
    // full turns leave the rotor where it was
    const std::int64_t full = k / deg;
    if (full > 0)
      for (const auto& nb : g.neighbors(x))
        if (nb.v < n) c[nb.v] += full * nb.mult;
    for (std::int64_t i = 0; i < k % deg; ++i) {
      rho[x] = (rho[x] + 1) % deg;
      const int y = g.slot_target(x, rho[x]);
      if (y < n) c[y] += 1;
    }
    auto wake = [&](int y) {
      if (y < n && c[y] > 0 && !queued[y]) {
        queued[y] = 1;
        active.push_back(y);
      }
    };
    for (const auto& nb : g.neighbors(x)) wake(nb.v);
  }
  return rho;
}

bool is_acyclic(const SinkedMultigraph& g, const RotorConfig& rho) {
  check_rotors(g, rho);
  const int n = g.size();
  std::vector<char> state(n + 1, 0);  // 1 on current path, 2 reaches the sink
  state[n] = 2;
  std::vector<int> path;
  for (int s = 0; s < n; ++s) {
    int v = s;
    path.clear();
    while (state[v] == 0) {
      state[v] = 1;
      path.push_back(v);
      v = g.slot_target(v, rho[v]);
    }
    if (state[v] == 1) return false;
    for (int p : path) state[p] = 2;
  }
  return true;
}

RotorConfig group_action(const SinkedMultigraph& g, const Sandpile& eta, const RotorConfig& rho) {
  if (!is_acyclic(g, rho)) throw PreconditionError("group action needs an acyclic rotor configuration");
  if (int(eta.size()) != g.size()) throw InvalidArgument("chip vector has the wrong size");
  Sandpile chips = eta;
  if (std::any_of(chips.begin(), chips.end(), [](std::int64_t v) { return v < 0; })) {
    const Sandpile eps = epsilon_config(g);
    std::int64_t k = 0;
    for (int x = 0; x < g.size(); ++x)
      if (chips[x] < 0) k = std::max(k, (-chips[x] + eps[x] - 1) / eps[x]);
    for (int x = 0; x < g.size(); ++x) chips[x] += k * eps[x];
  }
  return chip_stabilize(g, rho, chips);
}

namespace {

struct Window {
  int d = 2;
  int r = 0;
  int side = 0;
  std::vector<std::int8_t> rotor;
  std::vector<char> occupied;

  std::size_t index(const std::vector<int>& p) const {
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * side + std::size_t(p[i] + r);
    return idx;
  }
  bool inside(const std::vector<int>& p) const {
    for (int v : p)
      if (v < -r || v > r) return false;
    return true;
  }
};

int initial_rotor(RotorInit init, std::uint64_t seed, const std::vector<int>& p, int dirs) {
  if (init == RotorInit::Constant) return 0;
  std::uint64_t h = splitmix64(seed);
  for (int v : p) h = splitmix64(h ^ std::uint64_t(std::int64_t(v)));
  return int(h % std::uint64_t(dirs));
}

void fill_window(Window& w, RotorInit init, std::uint64_t seed, const Window* old) {
  const std::size_t total = [&] {
    std::size_t t = 1;
    for (int i = 0; i < w.d; ++i) t *= std::size_t(w.side);
    return t;
  }();
  w.rotor.assign(total, 0);
  w.occupied.assign(total, 0);
  std::vector<int> p(w.d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int i = w.d - 1; i >= 0; --i) {
      p[i] = int(rem % std::size_t(w.side)) - w.r;
      rem /= std::size_t(w.side);
    }
    if (old && old->inside(p)) {
      const std::size_t o = old->index(p);
      w.rotor[idx] = old->rotor[o];
      w.occupied[idx] = old->occupied[o];
    } else {
      w.rotor[idx] = std::int8_t(initial_rotor(init, seed, p, 2 * w.d));
    }
  }
}

}  // namespace

Aggregate rotor_aggregate(std::int64_t n, int d, RotorInit init, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("need at least one chip");
  if (d < 1 || d > 4) throw InvalidArgument("dimension must be between 1 and 4");
  const double omega = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  Window w;
  w.d = d;
  w.r = std::max(1, int(std::ceil(2.0 * std::pow(double(n) / omega, 1.0 / d))));
  w.side = 2 * w.r + 1;
  fill_window(w, init, seed, nullptr);

  const int dirs = 2 * d;
  Aggregate out;
  out.dim = d;
  std::vector<int> p(d);
  for (std::int64_t chip = 0; chip < n; ++chip) {
    std::fill(p.begin(), p.end(), 0);
    std::size_t idx = w.index(p);
    while (w.occupied[idx]) {
      int r = (w.rotor[idx] + 1) % dirs;
      w.rotor[idx] = std::int8_t(r);
      if (r < d)
        --p[r];
      else
        ++p[dirs - 1 - r];
      ++out.steps;
      if (!w.inside(p)) {
        Window bigger;
        bigger.d = d;
        bigger.r = 2 * w.r;
        bigger.side = 2 * bigger.r + 1;
        fill_window(bigger, init, seed, &w);
        w = std::move(bigger);
      }
      idx = w.index(p);
    }
    w.occupied[idx] = 1;
    out.occupied.push_back(p);
  }
  std::sort(out.occupied.begin(), out.occupied.end());
  out.window = w.r;
  return out;
}

}  // namespace sandlab
