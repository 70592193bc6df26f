#include "sandlab/sandpile.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "sandlab/errors.hpp"

namespace sandlab {

namespace {

void check_size(const SinkedMultigraph& g, const Sandpile& eta) {
  if (int(eta.size()) != g.size()) throw InvalidArgument("sandpile size does not match graph");
}

// Round-based sweep. The frozen vertex, if any, is never toppled.
void sweep(const SinkedMultigraph& g, Sandpile& h, Odometer& odo, int frozen, std::vector<int>* toppled) {
  const int n = g.size();
  std::vector<int> cur, next;
  std::vector<std::int64_t> k;
  std::vector<char> queued(n, 0);
  for (int x = 0; x < n; ++x)
    if (x != frozen && h[x] >= g.degree(x)) {
      cur.push_back(x);
      queued[x] = 1;
    }
  while (!cur.empty()) {
    k.resize(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) k[i] = h[cur[i]] / g.degree(cur[i]);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const int x = cur[i];
      queued[x] = 0;
      h[x] -= k[i] * g.degree(x);
      if (odo[x] == 0 && toppled) toppled->push_back(x);
      odo[x] += k[i];
      if (odo[x] > (std::int64_t(1) << 61)) throw InvariantViolation("odometer overflow");
      for (const auto& nb : g.neighbors(x))
        if (nb.v < n) h[nb.v] += k[i] * nb.mult;
    }
    next.clear();
    auto consider = [&](int v) {
      if (v < n && v != frozen && !queued[v] && h[v] >= g.degree(v)) {
        queued[v] = 1;
        next.push_back(v);
      }
    };
    for (int x : cur) {
      consider(x);
      for (const auto& nb : g.neighbors(x)) consider(nb.v);
    }
    std::sort(next.begin(), next.end());
    cur.swap(next);
  }
}

}  // namespace

bool is_stable(const SinkedMultigraph& g, const Sandpile& eta) {
  check_size(g, eta);
  for (int x = 0; x < g.size(); ++x)
    if (eta[x] >= g.degree(x)) return false;
  return true;
}

Sandpile max_stable(const SinkedMultigraph& g) {
  Sandpile m(g.size());
  for (int x = 0; x < g.size(); ++x) m[x] = g.degree(x) - 1;
  return m;
}

std::int64_t mass(const Sandpile& eta) { return std::accumulate(eta.begin(), eta.end(), std::int64_t(0)); }

Sandpile topple(const SinkedMultigraph& g, const Sandpile& eta, int x) {
  check_size(g, eta);
  if (x < 0 || x >= g.size()) throw InvalidArgument("vertex out of range");
  if (eta[x] < g.degree(x)) throw PreconditionError("illegal toppling at vertex " + std::to_string(x));
  Sandpile out = eta;
  out[x] -= g.degree(x);
  for (const auto& nb : g.neighbors(x))
    if (nb.v < g.size()) out[nb.v] += nb.mult;
  return out;
}

void stabilize_in_place(const SinkedMultigraph& g, Sandpile& h, Odometer& odo, std::vector<int>* toppled) {
  check_size(g, h);
  if (odo.size() != h.size()) odo.assign(h.size(), 0);
  sweep(g, h, odo, -1, toppled);
}

Stabilization stabilize(const SinkedMultigraph& g, Sandpile xi) {
  Stabilization s;
  s.odometer.assign(xi.size(), 0);
  stabilize_in_place(g, xi, s.odometer);
  s.result = std::move(xi);
  return s;
}

double avalanche_radius(const SinkedMultigraph& g, int z, const std::vector<int>& toppled) {
  if (toppled.empty()) return 0;
  if (g.has_coords()) {
    auto cz = g.coord(z);
    double best = 0;
    for (int v : toppled) {
      auto cv = g.coord(v);
      double s = 0;
      for (int i = 0; i < g.dim(); ++i) s += double(cv[i] - cz[i]) * double(cv[i] - cz[i]);
      best = std::max(best, s);
    }
    return std::sqrt(best);
  }
  std::vector<int> dist(g.size() + 1, -1);
  std::deque<int> q{z};
  dist[z] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (const auto& nb : g.neighbors(v))
      if (nb.v < g.size() && dist[nb.v] < 0) {
        dist[nb.v] = dist[v] + 1;
        q.push_back(nb.v);
      }
  }
  int best = 0;
  for (int v : toppled) best = std::max(best, dist[v]);
  return best;
}

static void finish_report(const SinkedMultigraph& g, int x, AvalancheReport& r) {
  std::sort(r.toppled.begin(), r.toppled.end());
  r.size = std::accumulate(r.odometer.begin(), r.odometer.end(), std::int64_t(0));
  r.radius = avalanche_radius(g, x, r.toppled);
}

AddResult add(const SinkedMultigraph& g, const Sandpile& eta, int x) {
  if (x < 0 || x >= g.size()) throw InvalidArgument("vertex out of range");
  if (!is_stable(g, eta)) throw PreconditionError("add requires a stable sandpile");
  AddResult out;
  out.state = eta;
  out.state[x] += 1;
  out.report.odometer.assign(eta.size(), 0);
  sweep(g, out.state, out.report.odometer, -1, &out.report.toppled);
  finish_report(g, x, out.report);
  return out;
}

AddResult wave_decompose(const SinkedMultigraph& g, const Sandpile& eta, int x) {
  if (x < 0 || x >= g.size()) throw InvalidArgument("vertex out of range");
  if (!is_stable(g, eta)) throw PreconditionError("wave decomposition requires a stable sandpile");
  const int n = g.size();
  AddResult out;
  Sandpile& h = out.state;
  h = eta;
  h[x] += 1;
  auto& rep = out.report;
  rep.odometer.assign(n, 0);
  Odometer wave_odo(n, 0);
  std::vector<int> wave;
  while (h[x] >= g.degree(x)) {
    std::fill(wave_odo.begin(), wave_odo.end(), 0);
    wave.clear();
    h[x] -= g.degree(x);
    wave_odo[x] = 1;
    wave.push_back(x);
    for (const auto& nb : g.neighbors(x))
      if (nb.v < n) h[nb.v] += nb.mult;
    sweep(g, h, wave_odo, x, &wave);
    for (int v : wave) {
      if (wave_odo[v] != 1) throw InvariantViolation("vertex toppled twice within a wave");
      if (rep.odometer[v] == 0) rep.toppled.push_back(v);
      rep.odometer[v] += 1;
    }
    std::sort(wave.begin(), wave.end());
    rep.waves.push_back(wave);
  }
  finish_report(g, x, rep);
  return out;
}

bool least_action_check(const SinkedMultigraph& g, const Sandpile& xi, std::int64_t max_candidates) {
  check_size(g, xi);
  const int n = g.size();
  if (n > 8) throw SizeError("least action search limited to 8 vertices");
  for (auto v : xi)
    if (v < 0) throw InvalidArgument("configuration must be nonnegative");
  Stabilization legal = stabilize(g, xi);
  const std::int64_t bound = *std::max_element(legal.odometer.begin(), legal.odometer.end()) + 2;
  double space = std::pow(double(bound + 1), n);
  if (space > double(max_candidates)) throw SizeError("least action search space too large");

  auto lap = reduced_laplacian(g);
  std::vector<std::int64_t> u(n, 0);
  for (;;) {
    bool admissible = true;
    for (int x = 0; x < n && admissible; ++x) {
      std::int64_t v = xi[x];
      for (int y = 0; y < n; ++y) v -= u[y] * lap(y, x);
      if (v < 0 || v >= g.degree(x)) admissible = false;
    }
    if (admissible)
      for (int x = 0; x < n; ++x)
        if (u[x] < legal.odometer[x]) return false;
    int i = 0;
    while (i < n && u[i] == bound) u[i++] = 0;
    if (i == n) break;
    ++u[i];
  }
  return true;
}

}  // namespace sandlab
