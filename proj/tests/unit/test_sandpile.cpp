#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "sandlab/algebra.hpp"
#include "sandlab/errors.hpp"
#include "sandlab/sandpile.hpp"
#include "sandlab/treewalk.hpp"

using namespace sandlab;

namespace {

SinkedMultigraph path2() { return wired_box(GridSpec{1, {1}, {2}, 0}); }

// Topple a uniformly chosen unstable vertex until stable.
Stabilization random_order(const SinkedMultigraph& g, Sandpile h, Rng& rng) {
  Odometer odo(g.size(), 0);
  for (;;) {
    std::vector<int> unstable;
    for (int x = 0; x < g.size(); ++x)
      if (h[x] >= g.degree(x)) unstable.push_back(x);
    if (unstable.empty()) break;
    const int x = unstable[uniform_below(rng, std::uint32_t(unstable.size()))];
    h = topple(g, h, x);
    ++odo[x];
  }
  return {h, odo};
}

// Every maximal toppling sequence from h, exhaustively; returns the set of outcomes.
void explore(const SinkedMultigraph& g, const Sandpile& h, Odometer odo,
             std::set<std::pair<Sandpile, Odometer>>& outcomes) {
  bool any = false;
  for (int x = 0; x < g.size(); ++x)
    if (h[x] >= g.degree(x)) {
      any = true;
      Odometer o2 = odo;
      ++o2[x];
      explore(g, topple(g, h, x), o2, outcomes);
    }
  if (!any) outcomes.insert({h, odo});
}

}  // namespace

TEST_SUITE("sandpile") {

TEST_CASE("topple examples") {
  auto one = wired_box(0, 2);
  CHECK(topple(one, {4}, 0) == Sandpile{0});
  auto p = path2();
  CHECK(topple(p, {2, 1}, 0) == Sandpile{0, 2});
  CHECK_THROWS_AS(topple(p, {1, 1}, 0), PreconditionError);
}

TEST_CASE("stabilize examples") {
  auto one = wired_box(0, 2);
  auto s = stabilize(one, {3});
  CHECK(s.result == Sandpile{3});
  CHECK(s.odometer == Odometer{0});
  s = stabilize(one, {7});
  CHECK(s.result == Sandpile{3});
  CHECK(s.odometer == Odometer{1});
}

TEST_CASE("1D (2,2): every toppling order gives the same outcome") {
  auto g = path2();
  std::set<std::pair<Sandpile, Odometer>> outcomes;
  explore(g, {2, 2}, {0, 0}, outcomes);
  REQUIRE(outcomes.size() == 1);
  auto s = stabilize(g, {2, 2});
  CHECK(outcomes.begin()->first == s.result);
  CHECK(outcomes.begin()->second == s.odometer);
  Rng rng = make_rng(1);
  for (int t = 0; t < 100; ++t) {
    auto r = random_order(g, {2, 2}, rng);
    CHECK(r.result == s.result);
    CHECK(r.odometer == s.odometer);
  }
}

TEST_CASE("abelian property on random graphs") {
  Rng rng = make_rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = oracle::random_multigraph(rng, 5 + trial, 2, 0.3);
    Sandpile xi(g.size());
    for (auto& v : xi) v = uniform_below(rng, 12);
    auto s = stabilize(g, xi);
    for (int k = 0; k < 100; ++k) {
      auto r = random_order(g, xi, rng);
      REQUIRE(r.result == s.result);
      REQUIRE(r.odometer == s.odometer);
    }
  }
}

TEST_CASE("stable input is returned with zero odometer") {
  auto g = wired_box(2, 2);
  auto m = max_stable(g);
  auto s = stabilize(g, m);
  CHECK(s.result == m);
  for (auto v : s.odometer) CHECK(v == 0);
}

TEST_CASE("mass accounting") {
  Rng rng = make_rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = oracle::random_multigraph(rng, 8, 3);
    Sandpile xi(g.size());
    for (auto& v : xi) v = uniform_below(rng, 20);
    auto s = stabilize(g, xi);
    std::int64_t lost = 0;
    for (int x = 0; x < g.size(); ++x) lost += s.odometer[x] * g.sink_edges(x);
    CHECK(mass(xi) == mass(s.result) + lost);
  }
}

TEST_CASE("add examples") {
  auto one = wired_box(0, 2);
  auto r = add(one, {3}, 0);
  CHECK(r.state == Sandpile{0});
  CHECK(r.report.size == 1);
  CHECK(r.report.toppled == std::vector<int>{0});

  auto p = path2();
  r = add(p, {1, 1}, 0);
  CHECK(r.state == Sandpile{1, 0});
  CHECK(r.report.size == 2);
  CHECK_THROWS_AS(add(p, {2, 0}, 0), PreconditionError);
}

TEST_CASE("addition operators commute, exhaustively on small graphs") {
  Rng rng = make_rng(77);
  std::vector<SinkedMultigraph> graphs{path2(), wired_box(1, 2)};
  for (int i = 0; i < 4; ++i) graphs.push_back(oracle::random_multigraph(rng, 3 + i, 2));
  for (const auto& g : graphs) {
    const auto states = oracle::all_stable(g);
    const bool all = states.size() <= 3000;
    for (std::size_t k = 0; k < states.size(); k += all ? 1 : 97) {
      const auto& eta = states[k];
      for (int x = 0; x < g.size(); ++x)
        for (int y = 0; y < g.size(); ++y) {
          auto a = add(g, add(g, eta, y).state, x).state;
          auto b = add(g, add(g, eta, x).state, y).state;
          REQUIRE(a == b);
        }
    }
  }
}

TEST_CASE("max stable plus one at the origin of Box(4) topples everywhere") {
  auto g = wired_box(4, 2);
  auto r = add(g, max_stable(g), g.origin());
  CHECK(r.report.toppled.size() == 81);
}

TEST_CASE("avalanche report invariants") {
  auto g = wired_box(4, 2);
  Rng rng = make_rng(4);
  for (int t = 0; t < 50; ++t) {
    auto eta = sample_recurrent(g, rng);
    const int x = int(uniform_below(rng, std::uint32_t(g.size())));
    auto r = add(g, eta, x);
    std::int64_t s = 0;
    std::vector<int> support;
    for (int v = 0; v < g.size(); ++v) {
      s += r.report.odometer[v];
      if (r.report.odometer[v] > 0) support.push_back(v);
    }
    CHECK(s == r.report.size);
    CHECK(support == r.report.toppled);
    // the oracle relaxation reproduces the state and the odometer
    Sandpile h = eta;
    h[x] += 1;
    oracle::Config odo(g.size(), 0);
    oracle::relax(g, h, &odo);
    CHECK(h == r.state);
    CHECK(odo == r.report.odometer);
  }
}

TEST_CASE("waves") {
  auto one = wired_box(0, 2);
  auto w = wave_decompose(one, {3}, 0);
  REQUIRE(w.report.waves.size() == 1);
  CHECK(w.report.waves[0] == std::vector<int>{0});

  auto p = path2();
  w = wave_decompose(p, {1, 1}, 0);
  REQUIRE(w.report.waves.size() == 1);
  CHECK(w.report.waves[0] == std::vector<int>{0, 1});

  w = wave_decompose(p, {0, 0}, 0);
  CHECK(w.report.waves.empty());

  auto g = wired_box(4, 2);
  Rng rng = make_rng(12);
  for (int t = 0; t < 100; ++t) {
    auto eta = sample_recurrent(g, rng);
    const int x = g.origin();
    auto full = add(g, eta, x);
    auto wr = wave_decompose(g, eta, x);
    CHECK(wr.state == full.state);
    CHECK(std::int64_t(wr.report.waves.size()) == full.report.odometer[x]);
    Odometer sum(g.size(), 0);
    for (const auto& wave : wr.report.waves) {
      std::set<int> seen(wave.begin(), wave.end());
      CHECK(seen.size() == wave.size());
      for (int v : wave) ++sum[v];
    }
    CHECK(sum == full.report.odometer);
  }
}

TEST_CASE("Markov chain on a single vertex visits 0..3 equally") {
  auto one = wired_box(0, 2);
  auto m = markov_run(one, {}, 100000, 5);
  REQUIRE(m.visits.size() == 4);
  for (const auto& [s, c] : m.visits) {
    const double f = double(c) / 1e5;
    CHECK(std::abs(f - 0.25) < 3 * std::sqrt(0.25 * 0.75 / 1e5));
  }
}

TEST_CASE("Markov chain on the 1D pair") {
  auto p = path2();
  auto m = markov_run(p, {}, 100000, 6);
  CHECK(m.visits.count(Sandpile{0, 0}) == 0);
  for (const Sandpile& s : {Sandpile{0, 1}, Sandpile{1, 0}, Sandpile{1, 1}}) {
    const double f = double(m.visits[s]) / 1e5;
    // successive states are correlated; 3 sigma of an i.i.d. sample is still generous here
    CHECK(std::abs(f - 1.0 / 3) < 3 * std::sqrt(2.0 / 9 / 1e5) + 5e-3);
  }
}

TEST_CASE("Markov chain edge cases") {
  auto p = path2();
  auto m = markov_run(p, {}, 0, 1);
  CHECK(m.final_state == max_stable(p));
  CHECK(m.visits.empty());
  CHECK_THROWS_AS(markov_run(p, {0.7, 0.7}, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(markov_run(p, {-0.5, 1.5}, 10, 1), InvalidArgument);
  auto w = markov_run(p, {1.0, 0.0}, 10, 1);
  CHECK(!w.warnings.empty());
  // same seed, same trajectory
  auto a = markov_run(wired_box(3, 2), {}, 500, 9);
  auto b = markov_run(wired_box(3, 2), {}, 500, 9);
  CHECK(a.final_state == b.final_state);
  CHECK(a.mean_size == b.mean_size);
}

TEST_CASE("Dhar's formula on tiny graphs, exactly by enumeration") {
  // single vertex: only height 3 topples, once
  auto one = wired_box(0, 2);
  double mean = 0;
  for (const auto& eta : oracle::recurrents(one)) mean += double(add(one, eta, 0).report.odometer[0]);
  CHECK(mean / 4 == doctest::Approx(0.25));
  auto p = path2();
  mean = 0;
  auto rec = oracle::recurrents(p);
  REQUIRE(rec.size() == 3);
  for (const auto& eta : rec) mean += double(add(p, eta, 0).report.odometer[0]);
  CHECK(mean / 3 == doctest::Approx(2.0 / 3));
  // and over the full enumeration of a 3x3 box, against the Green function
  auto g = wired_box(1, 2);
  auto all = oracle::recurrents(g);
  std::vector<double> sum(g.size(), 0);
  for (const auto& eta : all) {
    auto r = add(g, eta, g.origin());
    for (int y = 0; y < g.size(); ++y) sum[y] += double(r.report.odometer[y]);
  }
  auto ge = green_exact(g);
  for (int y = 0; y < g.size(); ++y) CHECK(sum[y] / double(all.size()) == doctest::Approx(double(ge[g.origin()][y])).epsilon(1e-12));
}

TEST_CASE("dhar_formula_check z-scores on Box(4)") {
  auto g = wired_box(4, 2);
  auto rows = dhar_formula_check(g, g.origin(), 100000, 17);
  REQUIRE(int(rows.size()) == g.size());
  for (const auto& r : rows) CHECK(std::abs(r.z) < 4);
}

TEST_CASE("avalanche statistics") {
  CHECK(avalanche_statistics({8}, 0, 1).empty());
  auto a = avalanche_statistics({16}, 2000, 3);
  auto b = avalanche_statistics({16}, 2000, 3);
  CHECK(avalanche_statistics_csv(a) == avalanche_statistics_csv(b));
  REQUIRE(a.size() == 1);
  CHECK(a[0].size_q50 <= a[0].size_q90);
  CHECK(a[0].size_q90 <= a[0].size_q99);
  CHECK(a[0].size_q99 <= a[0].size_max);
  // E[S] equals the sum of Green values at the origin
  GreenSolver gs(wired_box(16, 2));
  const double exact = gs.column(wired_box(16, 2).origin()).sum();
  CHECK(a[0].mean_size > 0.5 * exact);
  CHECK(a[0].mean_size < 1.5 * exact);
}

TEST_CASE("least action") {
  auto one = wired_box(0, 2);
  CHECK(least_action_check(one, {7}));
  CHECK(least_action_check(one, {2}));
  auto p = path2();
  CHECK(least_action_check(p, {2, 2}));
  // oracle: enumerate every u in [0,3]^2 with xi - u L stable and nonnegative
  auto lap = reduced_laplacian(p);
  auto legal = stabilize(p, {2, 2});
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b) {
      std::int64_t r0 = 2 - a * lap(0, 0) - b * lap(1, 0);
      std::int64_t r1 = 2 - a * lap(0, 1) - b * lap(1, 1);
      if (r0 >= 0 && r0 < 2 && r1 >= 0 && r1 < 2) {
        CHECK(a >= legal.odometer[0]);
        CHECK(b >= legal.odometer[1]);
      }
    }
  CHECK_THROWS_AS(least_action_check(wired_box(1, 2), Sandpile(9, 100)), SizeError);
}

}
