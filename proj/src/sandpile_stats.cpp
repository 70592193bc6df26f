#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "sandlab/errors.hpp"
#include "sandlab/parallel.hpp"
#include "sandlab/sandpile.hpp"
#include "sandlab/treewalk.hpp"

namespace sandlab {

MarkovSummary markov_run(const SinkedMultigraph& g, std::vector<double> p, std::int64_t steps, std::uint64_t seed,
                         const Sandpile* initial) {
  const int n = g.size();
  if (steps < 0) throw InvalidArgument("step count must be nonnegative");
  MarkovSummary out;
  if (p.empty()) p.assign(n, 1.0 / n);
  if (int(p.size()) != n) throw InvalidArgument("distribution has the wrong length");
  double total = 0;
  bool has_zero = false;
  for (double v : p) {
    if (!(v >= 0) || !std::isfinite(v)) throw InvalidArgument("distribution entries must be nonnegative");
    if (v == 0) has_zero = true;
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("distribution does not sum to one");
  if (has_zero)
    out.warnings.push_back("p vanishes somewhere; uniform stationarity needs the support to generate the group");

  Sandpile eta = initial ? *initial : max_stable(g);
  if (!is_stable(g, eta)) throw PreconditionError("initial state must be stable");
  Rng rng = make_rng(seed);
  std::discrete_distribution<int> pick(p.begin(), p.end());
  const bool track = n <= 12;
  double size_sum = 0, toppled_sum = 0;
  Odometer odo(n, 0);
  std::vector<int> toppled;
  for (std::int64_t t = 0; t < steps; ++t) {
    const int x = pick(rng);
    eta[x] += 1;
    toppled.clear();
    stabilize_in_place(g, eta, odo, &toppled);
    for (int v : toppled) {
      size_sum += double(odo[v]);
      odo[v] = 0;
    }
    toppled_sum += double(toppled.size());
    if (track) ++out.visits[eta];
  }
  out.final_state = eta;
  out.steps = steps;
  if (steps > 0) {
    out.mean_size = size_sum / double(steps);
    out.mean_toppled = toppled_sum / double(steps);
  }
  return out;
}

std::vector<DharRow> dhar_formula_check(const SinkedMultigraph& g, int x, std::int64_t samples,
                                        std::uint64_t seed) {
  const int n = g.size();
  if (x < 0 || x >= n) throw InvalidArgument("vertex out of range");
  if (samples < 1) throw InvalidArgument("need at least one sample");
  constexpr std::int64_t chunk = 2000;
  const int replicas = int((samples + chunk - 1) / chunk);
  std::vector<std::vector<std::int64_t>> s1(replicas), s2(replicas);
  for_each_replica(replicas, [&](int r) {
    Rng rng = make_rng(seed, std::uint64_t(r));
    s1[r].assign(n, 0);
    s2[r].assign(n, 0);
    const std::int64_t m = std::min(chunk, samples - r * chunk);
    Odometer odo(n, 0);
    std::vector<int> toppled;
    for (std::int64_t i = 0; i < m; ++i) {
      Sandpile eta = sample_recurrent(g, rng);
      eta[x] += 1;
      toppled.clear();
      stabilize_in_place(g, eta, odo, &toppled);
      for (int v : toppled) {
        s1[r][v] += odo[v];
        s2[r][v] += odo[v] * odo[v];
        odo[v] = 0;
      }
    }
  });
  GreenSolver solver(g);
  Eigen::VectorXd col = solver.column(x);
  std::vector<DharRow> rows;
  for (int y = 0; y < n; ++y) {
    double a = 0, b = 0;
    for (int r = 0; r < replicas; ++r) {
      a += double(s1[r][y]);
      b += double(s2[r][y]);
    }
    DharRow row;
    row.y = y;
    row.mean = a / double(samples);
    row.exact = col[y];
    const double var = samples > 1 ? (b - a * a / double(samples)) / double(samples - 1) : 0.0;
    row.std_error = std::sqrt(std::max(0.0, var) / double(samples));
    const double diff = row.mean - row.exact;
    if (row.std_error > 0)
      row.z = diff / row.std_error;
    else
      row.z = std::abs(diff) < 1e-12 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    rows.push_back(row);
  }
  return rows;
}

std::vector<AvalancheStatsRow> avalanche_statistics(const std::vector<int>& n_list, std::int64_t samples,
                                                    std::uint64_t seed, int d) {
  std::vector<AvalancheStatsRow> rows;
  if (samples <= 0) return rows;
  constexpr std::int64_t chunk = 500;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const int nbox = n_list[ni];
    const SinkedMultigraph g = wired_box(nbox, d);
    const int o = g.origin();
    const int replicas = int((samples + chunk - 1) / chunk);
    std::vector<std::vector<std::int64_t>> sizes(replicas);
    std::vector<double> toppled_sum(replicas, 0), radius_sum(replicas, 0);
    const std::uint64_t base = stream_seed(seed, 0x5a0000u + ni);
    for_each_replica(replicas, [&](int r) {
      Rng rng = make_rng(base, std::uint64_t(r));
      const std::int64_t m = std::min(chunk, samples - r * chunk);
      Odometer odo(g.size(), 0);
      std::vector<int> toppled;
      for (std::int64_t i = 0; i < m; ++i) {
        Sandpile eta = sample_recurrent(g, rng);
        eta[o] += 1;
        toppled.clear();
        stabilize_in_place(g, eta, odo, &toppled);
        std::int64_t s = 0;
        for (int v : toppled) s += odo[v];
        sizes[r].push_back(s);
        toppled_sum[r] += double(toppled.size());
        radius_sum[r] += avalanche_radius(g, o, toppled);
        for (int v : toppled) odo[v] = 0;
      }
    });
    AvalancheStatsRow row;
    row.n = nbox;
    row.samples = samples;
    std::vector<std::int64_t> all;
    double s1 = 0, s2 = 0, tsum = 0, rsum = 0;
    for (int r = 0; r < replicas; ++r) {
      for (auto s : sizes[r]) {
        all.push_back(s);
        s1 += double(s);
        s2 += double(s) * double(s);
      }
      tsum += toppled_sum[r];
      rsum += radius_sum[r];
    }
    const double ns = double(samples);
    row.mean_size = s1 / ns;
    row.second_moment_size = s2 / ns;
    row.mean_toppled = tsum / ns;
    row.mean_radius = rsum / ns;
    std::sort(all.begin(), all.end());
    auto q = [&](double f) {
      std::size_t k = std::size_t(std::ceil(f * double(all.size())));
      return all[std::min(all.size() - 1, k == 0 ? 0 : k - 1)];
    };
    row.size_q50 = q(0.5);
    row.size_q90 = q(0.9);
    row.size_q99 = q(0.99);
    row.size_max = all.back();
    rows.push_back(row);
  }
  return rows;
}

std::string avalanche_statistics_csv(const std::vector<AvalancheStatsRow>& rows) {
  std::ostringstream os;
  os << "n,samples,mean_size,second_moment_size,mean_toppled,mean_radius,size_q50,size_q90,size_q99,size_max\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%lld,%.10g,%.10g,%.10g,%.10g,%lld,%lld,%lld,%lld\n", r.n,
                  static_cast<long long>(r.samples), r.mean_size, r.second_moment_size, r.mean_toppled, r.mean_radius,
                  static_cast<long long>(r.size_q50), static_cast<long long>(r.size_q90),
                  static_cast<long long>(r.size_q99), static_cast<long long>(r.size_max));
    os << buf;
  }
  return os.str();
}

}  // namespace sandlab
