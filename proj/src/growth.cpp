#include "sandlab/growth.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <sstream>

#include "sandlab/errors.hpp"
#include "sandlab/parallel.hpp"
#include "sandlab/rng.hpp"
#include "sandlab/treewalk.hpp"

namespace sandlab {

std::size_t LatticeField::index(const std::vector<int>& p) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim; ++i) idx = idx * std::size_t(side()) + std::size_t(p[i] + window);
  return idx;
}

bool LatticeField::contains(const std::vector<int>& p) const {
  if (int(p.size()) != dim) return false;
  for (int v : p)
    if (v < -window || v > window) return false;
  return true;
}

std::vector<int> LatticeField::point(std::size_t idx) const {
  std::vector<int> p(dim);
  for (int i = dim - 1; i >= 0; --i) {
    p[i] = int(idx % std::size_t(side())) - window;
    idx /= std::size_t(side());
  }
  return p;
}

std::size_t LatticeField::volume() const {
  std::size_t v = 1;
  for (int i = 0; i < dim; ++i) v *= std::size_t(side());
  return v;
}

namespace {

double unit_ball_volume(int d) { return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0); }

double norm(const std::vector<int>& p) {
  double s = 0;
  for (int v : p) s += double(v) * v;
  return std::sqrt(s);
}

int sup_norm(const std::vector<int>& p) {
  int s = 0;
  for (int v : p) s = std::max(s, std::abs(v));
  return s;
}

// Chip-firing on a cube whose outer layer never topples. Chips that land on
// the rim stay there, so every toppling performed is legal on Z^d.
class RimEngine {
 public:
  RimEngine(int d, int window) : f_{d, window} {
    const std::size_t vol = f_.volume();
    h_.assign(vol, 0);
    odo_.assign(vol, 0);
    queued_.assign(vol, 0);
    rim_.assign(vol, 0);
    stride_.assign(d, 1);
    for (int i = d - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * std::size_t(f_.side());
    for (std::size_t idx = 0; idx < vol; ++idx)
      if (sup_norm(f_.point(idx)) == window) rim_[idx] = 1;
  }

  const LatticeField& field() const { return f_; }
  std::vector<std::int64_t>& heights() { return h_; }
  std::vector<std::int64_t>& odometer() { return odo_; }
  std::int64_t topplings() const { return topplings_; }

  void seed_worklist() {
    for (std::size_t idx = 0; idx < h_.size(); ++idx) push(idx);
  }

  // Returns false when a rim site became unstable; with stop_early the
  // run ends right there.
  bool run(bool stop_early) {
    const std::int64_t thr = 2 * f_.dim;
    bool clean = true;
    while (!work_.empty()) {
      const std::size_t x = work_.back();
      work_.pop_back();
      queued_[x] = 0;
      const std::int64_t k = h_[x] / thr;
      if (k <= 0) continue;
      h_[x] -= k * thr;
      odo_[x] += k;
      topplings_ += k;
      for (int i = 0; i < f_.dim; ++i) {
        for (std::size_t y : {x - stride_[i], x + stride_[i]}) {
          h_[y] += k;
          if (h_[y] >= thr) {
            if (rim_[y]) {
              clean = false;
              if (stop_early) return false;
            } else {
              push(y);
            }
          }
        }
      }
    }
    return clean;
  }

  // Copy into a cube of twice the half-width; new sites get the background.
  RimEngine grown(std::int64_t background) const {
    RimEngine g(f_.dim, 2 * f_.window);
    std::fill(g.h_.begin(), g.h_.end(), background);
    for (std::size_t idx = 0; idx < h_.size(); ++idx) {
      const std::size_t j = g.f_.index(f_.point(idx));
      g.h_[j] = h_[idx];
      g.odo_[j] = odo_[idx];
    }
    g.topplings_ = topplings_;
    return g;
  }

 private:
  void push(std::size_t x) {
    if (!rim_[x] && !queued_[x] && h_[x] >= 2 * f_.dim) {
      queued_[x] = 1;
      work_.push_back(x);
    }
  }

  LatticeField f_;
  std::vector<std::int64_t> h_, odo_;
  std::vector<char> queued_, rim_;
  std::vector<std::size_t> stride_;
  std::vector<std::size_t> work_;
  std::int64_t topplings_ = 0;
};

}  // namespace

std::int64_t RelaxationResult::height_at(const std::vector<int>& p) const {
  return field.contains(p) ? height[field.index(p)] : background;
}

std::int64_t RelaxationResult::odometer_at(const std::vector<int>& p) const {
  return field.contains(p) ? odometer[field.index(p)] : 0;
}

double RelaxationResult::inner_radius() const {
  double best = field.window;
  for (std::size_t idx = 0; idx < visited.size(); ++idx)
    if (!visited[idx]) best = std::min(best, norm(field.point(idx)));
  return best;
}

int RelaxationResult::outer_sup_radius() const {
  int r = 0;
  for (std::size_t idx = 0; idx < visited.size(); ++idx)
    if (visited[idx]) r = std::max(r, sup_norm(field.point(idx)));
  return r;
}

double RelaxationResult::outer_radius() const {
  double r = 0;
  for (std::size_t idx = 0; idx < visited.size(); ++idx)
    if (visited[idx]) r = std::max(r, norm(field.point(idx)));
  return r;
}

RelaxationResult relax_point_mass(std::int64_t n, std::int64_t h, int d) {
  if (d < 1 || d > 4) throw InvalidArgument("dimension must be between 1 and 4");
  if (n < 1) throw InvalidArgument("need at least one particle");
  if (h > 2 * d - 2) throw InvalidArgument("background above 2d-2 is explosive");
  const double r = std::pow(double(n) / unit_ball_volume(d), 1.0 / d);
  const double cube = double(d + 1) / double(2 * d - 1 - h) * r;
  int window = std::max(2, int(std::ceil(cube)) + 2);
  RimEngine eng(d, window);
  std::fill(eng.heights().begin(), eng.heights().end(), h);
  eng.heights()[eng.field().index(std::vector<int>(d, 0))] += n;
  eng.seed_worklist();
  while (!eng.run(false)) {
    eng = eng.grown(h);
    eng.seed_worklist();
  }
  RelaxationResult out;
  out.field = eng.field();
  out.n = n;
  out.background = h;
  out.height = eng.heights();
  out.odometer = eng.odometer();
  out.topplings = eng.topplings();
  const std::size_t vol = out.field.volume();
  out.visited.assign(vol, 0);
  std::vector<std::size_t> stride(d, 1);
  for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * std::size_t(out.field.side());
  out.visited[out.field.index(std::vector<int>(d, 0))] = 1;
  for (std::size_t idx = 0; idx < vol; ++idx) {
    if (out.odometer[idx] == 0) continue;
    out.visited[idx] = 1;
    for (int i = 0; i < d; ++i) {
      out.visited[idx - stride[i]] = 1;
      out.visited[idx + stride[i]] = 1;
    }
  }
  out.visited_count = std::count(out.visited.begin(), out.visited.end(), 1);
  return out;
}

double DivisibleResult::inner_radius() const {
  double best = field.window;
  for (std::size_t idx = 0; idx < occupied.size(); ++idx)
    if (!occupied[idx]) best = std::min(best, norm(field.point(idx)));
  return best;
}

double DivisibleResult::outer_radius() const {
  double r = 0;
  for (std::size_t idx = 0; idx < occupied.size(); ++idx)
    if (occupied[idx]) r = std::max(r, norm(field.point(idx)));
  return r;
}

DivisibleResult divisible_sandpile(double m, int d, double tol) {
  if (!(tol > 0)) throw InvalidArgument("tolerance must be positive");
  if (!(m >= 0) || !std::isfinite(m)) throw InvalidArgument("mass must be a nonnegative number");
  if (d < 1 || d > 3) throw InvalidArgument("dimension must be between 1 and 3");
  int window = std::max(2, int(std::ceil(std::pow(m / unit_ball_volume(d), 1.0 / d))) + 4);
  LatticeField f{d, window};
  std::vector<double> mass(f.volume(), 0.0);
  mass[f.index(std::vector<int>(d, 0))] = m;
  std::int64_t sweeps = 0;
  const double share = 1.0 / (2 * d);
  while (true) {
    std::vector<std::size_t> stride(d, 1);
    for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * std::size_t(f.side());
    std::vector<char> rim(f.volume(), 0);
    for (std::size_t idx = 0; idx < rim.size(); ++idx)
      if (sup_norm(f.point(idx)) == f.window) rim[idx] = 1;
    bool escaped = false;
    std::vector<double> next(mass.size());
    while (true) {
      double worst = 0;
      for (std::size_t idx = 0; idx < mass.size(); ++idx)
        if (!rim[idx]) worst = std::max(worst, mass[idx] - 1.0);
      if (worst < tol) break;
      next = mass;
      for (std::size_t idx = 0; idx < mass.size(); ++idx) {
        if (rim[idx]) continue;
        const double e = mass[idx] - 1.0;
        if (e <= 0) continue;
        next[idx] -= e;
        for (int i = 0; i < d; ++i) {
          next[idx - stride[i]] += e * share;
          next[idx + stride[i]] += e * share;
        }
      }
      mass.swap(next);
      ++sweeps;
      bool hit = false;
      for (std::size_t idx = 0; idx < mass.size() && !hit; ++idx)
        if (rim[idx] && mass[idx] >= 1.0) hit = true;
      if (hit) {
        escaped = true;
        break;
      }
    }
    if (!escaped) break;
    LatticeField g{d, 2 * f.window};
    std::vector<double> grown(g.volume(), 0.0);
    for (std::size_t idx = 0; idx < mass.size(); ++idx) grown[g.index(f.point(idx))] = mass[idx];
    mass.swap(grown);
    f = g;
  }
  DivisibleResult out;
  out.field = f;
  out.initial_mass = m;
  out.tol = tol;
  out.sweeps = sweeps;
  out.occupied.assign(mass.size(), 0);
  long double total = 0;
  for (std::size_t idx = 0; idx < mass.size(); ++idx) {
    total += mass[idx];
    if (mass[idx] >= 1.0 - tol) {
      out.occupied[idx] = 1;
      ++out.occupied_count;
    }
  }
  out.total_mass = double(total);
  out.mass = std::move(mass);
  return out;
}

double Profile::cell_volume() const { return std::pow(2 * extent / mesh, dim); }

double Profile::integral() const {
  long double s = 0;
  for (double v : values) s += v;
  return double(s * cell_volume());
}

double Profile::max_value() const { return values.empty() ? 0 : *std::max_element(values.begin(), values.end()); }
double Profile::min_value() const { return values.empty() ? 0 : *std::min_element(values.begin(), values.end()); }

Profile scaled_profile(std::int64_t n, int d, int mesh, double extent) {
  if (mesh < 1) throw InvalidArgument("mesh must have at least one cell");
  const RelaxationResult rel = relax_point_mass(n, 0, d);
  const double h = std::pow(double(n), -1.0 / d);  // side of a lattice cell after scaling
  int reach = 0;
  for (std::size_t idx = 0; idx < rel.height.size(); ++idx)
    if (rel.height[idx] != 0) reach = std::max(reach, sup_norm(rel.field.point(idx)));
  const double support = (reach + 0.5) * h;
  Profile out;
  out.dim = d;
  out.mesh = mesh;
  out.n = n;
  out.extent = extent > 0 ? extent : support;
  std::size_t cells = 1;
  for (int i = 0; i < d; ++i) cells *= std::size_t(mesh);
  out.values.assign(cells, 0.0);
  const double H = 2 * out.extent / mesh;
  const double inv_cell = 1.0 / out.cell_volume();
  // exact overlap of each scaled lattice cell with the mesh cells
  std::vector<std::vector<std::pair<int, double>>> overlaps(d);
  for (std::size_t idx = 0; idx < rel.height.size(); ++idx) {
    const std::int64_t s = rel.height[idx];
    if (s == 0) continue;
    const auto p = rel.field.point(idx);
    bool empty = false;
    for (int i = 0; i < d; ++i) {
      overlaps[i].clear();
      const double lo = (p[i] - 0.5) * h, hi = (p[i] + 0.5) * h;
      const int c0 = std::max(0, int(std::floor((lo + out.extent) / H)));
      const int c1 = std::min(mesh - 1, int(std::floor((hi + out.extent) / H)));
      for (int c = c0; c <= c1; ++c) {
        const double a = std::max(lo, -out.extent + c * H), b = std::min(hi, -out.extent + (c + 1) * H);
        if (b > a) overlaps[i].emplace_back(c, b - a);
      }
      if (overlaps[i].empty()) empty = true;
    }
    if (empty) continue;
    std::vector<std::size_t> pos(d, 0);
    while (true) {
      std::size_t cell = 0;
      double w = 1;
      for (int i = 0; i < d; ++i) {
        cell = cell * std::size_t(mesh) + std::size_t(overlaps[i][pos[i]].first);
        w *= overlaps[i][pos[i]].second;
      }
      out.values[cell] += double(s) * w * inv_cell;
      int i = d - 1;
      while (i >= 0 && ++pos[i] == overlaps[i].size()) pos[i--] = 0;
      if (i < 0) break;
    }
  }
  return out;
}

double profile_l1_distance(const Profile& a, const Profile& b) {
  if (a.dim != b.dim || a.mesh != b.mesh || std::abs(a.extent - b.extent) > 1e-12 * std::max(1.0, a.extent))
    throw InvalidArgument("profiles live on different meshes");
  long double s = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
  return double(s * a.cell_volume());
}

int Background::value(const std::vector<int>& p, int d) const {
  switch (kind) {
    case Kind::Constant:
      return base;
    case Kind::Lambda: {
      for (int i = 0; i < d; ++i)
        if (p[i] % m == 0) return base;
      return base + 1;
    }
    case Kind::Bernoulli: {
      std::uint64_t hsh = splitmix64(seed);
      for (int i = 0; i < d; ++i) hsh = splitmix64(hsh ^ std::uint64_t(std::int64_t(p[i])));
      return base + (double(hsh >> 11) * 0x1.0p-53 < eps ? 1 : 0);
    }
  }
  return base;
}

std::string Background::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Constant:
      os << "constant " << base;
      break;
    case Kind::Lambda:
      os << "constant " << base << " plus indicator of Lambda(" << m << ")";
      break;
    case Kind::Bernoulli:
      os << "constant " << base << " plus Bernoulli(" << eps << "), seed " << seed;
      break;
  }
  return os.str();
}

ExplosionVerdict explosion_probe(const Background& bg, std::int64_t n_chips, int max_radius, int d) {
  if (d < 1 || d > 3) throw InvalidArgument("dimension must be between 1 and 3");
  if (n_chips < 1) throw InvalidArgument("need at least one chip");
  if (max_radius < 1) throw InvalidArgument("radius must be positive");
  if (bg.kind == Background::Kind::Lambda && bg.m < 1) throw InvalidArgument("Lambda modulus must be positive");
  if (bg.base < 0 || bg.base > 2 * d - 1) throw InvalidArgument("background must be stable");
  RimEngine eng(d, max_radius + 1);
  auto& h = eng.heights();
  for (std::size_t idx = 0; idx < h.size(); ++idx) h[idx] = bg.value(eng.field().point(idx), d);
  for (std::size_t idx = 0; idx < h.size(); ++idx)
    if (h[idx] >= 2 * d) throw InvalidArgument("background must be stable");
  h[eng.field().index(std::vector<int>(d, 0))] += n_chips;
  eng.seed_worklist();
  ExplosionVerdict out;
  out.max_radius = max_radius;
  out.reached_boundary = !eng.run(true);
  out.topplings = eng.topplings();
  const auto& odo = eng.odometer();
  for (std::size_t idx = 0; idx < odo.size(); ++idx)
    if (odo[idx] > 0) out.toppled_radius = std::max(out.toppled_radius, sup_norm(eng.field().point(idx)));
  if (out.reached_boundary) out.toppled_radius = max_radius + 1;
  out.verdict = out.reached_boundary ? "reached boundary" : "stabilized within radius";
  out.caveat = out.reached_boundary
                   ? "finite-volume evidence only: topplings reached the probe boundary, which is consistent with "
                     "explosion but does not prove it"
                   : "finite-volume evidence only: stabilization at this scale does not prove robustness";
  return out;
}

double MassLaw::mean() const {
  double s = 0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * probs[i];
  return s;
}

std::string MassLaw::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << "P[" << values[i] << "]=" << probs[i];
  return os.str();
}

namespace {

// Least real v >= 0 on [-L-1, L+1], zero at both ends, with
// eta + Laplacian(v) <= 1 on [-L, L]. It never exceeds the odometer.
std::vector<std::int64_t> odometer_lower_bound(const std::vector<std::int64_t>& eta) {
  const int m = int(eta.size());
  std::vector<long double> phi(m + 2, 0);
  // phi(i+1) = 2 phi(i) - phi(i-1) + (1 - eta(i))
  for (int i = 1; i <= m; ++i) phi[i + 1] = 2 * phi[i] - phi[i - 1] + (1 - eta[i - 1]);
  const long double slope = phi[m + 1] / (m + 1);
  for (int i = 0; i <= m + 1; ++i) phi[i] -= slope * i;
  // least concave majorant of -phi
  std::vector<int> hull;
  auto y = [&](int i) { return -phi[i]; };
  for (int i = 0; i <= m + 1; ++i) {
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2], b = hull.back();
      // drop b when it lies on or below the chord from a to i
      if ((y(b) - y(a)) * (i - a) <= (y(i) - y(a)) * (b - a))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  std::vector<std::int64_t> u(m, 0);
  std::size_t seg = 0;
  for (int i = 1; i <= m; ++i) {
    while (hull[seg + 1] < i) ++seg;
    const int a = hull[seg], b = hull[seg + 1];
    const long double g = y(a) + (y(b) - y(a)) * (long double)(i - a) / (long double)(b - a);
    const long double w = phi[i] + g;
    u[i - 1] = std::max<std::int64_t>(0, std::int64_t(std::ceil(w - 1e-6L)));
  }
  return u;
}

// Stabilizes eta on a path with absorbing ends, starting from a lower bound
// on the odometer. Returns the odometer.
std::vector<std::int64_t> stabilize_interval(const std::vector<std::int64_t>& eta, std::int64_t* topplings) {
  const int m = int(eta.size());
  std::vector<std::int64_t> u = odometer_lower_bound(eta);
  std::vector<std::int64_t> h(m);
  for (int i = 0; i < m; ++i) {
    const std::int64_t left = i > 0 ? u[i - 1] : 0, right = i + 1 < m ? u[i + 1] : 0;
    h[i] = eta[i] - 2 * u[i] + left + right;
  }
  std::vector<int> work;
  std::vector<char> queued(m, 0);
  for (int i = 0; i < m; ++i)
    if (h[i] >= 2) {
      work.push_back(i);
      queued[i] = 1;
    }
  while (!work.empty()) {
    const int x = work.back();
    work.pop_back();
    queued[x] = 0;
    const std::int64_t k = h[x] / 2;
    if (k <= 0) continue;
    h[x] -= 2 * k;
    u[x] += k;
    for (int y : {x - 1, x + 1}) {
      if (y < 0 || y >= m) continue;
      h[y] += k;
      if (h[y] >= 2 && !queued[y]) {
        queued[y] = 1;
        work.push_back(y);
      }
    }
  }
  for (int i = 0; i < m; ++i)
    if (h[i] < 0) throw InvariantViolation("odometer lower bound overshot");
  if (topplings) *topplings = std::accumulate(u.begin(), u.end(), std::int64_t(0));
  return u;
}

}  // namespace

std::vector<ProbePoint> stabilizability_probe(int d, const MassLaw& law, const std::vector<int>& sizes,
                                              std::uint64_t seed) {
  if (d != 1) throw InvalidArgument("the stabilizability probe is implemented for d = 1");
  if (law.values.empty() || law.values.size() != law.probs.size())
    throw InvalidArgument("mass law needs matching values and probabilities");
  double total = 0;
  for (std::size_t i = 0; i < law.values.size(); ++i) {
    if (law.values[i] < 0) throw InvalidArgument("masses must be nonnegative");
    if (!(law.probs[i] >= 0)) throw InvalidArgument("probabilities must be nonnegative");
    total += law.probs[i];
  }
  if (std::abs(total - 1) > 1e-9) throw InvalidArgument("probabilities must sum to one");
  if (sizes.empty()) return {};
  for (int L : sizes)
    if (L < 0) throw InvalidArgument("box sizes must be nonnegative");
  const int big = *std::max_element(sizes.begin(), sizes.end());
  Rng rng = make_rng(seed);
  std::discrete_distribution<int> pick(law.probs.begin(), law.probs.end());
  std::vector<std::int64_t> sample(2 * std::size_t(big) + 1);
  for (auto& v : sample) v = law.values[pick(rng)];
  std::vector<ProbePoint> out;
  for (int L : sizes) {
    std::vector<std::int64_t> eta(sample.begin() + (big - L), sample.begin() + (big + L + 1));
    ProbePoint pt;
    pt.L = L;
    const auto u = stabilize_interval(eta, &pt.topplings);
    pt.odometer_at_origin = u[L];
    out.push_back(pt);
  }
  return out;
}

std::string classify_trace(const std::vector<ProbePoint>& trace) {
  if (trace.size() < 2) return "inconclusive";
  const std::size_t k = trace.size();
  if (trace[k - 1].odometer_at_origin == trace[k - 2].odometer_at_origin) return "bounded";
  // a plateau at small boxes is allowed; the last step has to grow
  for (std::size_t i = 1; i < k; ++i)
    if (trace[i].odometer_at_origin < trace[i - 1].odometer_at_origin) return "inconclusive";
  if (trace.back().odometer_at_origin >= 10 * std::max<std::int64_t>(1, trace.front().odometer_at_origin))
    return "diverging";
  return "inconclusive";
}

DissipativeCheck dissipative_green_check(int gamma, int d, int n, std::int64_t samples, std::uint64_t seed) {
  if (gamma < 1) throw InvalidArgument("dissipation must be at least 1");
  const SinkedMultigraph g = wired_box(n, d, gamma);
  DissipativeCheck out;
  out.gamma = gamma;
  out.n = n;
  out.rows = dhar_formula_check(g, g.origin(), samples, seed);
  for (const auto& r : out.rows) {
    if (r.y == g.origin()) out.green_origin = r.exact;
    if (std::isfinite(r.z)) out.max_abs_z = std::max(out.max_abs_z, std::abs(r.z));
    else out.max_abs_z = r.z;
  }
  return out;
}

std::vector<std::pair<int, double>> dissipative_mean_size(const std::vector<int>& gammas, int n, int d,
                                                          std::int64_t samples, std::uint64_t seed) {
  std::vector<std::pair<int, double>> out;
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    const SinkedMultigraph g = wired_box(n, d, gammas[gi]);
    const int o = g.origin();
    constexpr std::int64_t chunk = 1000;
    const int replicas = int((samples + chunk - 1) / chunk);
    std::vector<double> sums(replicas, 0);
    const std::uint64_t base = stream_seed(seed, 0xd1000u + gi);
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
        for (int v : toppled) {
          sums[r] += double(odo[v]);
          odo[v] = 0;
        }
      }
    });
    double s = 0;
    for (double v : sums) s += v;
    out.emplace_back(gammas[gi], samples > 0 ? s / double(samples) : 0.0);
  }
  return out;
}

}  // namespace sandlab
