#include "sandlab/exact2d.hpp"

#include <algorithm>
#include <cmath>

#include "sandlab/algebra.hpp"
#include "sandlab/errors.hpp"
#include "sandlab/linalg.hpp"

namespace sandlab {

const std::array<Point, 3> kRemovedDirections = {Point{0, -1}, Point{-1, 0}, Point{0, 1}};

BoxGreen::BoxGreen(int n) : n_(n), g_(wired_box(n, 2)), solver_(std::make_unique<GreenSolver>(g_)) {}

const Eigen::VectorXd& BoxGreen::column(int v) const {
  auto it = cache_.find(v);
  if (it == cache_.end()) it = cache_.emplace(v, solver_->column(v)).first;
  return it->second;
}

double BoxGreen::operator()(Point z, Point x) const {
  const int vz = g_.vertex_at(z);
  const int vx = g_.vertex_at(x);
  if (vz < 0 || vx < 0) throw InvalidArgument("point outside the box");
  return column(vx)[vz];
}

double box_green(int n, Point z, Point x) {
  if (n < 0) throw InvalidArgument("box size must be nonnegative");
  return BoxGreen(n)(z, x);
}

double height0_probability(int n) {
  if (n < 1) throw InvalidArgument("height-0 determinant needs n >= 1");
  BoxGreen g(n);
  const std::array<Point, 4> s = {Point{0, 0}, kRemovedDirections[0], kRemovedDirections[1], kRemovedDirections[2]};
  const long double b[4][4] = {{-3, 1, 1, 1}, {1, -1, 0, 0}, {1, 0, -1, 0}, {1, 0, 0, -1}};
  std::array<std::array<long double, 4>, 4> m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      long double v = i == j ? 1.0L : 0.0L;
      for (int k = 0; k < 4; ++k) v += b[i][k] * g(s[k], s[j]);
      m[i][j] = v;
    }
  return double(det_extended(m, 4));
}

double PiPolynomial::value() const {
  const long double ip = 1.0L / 3.141592653589793238462643383279502884L;
  long double v = 0, pw = 1;
  for (const auto& q : c) {
    v += pw * static_cast<long double>(q);
    pw *= ip;
  }
  return double(v);
}

HeightClosedForms height_probabilities_closed_form() {
  using Q = BigRational;
  HeightClosedForms h;
  h.p[0].c = {Q(0), Q(0), Q(2), Q(-4)};
  h.p[1].c = {Q(1, 4), Q(-1, 2), Q(-3), Q(12)};
  h.p[2].c = {Q(3, 8), Q(1), Q(0), Q(-12)};
  h.p[3].c = {Q(3, 8), Q(-1, 2), Q(1), Q(4)};
  for (int k = 0; k < 4; ++k) {
    h.zeta.c[k] = 0;
    for (int i = 0; i < 4; ++i) h.zeta.c[k] += Q(i) * h.p[i].c[k];
  }
  return h;
}

namespace {

using Block = std::array<std::array<long double, 3>, 3>;

Point add(Point a, Point b) { return {a[0] + b[0], a[1] + b[1]}; }
Point sub(Point a, Point b) { return {a[0] - b[0], a[1] - b[1]}; }

// d^(1)_e d^(2)_f A(w - v) with d = w - v.
long double mixed_difference(const KernelTable& a, Point d, Point e, Point f) {
  return a.value(sub(add(d, f), e)) - a.value(sub(d, e)) - a.value(add(d, f)) + a.value(d);
}

Block k_block(const KernelTable& a, Point d) {
  Block k{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k[i][j] = mixed_difference(a, d, kRemovedDirections[i], kRemovedDirections[j]);
  return k;
}

void require_window(const KernelTable& a, Point y, int margin) {
  if (std::max(std::abs(y[0]), std::abs(y[1])) + margin > a.radius())
    throw SizeError("potential kernel window too small");
}

}  // namespace

long double one_point_determinant(const KernelTable& a) {
  require_window(a, {0, 0}, 2);
  Block m = k_block(a, {0, 0});
  for (int i = 0; i < 3; ++i) m[i][i] += 1;
  return det_extended(m, 3);
}

PairCorrelation pair_correlation_00(const KernelTable& a, Point y) {
  if (y[0] == 0 && y[1] == 0) throw InvalidArgument("y must differ from the origin");
  require_window(a, y, 2);
  const Block koo = k_block(a, {0, 0});
  const Block koy = k_block(a, y);
  const Block kyo = k_block(a, sub({0, 0}, y));
  std::array<std::array<long double, 6>, 6> m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      m[i][j] = koo[i][j] + (i == j ? 1 : 0);
      m[i + 3][j + 3] = koo[i][j] + (i == j ? 1 : 0);
      m[i][j + 3] = koy[i][j];
      m[i + 3][j] = kyo[i][j];
    }
  PairCorrelation out;
  out.joint = det_extended(m, 6);
  out.p0 = one_point_determinant(a);
  out.covariance = out.joint - out.p0 * out.p0;
  const long double r2 = (long double)y[0] * y[0] + (long double)y[1] * y[1];
  out.asymptote = -out.p0 * out.p0 / (2 * r2 * r2);
  return out;
}

PairCorrelation pair_correlation_00(Point y) {
  const int r = std::max(std::abs(y[0]), std::abs(y[1])) + 3;
  return pair_correlation_00(KernelTable(r), y);
}

namespace {

using cplx = std::complex<double>;

void check_disk_points(cplx v, cplx w) {
  if (std::abs(v) >= 1 || std::abs(w) >= 1) throw InvalidArgument("points must lie in the open unit disk");
  if (v == w) throw InvalidArgument("points must be distinct");
}

}  // namespace

double disk_green(cplx v, cplx w) {
  check_disk_points(v, w);
  return -std::log(std::abs((v - w) / (1.0 - v * std::conj(w)))) / (2 * M_PI);
}

std::array<double, 4> disk_green_mixed_partials(cplx v, cplx w) {
  check_disk_points(v, w);
  // Wirtinger derivatives: P = d_v d_w g, Q = d_v d_wbar g.
  const cplx p = -1.0 / (4 * M_PI) / ((v - w) * (v - w));
  const cplx one = 1.0 - v * std::conj(w);
  const cplx q = -1.0 / (4 * M_PI) / (one * one);
  return {2 * (p.real() + q.real()), 2 * (q.real() - p.real()), 2 * (q.imag() - p.imag()),
          -2 * (p.imag() + q.imag())};
}

double disk_correlation_constant() {
  const double p0 = height_probabilities_closed_form().p[0].value();
  return M_PI * M_PI * p0 * p0;
}

double disk_pair_correlation(cplx v, cplx w) {
  const auto d = disk_green_mixed_partials(v, w);
  return -disk_correlation_constant() * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]);
}

long double det_Mo(const KernelTable& a, Point z) {
  require_window(a, z, 2);
  const long double ip = 1.0L / 3.141592653589793238462643383279502884L;
  const Point e1{1, 0}, e2{0, 1}, me1{-1, 0}, me2{0, -1};
  const std::array<Point, 3> cols = {e2, me1, e1};
  // d^(1)_e d^(2)_f A(z, o) = A(z+e-f) - A(z+e) - A(z-f) + A(z)
  auto d = [&](Point e, Point f) {
    return a.value(sub(add(z, e), f)) - a.value(add(z, e)) - a.value(sub(z, f)) + a.value(z);
  };
  std::array<std::array<long double, 3>, 3> m{};
  m[0] = {0.5L, ip - 0.5L, ip - 0.5L};
  for (int j = 0; j < 3; ++j) {
    m[1][j] = d(e1, cols[j]);
    m[2][j] = d(me2, cols[j]) - d(e2, cols[j]);
  }
  return det_extended(m, 3);
}

long double sum_Mo_truncated(const KernelTable& a, int L) {
  if (L < 0) throw InvalidArgument("truncation radius must be nonnegative");
  require_window(a, {L, 0}, 2);
  long double s = 0;
  const long long l2 = (long long)L * L;
  for (int x = -L; x <= L; ++x)
    for (int y = -L; y <= L; ++y)
      if ((long long)x * x + (long long)y * y <= l2) s += det_Mo(a, {x, y});
  return s;
}

long double sum_Mo_truncated(int L) { return sum_Mo_truncated(KernelTable(L + 3), L); }

namespace {

// Edges removed for a minimal event, by peeling W in burning-reversed order.
std::vector<std::pair<int, int>> peel_edges(const SinkedMultigraph& g, const std::vector<int>& w,
                                            const std::vector<std::int64_t>& xi) {
  const int n = g.size();
  std::vector<std::int64_t> target(n, 0);
  std::vector<char> in_w(n, 0), peeled(n + 1, 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    in_w[w[i]] = 1;
    target[w[i]] = xi[i];
  }
  std::vector<std::pair<int, int>> removed;
  for (std::size_t round = 0; round < w.size(); ++round) {
    int x = -1;
    for (int v : w)
      if (!peeled[v] && target[v] == 0 && (x < 0 || v < x)) x = v;
    if (x < 0) throw InvalidArgument("configuration is not minimal on W");
    int keep = -1;
    for (int s = 0; s < g.degree(x); ++s)
      if (!peeled[g.slot_target(x, s)]) keep = s;
    if (keep < 0) throw InvalidArgument("configuration is not minimal on W");
    for (int s = 0; s < g.degree(x); ++s)
      if (s != keep && !peeled[g.slot_target(x, s)]) removed.emplace_back(x, g.slot_target(x, s));
    peeled[x] = 1;
    for (const auto& nb : g.neighbors(x))
      if (nb.v < n && in_w[nb.v] && !peeled[nb.v]) target[nb.v] -= nb.mult;
  }
  return removed;
}

}  // namespace

bool is_minimal(const SinkedMultigraph& g, const std::vector<int>& w, const std::vector<std::int64_t>& xi) {
  const int n = g.size();
  if (w.size() != xi.size()) throw InvalidArgument("W and xi differ in length");
  if (w.empty()) throw InvalidArgument("W must be nonempty");
  std::vector<char> seen(n, 0);
  for (int v : w) {
    if (v < 0 || v >= n) throw InvalidArgument("W contains a vertex out of range");
    if (seen[v]) throw InvalidArgument("W lists a vertex twice");
    seen[v] = 1;
  }
  Sandpile eta = max_stable(g);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (xi[i] < 0 || xi[i] >= g.degree(w[i])) return false;
    eta[w[i]] = xi[i];
  }
  if (!is_recurrent(g, eta)) return false;
  for (int v : w) {
    if (eta[v] == 0) continue;
    eta[v] -= 1;
    const bool rec = is_recurrent(g, eta);
    eta[v] += 1;
    if (rec) return false;
  }
  return true;
}

MinimalEvent minimal_event_probability(const SinkedMultigraph& g, const std::vector<int>& w,
                                       const std::vector<std::int64_t>& xi) {
  if (!is_minimal(g, w, xi)) throw InvalidArgument("configuration is not minimal on W");
  MinimalEvent out;
  out.removed_edges = peel_edges(g, w, xi);
  const int n = g.size();
  const int k = int(out.removed_edges.size());
  if (k == 0) {
    out.probability = 1;
    return out;
  }
  GreenSolver solver(g);
  std::map<int, Eigen::VectorXd> cols;
  auto col = [&](int v) -> const Eigen::VectorXd& {
    auto it = cols.find(v);
    if (it == cols.end()) it = cols.emplace(v, solver.column(v)).first;
    return it->second;
  };
  // u_e = 1_x - 1_y, G(u_e, u_f) = u_e^T G u_f
  auto gu = [&](int a, int b, int c, int d) {
    long double v = col(c)[a];
    if (d < n) v -= col(d)[a];
    if (b < n) {
      v -= col(c)[b];
      if (d < n) v += col(d)[b];
    }
    return v;
  };
  std::vector<std::vector<long double>> m(k, std::vector<long double>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const auto [a, b] = out.removed_edges[i];
      const auto [c, d] = out.removed_edges[j];
      m[i][j] = (i == j ? 1.0L : 0.0L) - gu(a, b, c, d);
    }
  out.probability = double(det_extended(m, k));
  return out;
}

}  // namespace sandlab
