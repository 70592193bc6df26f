#include "sandlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "sandlab/errors.hpp"
#include "sandlab/linalg.hpp"

namespace sandlab {

GridSpec GridSpec::box(int n, int d, int gamma) {
  GridSpec s;
  s.dim = d;
  s.lo.assign(d, -n);
  s.hi.assign(d, n);
  s.gamma = gamma;
  return s;
}

SinkedMultigraph::SinkedMultigraph(int n, const std::vector<EdgeCount>& edges) : n_(n) {
  if (n < 1) throw InvalidArgument("graph needs at least one non-sink vertex");
  build(edges);
}

void SinkedMultigraph::build(const std::vector<EdgeCount>& edges) {
  const int total = n_ + 1;
  std::vector<std::map<int, int>> adj(total);
  for (const auto& e : edges) {
    if (e.x < 0 || e.x > n_ || e.y < 0 || e.y > n_)
      throw InvalidArgument("edge endpoint out of range");
    if (e.count < 0) throw InvalidArgument("negative edge multiplicity");
    if (e.count == 0) continue;
    if (e.x == e.y) {
      if (e.x == n_) continue;  // loops at the sink carry no information
      throw InvalidArgument("loop edge at vertex " + std::to_string(e.x));
    }
    adj[e.x][e.y] += e.count;
    adj[e.y][e.x] += e.count;
  }

  deg_.assign(total, 0);
  sink_mult_.assign(total, 0);
  nb_off_.assign(total + 1, 0);
  nb_slot_off_.assign(total + 1, 0);
  nb_.clear();
  slot_to_.clear();
  slot_par_.clear();
  edge_total_ = 0;
  for (int x = 0; x < total; ++x) {
    nb_off_[x] = int(nb_.size());
    nb_slot_off_[x] = int(slot_to_.size());
    for (auto [y, m] : adj[x]) {
      nb_.push_back({y, m});
      deg_[x] += m;
      for (int p = 0; p < m; ++p) {
        slot_to_.push_back(y);
        slot_par_.push_back(p);
      }
      if (x < y) edge_total_ += m;
    }
    if (x < n_) {
      auto it = adj[x].find(n_);
      sink_mult_[x] = it == adj[x].end() ? 0 : it->second;
    }
  }
  nb_off_[total] = int(nb_.size());
  nb_slot_off_[total] = int(slot_to_.size());

  // connectivity through the sink
  std::vector<char> seen(total, 0);
  std::vector<int> stack{n_};
  seen[n_] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (const auto& nb : neighbors(v))
      if (!seen[nb.v]) {
        seen[nb.v] = 1;
        ++count;
        stack.push_back(nb.v);
      }
  }
  if (count != total) throw InvalidArgument("graph is not connected to the sink");
}

int SinkedMultigraph::multiplicity(int x, int y) const {
  auto nb = neighbors(x);
  auto it = std::lower_bound(nb.begin(), nb.end(), y, [](const Neighbor& a, int v) { return a.v < v; });
  return (it != nb.end() && it->v == y) ? it->mult : 0;
}

int SinkedMultigraph::slot_of(int x, int y, int parallel) const {
  auto s = slots(x);
  auto it = std::lower_bound(s.begin(), s.end(), y);
  if (it == s.end() || *it != y) return -1;
  int idx = int(it - s.begin()) + parallel;
  if (parallel < 0 || idx >= int(s.size()) || s[idx] != y) return -1;
  return idx;
}

int SinkedMultigraph::vertex_at(std::span<const int> p) const {
  if (dim_ == 0 || int(p.size()) != dim_) return -1;
  int idx = 0;
  for (int i = 0; i < dim_; ++i) {
    if (p[i] < lo_[i] || p[i] > hi_[i]) return -1;
    idx = idx * (hi_[i] - lo_[i] + 1) + (p[i] - lo_[i]);
  }
  return idx;
}

int SinkedMultigraph::origin() const {
  std::vector<int> o(dim_, 0);
  int v = vertex_at(o);
  if (v < 0) throw InvalidArgument("origin is not inside the box");
  return v;
}

std::vector<EdgeCount> SinkedMultigraph::edge_list() const {
  std::vector<EdgeCount> out;
  for (int x = 0; x < n_; ++x)
    for (const auto& nb : neighbors(x))
      if (nb.v > x) out.push_back({x, nb.v, nb.mult});
  return out;
}

SinkedMultigraph wired_box(const GridSpec& spec) {
  const int d = spec.dim;
  if (d < 1) throw InvalidArgument("dimension must be at least 1");
  if (int(spec.lo.size()) != d || int(spec.hi.size()) != d) throw InvalidArgument("box corners do not match dimension");
  if (spec.gamma < 0) throw InvalidArgument("gamma must be nonnegative");
  long long n = 1;
  std::vector<int> side(d);
  for (int i = 0; i < d; ++i) {
    side[i] = spec.hi[i] - spec.lo[i] + 1;
    if (side[i] <= 0) throw InvalidArgument("empty box");
    n *= side[i];
    if (n > 50'000'000) throw SizeError("box too large");
  }

  SinkedMultigraph g;
  g.n_ = int(n);
  g.dim_ = d;
  g.lo_ = spec.lo;
  g.hi_ = spec.hi;
  g.coords_.resize(std::size_t(n) * d);
  std::vector<int> stride(d, 1);
  for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * side[i + 1];

  std::vector<EdgeCount> edges;
  edges.reserve(std::size_t(n) * (d + 1));
  std::vector<int> p(d);
  for (int v = 0; v < n; ++v) {
    int r = v;
    for (int i = 0; i < d; ++i) {
      p[i] = spec.lo[i] + r / stride[i];
      r %= stride[i];
      g.coords_[std::size_t(v) * d + i] = p[i];
    }
    int to_sink = spec.gamma;
    for (int i = 0; i < d; ++i) {
      if (p[i] < spec.hi[i])
        edges.push_back({v, v + stride[i], 1});
      else
        ++to_sink;
      if (p[i] == spec.lo[i]) ++to_sink;
    }
    if (to_sink) edges.push_back({v, int(n), to_sink});
  }
  g.build(edges);
  return g;
}

SinkedMultigraph wired_box(int n, int d, int gamma) {
  if (n < 0) throw InvalidArgument("box radius must be nonnegative");
  return wired_box(GridSpec::box(n, d, gamma));
}

IntMatrix reduced_laplacian(const SinkedMultigraph& g) {
  const int n = g.size();
  if (n > 20000) throw SizeError("dense Laplacian requested for a large graph");
  IntMatrix m = IntMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    m(x, x) = g.degree(x);
    for (const auto& nb : g.neighbors(x))
      if (nb.v < n) m(x, nb.v) = -nb.mult;
  }
  return m;
}

Eigen::SparseMatrix<double> reduced_laplacian_sparse(const SinkedMultigraph& g) {
  const int n = g.size();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(std::size_t(n) * 5);
  for (int x = 0; x < n; ++x) {
    t.emplace_back(x, x, g.degree(x));
    for (const auto& nb : g.neighbors(x))
      if (nb.v < n) t.emplace_back(x, nb.v, -nb.mult);
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

static BigMatrix big_laplacian(const SinkedMultigraph& g, int bound) {
  const int n = g.size();
  if (n > bound) throw SizeError("exact mode limited to " + std::to_string(bound) + " vertices");
  BigMatrix a(n, std::vector<BigInt>(n, 0));
  for (int x = 0; x < n; ++x) {
    a[x][x] = g.degree(x);
    for (const auto& nb : g.neighbors(x))
      if (nb.v < n) a[x][nb.v] = -nb.mult;
  }
  return a;
}

BigInt det_reduced_laplacian(const SinkedMultigraph& g, int bound) {
  BigInt d = bareiss_det(big_laplacian(g, bound));
  if (d <= 0) throw InvariantViolation("reduced Laplacian is singular");
  return d;
}

double logdet_reduced_laplacian(const SinkedMultigraph& g) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(reduced_laplacian_sparse(g));
  if (chol.info() != Eigen::Success) throw InvariantViolation("Cholesky of the reduced Laplacian failed");
  auto diag = chol.vectorD();
  double s = 0;
  for (int i = 0; i < diag.size(); ++i) {
    if (diag[i] <= 0) throw InvariantViolation("reduced Laplacian is not positive definite");
    s += std::log(diag[i]);
  }
  return s;
}

std::vector<BigInt> group_invariants(const SinkedMultigraph& g, int bound) {
  auto diag = smith_diagonal(big_laplacian(g, bound));
  std::vector<BigInt> out;
  for (auto& d : diag)
    if (d > 1) out.push_back(d);
  return out;
}

GreenSolver::GreenSolver(const SinkedMultigraph& g) : lap_(reduced_laplacian_sparse(g)) {
  chol_.compute(lap_);
  if (chol_.info() != Eigen::Success) throw InvariantViolation("Cholesky of the reduced Laplacian failed");
}

Eigen::VectorXd GreenSolver::column(int x) const {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lap_.rows());
  rhs[x] = 1.0;
  Eigen::VectorXd sol = chol_.solve(rhs);
  // one step of refinement
  Eigen::VectorXd r = rhs - lap_ * sol;
  sol += chol_.solve(r);
  return sol;
}

double green(const SinkedMultigraph& g, int z, int x) {
  if (z < 0 || z >= g.size() || x < 0 || x >= g.size()) throw InvalidArgument("vertex out of range");
  return GreenSolver(g)(z, x);
}

std::vector<std::vector<BigRational>> green_exact(const SinkedMultigraph& g, int bound) {
  const int n = g.size();
  if (n > bound) throw SizeError("exact mode limited to " + std::to_string(bound) + " vertices");
  std::vector<std::vector<BigRational>> a(n, std::vector<BigRational>(2 * n, 0));
  auto lap = reduced_laplacian(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = BigRational(lap(i, j));
    a[i][n + i] = 1;
  }
  for (int c = 0; c < n; ++c) {
    int p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw InvariantViolation("reduced Laplacian is singular");
    std::swap(a[p], a[c]);
    BigRational inv = 1 / a[c][c];
    for (auto& v : a[c]) v *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      BigRational f = a[r][c];
      for (int k = c; k < 2 * n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<std::vector<BigRational>> out(n, std::vector<BigRational>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = a[i][n + j];
  return out;
}

void write_edge_list(std::ostream& os, const SinkedMultigraph& g) {
  os << "# vertices " << g.size() << "\n";
  for (const auto& e : g.edge_list()) {
    os << e.x << ' ';
    if (e.y == g.sink())
      os << 's';
    else
      os << e.y;
    os << ' ' << e.count << '\n';
  }
}

SinkedMultigraph read_edge_list(std::istream& is) {
  std::string line;
  int n = -1;
  std::vector<std::pair<std::string, std::string>> raw;
  std::vector<int> counts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "vertices") ls >> n;
      continue;
    }
    std::string a, b;
    int c = 0;
    if (!(ls >> a >> b >> c)) throw InvalidArgument("malformed edge line: " + line);
    raw.emplace_back(a, b);
    counts.push_back(c);
  }
  auto parse = [&](const std::string& t) -> int {
    if (t == "s") return -1;
    try {
      return std::stoi(t);
    } catch (const std::exception&) {
      throw InvalidArgument("bad vertex token: " + t);
    }
  };
  if (n < 0) {
    for (auto& [a, b] : raw) n = std::max({n, parse(a) + 1, parse(b) + 1});
  }
  std::vector<EdgeCount> edges;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    int x = parse(raw[i].first), y = parse(raw[i].second);
    edges.push_back({x < 0 ? n : x, y < 0 ? n : y, counts[i]});
  }
  return SinkedMultigraph(n, edges);
}

}  // namespace sandlab
