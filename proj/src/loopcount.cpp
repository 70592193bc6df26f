#include <set>

#include "sandlab/errors.hpp"
#include "sandlab/exact2d.hpp"
#include "sandlab/linalg.hpp"

namespace sandlab {

IntMatrix Digraph::laplacian() const {
  if (int(arcs.size()) != n) throw InvalidArgument("arc table has the wrong number of rows");
  IntMatrix m = IntMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    if (int(arcs[x].size()) != n + 1) throw InvalidArgument("arc table has the wrong number of columns");
    long long out = 0;
    for (int y = 0; y <= n; ++y) {
      if (arcs[x][y] < 0) throw InvalidArgument("arc counts must be nonnegative");
      if (y == x && arcs[x][y] != 0) throw InvalidArgument("loop arcs are not allowed");
      out += arcs[x][y];
      if (y < n && y != x) m(x, y) = -arcs[x][y];
    }
    m(x, x) = out;
  }
  return m;
}

LoopCountResult loop_counts_via_det(const LoopCountMatrix& m) {
  const int n = int(m.base.rows());
  if (m.base.cols() != n) throw InvalidArgument("loop-count matrix must be square");
  std::set<std::pair<int, int>> marks;
  for (const auto& [i, j] : m.marked) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw InvalidArgument("marked entry out of range");
    if (!marks.insert({i, j}).second) throw InvalidArgument("entry marked twice");
  }
  const int k = int(marks.size());
  auto det_at = [&](long long omega) {
    BigMatrix a(n, std::vector<BigInt>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a[i][j] = BigInt(m.base(i, j));
    for (const auto& [i, j] : marks) a[i][j] = BigInt(-omega);
    return bareiss_det(std::move(a));
  };

  // Lagrange interpolation through omega = 0..k, in exact rationals.
  std::vector<BigRational> coeff(k + 1, BigRational(0));
  for (int p = 0; p <= k; ++p) {
    const BigInt value = det_at(p);
    std::vector<BigRational> basis(1, BigRational(1));
    BigInt denom = 1;
    for (int q = 0; q <= k; ++q) {
      if (q == p) continue;
      std::vector<BigRational> next(basis.size() + 1, BigRational(0));
      for (std::size_t t = 0; t < basis.size(); ++t) {
        next[t + 1] += basis[t];
        next[t] -= basis[t] * q;
      }
      basis = std::move(next);
      denom *= (p - q);
    }
    // cpp_rational wants a positive denominator
    const BigRational weight = denom < 0 ? BigRational(-value, -denom) : BigRational(value, denom);
    for (int t = 0; t <= k; ++t) coeff[t] += basis[t] * weight;
  }
  LoopCountResult out;
  for (const auto& c : coeff) {
    if (denominator(c) != 1) throw InvariantViolation("non-integer determinant coefficient");
    out.poly.push_back(numerator(c));
  }
  BigMatrix base(n, std::vector<BigInt>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) base[i][j] = BigInt(m.base(i, j));
  out.constant = n == 0 ? BigInt(1) : bareiss_det(std::move(base));
  out.top = out.poly.back();
  return out;
}

}  // namespace sandlab
