#include <algorithm>
#include <cmath>
#include <complex>

#include "sandlab/errors.hpp"
#include "sandlab/exact2d.hpp"
#include "sandlab/linalg.hpp"
#include "sandlab/parallel.hpp"

namespace sandlab {

namespace {

constexpr int kMaxGrid = 1 << 14;

void check_rate(double r) {
  if (!(r > 0) || !(r < 1)) throw InvalidArgument("killing parameter must lie in (0, 1)");
}

// Exponential decay rate of G_{k,l}(r) along an axis.
double decay_rate(double r) { return std::acosh(2.0 / r - 1.0); }

int start_grid(double r, int reach) {
  const double need = 8.0 / decay_rate(r) + 2.0 * reach + 16;
  int n = 16;
  while (n < need && n < kMaxGrid) n *= 2;
  return n;
}

// Trapezoid rule for (1/8pi^2) \iint w(k,l,alpha,beta) / D_r over the torus,
// where w is an even function of both angles: returns per-(k,l) sums.
template <class Weight>
double torus_sum(int n, double r, Weight weight) {
  std::vector<double> c(n);
  for (int a = 0; a < n; ++a) c[a] = std::cos(2 * M_PI * a / n);
  long double s = 0;
  for (int a = 0; a < n; ++a) {
    long double row = 0;
    for (int b = 0; b < n; ++b) row += weight(a, b) / (2.0 - r * (c[a] + c[b]));
    s += row;
  }
  return double(s / (2.0L * n * n));
}

}  // namespace

double killed_green(int k, int l, double r, double tol) {
  check_rate(r);
  if (!(tol > 0)) throw InvalidArgument("tolerance must be positive");
  auto eval = [&](int n) {
    std::vector<double> ck(n), cl(n);
    for (int a = 0; a < n; ++a) {
      ck[a] = std::cos(2 * M_PI * a * double(k) / n);
      cl[a] = std::cos(2 * M_PI * a * double(l) / n);
    }
    return torus_sum(n, r, [&](int a, int b) { return ck[a] * cl[b]; });
  };
  int n = start_grid(r, std::max(std::abs(k), std::abs(l)));
  double prev = eval(n);
  while (true) {
    if (2 * n > kMaxGrid) throw SizeError("killed Green function did not converge");
    n *= 2;
    const double cur = eval(n);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
}

double killed_potential(Point z, double r, double tol) {
  if (r == 1.0) return KernelTable(std::max({std::abs(z[0]), std::abs(z[1]), 1}))(z[0], z[1]);
  check_rate(r);
  if (!(tol > 0)) throw InvalidArgument("tolerance must be positive");
  auto eval = [&](int n) {
    std::vector<double> ck(n), cl(n);
    for (int a = 0; a < n; ++a) {
      ck[a] = std::cos(2 * M_PI * a * double(z[0]) / n);
      cl[a] = std::cos(2 * M_PI * a * double(z[1]) / n);
    }
    return torus_sum(n, r, [&](int a, int b) { return 1.0 - ck[a] * cl[b]; });
  };
  int n = start_grid(r, std::max(std::abs(z[0]), std::abs(z[1])));
  double prev = eval(n);
  while (true) {
    if (2 * n > kMaxGrid) throw SizeError("killed potential did not converge");
    n *= 2;
    const double cur = eval(n);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
}

KilledGreenTable::KilledGreenTable(double r, int radius, double tol) : r_(radius) {
  check_rate(r);
  if (radius < 0) throw InvalidArgument("table radius must be nonnegative");
  const int w = radius + 1;
  auto eval = [&](int n) {
    std::vector<double> c(n);
    for (int a = 0; a < n; ++a) c[a] = std::cos(2 * M_PI * a / n);
    // cos(2 pi a k / n) by index reduction
    auto cosk = [&](int a, int k) { return c[(std::int64_t(a) * k) % n]; };
    std::vector<long double> t(std::size_t(n) * w);  // t[a][l] = sum_b cos(beta_b l) / D_ab
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const long double inv = 1.0L / (2.0 - r * (c[a] + c[b]));
        for (int l = 0; l < w; ++l) t[std::size_t(a) * w + l] += cosk(b, l) * inv;
      }
    std::vector<double> out(std::size_t(w) * w);
    for (int k = 0; k < w; ++k)
      for (int l = 0; l <= k; ++l) {
        long double s = 0;
        for (int a = 0; a < n; ++a) s += cosk(a, k) * t[std::size_t(a) * w + l];
        out[std::size_t(k) * w + l] = out[std::size_t(l) * w + k] = double(s / (2.0L * n * n));
      }
    return out;
  };
  int n = start_grid(r, radius);
  std::vector<double> prev = eval(n);
  while (true) {
    if (2 * n > kMaxGrid) throw SizeError("killed Green table did not converge");
    n *= 2;
    std::vector<double> cur = eval(n);
    double diff = 0;
    for (std::size_t i = 0; i < cur.size(); ++i) diff = std::max(diff, std::abs(cur[i] - prev[i]));
    if (diff < tol) {
      v_ = std::move(cur);
      grid_ = n;
      return;
    }
    prev = std::move(cur);
  }
}

double KilledGreenTable::operator()(int k, int l) const {
  k = std::abs(k);
  l = std::abs(l);
  if (k > r_ || l > r_) throw SizeError("point outside the killed Green table");
  return v_[std::size_t(k) * (r_ + 1) + l];
}

std::array<double, 4> priezzhev_first_row() { return {0.75, 0.25, 1 / M_PI - 0.25, 1 / M_PI - 0.25}; }

std::array<std::array<double, 4>, 4> priezzhev_matrix(const KilledGreenTable& g, int k, int l) {
  std::array<std::array<double, 4>, 4> c{};
  c[0] = priezzhev_first_row();
  c[1] = {g(k, l - 1), g(k, l), g(k + 1, l), g(k - 1, l)};
  c[2] = {g(k + 1, l - 1), g(k + 1, l), g(k + 2, l), g(k, l)};
  c[3] = {g(k, l) - g(k, l - 2), g(k, l + 1) - g(k, l - 1), g(k + 1, l + 1) - g(k + 1, l - 1),
          g(k - 1, l + 1) - g(k - 1, l - 1)};
  return c;
}

long double priezzhev_lattice_sum(double r, int L, int* grid) {
  if (L < 0) throw InvalidArgument("truncation radius must be nonnegative");
  const KilledGreenTable g(r, L + 2);
  if (grid) *grid = g.grid();
  long double s = 0;
  for (int k = -L; k <= L; ++k)
    for (int l = -L; l <= L; ++l) s += det_extended(priezzhev_matrix(g, k, l), 4);
  return s;
}

long double priezzhev_fourier_integral(double r, int mesh) {
  check_rate(r);
  if (mesh < 4) throw InvalidArgument("mesh too coarse");
  using cd = std::complex<double>;
  const int m = mesh;
  std::vector<double> co(m), si(m);
  std::vector<cd> ex(m);
  for (int a = 0; a < m; ++a) {
    const double t = 2 * M_PI * a / m;
    co[a] = std::cos(t);
    si[a] = std::sin(t);
    ex[a] = {co[a], si[a]};
  }
  auto idx = [m](int a) { return ((a % m) + m) % m; };
  auto dr = [&](int a, int b) { return 2.0 - r * (co[idx(a)] + co[idx(b)]); };
  const auto top = priezzhev_first_row();
  std::vector<long double> partial(m, 0);
  for_each_replica(m, [&](int a1) {
    long double acc = 0;
    for (int b1 = 0; b1 < m; ++b1) {
      const cd r4[4] = {ex[idx(-b1)], 1.0, ex[idx(a1)], ex[idx(-a1)]};
      const double w1 = si[b1] / dr(a1, b1);
      for (int a2 = 0; a2 < m; ++a2)
        for (int b2 = 0; b2 < m; ++b2) {
          const cd r2[4] = {ex[idx(b1 + b2)], 1.0, ex[idx(-(a1 + a2))], ex[idx(a1 + a2)]};
          const cd r3[4] = {ex[idx(a2 - b2)], ex[idx(a2)], ex[idx(2 * a2)], 1.0};
          // expand along the constant first row
          cd det = 0;
          for (int j = 0; j < 4; ++j) {
            int c[3], t = 0;
            for (int q = 0; q < 4; ++q)
              if (q != j) c[t++] = q;
            const cd minor = r2[c[0]] * (r3[c[1]] * r4[c[2]] - r3[c[2]] * r4[c[1]]) -
                             r2[c[1]] * (r3[c[0]] * r4[c[2]] - r3[c[2]] * r4[c[0]]) +
                             r2[c[2]] * (r3[c[0]] * r4[c[1]] - r3[c[1]] * r4[c[0]]);
            det += (j % 2 == 0 ? 1.0 : -1.0) * top[j] * minor;
          }
          // Re(i sin(beta1) det) = -sin(beta1) Im(det)
          acc += -w1 * det.imag() / (dr(a2, b2) * dr(a1 + a2, b1 + b2));
        }
    }
    partial[a1] = acc;
  });
  long double s = 0;
  for (long double p : partial) s += p;
  // (1/(64 pi^4)) (2 pi / m)^4 = 1 / (4 m^4)
  return s / (4.0L * m * m * (long double)m * m);
}

PriezzhevCheck priezzhev_cross_check(double r, int L, int mesh) {
  check_rate(r);
  if (r > 0.95) throw SizeError("killing parameter too close to 1 for a certified cross-check");
  PriezzhevCheck out;
  out.r = r;
  out.lattice_radius = L;
  out.mesh = mesh;
  out.lattice = priezzhev_lattice_sum(r, L, &out.green_grid);
  out.fourier = priezzhev_fourier_integral(r, mesh);
  out.difference = std::abs(out.lattice - out.fourier);
  return out;
}

}  // namespace sandlab
