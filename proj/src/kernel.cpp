#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <mpfr.h>

#include <boost/multiprecision/gmp.hpp>

#include "sandlab/errors.hpp"
#include "sandlab/exact2d.hpp"

namespace sandlab {

namespace {

using boost::multiprecision::mpq_rational;

// a + b / pi
struct QPi {
  mpq_rational a = 0;
  mpq_rational b = 0;
};

QPi operator*(long k, const QPi& p) { return {p.a * k, p.b * k}; }
QPi operator-(const QPi& p, const QPi& q) { return {p.a - q.a, p.b - q.b}; }

long log2_magnitude(const mpq_rational& q) {
  if (q == 0) return 0;
  const __mpq_struct* raw = q.backend().data();
  return long(mpz_sizeinbase(mpq_numref(raw), 2)) - long(mpz_sizeinbase(mpq_denref(raw), 2)) + 1;
}

}  // namespace

KernelTable::KernelTable(int radius) : r_(radius) {
  if (radius < 1) throw InvalidArgument("kernel radius must be at least 1");
  if (radius > 600) throw SizeError("kernel radius exceeds the precision budget");
  const int w = radius + 1;
  std::vector<QPi> t(std::size_t(w) * w);
  auto at = [&](int x, int y) -> QPi& {
    x = std::abs(x);
    y = std::abs(y);
    if (y > x) std::swap(x, y);
    return t[std::size_t(x) * w + y];
  };
  at(1, 0).a = mpq_rational(1, 4);
  at(1, 1).b = 1;
  mpq_rational odd_sum = 1;  // 1 + 1/3 + ... + 1/(2k-1)
  for (int i = 1; i < radius; ++i) {
    for (int j = 0; j < i; ++j) at(i + 1, j) = 4 * at(i, j) - at(i - 1, j) - at(i, j + 1) - at(i, j - 1);
    at(i + 1, i) = 2 * at(i, i) - at(i, i - 1);
    odd_sum += mpq_rational(1, 2 * (i + 1) - 1);
    at(i + 1, i + 1).b = odd_sum;
  }

  long bits = 0;
  for (const auto& p : t) bits = std::max({bits, log2_magnitude(p.a), log2_magnitude(p.b)});
  const mpfr_prec_t prec = mpfr_prec_t(std::max(128L, bits + 128));
  mpfr_t pi, acc, tmp;
  mpfr_init2(pi, prec);
  mpfr_init2(acc, prec);
  mpfr_init2(tmp, prec);
  mpfr_const_pi(pi, MPFR_RNDN);
  v_.assign(std::size_t(w) * w, 0.0L);
  for (int x = 0; x <= radius; ++x)
    for (int y = 0; y <= x; ++y) {
      const QPi& p = at(x, y);
      mpfr_set_q(acc, p.b.backend().data(), MPFR_RNDN);
      mpfr_div(acc, acc, pi, MPFR_RNDN);
      mpfr_set_q(tmp, p.a.backend().data(), MPFR_RNDN);
      mpfr_add(acc, acc, tmp, MPFR_RNDN);
      const long double v = mpfr_get_ld(acc, MPFR_RNDN);
      v_[std::size_t(x) * w + y] = v;
      v_[std::size_t(y) * w + x] = v;
    }
  mpfr_clear(pi);
  mpfr_clear(acc);
  mpfr_clear(tmp);
}

long double KernelTable::value(int x, int y) const {
  x = std::abs(x);
  y = std::abs(y);
  if (x > r_ || y > r_) throw SizeError("point outside the potential kernel window");
  return v_[std::size_t(x) * (r_ + 1) + y];
}

long double KernelTable::harmonic_residual() const {
  long double worst = 0;
  for (int x = 0; x < r_; ++x)
    for (int y = 0; y < r_; ++y) {
      if (x == 0 && y == 0) continue;
      const long double mean =
          (value(x + 1, y) + value(x - 1, y) + value(x, y + 1) + value(x, y - 1)) / 4.0L;
      worst = std::max(worst, std::fabs(value(x, y) - mean));
    }
  return worst;
}

long double KernelTable::origin_defect() const {
  const long double mean = (value(1, 0) + value(-1, 0) + value(0, 1) + value(0, -1)) / 4.0L;
  return value(0, 0) - mean;
}

KernelTable potential_kernel(int radius) { return KernelTable(radius); }

KernelAsymptotics kernel_asymptotics(const KernelTable& a, int rmin) {
  // the r^-2 correction carries cos(4 theta): +1 on the axes, -1 on the diagonals
  struct Sample {
    double r, d, c4;
  };
  std::vector<Sample> s;
  for (int k = std::max(1, rmin); k <= a.radius(); ++k) {
    s.push_back({double(k), double(a.value(k, 0)) - std::log(double(k)) / (2 * M_PI), 1.0});
    const double rd = k * std::sqrt(2.0);
    if (rd >= rmin) s.push_back({rd, double(a.value(k, k)) - std::log(rd) / (2 * M_PI), -1.0});
  }
  if (s.size() < 2) throw InvalidArgument("not enough points for the asymptotic fit");
  // least squares for d = c0 + c2 cos(4 theta) / r^2
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : s) {
    const double x = p.c4 / (p.r * p.r);
    sx += x;
    sy += p.d;
    sxx += x * x;
    sxy += x * p.d;
  }
  const double n = double(s.size());
  const double c2 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  KernelAsymptotics out;
  out.c0 = (sy - c2 * sx) / n;
  for (double lo = std::max(1, rmin); lo <= a.radius(); lo *= 2) {
    double worst = 0;
    bool any = false;
    for (const auto& p : s)
      if (p.r >= lo && p.r < 2 * lo) {
        worst = std::max(worst, std::abs(p.d - out.c0));
        any = true;
      }
    if (any) out.drift.emplace_back(lo, worst);
  }
  return out;
}

}  // namespace sandlab
