#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "sandlab/graph.hpp"
#include "sandlab/sandpile.hpp"

namespace sandlab {

using Point = std::array<int, 2>;

// Potential kernel of Z^2 with A = a/4, so A(0,-1) = 1/4.  Values come from
// exact arithmetic in Q[1/pi] and are stored in extended precision.
class KernelTable {
 public:
  explicit KernelTable(int radius);
  int radius() const { return r_; }
  long double value(int x, int y) const;
  long double value(Point p) const { return value(p[0], p[1]); }
  double operator()(int x, int y) const { return double(value(x, y)); }
  // Largest |A(x) - mean of neighbours| over x != o with |x|_inf < R.
  long double harmonic_residual() const;
  // A(o) minus the neighbour mean, which should be -1/4.
  long double origin_defect() const;

 private:
  int r_;
  std::vector<long double> v_;  // (r+1)^2, x-major, 0 <= x, y <= r
};

KernelTable potential_kernel(int radius);

// Fit of A(y) - log|y| / (2 pi) over the diagonal and axis points with
// rmin <= |y| <= rmax.  drift holds max |A - log/2pi - c0| in each dyadic shell.
struct KernelAsymptotics {
  double c0 = 0;
  std::vector<std::pair<double, double>> drift;  // (shell radius, max deviation)
};
KernelAsymptotics kernel_asymptotics(const KernelTable& a, int rmin);

// Green function of the wired box [-n,n]^2, factorised once.
class BoxGreen {
 public:
  explicit BoxGreen(int n);
  int n() const { return n_; }
  double operator()(Point z, Point x) const;
  const SinkedMultigraph& graph() const { return g_; }

 private:
  const Eigen::VectorXd& column(int v) const;
  int n_;
  SinkedMultigraph g_;
  std::unique_ptr<GreenSolver> solver_;
  mutable std::map<int, Eigen::VectorXd> cache_;
};

double box_green(int n, Point z, Point x);

// Killed Green function G_{k,l}(r) by the periodic trapezoid rule, doubling
// the grid until successive values agree to tol.
double killed_green(int k, int l, double r, double tol = 1e-12);
// A(z,o;r) = G_{0,0}(r) - G_z(r); r = 1 returns the potential kernel.
double killed_potential(Point z, double r, double tol = 1e-12);

class KilledGreenTable {
 public:
  KilledGreenTable(double r, int radius, double tol = 1e-13);
  double operator()(int k, int l) const;
  int radius() const { return r_; }
  int grid() const { return grid_; }

 private:
  int r_;
  int grid_ = 0;
  std::vector<double> v_;
};

double height0_probability(int n);

// Rational combination c0 + c1/pi + c2/pi^2 + c3/pi^3.
struct PiPolynomial {
  std::array<BigRational, 4> c;
  double value() const;
};

struct HeightClosedForms {
  std::array<PiPolynomial, 4> p;
  PiPolynomial zeta;
};
HeightClosedForms height_probabilities_closed_form();

struct PairCorrelation {
  long double joint = 0;
  long double p0 = 0;
  long double covariance = 0;
  long double asymptote = 0;  // -p0^2 / (2|y|^4)
};

// Directions j1 = (0,-1), j2 = (-1,0), j3 = (0,1); the fourth neighbour is kept.
extern const std::array<Point, 3> kRemovedDirections;

long double one_point_determinant(const KernelTable& a);
PairCorrelation pair_correlation_00(const KernelTable& a, Point y);
PairCorrelation pair_correlation_00(Point y);

// Disk pair correlation for the height-0 field; c fixes the normalisation.
double disk_pair_correlation(std::complex<double> v, std::complex<double> w);
// The four mixed second partials d_{x1}d_{x2}, d_{y1}d_{y2}, d_{x1}d_{y2}, d_{y1}d_{x2} of
// the disk Green function.
std::array<double, 4> disk_green_mixed_partials(std::complex<double> v, std::complex<double> w);
double disk_green(std::complex<double> v, std::complex<double> w);
double disk_correlation_constant();

long double det_Mo(const KernelTable& a, Point z);
long double sum_Mo_truncated(const KernelTable& a, int L);
long double sum_Mo_truncated(int L);

struct PriezzhevCheck {
  double r = 0;
  int lattice_radius = 0;
  int mesh = 0;
  int green_grid = 0;
  long double lattice = 0;
  long double fourier = 0;
  long double difference = 0;
};

// First row of C_{k,l}(r).
std::array<double, 4> priezzhev_first_row();
std::array<std::array<double, 4>, 4> priezzhev_matrix(const KilledGreenTable& g, int k, int l);
long double priezzhev_lattice_sum(double r, int L, int* grid = nullptr);
long double priezzhev_fourier_integral(double r, int mesh);
PriezzhevCheck priezzhev_cross_check(double r, int L = 60, int mesh = 64);

// Loop-counting determinant: the base matrix with the marked entries
// replaced by -omega.  The determinant is a polynomial in omega.
struct LoopCountMatrix {
  IntMatrix base;
  std::vector<std::pair<int, int>> marked;
};

struct Digraph {
  int n = 0;
  std::vector<std::vector<int>> arcs;  // n rows, n+1 columns, last column is the sink
  IntMatrix laplacian() const;
};

struct LoopCountResult {
  std::vector<BigInt> poly;  // coefficient of omega^k at index k
  BigInt constant;           // N0 when nothing is marked
  BigInt top;                // coefficient of omega^(#marked)
};

LoopCountResult loop_counts_via_det(const LoopCountMatrix& m);

struct MinimalEvent {
  double probability = 0;
  std::vector<std::pair<int, int>> removed_edges;  // (x, y) with y possibly the sink
};

// W and xi in canonical vertex order.  Throws InvalidArgument unless xi is a
// minimal configuration on W.
MinimalEvent minimal_event_probability(const SinkedMultigraph& g, const std::vector<int>& w,
                                       const std::vector<std::int64_t>& xi);
bool is_minimal(const SinkedMultigraph& g, const std::vector<int>& w, const std::vector<std::int64_t>& xi);

}  // namespace sandlab
