#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <boost/multiprecision/cpp_int.hpp>

namespace sandlab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

struct GridSpec {
  int dim = 2;
  std::vector<int> lo;  // inclusive corners
  std::vector<int> hi;
  int gamma = 0;        // extra sink edges per vertex

  // [-n, n]^d
  static GridSpec box(int n, int d = 2, int gamma = 0);
};

struct EdgeCount {
  int x;
  int y;  // may equal the sink id
  int count;
};

struct Neighbor {
  int v;
  int mult;
};

// Vertices are 0..n-1, the sink is n. Adjacency is kept in canonical order,
// which puts the sink last because it carries the largest id.
class SinkedMultigraph {
 public:
  SinkedMultigraph() = default;
  SinkedMultigraph(int n, const std::vector<EdgeCount>& edges);

  int size() const { return n_; }
  int sink() const { return n_; }
  int degree(int x) const { return deg_[x]; }
  int sink_edges(int x) const { return sink_mult_[x]; }
  std::int64_t edge_total() const { return edge_total_; }

  std::span<const Neighbor> neighbors(int x) const {
    return {nb_.data() + nb_off_[x], nb_.data() + nb_off_[x + 1]};
  }
  // One entry per edge end at x, in the order used for bijections and rotors.
  std::span<const int> slots(int x) const {
    return {slot_to_.data() + nb_slot_off_[x], slot_to_.data() + nb_slot_off_[x + 1]};
  }
  int slot_target(int x, int slot) const { return slot_to_[nb_slot_off_[x] + slot]; }
  int slot_parallel(int x, int slot) const { return slot_par_[nb_slot_off_[x] + slot]; }
  int slot_of(int x, int y, int parallel) const;
  int multiplicity(int x, int y) const;

  // Lattice coordinates, present for grid constructions.
  bool has_coords() const { return dim_ > 0; }
  int dim() const { return dim_; }
  std::span<const int> coord(int x) const { return {coords_.data() + std::size_t(x) * dim_, std::size_t(dim_)}; }
  const std::vector<int>& box_lo() const { return lo_; }
  const std::vector<int>& box_hi() const { return hi_; }
  // -1 when the point lies outside the box.
  int vertex_at(std::span<const int> p) const;
  int origin() const;

  std::vector<EdgeCount> edge_list() const;  // x < y, sink edges included

 private:
  friend SinkedMultigraph wired_box(const GridSpec&);
  void build(const std::vector<EdgeCount>& edges);

  int n_ = 0;
  std::vector<int> deg_;
  std::vector<int> sink_mult_;
  std::vector<int> nb_off_;
  std::vector<Neighbor> nb_;
  std::vector<int> nb_slot_off_;
  std::vector<int> slot_to_;
  std::vector<int> slot_par_;
  std::int64_t edge_total_ = 0;

  int dim_ = 0;
  std::vector<int> coords_;
  std::vector<int> lo_, hi_;
};

SinkedMultigraph wired_box(const GridSpec& spec);
SinkedMultigraph wired_box(int n, int d = 2, int gamma = 0);

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

IntMatrix reduced_laplacian(const SinkedMultigraph& g);
Eigen::SparseMatrix<double> reduced_laplacian_sparse(const SinkedMultigraph& g);

BigInt det_reduced_laplacian(const SinkedMultigraph& g, int bound = 64);
double logdet_reduced_laplacian(const SinkedMultigraph& g);

// Invariant factors larger than one, each dividing the next.
std::vector<BigInt> group_invariants(const SinkedMultigraph& g, int bound = 64);

// Sparse Cholesky of the reduced Laplacian; columns of its inverse on demand.
class GreenSolver {
 public:
  explicit GreenSolver(const SinkedMultigraph& g);
  Eigen::VectorXd column(int x) const;
  double operator()(int z, int x) const { return column(x)[z]; }
  const Eigen::SparseMatrix<double>& laplacian() const { return lap_; }

 private:
  Eigen::SparseMatrix<double> lap_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol_;
};

double green(const SinkedMultigraph& g, int z, int x);
// Exact inverse of the reduced Laplacian, small graphs only.
std::vector<std::vector<BigRational>> green_exact(const SinkedMultigraph& g, int bound = 64);

void write_edge_list(std::ostream& os, const SinkedMultigraph& g);
SinkedMultigraph read_edge_list(std::istream& is);

}  // namespace sandlab
