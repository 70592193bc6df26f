#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace sandlab {

using BigMatrix = std::vector<std::vector<boost::multiprecision::cpp_int>>;

// Fraction-free Gaussian elimination; exact for any integer matrix.
boost::multiprecision::cpp_int bareiss_det(BigMatrix a);

// Diagonal of the Smith normal form, including unit factors.
std::vector<boost::multiprecision::cpp_int> smith_diagonal(BigMatrix a);

template <class M>
long double det_extended(M a, int n) {
  long double det = 1;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if ((a[r][c] < 0 ? -a[r][c] : a[r][c]) > (a[p][c] < 0 ? -a[p][c] : a[p][c])) p = r;
    if (a[p][c] == 0) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (int r = c + 1; r < n; ++r) {
      long double f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

}  // namespace sandlab
