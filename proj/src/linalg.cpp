#include "sandlab/linalg.hpp"

#include <utility>

namespace sandlab {

using boost::multiprecision::cpp_int;

cpp_int bareiss_det(BigMatrix a) {
  const int n = int(a.size());
  if (n == 0) return 1;
  int sign = 1;
  cpp_int prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a[k][k] == 0) {
      int p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[p], a[k]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

std::vector<cpp_int> smith_diagonal(BigMatrix a) {
  const int rows = int(a.size());
  const int cols = rows ? int(a[0].size()) : 0;
  const int m = std::min(rows, cols);
  std::vector<cpp_int> diag;
  for (int k = 0; k < m; ++k) {
    for (;;) {
      // smallest nonzero entry of the trailing block becomes the pivot
      int pr = -1, pc = -1;
      cpp_int best = 0;
      for (int i = k; i < rows; ++i)
        for (int j = k; j < cols; ++j)
          if (a[i][j] != 0 && (pr < 0 || abs(a[i][j]) < best)) {
            best = abs(a[i][j]);
            pr = i;
            pc = j;
          }
      if (pr < 0) {
        for (int r = k; r < m; ++r) diag.push_back(0);
        return diag;
      }
      std::swap(a[pr], a[k]);
      if (pc != k)
        for (int i = 0; i < rows; ++i) std::swap(a[i][pc], a[i][k]);

      bool clean = true;
      for (int i = k + 1; i < rows; ++i) {
        if (a[i][k] == 0) continue;
        cpp_int q = a[i][k] / a[k][k];
        for (int j = k; j < cols; ++j) a[i][j] -= q * a[k][j];
        if (a[i][k] != 0) clean = false;
      }
      for (int j = k + 1; j < cols; ++j) {
        if (a[k][j] == 0) continue;
        cpp_int q = a[k][j] / a[k][k];
        for (int i = k; i < rows; ++i) a[i][j] -= q * a[i][k];
        if (a[k][j] != 0) clean = false;
      }
      if (!clean) continue;

      // the pivot must divide the whole trailing block
      int bad = -1;
      for (int i = k + 1; i < rows && bad < 0; ++i)
        for (int j = k + 1; j < cols; ++j)
          if (a[i][j] % a[k][k] != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      for (int j = k; j < cols; ++j) a[k][j] += a[bad][j];
    }
    diag.push_back(abs(a[k][k]));
  }
  return diag;
}

}  // namespace sandlab
