#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "msdiff/common.hpp"

namespace msdiff {

// Dense row-major square matrix, sized for species counts (a handful of rows).
struct DenseMatrix {
  int n = 0;
  std::vector<double> a;  // n*n, row-major

  DenseMatrix() = default;
  explicit DenseMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Solves A x = b in place by Gaussian elimination with partial pivoting.
// A and b are destroyed; the solution lands in b.
inline void solve_in_place(DenseMatrix& A, std::vector<double>& b) {
  const int n = A.n;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::fabs(A(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double mag = std::fabs(A(r, col));
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (best == 0.0) throw numerical_error("singular matrix in linear solve");
    if (pivot != col) {
      for (int c = col; c < n; ++c) std::swap(A(pivot, c), A(col, c));
      std::swap(b[pivot], b[col]);
    }
    const double inv = 1.0 / A(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = A(r, col) * inv;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) A(r, c) -= f * A(col, c);
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= A(r, c) * b[c];
    b[r] = s / A(r, r);
  }
}

inline std::vector<double> solve(DenseMatrix A, std::vector<double> b) {
  solve_in_place(A, b);
  return b;
}

}  // namespace msdiff
