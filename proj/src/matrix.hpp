#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace f0lab {

using Vector = std::vector<double>;

// Dense row-major matrix. Rows are contiguous so the dot/axpy kernels below
// vectorize; this is the only numeric container the network code uses.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }
  double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return a.size(); }
  void fill(double v) { a.assign(a.size(), v); }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

inline double dot(const double* x, const double* y, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

// y = W x
inline void matvec(const Matrix& w, const double* x, double* y) {
  for (int r = 0; r < w.rows; ++r) y[r] = dot(w.row(r), x, w.cols);
}

// y += W x
inline void matvec_add(const Matrix& w, const double* x, double* y) {
  for (int r = 0; r < w.rows; ++r) y[r] += dot(w.row(r), x, w.cols);
}

// y += W^T v  (row-major transpose product: axpy over rows)
inline void matvec_t_add(const Matrix& w, const double* v, double* y) {
  for (int r = 0; r < w.rows; ++r) {
    const double vr = v[r];
    if (vr == 0.0) continue;
    const double* wr = w.row(r);
    for (int c = 0; c < w.cols; ++c) y[c] += vr * wr[c];
  }
}

// W += u v^T
inline void outer_add(Matrix& w, const double* u, const double* v) {
  for (int r = 0; r < w.rows; ++r) {
    const double ur = u[r];
    double* wr = w.row(r);
    for (int c = 0; c < w.cols; ++c) wr[c] += ur * v[c];
  }
}

}  // namespace f0lab
