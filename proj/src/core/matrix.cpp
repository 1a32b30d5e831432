#include "matrix.hpp"

#include <cmath>

namespace tsforge {

double Rng::next_normal() {
  double u1 = next_double();
  double u2 = next_double();
  while (u1 <= 0.0) u1 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Matrix ridge_solve(const Matrix& x, const Matrix& y, double ridge) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const std::size_t m = y.cols();
  if (n != y.rows()) throw TsError("ridge_solve: row mismatch");
  if (p == 0) throw TsError("ridge_solve: empty design matrix");

  // Gram matrix A = XᵀX + ridge·I, rhs B = XᵀY.
  Matrix a(p, p);
  Matrix b(p, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double xij = x(i, j);
      if (xij == 0.0) continue;
      for (std::size_t k = j; k < p; ++k) a(j, k) += xij * x(i, k);
      for (std::size_t k = 0; k < m; ++k) b(j, k) += xij * y(i, k);
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    a(j, j) += ridge;
    for (std::size_t k = 0; k < j; ++k) a(j, k) = a(k, j);
  }

  // Cholesky A = LLᵀ.
  Matrix l(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw TsError("ridge_solve: matrix not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }

  // Forward/back substitution per rhs column.
  Matrix w(p, m);
  std::vector<double> z(p);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < p; ++i) {
      double s = b(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * z[k];
      z[i] = s / l(i, i);
    }
    for (std::size_t ii = p; ii-- > 0;) {
      double s = z[ii];
      for (std::size_t k = ii + 1; k < p; ++k) s -= l(k, ii) * w(k, c);
      w(ii, c) = s / l(ii, ii);
    }
  }
  return w;
}

}  // namespace tsforge
