#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cylbem/special.hpp"

namespace cylbem {

/** \brief Chebyshev-Gauss-Lobatto points x_j = cos(pi j / N), j = 0..N (descending). */
inline std::vector<double> cheb_points(int N) {
  std::vector<double> x(N + 1);
  for (int j = 0; j <= N; ++j) x[j] = std::cos(pi * j / N);
  return x;
}

/** \brief Spectral differentiation matrix on the CGL grid. */
inline Eigen::MatrixXd cheb_diff(int N) {
  const auto x = cheb_points(N);
  Eigen::MatrixXd D(N + 1, N + 1);
  auto c = [N](int i) { return (i == 0 || i == N) ? 2.0 : 1.0; };
  for (int i = 0; i <= N; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = (c(i) / c(j)) * sign / (x[i] - x[j]);
      rowsum += D(i, j);
    }
    D(i, i) = -rowsum; // negative sum trick: rows kill constants exactly
  }
  return D;
}

/** \brief Integral over [-1,1] of the CGL interpolant (Clenshaw-Curtis). */
inline double cheb_integrate(const Eigen::VectorXd& v) {
  const int N = static_cast<int>(v.size()) - 1;
  double total = 0.0;
  for (int k = 0; k <= N; k += 2) {
    // Chebyshev coefficient a_k with half weights at the endpoints
    double a = 0.5 * (v(0) + (k % 2 == 0 ? 1.0 : -1.0) * v(N));
    for (int j = 1; j < N; ++j) a += v(j) * std::cos(pi * k * j / N);
    a *= 2.0 / N;
    if (k == 0 || k == N) a *= 0.5;
    total += 2.0 * a / (1.0 - static_cast<double>(k) * k);
  }
  return total;
}

} // namespace cylbem
