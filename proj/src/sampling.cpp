#include "conetract/sampling.hpp"

#include <Eigen/QR>

#include <cmath>
#include <cstdlib>

namespace conetract {

Matrix random_gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

Matrix random_orthonormal(int n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_gaussian(n, n, rng));
  Matrix q = qr.householderQ();
  // Fix the column signs so the draw is a deterministic function of the
  // engine state alone.
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

SpdMat random_spd(int n, std::mt19937_64& rng, double eigLo, double eigHi) {
  std::uniform_real_distribution<double> unif(std::log(eigLo), std::log(eigHi));
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = std::exp(unif(rng));
  const Matrix u = random_orthonormal(n, rng);
  return SpdMat(SymMat(Matrix(u * d.asDiagonal() * u.transpose())));
}

int thread_cap() {
  const char* env = std::getenv("CONE_CONTRACTION_THREADS");
  if (env == nullptr) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

}  // namespace conetract
