#include "conetract/matrix_types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>

namespace conetract {

namespace detail {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace detail

SymMat::SymMat(Matrix entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 1) {
    throw DimensionError("SymMat: square matrix of dim >= 1 required");
  }
  const double max_abs = entries.cwiseAbs().maxCoeff();
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (max_abs > 0.0 && asym > kSymRelTol * max_abs) {
    throw NotSymmetricError("SymMat: relative asymmetry " + std::to_string(asym / max_abs) +
                            " exceeds tolerance");
  }
  m_ = 0.5 * (entries + entries.transpose());
}

SymMat SymMat::Diagonal(const Vector& d) {
  return SymMat(Matrix(d.asDiagonal()));
}

SymMat SymMat::operator+(const SymMat& o) const {
  detail::require_same_dim(dim(), o.dim(), "SymMat+");
  return SymMat(Matrix(m_ + o.m_));
}

SymMat SymMat::operator-(const SymMat& o) const {
  detail::require_same_dim(dim(), o.dim(), "SymMat-");
  return SymMat(Matrix(m_ - o.m_));
}

SpdMat::SpdMat(SymMat base) : base_(std::move(base)) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(base_.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("SpdMat: eigendecomposition failed");
  }
  min_eig_ = es.eigenvalues().minCoeff();
  if (!(min_eig_ > 0.0)) {
    throw NotPositiveDefiniteError("SpdMat: smallest eigenvalue " + std::to_string(min_eig_) +
                                   " is not strictly positive");
  }
}

OrderInterval::OrderInterval(std::optional<SpdMat> lo_, SpdMat hi_, bool openLo_, bool openHi_)
    : lo(std::move(lo_)), hi(std::move(hi_)), openLo(openLo_), openHi(openHi_) {
  if (lo.has_value()) {
    detail::require_same_dim(lo->dim(), hi.dim(), "OrderInterval");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hi.mat() - lo->mat(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdRelTol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff())) {
      throw NotPositiveDefiniteError("OrderInterval: lo <= hi violated");
    }
  }
}

}  // namespace conetract
