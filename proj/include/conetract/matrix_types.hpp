#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace conetract {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Construction-time tolerances for symmetric/positive-definite wrappers.
inline constexpr double kSymRelTol = 1e-8;   // relative asymmetry rejected above this
inline constexpr double kPsdRelTol = 1e-9;   // default PSD membership tolerance (relative)

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotSymmetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotPositiveDefiniteError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Feasibility constraint of a vector field violated (e.g. R + D'PD not
/// positive definite for the generalized Riccati field).
class FeasibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hypotheses of a closed-form theorem not met by the supplied data.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Real symmetric n x n matrix. Input is symmetrized to (X + X')/2 at
/// construction; asymmetry above kSymRelTol (relative to the largest entry)
/// is rejected because it indicates a logic error upstream rather than
/// integration round-off.
class SymMat {
 public:
  explicit SymMat(Matrix entries);

  static SymMat Zero(int n) { return SymMat(Matrix::Zero(n, n)); }
  static SymMat Identity(int n) { return SymMat(Matrix::Identity(n, n)); }
  static SymMat Diagonal(const Vector& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  SymMat operator+(const SymMat& o) const;
  SymMat operator-(const SymMat& o) const;
  SymMat operator*(double c) const { return SymMat(Matrix(m_ * c)); }
  SymMat operator-() const { return SymMat(Matrix(-m_)); }

 private:
  Matrix m_;
};

inline SymMat operator*(double c, const SymMat& s) { return s * c; }

/// Positive definite symmetric matrix: an element of the cone interior.
/// Caches the smallest eigenvalue computed at construction; construction
/// fails unless it is strictly positive.
class SpdMat {
 public:
  explicit SpdMat(SymMat base);
  explicit SpdMat(Matrix entries) : SpdMat(SymMat(std::move(entries))) {}

  static SpdMat Identity(int n) { return SpdMat(SymMat::Identity(n)); }

  int dim() const { return base_.dim(); }
  const SymMat& sym() const { return base_; }
  const Matrix& mat() const { return base_.mat(); }
  double operator()(int i, int j) const { return base_(i, j); }
  double minEig() const { return min_eig_; }

  operator const SymMat&() const { return base_; }

 private:
  SymMat base_;
  double min_eig_;
};

/// Loewner order interval. lo absent means the zero lower bound, i.e. the
/// interval (0, hi] when openLo is set.
struct OrderInterval {
  std::optional<SpdMat> lo;
  SpdMat hi;
  bool openLo = true;
  bool openHi = false;

  OrderInterval(std::optional<SpdMat> lo_, SpdMat hi_, bool openLo_ = true, bool openHi_ = false);
};

namespace detail {
void require_same_dim(int a, int b, const char* what);
}

}  // namespace conetract
