#pragma once

#include "conetract/matrix_types.hpp"

namespace conetract {

// Cone functionals on Sym(n) relative to a positive definite base point,
//   m(x/y) = sup{t : x >= t y},   M(x/y) = inf{t : x <= t y}.
// Both are computed as the extreme eigenvalues of y^{-1/2} x y^{-1/2}; the
// symmetric similarity keeps the spectrum real by construction.
double m_over(const SymMat& x, const SpdMat& y);
double M_over(const SymMat& x, const SpdMat& y);

/// Thompson part metric d_T(a,b) = log max{M(a/b), M(b/a)}. Symmetric by
/// construction (the same two functionals are compared either way round).
double thompson_distance(const SpdMat& a, const SpdMat& b);

/// Loewner order test: a <= b iff lambda_min(b - a) >= -tol.
bool loewner_leq(const SymMat& a, const SymMat& b, double tol);

/// Same with the default tolerance, kPsdRelTol relative to the largest
/// eigenvalue magnitude of b - a.
bool loewner_leq(const SymMat& a, const SymMat& b);

// Spectral calculus on the cone interior.
SpdMat spd_sqrt(const SpdMat& p);
SymMat spd_log(const SpdMat& p);
SpdMat spd_inv(const SpdMat& p);

/// p^{-1/2} as a plain matrix; shared kernel of the functionals above.
Matrix spd_inv_sqrt(const SpdMat& p);

/// Eigenvalues of a symmetric matrix, ascending.
Vector sym_eigenvalues(const SymMat& s);

}  // namespace conetract
