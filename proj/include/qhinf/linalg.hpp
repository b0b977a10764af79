#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qhinf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

namespace linalg {

/// Block-diagonal concatenation.
Matrix blkdiag(const Matrix& a, const Matrix& b);

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Eigenvalues of a general real square matrix.
CVector eigenvalues(const Matrix& a);

/// max Re(lambda); -inf for an empty matrix.
double spectral_abscissa(const Matrix& a);

/// max |lambda|; 0 for an empty matrix.
double spectral_radius(const Matrix& a);

bool is_hurwitz(const Matrix& a, double margin = 0.0);

double max_eig_sym(const Matrix& s);
double min_eig_sym(const Matrix& s);

/// Largest singular value; 0 for empty matrices.
double sigma_max(const Matrix& m);
double sigma_max(const CMatrix& m);

/// 2-norm condition number; +inf when singular.
double condition_number(const Matrix& m);

/// Solves A X + X B = C (Bartels–Stewart on complex Schur forms).
Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c);

struct OrderedSchur {
  Matrix t;            ///< quasi-triangular factor
  Matrix z;            ///< orthogonal factor, H = Z T Z'
  int stable_dim = 0;  ///< number of leading eigenvalues with Re < 0
  CVector eigenvalues;
};

/// Real Schur form with the open-left-half-plane eigenvalues ordered first.
OrderedSchur ordered_real_schur(const Matrix& h);

/// Invariant zeros of the tall system pencil [A - sI, B; C, D] with D of full column rank.
/// Throws ContractError if D is rank deficient.
std::vector<Complex> invariant_zeros(const Matrix& a, const Matrix& b, const Matrix& c,
                                     const Matrix& d);

}  // namespace linalg
}  // namespace qhinf
