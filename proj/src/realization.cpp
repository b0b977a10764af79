#include "qhinf/realization.hpp"

#include <cmath>
#include <vector>

#include "qhinf/errors.hpp"

namespace qhinf {

void CoherentController::validate() const {
  const Eigen::Index nk = n_K();
  if (A_K.cols() != nk || B_K1.rows() != nk || B_K.rows() != nk || C_K.cols() != nk ||
      B_K0.rows() != n_u() || B_K0.cols() != n_vK())
    throw DimensionError("controller matrices are not conformal");
  if (theta_K.dim() != nk) throw DimensionError("theta_K dimension differs from A_K");
  for (Eigen::Index k : {nk, n_vK(), n_y(), n_u()})
    if (k % 2 != 0) throw DimensionError("controller quadrature counts must be even");
}

StateSpace CoherentController::system() const {
  validate();
  StateSpace ss;
  ss.A = A_K;
  ss.B.resize(n_K(), n_vK() + n_y());
  ss.B << B_K1, B_K;
  ss.C = C_K;
  ss.D = Matrix::Zero(n_u(), n_vK() + n_y());
  ss.D.leftCols(n_vK()) = B_K0;
  return ss;
}

Matrix skew_factor(const Matrix& xi) {
  const Eigen::Index n = xi.rows();
  if (xi.cols() != n) throw DimensionError("skew_factor: matrix not square");
  if ((xi + xi.transpose()).norm() >= 1e-10 * (1.0 + xi.norm()))
    throw ContractError("skew_factor: matrix is not antisymmetric");
  if (n == 0) return Matrix::Zero(0, 0);

  const Matrix skew = 0.5 * (xi - xi.transpose());
  // Orthogonal similarity keeps T antisymmetric, so the quasi-triangular factor is block
  // diagonal with blocks c J and zero 1x1 blocks.
  Eigen::RealSchur<Matrix> schur(skew);
  if (schur.info() != Eigen::Success) throw InternalConsistencyError("real Schur failed");
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();
  const double drop = 1e-14 * (1.0 + skew.norm());

  std::vector<Matrix> columns;
  Eigen::Index i = 0;
  while (i < n) {
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      const double c = 0.5 * (t(i, i + 1) - t(i + 1, i));
      if (std::abs(c) > drop) {
        const double s = std::sqrt(std::abs(c));
        Matrix block = q.middleCols(i, 2);
        block.col(0) *= s;
        block.col(1) *= (c > 0.0 ? s : -s);
        columns.push_back(std::move(block));
      }
      i += 2;
    } else {
      i += 1;
    }
  }
  Matrix r(n, 2 * static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k)
    r.middleCols(2 * static_cast<Eigen::Index>(k), 2) = columns[k];
  return r;
}

namespace {

void check_controller_shapes(const Matrix& a_k, const Matrix& b_k, const Matrix& c_k,
                             const CommutationStructure& theta_k,
                             const CommutationStructure& theta_y,
                             const CommutationStructure& theta_u) {
  const Eigen::Index nk = a_k.rows();
  if (a_k.cols() != nk || b_k.rows() != nk || c_k.cols() != nk)
    throw DimensionError("controller triple is not conformal");
  if (theta_k.dim() != nk || theta_y.dim() != b_k.cols() || theta_u.dim() != c_k.rows())
    throw DimensionError("commutation structures do not match the controller triple");
}

}  // namespace

Matrix noise_channel_defect(const Matrix& a_k, const Matrix& b_k, const Matrix& c_k,
                            const CommutationStructure& theta_k,
                            const CommutationStructure& theta_y,
                            const CommutationStructure& theta_u) {
  check_controller_shapes(a_k, b_k, c_k, theta_k, theta_y, theta_u);
  const Matrix& tk = theta_k.matrix();
  const Matrix forced = tk * c_k.transpose() * theta_u.matrix();
  const Matrix xi = -(a_k * tk + tk * a_k.transpose() +
                      b_k * theta_y.matrix() * b_k.transpose() +
                      forced * theta_u.matrix() * forced.transpose());
  return 0.5 * (xi - xi.transpose());
}

CoherentController complete_realization(const Matrix& a_k, const Matrix& b_k, const Matrix& c_k,
                                        const CommutationStructure& theta_k,
                                        const CommutationStructure& theta_y,
                                        const CommutationStructure& theta_u) {
  check_controller_shapes(a_k, b_k, c_k, theta_k, theta_y, theta_u);
  if (!theta_k.is_canonical())
    throw ContractError("complete_realization requires a canonical controller commutation matrix");
  if (!theta_y.is_canonical() || !theta_u.is_canonical())
    throw ContractError("measurement and control channels must carry canonical commutation");

  const Eigen::Index nu = c_k.rows();
  const Matrix forced = theta_k.matrix() * c_k.transpose() * theta_u.matrix();
  const Matrix r = skew_factor(noise_channel_defect(a_k, b_k, c_k, theta_k, theta_y, theta_u));

  CoherentController k;
  k.A_K = a_k;
  k.B_K = b_k;
  k.C_K = c_k;
  k.theta_K = theta_k;
  k.B_K1.resize(a_k.rows(), nu + r.cols());
  k.B_K1 << forced, r;
  k.B_K0 = Matrix::Zero(nu, nu + r.cols());
  k.B_K0.leftCols(nu).setIdentity();
  return k;
}

bool is_canonical_ito(const CMatrix& f) {
  if (f.rows() != f.cols() || f.rows() == 0 || f.rows() % 2 != 0) return false;
  if ((f - f.adjoint()).norm() > 1e-10 * (1.0 + f.norm())) return false;
  return (f - NoiseModel::canonical(f.rows()).ito()).norm() <= 1e-10;
}

}  // namespace qhinf
