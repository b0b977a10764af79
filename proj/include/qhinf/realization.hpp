#pragma once

#include "qhinf/linalg.hpp"
#include "qhinf/qmodel.hpp"

namespace qhinf {

/// Coherent controller
///   dxi = A_K xi dt + [B_K1 B_K] [dv_K; dy]
///   du  = C_K xi dt + [B_K0 0] [dv_K; dy]
struct CoherentController {
  Matrix A_K, B_K1, B_K, C_K, B_K0;
  CommutationStructure theta_K;

  Eigen::Index n_K() const { return A_K.rows(); }
  Eigen::Index n_vK() const { return B_K1.cols(); }
  Eigen::Index n_y() const { return B_K.cols(); }
  Eigen::Index n_u() const { return C_K.rows(); }

  void validate() const;

  /// (A_K, [B_K1 B_K], C_K, [B_K0 0]) with input [v_K; y].
  StateSpace system() const;
};

/// Real R with R diag(J, ..., J) R' = Xi for antisymmetric Xi. R has one pair of columns per
/// nonzero 2x2 block of the real canonical form of Xi; Xi = 0 yields zero columns.
Matrix skew_factor(const Matrix& xi);

/// Xi = -(A_K Th_K + Th_K A_K' + B_K Th_y B_K' + F Th_u F') with F = Th_K C_K' Th_u: the
/// commutation defect the additional noise channels must supply.
Matrix noise_channel_defect(const Matrix& a_k, const Matrix& b_k, const Matrix& c_k,
                            const CommutationStructure& theta_k,
                            const CommutationStructure& theta_y,
                            const CommutationStructure& theta_u);

/// Completes (A_K, B_K, C_K) to a physically realizable controller with B_K0 = [I 0].
/// theta_k must be canonical (ContractError otherwise).
CoherentController complete_realization(const Matrix& a_k, const Matrix& b_k, const Matrix& c_k,
                                        const CommutationStructure& theta_k,
                                        const CommutationStructure& theta_y,
                                        const CommutationStructure& theta_u);

/// True iff F = diag(I + iJ, ..., I + iJ) to 1e-10.
bool is_canonical_ito(const CMatrix& f);

}  // namespace qhinf
