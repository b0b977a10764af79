#pragma once

#include <optional>

#include "qhinf/linalg.hpp"

namespace qhinf {

/// Quadrature-form linear quantum stochastic system
///   dx = A x dt + B dw,  dy = C x dt + D dw.
/// All quadrature counts are even.
struct StateSpace {
  Matrix A, B, C, D;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index n_w() const { return B.cols(); }
  Eigen::Index n_y() const { return C.rows(); }

  /// Throws DimensionError on shape mismatch or odd quadrature counts.
  void validate() const;
};

/// Real antisymmetric commutation matrix Theta, [x_j, x_k] = 2i Theta_jk.
class CommutationStructure {
 public:
  CommutationStructure() = default;

  /// diag(J, ..., J) with n/2 blocks.
  static CommutationStructure canonical(Eigen::Index n);

  /// Accepts any numerically antisymmetric matrix; the stored value is (M - M')/2 so that
  /// antisymmetry holds exactly. The canonical flag is set when M equals diag(J, ..., J).
  static CommutationStructure from_matrix(const Matrix& m);

  const Matrix& matrix() const { return theta_; }
  bool is_canonical() const { return canonical_; }
  Eigen::Index dim() const { return theta_.rows(); }

 private:
  Matrix theta_;
  bool canonical_ = false;
};

/// 2x2 real skew-symmetric J = [[0, 1], [-1, 0]].
Matrix j_matrix();

/// Theta_n = diag_{n/2}(J). Throws DimensionError unless n is even and positive.
CommutationStructure canonical_theta(Eigen::Index n);

/// Ito matrix of the noise increments, dw dw' = F dt, split as F = S + T.
class NoiseModel {
 public:
  /// Throws ContractError if F is not Hermitian non-negative definite.
  explicit NoiseModel(CMatrix f);

  /// The canonical Ito matrix diag(I + iJ).
  static NoiseModel canonical(Eigen::Index n_w);

  const CMatrix& ito() const { return f_; }
  /// S = (F + F')/2, real symmetric.
  Matrix symmetric_part() const;
  /// T = (F - F')/2 = i * commutation_part().
  CMatrix antisymmetric_part() const;
  /// Im(T): the real antisymmetric commutation matrix of the noise.
  Matrix commutation_part() const;

 private:
  CMatrix f_;
};

/// (S, L, H) description with H = x'Rx/2 and L = Lambda x.
struct SLHModel {
  Matrix R;        ///< n x n, symmetric
  CMatrix Lambda;  ///< N_w x n
  Eigen::Index n_y = 0;
};

struct UncertaintyModel {
  Matrix E;  ///< m x n
  Eigen::Index m() const { return E.rows(); }
};

/// Symmetric Delta with Delta^2 <= I.
class UncertaintySample {
 public:
  /// Throws ContractError if Delta is not symmetric or violates Delta^2 <= I.
  explicit UncertaintySample(Matrix delta);

  /// delta * I_m.
  static UncertaintySample scalar(double delta, Eigen::Index m);

  const Matrix& matrix() const { return delta_; }
  Eigen::Index m() const { return delta_.rows(); }

 private:
  Matrix delta_;
};

/// Uncertain plant
///   dx = (A + 2 Theta E' Delta E) x dt + [B0 B1 B2] [dv; dw; du]
///   dz = C1 x dt + D12 du
///   dy = C2 x dt + [D20 D21 0] [dv; dw; du]
struct OpenPlant {
  Matrix A, B0, B1, B2, C1, D12, C2, D20, D21;
  CommutationStructure theta;
  UncertaintyModel uncertainty;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index n_v() const { return B0.cols(); }
  Eigen::Index n_w() const { return B1.cols(); }
  Eigen::Index n_u() const { return B2.cols(); }
  Eigen::Index n_z() const { return C1.rows(); }
  Eigen::Index n_y() const { return C2.rows(); }
  Eigen::Index m() const { return uncertainty.m(); }

  void validate() const;

  /// The nominal plant as a single system with input [v; w; u] and output [z; y].
  StateSpace full_system() const;
};

struct StructureMatrices {
  Matrix P;        ///< 2N x 2N interleaving permutation
  CMatrix M;       ///< (1/2) [[1, i], [1, -i]]
  CMatrix Gamma;   ///< P diag_N(M)
};

/// P^T [a_1 ... a_2N]^T = [a_1, a_{N+1}, a_2, a_{N+2}, ...]^T.
Matrix permutation_matrix(Eigen::Index n_half);

StructureMatrices structure_matrices(Eigen::Index n_w_half);

/// Builds (A, B, C, D) from (R, Lambda). Theta must be canonical.
StateSpace slh_to_state_space(const SLHModel& model, const CommutationStructure& theta);

struct RealizabilityReport {
  bool realizable = false;
  double residual_commutation = 0.0;  ///< ||A Theta + Theta A' + B Theta_w B'||_F
  double residual_output = 0.0;       ///< ||B D' - Theta C' Theta_y||_F
  double tolerance = 0.0;
};

/// Default tolerance is 1e-8 (1 + ||A||_F).
RealizabilityReport is_physically_realizable(const StateSpace& ss,
                                             const CommutationStructure& theta,
                                             std::optional<double> tolerance = std::nullopt);

/// A + 2 Theta E' Delta E.
Matrix apply_uncertainty(const OpenPlant& plant, const UncertaintySample& sample);

}  // namespace qhinf
