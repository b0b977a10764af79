#include "qhinf/qmodel.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "qhinf/errors.hpp"

namespace qhinf {

namespace {

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream msg;
    msg << name << " is " << m.rows() << "x" << m.cols() << ", expected " << rows << "x" << cols;
    throw DimensionError(msg.str());
  }
}

void require_even(Eigen::Index k, const char* what) {
  if (k % 2 != 0) throw DimensionError(std::string(what) + " must be even (quadrature pairs)");
}

}  // namespace

void StateSpace::validate() const {
  const Eigen::Index nx = A.rows();
  require_shape(A, nx, nx, "A");
  require_shape(B, nx, B.cols(), "B");
  require_shape(C, C.rows(), nx, "C");
  require_shape(D, C.rows(), B.cols(), "D");
  require_even(n(), "state dimension");
  require_even(n_w(), "input dimension");
  require_even(n_y(), "output dimension");
}

Matrix j_matrix() {
  Matrix j(2, 2);
  j << 0.0, 1.0, -1.0, 0.0;
  return j;
}

CommutationStructure CommutationStructure::canonical(Eigen::Index n) {
  if (n <= 0 || n % 2 != 0)
    throw DimensionError("canonical commutation matrix needs a positive even dimension, got " +
                         std::to_string(n));
  CommutationStructure out;
  out.theta_ = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; k += 2) {
    out.theta_(k, k + 1) = 1.0;
    out.theta_(k + 1, k) = -1.0;
  }
  out.canonical_ = true;
  return out;
}

CommutationStructure CommutationStructure::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("commutation matrix must be square");
  const double skew_error = (m + m.transpose()).norm();
  if (skew_error > 1e-10 * (1.0 + m.norm()))
    throw ContractError("commutation matrix is not antisymmetric");
  CommutationStructure out;
  out.theta_ = 0.5 * (m - m.transpose());
  if (m.rows() > 0 && m.rows() % 2 == 0) {
    out.canonical_ = (out.theta_ - canonical(m.rows()).matrix()).norm() == 0.0;
  }
  return out;
}

CommutationStructure canonical_theta(Eigen::Index n) { return CommutationStructure::canonical(n); }

NoiseModel::NoiseModel(CMatrix f) : f_(std::move(f)) {
  if (f_.rows() != f_.cols()) throw DimensionError("Ito matrix must be square");
  if ((f_ - f_.adjoint()).norm() > 1e-10 * (1.0 + f_.norm()))
    throw ContractError("Ito matrix is not Hermitian");
  if (f_.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (f_ + f_.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * (1.0 + f_.norm()))
      throw ContractError("Ito matrix is not non-negative definite");
  }
}

NoiseModel NoiseModel::canonical(Eigen::Index n_w) {
  const Matrix theta = canonical_theta(n_w).matrix();
  CMatrix f = Matrix::Identity(n_w, n_w).cast<Complex>();
  f += Complex(0.0, 1.0) * theta.cast<Complex>();
  return NoiseModel(f);
}

Matrix NoiseModel::symmetric_part() const { return (0.5 * (f_ + f_.transpose())).real(); }

CMatrix NoiseModel::antisymmetric_part() const { return 0.5 * (f_ - f_.transpose()); }

Matrix NoiseModel::commutation_part() const { return antisymmetric_part().imag(); }

UncertaintySample::UncertaintySample(Matrix delta) : delta_(std::move(delta)) {
  if (delta_.rows() != delta_.cols()) throw DimensionError("Delta must be square");
  if ((delta_ - delta_.transpose()).norm() > 1e-12 * delta_.norm())
    throw ContractError("Delta must be symmetric");
  delta_ = linalg::symmetrize(delta_);
  const Matrix excess = delta_ * delta_ - Matrix::Identity(delta_.rows(), delta_.cols());
  if (linalg::max_eig_sym(excess) > 1e-9) throw ContractError("Delta violates Delta^2 <= I");
}

UncertaintySample UncertaintySample::scalar(double delta, Eigen::Index m) {
  return UncertaintySample(delta * Matrix::Identity(m, m));
}

void OpenPlant::validate() const {
  const Eigen::Index nx = n();
  require_shape(A, nx, nx, "A");
  require_shape(B0, nx, n_v(), "B0");
  require_shape(B1, nx, n_w(), "B1");
  require_shape(B2, nx, n_u(), "B2");
  require_shape(C1, n_z(), nx, "C1");
  require_shape(D12, n_z(), n_u(), "D12");
  require_shape(C2, n_y(), nx, "C2");
  require_shape(D20, n_y(), n_v(), "D20");
  require_shape(D21, n_y(), n_w(), "D21");
  if (theta.dim() != nx) throw DimensionError("theta dimension differs from the state dimension");
  if (uncertainty.E.cols() != nx) throw DimensionError("E must have one column per state");
  if (uncertainty.m() < 1) throw DimensionError("uncertainty dimension m must be at least 1");
}

StateSpace OpenPlant::full_system() const {
  validate();
  const Eigen::Index nin = n_v() + n_w() + n_u();
  StateSpace ss;
  ss.A = A;
  ss.B.resize(n(), nin);
  ss.B << B0, B1, B2;
  ss.C.resize(n_z() + n_y(), n());
  ss.C << C1, C2;
  ss.D = Matrix::Zero(n_z() + n_y(), nin);
  ss.D.block(0, n_v() + n_w(), n_z(), n_u()) = D12;
  ss.D.block(n_z(), 0, n_y(), n_v()) = D20;
  ss.D.block(n_z(), n_v(), n_y(), n_w()) = D21;
  return ss;
}

Matrix permutation_matrix(Eigen::Index n_half) {
  if (n_half < 1) throw DimensionError("permutation size must be at least 1");
  Matrix p = Matrix::Zero(2 * n_half, 2 * n_half);
  for (Eigen::Index k = 0; k < n_half; ++k) {
    p(k, 2 * k) = 1.0;
    p(n_half + k, 2 * k + 1) = 1.0;
  }
  return p;
}

StructureMatrices structure_matrices(Eigen::Index n_w_half) {
  StructureMatrices out;
  out.P = permutation_matrix(n_w_half);
  out.M.resize(2, 2);
  out.M << Complex(0.5, 0.0), Complex(0.0, 0.5), Complex(0.5, 0.0), Complex(0.0, -0.5);
  CMatrix blocks = CMatrix::Zero(2 * n_w_half, 2 * n_w_half);
  for (Eigen::Index k = 0; k < n_w_half; ++k) blocks.block(2 * k, 2 * k, 2, 2) = out.M;
  out.Gamma = out.P.cast<Complex>() * blocks;
  return out;
}

namespace {

Matrix checked_real(const CMatrix& m, const char* name) {
  const double residue = m.imag().norm();
  if (residue > 1e-10 * (1.0 + m.real().norm())) {
    std::ostringstream msg;
    msg << name << " has imaginary residue " << residue;
    throw InternalConsistencyError(msg.str());
  }
  return m.real();
}

}  // namespace

StateSpace slh_to_state_space(const SLHModel& model, const CommutationStructure& theta) {
  const Eigen::Index nx = model.R.rows();
  const Eigen::Index nw_half = model.Lambda.rows();
  const Eigen::Index nw = 2 * nw_half;
  const Eigen::Index ny = model.n_y;
  const Eigen::Index ny_half = ny / 2;
  require_shape(model.R, nx, nx, "R");
  if (model.Lambda.cols() != nx) throw DimensionError("Lambda must have one column per state");
  if (theta.dim() != nx) throw DimensionError("theta dimension differs from R");
  if (!theta.is_canonical()) throw ContractError("slh_to_state_space requires canonical theta");
  if (nw_half < 1) throw DimensionError("Lambda needs at least one row");
  require_even(ny, "n_y");
  if (ny <= 0 || ny > nw) throw DimensionError("n_y must satisfy 0 < n_y <= n_w");
  if ((model.R - model.R.transpose()).norm() > 1e-12 * (1.0 + model.R.norm()))
    throw ContractError("R must be symmetric");

  const Complex iu(0.0, 1.0);
  const CMatrix theta_c = theta.matrix().cast<Complex>();
  const CMatrix& lambda = model.Lambda;
  const CMatrix lambda_conj = lambda.conjugate();
  const StructureMatrices sm = structure_matrices(nw_half);

  StateSpace ss;
  const CMatrix lhl = lambda.adjoint() * lambda;
  ss.A = 2.0 * theta.matrix() * (linalg::symmetrize(model.R) + lhl.imag());

  CMatrix coupling(nx, nw);
  coupling << -lambda.adjoint(), lambda.transpose();
  ss.B = checked_real(2.0 * iu * theta_c * coupling * sm.Gamma, "B");

  // Selector diag(Sigma, Sigma) picks the first N_y channels of each quadrature family.
  CMatrix selector = CMatrix::Zero(2 * ny_half, nw);
  for (Eigen::Index k = 0; k < ny_half; ++k) {
    selector(k, k) = 1.0;
    selector(ny_half + k, nw_half + k) = 1.0;
  }
  CMatrix stacked(nw, nx);
  stacked << lambda + lambda_conj, -iu * lambda + iu * lambda_conj;
  const CMatrix p_y = permutation_matrix(ny_half).cast<Complex>();
  ss.C = checked_real(p_y.transpose() * selector * stacked, "C");
  ss.D = checked_real(p_y.transpose() * selector * sm.P.cast<Complex>(), "D");
  return ss;
}

RealizabilityReport is_physically_realizable(const StateSpace& ss,
                                             const CommutationStructure& theta,
                                             std::optional<double> tolerance) {
  ss.validate();
  if (theta.dim() != ss.n()) throw DimensionError("theta dimension differs from the state");
  const Matrix& th = theta.matrix();
  RealizabilityReport out;
  const Matrix theta_w =
      ss.n_w() > 0 ? canonical_theta(ss.n_w()).matrix() : Matrix::Zero(0, 0);
  const Matrix theta_y =
      ss.n_y() > 0 ? canonical_theta(ss.n_y()).matrix() : Matrix::Zero(0, 0);
  out.residual_commutation =
      (ss.A * th + th * ss.A.transpose() + ss.B * theta_w * ss.B.transpose()).norm();
  out.residual_output = (ss.B * ss.D.transpose() - th * ss.C.transpose() * theta_y).norm();
  out.tolerance = tolerance.value_or(1e-8 * (1.0 + ss.A.norm()));
  out.realizable =
      out.residual_commutation < out.tolerance && out.residual_output < out.tolerance;
  return out;
}

Matrix apply_uncertainty(const OpenPlant& plant, const UncertaintySample& sample) {
  const Matrix& e = plant.uncertainty.E;
  if (sample.m() != e.rows())
    throw DimensionError("uncertainty sample dimension differs from the plant's E");
  if (e.cols() != plant.n() || plant.theta.dim() != plant.n())
    throw DimensionError("E or theta does not match the plant state");
  return plant.A + 2.0 * plant.theta.matrix() * e.transpose() * sample.matrix() * e;
}

}  // namespace qhinf
