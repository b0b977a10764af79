#include "qhinf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <lapacke.h>

#include "qhinf/errors.hpp"

namespace qhinf::linalg {

Matrix blkdiag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

CVector eigenvalues(const Matrix& a) {
  if (a.rows() == 0) return CVector(0);
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) throw InternalConsistencyError("eigenvalue iteration failed");
  return es.eigenvalues();
}

double spectral_abscissa(const Matrix& a) {
  double out = -std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues(a)) out = std::max(out, l.real());
  return out;
}

double spectral_radius(const Matrix& a) {
  double out = 0.0;
  for (const auto& l : eigenvalues(a)) out = std::max(out, std::abs(l));
  return out;
}

bool is_hurwitz(const Matrix& a, double margin) { return spectral_abscissa(a) < -margin; }

double max_eig_sym(const Matrix& s) {
  if (s.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double min_eig_sym(const Matrix& s) {
  if (s.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double sigma_max(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

double sigma_max(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
}

double condition_number(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  const Vector sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.rows();
  if (a.cols() != n || b.cols() != m || c.rows() != n || c.cols() != m)
    throw DimensionError("solve_sylvester: nonconformal operands");
  if (n == 0 || m == 0) return Matrix::Zero(n, m);

  Eigen::ComplexSchur<CMatrix> sa(a.cast<Complex>());
  Eigen::ComplexSchur<CMatrix> sb(b.cast<Complex>());
  const CMatrix& ta = sa.matrixT();
  const CMatrix& tb = sb.matrixT();
  const CMatrix& u = sa.matrixU();
  const CMatrix& v = sb.matrixU();

  const CMatrix f = u.adjoint() * c.cast<Complex>() * v;
  CMatrix y = CMatrix::Zero(n, m);
  // tb is upper triangular, so column k only couples to columns j < k.
  for (Eigen::Index k = 0; k < m; ++k) {
    CVector rhs = f.col(k);
    if (k > 0) rhs -= y.leftCols(k) * tb.col(k).head(k);
    CMatrix shifted = ta;
    shifted.diagonal().array() += tb(k, k);
    y.col(k) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return (u * y * v.adjoint()).real();
}

namespace {

lapack_logical select_open_lhp(const double* re, const double* /*im*/) { return *re < 0.0; }

}  // namespace

OrderedSchur ordered_real_schur(const Matrix& h) {
  const lapack_int n = static_cast<lapack_int>(h.rows());
  if (h.cols() != h.rows()) throw DimensionError("ordered_real_schur: matrix not square");
  OrderedSchur out;
  out.t = h;
  out.z = Matrix::Zero(n, n);
  out.eigenvalues = CVector(n);
  if (n == 0) return out;

  std::vector<double> wr(n), wi(n);
  lapack_int sdim = 0;
  const lapack_int info =
      LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'S', select_open_lhp, n, out.t.data(), n, &sdim,
                    wr.data(), wi.data(), out.z.data(), n);
  if (info < 0) throw InternalConsistencyError("dgees: illegal argument");
  if (info > 0 && info <= n) throw InternalConsistencyError("dgees: QR iteration failed");
  // info == n+1 / n+2 flag reordering trouble; the caller validates the subspace.
  out.stable_dim = static_cast<int>(sdim);
  for (lapack_int i = 0; i < n; ++i) out.eigenvalues(i) = Complex(wr[i], wi[i]);
  return out;
}

std::vector<Complex> invariant_zeros(const Matrix& a, const Matrix& b, const Matrix& c,
                                     const Matrix& d) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n || c.cols() != n || d.rows() != c.rows() ||
      d.cols() != b.cols())
    throw DimensionError("invariant_zeros: nonconformal pencil");

  Matrix a_hat = a;
  Matrix c_hat = c;
  if (d.cols() > 0) {
    Eigen::ColPivHouseholderQR<Matrix> qr(d);
    qr.setThreshold(1e-12);
    if (qr.rank() < d.cols())
      throw ContractError("invariant_zeros: feedthrough lacks full column rank");
    // Eliminate the input: u = -D^+ C x, leaving (A - B D^+ C) x = s x and (I - D D^+) C x = 0.
    const Matrix d_pinv = (d.transpose() * d).ldlt().solve(d.transpose());
    a_hat = a - b * d_pinv * c;
    c_hat = c - d * (d_pinv * c);
  }

  std::vector<Complex> zeros;
  if (n == 0) return zeros;
  const CVector lambdas = eigenvalues(a_hat);
  Matrix stacked(n + c_hat.rows(), n);
  stacked << a_hat, c_hat;
  const double scale = 1.0 + sigma_max(stacked);
  for (const auto& lambda : lambdas) {
    CMatrix pbh(n + c_hat.rows(), n);
    pbh.topRows(n) = a_hat.cast<Complex>() - lambda * CMatrix::Identity(n, n);
    pbh.bottomRows(c_hat.rows()) = c_hat.cast<Complex>();
    const Vector sv = Eigen::JacobiSVD<CMatrix>(pbh).singularValues();
    if (sv(sv.size() - 1) <= 1e-8 * scale) zeros.push_back(lambda);
  }
  return zeros;
}

}  // namespace qhinf::linalg
