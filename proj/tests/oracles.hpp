#pragma once

// Reference computations used as test oracles. They deliberately avoid the library's numerical
// routines (Riccati solver, Hamiltonian bisection, realization completion).

#include <cmath>
#include <complex>
#include <optional>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline Matrix theta(Eigen::Index n) {
  Matrix t = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    t(k, k + 1) = 1.0;
    t(k + 1, k) = -1.0;
  }
  return t;
}

inline double max_eig(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline Matrix randn(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = n(rng);
  return m;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Stable matrix T diag(blocks) T^-1 with poles at damping ratio >= 0.6 and T near identity.
inline Matrix random_stable(std::mt19937_64& rng, Eigen::Index n) {
  Matrix d = Matrix::Zero(n, n);
  Eigen::Index i = 0;
  while (i < n) {
    if (i + 1 < n && uniform(rng, 0.0, 1.0) < 0.5) {
      const double sigma = uniform(rng, 0.3, 5.0);
      const double omega = uniform(rng, 0.0, 1.3) * sigma;
      d(i, i) = -sigma;
      d(i + 1, i + 1) = -sigma;
      d(i, i + 1) = omega;
      d(i + 1, i) = -omega;
      i += 2;
    } else {
      d(i, i) = -uniform(rng, 0.3, 5.0);
      i += 1;
    }
  }
  const Matrix t = Matrix::Identity(n, n) + randn(rng, n, n, 0.25);
  return t * d * t.inverse();
}

inline CMatrix transfer(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                        Complex s) {
  CMatrix m = -a.cast<Complex>();
  m.diagonal().array() += s;
  return c.cast<Complex>() * m.fullPivLu().solve(b.cast<Complex>()) + d.cast<Complex>();
}

inline double sigma_max(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

/// Peak gain over w = 0 and `points` log-spaced frequencies in [1e-3, 1e3] times the pole
/// magnitude range.
inline double grid_hinf(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                        int points = 2000) {
  const Eigen::VectorXcd poles = a.eigenvalues();
  const double lo = 1e-3 * poles.cwiseAbs().minCoeff();
  const double hi = 1e3 * poles.cwiseAbs().maxCoeff();
  double best = sigma_max(transfer(a, b, c, d, 0.0));
  for (int k = 0; k < points; ++k) {
    const double w = lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
    best = std::max(best, sigma_max(transfer(a, b, c, d, Complex(0.0, w))));
  }
  return best;
}

/// Residuals of the quadrature realizability conditions with canonical structures.
struct Residuals {
  double commutation = 0.0;
  double output = 0.0;
};

inline Residuals realizability(const Matrix& a, const Matrix& b, const Matrix& c,
                               const Matrix& d) {
  const Matrix t = theta(a.rows());
  const Matrix tw = theta(b.cols());
  const Matrix ty = theta(c.rows());
  return {(a * t + t * a.transpose() + b * tw * b.transpose()).norm(),
          (b * d.transpose() - t * c.transpose() * ty).norm()};
}

/// Scalar quadratic 2 a x + q x^2 + k = 0; the stabilizing root has a + q x < 0.
inline std::optional<double> stabilizing_root(double a, double q, double k) {
  if (q == 0.0) {
    if (a >= 0.0) return std::nullopt;
    return -k / (2.0 * a);
  }
  const double disc = a * a - q * k;
  if (disc <= 0.0) return std::nullopt;
  return (-a - std::sqrt(disc)) / q;
}

/// Cavity data with every matrix a multiple of I and Theta = J, so J J' = I.
struct CavityScalars {
  double a = -6.0;
  double b1 = -std::sqrt(5.0);
  double b2 = -std::sqrt(0.5);
  double c1 = std::sqrt(0.5);
  double d12 = 1.0;
  double c2 = std::sqrt(5.0);
  double d21 = 1.0;
  double e = 1.0;
};

inline std::optional<double> cavity_x(const CavityScalars& s, double g, double eps) {
  const double e1 = s.d12 * s.d12;
  const double acl = s.a - s.b2 * s.d12 * s.c1 / e1;
  const double q = 4.0 * eps * s.e * s.e + s.b1 * s.b1 / (g * g) - s.b2 * s.b2 / e1;
  const double k = s.e * s.e / eps + s.c1 * s.c1 - s.c1 * s.d12 * s.d12 * s.c1 / e1;
  return stabilizing_root(acl, q, k);
}

inline std::optional<double> cavity_y(const CavityScalars& s, double g, double eps) {
  const double e2 = s.d21 * s.d21 / (g * g);
  const double acl = s.a - s.b1 * s.d21 * s.c2 / (g * g * e2);
  const double q = s.e * s.e / eps + s.c1 * s.c1 - s.c2 * s.c2 / e2;
  const double k = 4.0 * eps * s.e * s.e + s.b1 * s.b1 / (g * g) -
                   s.b1 * s.d21 * s.d21 * s.b1 / (g * g * g * g * e2);
  return stabilizing_root(acl, q, k);
}

/// Stability sign of the X and Y closed loops at a scalar root.
inline double cavity_x_closed_loop(const CavityScalars& s, double g, double eps, double x) {
  const double e1 = s.d12 * s.d12;
  const double acl = s.a - s.b2 * s.d12 * s.c1 / e1;
  const double q = 4.0 * eps * s.e * s.e + s.b1 * s.b1 / (g * g) - s.b2 * s.b2 / e1;
  return acl + q * x;
}

inline double cavity_y_closed_loop(const CavityScalars& s, double g, double eps, double y) {
  const double e2 = s.d21 * s.d21 / (g * g);
  const double acl = s.a - s.b1 * s.d21 * s.c2 / (g * g * e2);
  const double q = s.e * s.e / eps + s.c1 * s.c1 - s.c2 * s.c2 / e2;
  return acl + q * y;
}

/// Noise-channel defect of a scalar controller a I, b I, c I with Theta = J: -(2a + b^2 + c^2) J.
inline double scalar_defect(double a, double b, double c) { return -(2.0 * a + b * b + c * c); }

}  // namespace oracle
