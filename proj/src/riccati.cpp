#include "qhinf/riccati.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qhinf/errors.hpp"

namespace qhinf {

namespace {

constexpr double kImagAxisMargin = 1e-8;
constexpr double kSubspaceCondLimit = 1e12;
constexpr int kMaxNewtonSteps = 20;

// Internal X-form linear term: the Y-form equation is the X-form one for A'.
Matrix xform_linear(const CareProblem& p) {
  return p.form == CareForm::X ? p.linear : Matrix(p.linear.transpose());
}

Matrix xform_lhs(const Matrix& a, const Matrix& q, const Matrix& k, const Matrix& x) {
  return a.transpose() * x + x * a + x * q * x + k;
}

double term_scale(const Matrix& a, const Matrix& q, const Matrix& k, const Matrix& x) {
  return 1.0 + 2.0 * (a.transpose() * x).norm() + (x * q * x).norm() + k.norm();
}

CareSolution finish(const CareProblem& p, Matrix x, int newton_steps) {
  CareSolution out;
  out.value = std::move(x);
  out.residual = care_lhs(p, out.value).norm() / (1.0 + out.value.norm());
  out.closed_loop_spectrum = linalg::eigenvalues(care_closed_loop(p, out.value));
  out.newton_steps = newton_steps;
  return out;
}

}  // namespace

void CareProblem::validate() const {
  const Eigen::Index n = linear.rows();
  if (linear.cols() != n || quadratic.rows() != n || quadratic.cols() != n ||
      constant.rows() != n || constant.cols() != n)
    throw DimensionError("CARE operands must be square and of equal size");
  const double scale = 1.0 + quadratic.norm() + constant.norm();
  if ((quadratic - quadratic.transpose()).norm() > 1e-12 * scale ||
      (constant - constant.transpose()).norm() > 1e-12 * scale)
    throw ContractError("CARE quadratic and constant terms must be symmetric");
}

bool CareSolution::stabilizing() const {
  if (marginal) return false;
  for (const auto& l : closed_loop_spectrum)
    if (!(l.real() < 0.0)) return false;
  return true;
}

Matrix care_lhs(const CareProblem& p, const Matrix& x) {
  if (p.form == CareForm::X) return xform_lhs(p.linear, p.quadratic, p.constant, x);
  return p.linear * x + x * p.linear.transpose() + x * p.quadratic * x + p.constant;
}

Matrix care_closed_loop(const CareProblem& p, const Matrix& x) {
  if (p.form == CareForm::X) return p.linear + p.quadratic * x;
  return p.linear + x * p.quadratic;
}

CareSolution solve_care_stabilizing(const CareProblem& problem) {
  problem.validate();
  const Eigen::Index n = problem.linear.rows();
  const Matrix a = xform_linear(problem);
  const Matrix q = linalg::symmetrize(problem.quadratic);
  const Matrix k = linalg::symmetrize(problem.constant);

  if (n == 0) return finish(problem, Matrix::Zero(0, 0), 0);

  // K = 0 admits X = 0 exactly; it is the stabilizing solution whenever A is Hurwitz.
  if (k.norm() == 0.0) {
    if (linalg::is_hurwitz(a)) return finish(problem, Matrix::Zero(n, n), 0);
    if (q.norm() == 0.0) {
      CareSolution out = finish(problem, Matrix::Zero(n, n), 0);
      out.marginal = true;
      return out;
    }
  }

  Matrix h(2 * n, 2 * n);
  h << a, q, -k, -a.transpose();
  const double h_scale = std::max(1.0, h.norm());

  const linalg::OrderedSchur schur = linalg::ordered_real_schur(h);
  for (const auto& l : schur.eigenvalues) {
    if (std::abs(l.real()) <= kImagAxisMargin * h_scale) {
      std::ostringstream msg;
      msg << "Hamiltonian eigenvalue " << l << " lies on the imaginary axis";
      throw NoStabilizingSolution(msg.str());
    }
  }
  if (schur.stable_dim != n)
    throw NoStabilizingSolution("stable invariant subspace has the wrong dimension");

  const Matrix u1 = schur.z.topLeftCorner(n, n);
  const Matrix u2 = schur.z.bottomLeftCorner(n, n);
  const double cond = linalg::condition_number(u1);
  if (!(cond <= kSubspaceCondLimit)) {
    std::ostringstream msg;
    msg << "stable subspace basis is singular (condition number " << cond << ")";
    throw SubspaceSingular(msg.str());
  }
  // X U1 = U2
  Matrix x = linalg::symmetrize(u1.transpose().partialPivLu().solve(u2.transpose()).transpose());

  int steps = 0;
  double res = xform_lhs(a, q, k, x).norm();
  while (steps < kMaxNewtonSteps && res > 1e-12 * term_scale(a, q, k, x)) {
    const Matrix ak = a + q * x;
    const Matrix step = linalg::solve_sylvester(ak.transpose(), ak, -xform_lhs(a, q, k, x));
    const Matrix candidate = linalg::symmetrize(x + step);
    const double cand_res = xform_lhs(a, q, k, candidate).norm();
    ++steps;
    if (!(cand_res < res)) break;
    x = candidate;
    res = cand_res;
  }
  return finish(problem, std::move(x), steps);
}

namespace {

Matrix uncertainty_gain(const OpenPlant& plant, double eps) {
  const Matrix& e = plant.uncertainty.E;
  const Matrix& th = plant.theta.matrix();
  return 4.0 * eps * th * e.transpose() * e * th.transpose();
}

void check_synthesis_args(const OpenPlant& plant, double g, double eps) {
  plant.validate();
  if (!(g > 0.0)) throw ContractError("attenuation g must be positive");
  if (!(eps > 0.0)) throw ContractError("scaling eps must be positive");
}

Matrix e1_matrix(const OpenPlant& plant) { return plant.D12.transpose() * plant.D12; }

Matrix e2_matrix(const OpenPlant& plant, double g) {
  return plant.D21 * plant.D21.transpose() / (g * g);
}

constexpr double kInvertibleEig = 1e-10;

}  // namespace

CareProblem riccati_X_problem(const OpenPlant& plant, double g, double eps) {
  check_synthesis_args(plant, g, eps);
  const Matrix e1 = e1_matrix(plant);
  if (!(linalg::min_eig_sym(e1) > kInvertibleEig))
    throw AssumptionViolation(1, "E1 = D12'D12 is not positive definite");
  const auto e1_llt = e1.llt();
  const Matrix& e = plant.uncertainty.E;
  const Matrix e1_inv_d12t = e1_llt.solve(plant.D12.transpose());

  CareProblem p;
  p.form = CareForm::X;
  p.linear = plant.A - plant.B2 * e1_inv_d12t * plant.C1;
  p.quadratic = linalg::symmetrize(uncertainty_gain(plant, eps) +
                                   plant.B1 * plant.B1.transpose() / (g * g) -
                                   plant.B2 * e1_llt.solve(plant.B2.transpose()));
  p.constant = linalg::symmetrize(e.transpose() * e / eps + plant.C1.transpose() * plant.C1 -
                                  plant.C1.transpose() * plant.D12 * e1_inv_d12t * plant.C1);
  return p;
}

CareProblem riccati_Y_problem(const OpenPlant& plant, double g, double eps) {
  check_synthesis_args(plant, g, eps);
  const Matrix e2 = e2_matrix(plant, g);
  if (!(linalg::min_eig_sym(e2) > kInvertibleEig))
    throw AssumptionViolation(2, "E2 = g^-2 D21 D21' is not positive definite");
  const auto e2_llt = e2.llt();
  const Matrix& e = plant.uncertainty.E;
  const double g2 = g * g;

  CareProblem p;
  p.form = CareForm::Y;
  p.linear = plant.A - plant.B1 * plant.D21.transpose() * e2_llt.solve(plant.C2) / g2;
  p.quadratic = linalg::symmetrize(e.transpose() * e / eps + plant.C1.transpose() * plant.C1 -
                                   plant.C2.transpose() * e2_llt.solve(plant.C2));
  p.constant = linalg::symmetrize(
      uncertainty_gain(plant, eps) + plant.B1 * plant.B1.transpose() / g2 -
      plant.B1 * plant.D21.transpose() * e2_llt.solve(plant.D21 * plant.B1.transpose()) /
          (g2 * g2));
  return p;
}

CareSolution riccati_X(const OpenPlant& plant, double g, double eps) {
  return solve_care_stabilizing(riccati_X_problem(plant, g, eps));
}

CareSolution riccati_Y(const OpenPlant& plant, double g, double eps) {
  return solve_care_stabilizing(riccati_Y_problem(plant, g, eps));
}

bool AssumptionReport::all_ok() const {
  return e1_ok && e2_ok && rank_cond_3_ok && rank_cond_4_ok && stab_1_ok && stab_2_ok &&
         X_psd_ok && Y_psd_ok && rho_ok;
}

namespace {

bool no_axis_zeros(const std::vector<Complex>& zeros) {
  for (const auto& z : zeros)
    if (std::abs(z.real()) < 1e-8 * (1.0 + std::abs(z))) return false;
  return true;
}

double max_real(const CVector& v) {
  double out = -std::numeric_limits<double>::infinity();
  for (const auto& l : v) out = std::max(out, l.real());
  return out;
}

}  // namespace

AssumptionReport check_assumptions(const OpenPlant& plant, double g, double eps,
                                   const CareSolution& x, const CareSolution& y) {
  check_synthesis_args(plant, g, eps);
  const Eigen::Index n = plant.n();
  const Eigen::Index m = plant.m();
  const Matrix& e = plant.uncertainty.E;
  const double sqrt_eps = std::sqrt(eps);

  AssumptionReport r;
  r.E1 = e1_matrix(plant);
  r.E2 = e2_matrix(plant, g);
  r.E1_min_eig = linalg::min_eig_sym(r.E1);
  r.E2_min_eig = linalg::min_eig_sym(r.E2);
  r.e1_ok = r.E1_min_eig > kInvertibleEig;
  r.e2_ok = r.E2_min_eig > kInvertibleEig;

  // [A - sI, B2; E/sqrt(eps), 0; C1, D12] must have full column rank on the imaginary axis.
  if (r.e1_ok) {
    Matrix c(m + plant.n_z(), n);
    c << e / sqrt_eps, plant.C1;
    Matrix d = Matrix::Zero(m + plant.n_z(), plant.n_u());
    d.bottomRows(plant.n_z()) = plant.D12;
    r.zeros_cond_3 = linalg::invariant_zeros(plant.A, plant.B2, c, d);
    r.rank_cond_3_ok = no_axis_zeros(r.zeros_cond_3);
  } else {
    r.notes.push_back("rank condition 3 not evaluated: D12 lacks full column rank");
  }

  // [A - sI, 2 sqrt(eps) Theta E', B1/g; C2, 0, D21/g] must have full row rank; test the dual.
  if (r.e2_ok) {
    Matrix bw(n, m + plant.n_w());
    bw << 2.0 * sqrt_eps * plant.theta.matrix() * e.transpose(), plant.B1 / g;
    Matrix dw = Matrix::Zero(plant.n_y(), m + plant.n_w());
    dw.rightCols(plant.n_w()) = plant.D21 / g;
    r.zeros_cond_4 = linalg::invariant_zeros(plant.A.transpose(), plant.C2.transpose(),
                                             bw.transpose(), dw.transpose());
    r.rank_cond_4_ok = no_axis_zeros(r.zeros_cond_4);
  } else {
    r.notes.push_back("rank condition 4 not evaluated: D21 lacks full row rank");
  }

  r.stab_1_ok = !x.marginal && max_real(x.closed_loop_spectrum) < -1e-10;
  r.stab_2_ok = !y.marginal && max_real(y.closed_loop_spectrum) < -1e-10;
  r.X_min_eig = linalg::min_eig_sym(x.value);
  r.Y_min_eig = linalg::min_eig_sym(y.value);
  r.X_psd_ok = r.X_min_eig >= -1e-9;
  r.Y_psd_ok = r.Y_min_eig >= -1e-9;
  r.rho_XY = linalg::spectral_radius(x.value * y.value);
  r.rho_ok = r.rho_XY < 1.0 - 1e-9;
  return r;
}

}  // namespace qhinf
