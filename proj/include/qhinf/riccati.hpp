#pragma once

#include <string>
#include <vector>

#include "qhinf/linalg.hpp"
#include "qhinf/qmodel.hpp"

namespace qhinf {

/// X-form:  A'X + XA + XQX + K = 0, closed loop A + QX.
/// Y-form:  AY + YA' + YQY + K = 0, closed loop A + YQ.
enum class CareForm { X, Y };

struct CareProblem {
  Matrix linear;     ///< A
  Matrix quadratic;  ///< Q, symmetric, possibly indefinite
  Matrix constant;   ///< K, symmetric
  CareForm form = CareForm::X;

  void validate() const;
};

struct CareSolution {
  Matrix value;
  /// ||lhs||_F / (1 + ||value||_F)
  double residual = 0.0;
  CVector closed_loop_spectrum;
  /// Zero equation with a non-Hurwitz linear term: X = 0 is returned but is not stabilizing.
  bool marginal = false;
  int newton_steps = 0;

  bool stabilizing() const;
};

/// Left-hand side of the Riccati equation evaluated at x.
Matrix care_lhs(const CareProblem& problem, const Matrix& x);

/// A + QX (X-form) or A + XQ (Y-form).
Matrix care_closed_loop(const CareProblem& problem, const Matrix& x);

/// Unique symmetric stabilizing solution via the stable invariant subspace of the
/// Hamiltonian-structured matrix, followed by Newton refinement.
///
/// Throws NoStabilizingSolution when the Hamiltonian has eigenvalues within 1e-8 (relative to
/// its scale) of the imaginary axis, and SubspaceSingular when the leading block of the stable
/// basis has condition number above 1e12.
CareSolution solve_care_stabilizing(const CareProblem& problem);

/// The X equation of the scaled plant:
///   Acl = A - B2 E1^-1 D12' C1
///   Q   = 4 eps Theta E'E Theta' + g^-2 B1 B1' - B2 E1^-1 B2'
///   K   = E'E / eps + C1'C1 - C1' D12 E1^-1 D12' C1
CareProblem riccati_X_problem(const OpenPlant& plant, double g, double eps);

/// The Y equation of the scaled plant:
///   Acl = A - g^-2 B1 D21' E2^-1 C2
///   Q   = E'E / eps + C1'C1 - C2' E2^-1 C2
///   K   = 4 eps Theta E'E Theta' + g^-2 B1 B1' - g^-4 B1 D21' E2^-1 D21 B1'
CareProblem riccati_Y_problem(const OpenPlant& plant, double g, double eps);

/// Throws AssumptionViolation(1) when E1 = D12'D12 is singular.
CareSolution riccati_X(const OpenPlant& plant, double g, double eps);
/// Throws AssumptionViolation(2) when E2 = g^-2 D21 D21' is singular.
CareSolution riccati_Y(const OpenPlant& plant, double g, double eps);

struct AssumptionReport {
  Matrix E1, E2;
  double E1_min_eig = 0.0;
  double E2_min_eig = 0.0;
  bool e1_ok = false;
  bool e2_ok = false;
  /// Invariant zeros of the two rank-condition pencils.
  std::vector<Complex> zeros_cond_3, zeros_cond_4;
  bool rank_cond_3_ok = false;
  bool rank_cond_4_ok = false;
  bool stab_1_ok = false;
  bool stab_2_ok = false;
  double X_min_eig = 0.0;
  double Y_min_eig = 0.0;
  bool X_psd_ok = false;
  bool Y_psd_ok = false;
  double rho_XY = 0.0;
  bool rho_ok = false;
  std::vector<std::string> notes;

  bool all_ok() const;
};

/// Evaluates the standing assumptions (E1, E2, rank, stability, coupling) for the scaled plant.
AssumptionReport check_assumptions(const OpenPlant& plant, double g, double eps,
                                   const CareSolution& x, const CareSolution& y);

}  // namespace qhinf
