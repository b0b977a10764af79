#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qhinf/linalg.hpp"
#include "qhinf/qmodel.hpp"
#include "qhinf/realization.hpp"

namespace qhinf {

/// Plant/controller interconnection
///   deta = (At + 2 Tht Et' Delta Et) eta dt + Bt dw + Gt dzeta
///   dz   = Ct eta dt + Ht dzeta
/// with eta = [x; xi] and zeta = [v; v_K].
struct ClosedLoopSystem {
  Matrix A_tilde, B_tilde, G_tilde, C_tilde, H_tilde;
  Matrix Theta_tilde;  ///< diag(Theta, 0)
  Matrix E_tilde;      ///< [E 0]
  Eigen::Index n_plant = 0;

  Eigen::Index n_total() const { return A_tilde.rows(); }

  /// At + 2 Tht Et' Delta Et.
  Matrix state_matrix(const UncertaintySample& sample) const;
};

ClosedLoopSystem close_loop(const OpenPlant& plant, const CoherentController& controller);

/// sup_w sigma_max(C (iwI - A)^-1 B + D), by bisection on the imaginary-axis eigenvalue test
/// to relative accuracy 1e-6. Throws UnstableSystem if A is not Hurwitz.
double hinf_norm(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d);

/// Same with D = 0.
double hinf_norm(const Matrix& a, const Matrix& b, const Matrix& c);

/// sigma_max of the frequency response at w.
double frequency_gain(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d, double w);

/// A'X + XA + C'C + g^-2 X B B' X
Matrix bounded_real_lhs(const Matrix& a, const Matrix& b, const Matrix& c, double g,
                        const Matrix& x);

struct SbrResult {
  bool verdict = false;
  double norm = 0.0;  ///< +inf when A is not Hurwitz
  std::optional<Matrix> witness;
  double witness_lhs_max_eig = 0.0;
  double witness_min_eig = 0.0;
};

/// Strict bounded realness with attenuation g: A Hurwitz, ||G||_inf < g (1 - 1e-7), and a
/// positive definite X with A'X + XA + C'C + g^-2 XBB'X < 0.
SbrResult sbr_check(const Matrix& a, const Matrix& b, const Matrix& c, double g);

struct RobustSbrResult {
  bool verdict = false;
  std::vector<double> norms;
  /// Per sample max eigenvalue of the common-witness inequality, when a witness was given.
  std::vector<double> witness_max_eigs;
  std::optional<bool> common_witness_ok;
};

/// SBR at every sample of Delta. Throws InvalidConfig for an empty sample list.
RobustSbrResult robust_sbr_check(const ClosedLoopSystem& cl, double g,
                                 const std::vector<UncertaintySample>& samples,
                                 const Matrix* common_witness = nullptr);

struct ScaledClosedLoop {
  Matrix A, B, C;
};

/// Uncertainty-free closed loop with disturbance [2 sqrt(eps) Tht Et', Bt/g] and output
/// [Et/sqrt(eps); Ct].
ScaledClosedLoop scaled_closed_loop(const ClosedLoopSystem& cl, double g, double eps);

struct ScaledEquivalenceReport {
  bool scaled_sbr = false;
  double scaled_norm = 0.0;
  std::optional<Matrix> witness;
  /// max eigenvalue of the scaled (Delta-free) Riccati inequality at the witness
  double scaled_max_eig = 0.0;
  /// max eigenvalue of the Delta-dependent inequality at each sample
  std::vector<double> sample_max_eigs;
  bool robust_certified = false;
};

ScaledEquivalenceReport scaled_equivalence_check(const ClosedLoopSystem& cl, double g, double eps,
                                                 const std::vector<UncertaintySample>& samples);

struct SweepRow {
  double delta = 0.0;
  double norm_robust = 0.0;
  std::optional<double> norm_reference;
  bool attenuation_met = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double max_robust() const;
};

/// Closed-loop w -> z norm with Delta = delta I for one or two controllers (the second is the
/// reference). Unstable points are recorded as +inf.
SweepResult sweep(const OpenPlant& plant, const std::vector<CoherentController>& controllers,
                  const std::vector<double>& delta_values, double g);

/// Worst-case w -> z norm of a closed loop over the samples (+inf if any is unstable).
double closed_loop_norm(const ClosedLoopSystem& cl, const UncertaintySample& sample);

/// CSV with header "delta,norm_robust,norm_reference,meets_g", 9 significant digits.
std::string sweep_to_csv(const SweepResult& result);

}  // namespace qhinf
