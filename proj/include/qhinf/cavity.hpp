#pragma once

#include "qhinf/qmodel.hpp"

namespace qhinf::cavity {

/// Optical cavity coupled to channels v, w, u with decay rates kappa1..3; the detuning enters
/// as the Hamiltonian uncertainty with E = I.
struct Parameters {
  double kappa1 = 6.5;
  double kappa2 = 5.0;
  double kappa3 = 0.5;
  bool uncertain = true;  ///< false sets E = 0
};

/// A = -(gamma/2) I, B0 = -sqrt(k1) I, B1 = -sqrt(k2) I, B2 = -sqrt(k3) I, C1 = sqrt(k3) I,
/// D12 = I, C2 = sqrt(k2) I, D20 = 0, D21 = I, Theta = J.
OpenPlant plant(const Parameters& params = {});

/// Coupling L_k = sqrt(k_k) a with a = (q + i p)/2, R = 0, all six output quadratures.
SLHModel slh(const Parameters& params = {});

struct ReferenceController {
  double a_k, b_k, c_k;  ///< scalar multiples of I
  Matrix B_K1;
};

/// Reference uncertainty-free design (X = Y = 0).
ReferenceController reference_nominal();

/// Reference robust design; the Riccati values below are informational.
ReferenceController reference_robust();
constexpr double kReferenceRobustX = 0.0038;
constexpr double kReferenceRobustY = 14.0783;

}  // namespace qhinf::cavity
