#include "qhinf/cavity.hpp"

#include <cmath>

namespace qhinf::cavity {

OpenPlant plant(const Parameters& params) {
  const Matrix i2 = Matrix::Identity(2, 2);
  const double gamma = params.kappa1 + params.kappa2 + params.kappa3;
  OpenPlant p;
  p.A = -0.5 * gamma * i2;
  p.B0 = -std::sqrt(params.kappa1) * i2;
  p.B1 = -std::sqrt(params.kappa2) * i2;
  p.B2 = -std::sqrt(params.kappa3) * i2;
  p.C1 = std::sqrt(params.kappa3) * i2;
  p.D12 = i2;
  p.C2 = std::sqrt(params.kappa2) * i2;
  p.D20 = Matrix::Zero(2, 2);
  p.D21 = i2;
  p.theta = canonical_theta(2);
  p.uncertainty.E = params.uncertain ? i2 : Matrix::Zero(2, 2);
  return p;
}

SLHModel slh(const Parameters& params) {
  SLHModel m;
  m.R = Matrix::Zero(2, 2);
  m.Lambda.resize(3, 2);
  const double kappas[] = {params.kappa1, params.kappa2, params.kappa3};
  for (int k = 0; k < 3; ++k) {
    const double s = 0.5 * std::sqrt(kappas[k]);
    m.Lambda(k, 0) = Complex(s, 0.0);
    m.Lambda(k, 1) = Complex(0.0, s);
  }
  m.n_y = 6;
  return m;
}

ReferenceController reference_nominal() {
  ReferenceController k{-0.5, -2.2361, -0.7071, Matrix(2, 4)};
  k.B_K1 << 0.7071, 0.0, -1.0, 1.0, 0.0, 0.7071, 1.0, 3.5;
  return k;
}

ReferenceController reference_robust() {
  ReferenceController k{-34.9604, 13.5894, -0.7058, Matrix(2, 4)};
  k.B_K1 << 0.7058, 0.0, 8.0, -8.0, 0.0, 0.7058, -8.0, -6.4062;
  return k;
}

}  // namespace qhinf::cavity
