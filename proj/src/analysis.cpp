#include "qhinf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "qhinf/errors.hpp"
#include "qhinf/parallel.hpp"
#include "qhinf/riccati.hpp"

namespace qhinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSbrMargin = 1e-7;
constexpr double kNormRelTol = 1e-6;
constexpr int kFrequencyGridPoints = 200;

void check_system(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n || c.cols() != n || d.rows() != c.rows() ||
      d.cols() != b.cols())
    throw DimensionError("state-space matrices are not conformal");
}

}  // namespace

Matrix ClosedLoopSystem::state_matrix(const UncertaintySample& sample) const {
  if (sample.m() != E_tilde.rows())
    throw DimensionError("uncertainty sample dimension differs from E");
  return A_tilde + 2.0 * Theta_tilde * E_tilde.transpose() * sample.matrix() * E_tilde;
}

ClosedLoopSystem close_loop(const OpenPlant& plant, const CoherentController& k) {
  plant.validate();
  k.validate();
  if (k.n_u() != plant.n_u() || k.n_y() != plant.n_y())
    throw DimensionError("controller channels do not match the plant's u and y");
  const Eigen::Index n = plant.n();
  const Eigen::Index nk = k.n_K();

  ClosedLoopSystem cl;
  cl.n_plant = n;
  cl.A_tilde.resize(n + nk, n + nk);
  cl.A_tilde << plant.A, plant.B2 * k.C_K, k.B_K * plant.C2, k.A_K;
  cl.B_tilde.resize(n + nk, plant.n_w());
  cl.B_tilde << plant.B1, k.B_K * plant.D21;
  cl.G_tilde.resize(n + nk, plant.n_v() + k.n_vK());
  cl.G_tilde << plant.B0, plant.B2 * k.B_K0, k.B_K * plant.D20, k.B_K1;
  cl.C_tilde.resize(plant.n_z(), n + nk);
  cl.C_tilde << plant.C1, plant.D12 * k.C_K;
  cl.H_tilde.resize(plant.n_z(), plant.n_v() + k.n_vK());
  cl.H_tilde << Matrix::Zero(plant.n_z(), plant.n_v()), plant.D12 * k.B_K0;
  cl.Theta_tilde = linalg::blkdiag(plant.theta.matrix(), Matrix::Zero(nk, nk));
  cl.E_tilde.resize(plant.m(), n + nk);
  cl.E_tilde << plant.uncertainty.E, Matrix::Zero(plant.m(), nk);
  return cl;
}

double frequency_gain(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                      double w) {
  CMatrix shifted = -a.cast<Complex>();
  shifted.diagonal().array() += Complex(0.0, w);
  const CMatrix response =
      c.cast<Complex>() * shifted.partialPivLu().solve(b.cast<Complex>()) + d.cast<Complex>();
  return linalg::sigma_max(response);
}

namespace {

// Hamiltonian whose imaginary-axis eigenvalues i w mark frequencies where gamma is a singular
// value of the frequency response.
Matrix gamma_hamiltonian(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                         double gamma) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = c.rows();
  const Matrix r = gamma * gamma * Matrix::Identity(b.cols(), b.cols()) - d.transpose() * d;
  const auto r_ldlt = r.ldlt();
  const Matrix ah = a + b * r_ldlt.solve(d.transpose() * c);
  Matrix h(2 * n, 2 * n);
  h << ah, b * r_ldlt.solve(b.transpose()),
      -c.transpose() * (Matrix::Identity(p, p) + d * r_ldlt.solve(d.transpose())) * c,
      -ah.transpose();
  return h;
}

}  // namespace

double hinf_norm(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
  check_system(a, b, c, d);
  const double sd = linalg::sigma_max(d);
  if (a.rows() == 0 || b.cols() == 0 || c.rows() == 0) return sd;
  const CVector poles = linalg::eigenvalues(a);
  for (const auto& l : poles)
    if (!(l.real() < 0.0)) throw UnstableSystem("hinf_norm: A is not Hurwitz");

  double w_min = kInf, w_max = 0.0;
  for (const auto& l : poles) {
    w_min = std::min(w_min, std::abs(l));
    w_max = std::max(w_max, std::abs(l));
  }
  std::vector<double> freqs{0.0};
  const double log_lo = std::log10(std::max(w_min * 1e-3, 1e-300));
  const double log_hi = std::log10(w_max * 1e3);
  for (int i = 0; i < kFrequencyGridPoints; ++i)
    freqs.push_back(std::pow(10.0, log_lo + (log_hi - log_lo) * i / (kFrequencyGridPoints - 1)));
  for (const auto& l : poles) freqs.push_back(std::abs(l.imag()));

  double grid_max = 0.0;
  for (double w : freqs) grid_max = std::max(grid_max, frequency_gain(a, b, c, d, w));
  double lo = std::max(sd, grid_max);
  if (lo <= 1e-13 * (linalg::sigma_max(b) * linalg::sigma_max(c) + sd)) return lo;

  // Returns true (and raises `attained`) when gamma is below the norm.
  auto below_norm = [&](double gamma, double& attained) {
    const Matrix h = gamma_hamiltonian(a, b, c, d, gamma);
    const double tol = 1e-8 * std::max(1.0, h.norm());
    bool crossing = false;
    for (const auto& l : linalg::eigenvalues(h)) {
      if (std::abs(l.real()) > tol) continue;
      const double gain = frequency_gain(a, b, c, d, std::abs(l.imag()));
      attained = std::max(attained, gain);
      if (gain >= gamma * (1.0 - 1e-9)) crossing = true;
    }
    return crossing;
  };

  double hi = 2.0 * lo;
  int doublings = 0;
  double attained = lo;
  while (below_norm(hi, attained)) {
    if (++doublings > 60)
      throw NormBracketFailure("hinf_norm: could not bracket the norm", grid_max);
    lo = std::max(lo, attained);
    hi *= 2.0;
  }
  for (int iter = 0; iter < 200 && hi - lo > kNormRelTol * hi; ++iter) {
    const double gamma = 0.5 * (lo + hi);
    attained = lo;
    if (below_norm(gamma, attained)) {
      lo = std::max(gamma, attained);
      if (lo > hi) hi = lo;
    } else {
      hi = gamma;
    }
  }
  return 0.5 * (lo + hi);
}

double hinf_norm(const Matrix& a, const Matrix& b, const Matrix& c) {
  return hinf_norm(a, b, c, Matrix::Zero(c.rows(), b.cols()));
}

Matrix bounded_real_lhs(const Matrix& a, const Matrix& b, const Matrix& c, double g,
                        const Matrix& x) {
  return a.transpose() * x + x * a + c.transpose() * c + x * b * b.transpose() * x / (g * g);
}

SbrResult sbr_check(const Matrix& a, const Matrix& b, const Matrix& c, double g) {
  check_system(a, b, c, Matrix::Zero(c.rows(), b.cols()));
  if (!(g > 0.0)) throw ContractError("sbr_check: g must be positive");
  SbrResult out;
  if (!linalg::is_hurwitz(a)) {
    out.norm = kInf;
    return out;
  }
  try {
    out.norm = hinf_norm(a, b, c);
  } catch (const NormBracketFailure& e) {
    out.norm = e.grid_estimate();
    return out;
  }
  if (!(out.norm < g * (1.0 - kSbrMargin))) return out;

  // Witness: stabilizing solution of A'X + XA + XBB'X/g^2 + C'C + delta I = 0.
  const Eigen::Index n = a.rows();
  double delta = 1e-6 * std::max(1.0, (c.transpose() * c).norm());
  for (int attempt = 0; attempt < 8; ++attempt, delta *= 0.1) {
    CareProblem p;
    p.form = CareForm::X;
    p.linear = a;
    p.quadratic = linalg::symmetrize(b * b.transpose() / (g * g));
    p.constant = linalg::symmetrize(c.transpose() * c) + delta * Matrix::Identity(n, n);
    try {
      CareSolution sol = solve_care_stabilizing(p);
      if (!sol.stabilizing()) continue;
      const double lhs_max = linalg::max_eig_sym(bounded_real_lhs(a, b, c, g, sol.value));
      const double x_min = linalg::min_eig_sym(sol.value);
      if (lhs_max < 0.0 && x_min > 0.0) {
        out.witness = std::move(sol.value);
        out.witness_lhs_max_eig = lhs_max;
        out.witness_min_eig = x_min;
        out.verdict = true;
        return out;
      }
    } catch (const Error&) {
      // retry with a smaller perturbation
    }
  }
  return out;
}

double closed_loop_norm(const ClosedLoopSystem& cl, const UncertaintySample& sample) {
  const Matrix a = cl.state_matrix(sample);
  if (!linalg::is_hurwitz(a)) return kInf;
  try {
    return hinf_norm(a, cl.B_tilde, cl.C_tilde);
  } catch (const UnstableSystem&) {
    return kInf;
  }
}

RobustSbrResult robust_sbr_check(const ClosedLoopSystem& cl, double g,
                                 const std::vector<UncertaintySample>& samples,
                                 const Matrix* common_witness) {
  if (samples.empty()) throw InvalidConfig("robust_sbr_check: empty uncertainty sample list");
  RobustSbrResult out;
  const auto checks = parallel_map(samples.size(), [&](std::size_t i) {
    return sbr_check(cl.state_matrix(samples[i]), cl.B_tilde, cl.C_tilde, g);
  });
  out.verdict = true;
  for (const auto& r : checks) {
    out.norms.push_back(r.norm);
    out.verdict = out.verdict && r.verdict;
  }
  if (common_witness != nullptr) {
    bool ok = true;
    for (const auto& s : samples) {
      const double e = linalg::max_eig_sym(
          bounded_real_lhs(cl.state_matrix(s), cl.B_tilde, cl.C_tilde, g, *common_witness));
      out.witness_max_eigs.push_back(e);
      ok = ok && e < 0.0;
    }
    out.common_witness_ok = ok;
  }
  return out;
}

ScaledClosedLoop scaled_closed_loop(const ClosedLoopSystem& cl, double g, double eps) {
  if (!(g > 0.0) || !(eps > 0.0)) throw ContractError("scaled_closed_loop: g, eps must be > 0");
  const double s = std::sqrt(eps);
  ScaledClosedLoop out;
  out.A = cl.A_tilde;
  out.B.resize(cl.n_total(), cl.E_tilde.rows() + cl.B_tilde.cols());
  out.B << 2.0 * s * cl.Theta_tilde * cl.E_tilde.transpose(), cl.B_tilde / g;
  out.C.resize(cl.E_tilde.rows() + cl.C_tilde.rows(), cl.n_total());
  out.C << cl.E_tilde / s, cl.C_tilde;
  return out;
}

ScaledEquivalenceReport scaled_equivalence_check(const ClosedLoopSystem& cl, double g, double eps,
                                                 const std::vector<UncertaintySample>& samples) {
  if (samples.empty()) throw InvalidConfig("scaled_equivalence_check: empty sample list");
  const ScaledClosedLoop scaled = scaled_closed_loop(cl, g, eps);
  const SbrResult sbr = sbr_check(scaled.A, scaled.B, scaled.C, 1.0);
  ScaledEquivalenceReport out;
  out.scaled_sbr = sbr.verdict;
  out.scaled_norm = sbr.norm;
  if (!sbr.verdict) return out;
  const Matrix& x = *sbr.witness;
  out.witness = x;
  out.scaled_max_eig = linalg::max_eig_sym(bounded_real_lhs(scaled.A, scaled.B, scaled.C, 1.0, x));
  out.robust_certified = out.scaled_max_eig < 0.0;
  for (const auto& s : samples) {
    const double e = linalg::max_eig_sym(
        bounded_real_lhs(cl.state_matrix(s), cl.B_tilde, cl.C_tilde, g, x));
    out.sample_max_eigs.push_back(e);
    out.robust_certified = out.robust_certified && e < 0.0;
  }
  return out;
}

double SweepResult::max_robust() const {
  double out = 0.0;
  for (const auto& r : rows) out = std::max(out, r.norm_robust);
  return out;
}

SweepResult sweep(const OpenPlant& plant, const std::vector<CoherentController>& controllers,
                  const std::vector<double>& delta_values, double g) {
  if (controllers.empty() || controllers.size() > 2)
    throw InvalidConfig("sweep takes one controller plus an optional reference");
  std::vector<ClosedLoopSystem> loops;
  for (const auto& k : controllers) loops.push_back(close_loop(plant, k));
  std::vector<double> deltas = delta_values;
  std::sort(deltas.begin(), deltas.end());
  std::vector<UncertaintySample> samples;
  for (double d : deltas) samples.push_back(UncertaintySample::scalar(d, plant.m()));

  SweepResult out;
  out.rows = parallel_map(samples.size(), [&](std::size_t i) {
    SweepRow row;
    row.delta = deltas[i];
    row.norm_robust = closed_loop_norm(loops[0], samples[i]);
    if (loops.size() > 1) row.norm_reference = closed_loop_norm(loops[1], samples[i]);
    row.attenuation_met = row.norm_robust < g;
    return row;
  });
  return out;
}

namespace {

std::string format9(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string sweep_to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "delta,norm_robust,norm_reference,meets_g\n";
  for (const auto& r : result.rows) {
    out << format9(r.delta) << ',' << format9(r.norm_robust) << ','
        << (r.norm_reference ? format9(*r.norm_reference) : std::string()) << ','
        << (r.attenuation_met ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace qhinf
