#include "qhinf/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "qhinf/errors.hpp"
#include "qhinf/parallel.hpp"

namespace qhinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<double> EpsGrid::points() const {
  const double decades = std::log10(hi / lo);
  const int count = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade - 1e-9)) + 1);
  std::vector<double> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    out.push_back(std::pow(10.0, std::log10(lo) + t * decades));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

void SynthesisConfig::validate() const {
  if (!(g > 0.0)) throw InvalidConfig("attenuation g must be positive");
  if (eps && !(*eps > 0.0)) throw InvalidConfig("eps must be positive");
  if (!(eps_grid.lo > 0.0) || !(eps_grid.lo < eps_grid.hi))
    throw InvalidConfig("eps grid needs 0 < lo < hi");
  if (eps_grid.points_per_decade < 1) throw InvalidConfig("eps grid needs >= 1 point per decade");
  if (delta_grid.empty()) throw InvalidConfig("delta verification grid is empty");
  if (!(tolerances.bracket_ratio > 1.0)) throw InvalidConfig("bracket ratio must exceed 1");
}

std::vector<UncertaintySample> scalar_delta_grid(Eigen::Index m, int points) {
  if (points < 1) throw InvalidConfig("delta grid needs at least one point");
  std::vector<UncertaintySample> out;
  for (int i = 0; i < points; ++i) {
    const double d = points == 1 ? 0.0 : -1.0 + 2.0 * i / (points - 1);
    out.push_back(UncertaintySample::scalar(d, m));
  }
  return out;
}

std::vector<UncertaintySample> random_delta_grid(Eigen::Index m, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<UncertaintySample> out;
  for (int s = 0; s < count; ++s) {
    Matrix g(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) g(i, j) = normal(rng);
    const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
    Vector d(m);
    for (Eigen::Index i = 0; i < m; ++i) d(i) = uniform(rng);
    out.emplace_back(linalg::symmetrize(q * d.asDiagonal() * q.transpose()));
  }
  out.push_back(UncertaintySample::scalar(1.0, m));
  out.push_back(UncertaintySample::scalar(-1.0, m));
  return out;
}

ScaledPlant scale_plant(const OpenPlant& plant, double g, double eps) {
  plant.validate();
  if (!(g > 0.0) || !(eps > 0.0)) throw ContractError("scale_plant: g and eps must be positive");
  const Matrix& e = plant.uncertainty.E;
  const Eigen::Index m = plant.m();
  const double s = std::sqrt(eps);

  ScaledPlant sp;
  sp.A = plant.A;
  sp.B0 = plant.B0;
  sp.B2 = plant.B2;
  sp.C2 = plant.C2;
  sp.D20 = plant.D20;
  sp.theta = plant.theta;
  sp.B1.resize(plant.n(), m + plant.n_w());
  sp.B1 << 2.0 * s * plant.theta.matrix() * e.transpose(), plant.B1 / g;
  sp.C1.resize(m + plant.n_z(), plant.n());
  sp.C1 << e / s, plant.C1;
  sp.D12 = Matrix::Zero(m + plant.n_z(), plant.n_u());
  sp.D12.bottomRows(plant.n_z()) = plant.D12;
  sp.D21 = Matrix::Zero(plant.n_y(), m + plant.n_w());
  sp.D21.rightCols(plant.n_w()) = plant.D21 / g;
  return sp;
}

ControllerTriple controller_matrices(const OpenPlant& plant, double g, double eps,
                                     const CareSolution& x_sol, const CareSolution& y_sol) {
  plant.validate();
  const Eigen::Index n = plant.n();
  const Matrix& x = x_sol.value;
  const Matrix& y = y_sol.value;
  if (x.rows() != n || y.rows() != n) throw DimensionError("Riccati solutions must be n x n");
  const double g2 = g * g;

  const Matrix e1 = plant.D12.transpose() * plant.D12;
  const Matrix e2 = plant.D21 * plant.D21.transpose() / g2;
  if (!(linalg::min_eig_sym(e1) > 1e-10)) throw AssumptionViolation(1, "E1 is singular");
  if (!(linalg::min_eig_sym(e2) > 1e-10)) throw AssumptionViolation(2, "E2 is singular");

  const Matrix i_minus_yx = Matrix::Identity(n, n) - y * x;
  const double cond = linalg::condition_number(i_minus_yx);
  if (!(cond < 1e12)) {
    std::ostringstream msg;
    msg << "I - YX is singular (condition number " << cond << ")";
    throw SpectralRadiusViolation(msg.str());
  }

  const Matrix& e = plant.uncertainty.E;
  const Matrix& th = plant.theta.matrix();
  ControllerTriple k;
  k.C_K = -e1.llt().solve(plant.B2.transpose() * x + plant.D12.transpose() * plant.C1);
  const Matrix gain_rhs = y * plant.C2.transpose() + plant.B1 * plant.D21.transpose() / g2;
  // (I - YX)^-1 gain_rhs E2^-1, with E2 symmetric.
  k.B_K = i_minus_yx.partialPivLu().solve(e2.llt().solve(gain_rhs.transpose()).transpose());
  k.A_K = plant.A + plant.B2 * k.C_K - k.B_K * plant.C2 +
          4.0 * eps * th * e.transpose() * e * th.transpose() * x +
          plant.B1 * plant.B1.transpose() * x / g2 -
          k.B_K * plant.D21 * plant.B1.transpose() * x / g2;
  return k;
}

namespace {

std::string failed_checks(const SynthesisReport& r) {
  std::ostringstream out;
  const AssumptionReport& a = r.assumptions;
  const std::pair<bool, const char*> checks[] = {
      {a.e1_ok, "E1>0"},           {a.e2_ok, "E2>0"},
      {a.rank_cond_3_ok, "rank3"}, {a.rank_cond_4_ok, "rank4"},
      {a.stab_1_ok, "stab1"},      {a.stab_2_ok, "stab2"},
      {a.X_psd_ok, "X>=0"},        {a.Y_psd_ok, "Y>=0"},
      {a.rho_ok, "rho(XY)<1"},     {r.scaled_sbr, "scaled-SBR"},
  };
  bool first = true;
  for (const auto& [ok, name] : checks) {
    if (ok) continue;
    out << (first ? "" : ",") << name;
    first = false;
  }
  return out.str();
}

bool design_failure(const Error& e) {
  return dynamic_cast<const DimensionError*>(&e) == nullptr &&
         dynamic_cast<const InvalidConfig*>(&e) == nullptr &&
         dynamic_cast<const ContractError*>(&e) == nullptr;
}

// Lexicographic (worst-case norm, rho(XY)) over feasible evaluations.
bool better(const EpsEvaluation& a, const EpsEvaluation& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.worst_case_norm != b.worst_case_norm) return a.worst_case_norm < b.worst_case_norm;
  if (a.rho_xy != b.rho_xy) return a.rho_xy < b.rho_xy;
  return a.eps < b.eps;
}

}  // namespace

SynthesisReport synthesize_at(const OpenPlant& plant, const SynthesisConfig& config, double eps) {
  config.validate();
  plant.validate();
  const double g = config.g;

  SynthesisReport r;
  r.g = g;
  r.eps_used = eps;
  r.X = riccati_X(plant, g, eps);
  r.Y = riccati_Y(plant, g, eps);
  r.assumptions = check_assumptions(plant, g, eps, r.X, r.Y);
  const ControllerTriple triple = controller_matrices(plant, g, eps, r.X, r.Y);
  r.controller = complete_realization(triple.A_K, triple.B_K, triple.C_K, canonical_theta(plant.n()),
                                      canonical_theta(plant.n_y()), canonical_theta(plant.n_u()));

  const ClosedLoopSystem cl = close_loop(plant, r.controller);
  const ScaledEquivalenceReport scaled = scaled_equivalence_check(cl, g, eps, config.delta_grid);
  r.scaled_sbr = scaled.scaled_sbr;
  r.scaled_norm = scaled.scaled_norm;
  const RobustSbrResult robust = robust_sbr_check(cl, g, config.delta_grid);
  r.robust_sbr = robust.verdict;
  r.per_sample_norms = robust.norms;
  r.worst_case_norm = *std::max_element(robust.norms.begin(), robust.norms.end());
  r.feasible = r.assumptions.all_ok() && r.scaled_sbr;
  return r;
}

EpsEvaluation evaluate_epsilon(const OpenPlant& plant, const SynthesisConfig& config, double eps) {
  EpsEvaluation ev;
  ev.eps = eps;
  try {
    const SynthesisReport r = synthesize_at(plant, config, eps);
    ev.feasible = r.feasible;
    ev.worst_case_norm = r.worst_case_norm;
    ev.rho_xy = r.assumptions.rho_XY;
    if (!r.feasible) ev.failure = failed_checks(r);
  } catch (const Error& e) {
    if (!design_failure(e)) throw;
    ev.feasible = false;
    ev.worst_case_norm = kInf;
    ev.rho_xy = kInf;
    ev.failure = e.what();
  }
  return ev;
}

EpsSearchResult search_epsilon(const OpenPlant& plant, const SynthesisConfig& config) {
  config.validate();
  plant.validate();
  EpsSearchResult out;

  // E = 0 removes eps from both Riccati equations.
  if (plant.uncertainty.E.norm() == 0.0) {
    out.eps = config.eps_grid.lo;
    out.epsilon_inert = true;
    out.trace.push_back(evaluate_epsilon(plant, config, out.eps));
    if (!out.trace.front().feasible)
      throw NoFeasibleEpsilon("uncertainty-free design is infeasible", out.trace);
    return out;
  }

  const std::vector<double> grid = config.eps_grid.points();
  out.trace = parallel_map(grid.size(),
                           [&](std::size_t i) { return evaluate_epsilon(plant, config, grid[i]); });

  std::size_t best = 0;
  for (std::size_t i = 1; i < out.trace.size(); ++i)
    if (better(out.trace[i], out.trace[best])) best = i;
  if (!out.trace[best].feasible)
    throw NoFeasibleEpsilon("no feasible eps on the search grid", out.trace);

  // Golden-section on log(eps) between the neighbours of the best grid point.
  double a = std::log(grid[best == 0 ? 0 : best - 1]);
  double b = std::log(grid[std::min(best + 1, grid.size() - 1)]);
  EpsEvaluation best_eval = out.trace[best];
  auto probe = [&](double t) {
    EpsEvaluation ev = evaluate_epsilon(plant, config, std::exp(t));
    out.trace.push_back(ev);
    if (better(ev, best_eval)) best_eval = ev;
    return ev.feasible ? ev.worst_case_norm : kInf;
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double log_ratio = std::log(config.tolerances.bracket_ratio);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = probe(c);
  double fd = probe(d);
  while (b - a >= log_ratio) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = probe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = probe(d);
    }
  }

  std::stable_sort(out.trace.begin(), out.trace.end(),
                   [](const EpsEvaluation& l, const EpsEvaluation& r) { return l.eps < r.eps; });
  out.eps = best_eval.eps;
  return out;
}

SynthesisReport synthesize(const OpenPlant& plant, const SynthesisConfig& config) {
  config.validate();
  plant.validate();
  if (config.eps) {
    const EpsEvaluation ev = evaluate_epsilon(plant, config, *config.eps);
    if (!ev.feasible)
      throw NoFeasibleEpsilon("design at the requested eps is infeasible: " + ev.failure, {ev});
    SynthesisReport r = synthesize_at(plant, config, *config.eps);
    r.per_eps_trace = {ev};
    r.epsilon_inert = plant.uncertainty.E.norm() == 0.0;
    return r;
  }
  const EpsSearchResult search = search_epsilon(plant, config);
  SynthesisReport r = synthesize_at(plant, config, search.eps);
  r.per_eps_trace = search.trace;
  r.epsilon_inert = search.epsilon_inert;
  return r;
}

}  // namespace qhinf
