#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qhinf/analysis.hpp"
#include "qhinf/errors.hpp"
#include "qhinf/qmodel.hpp"
#include "qhinf/realization.hpp"
#include "qhinf/riccati.hpp"

namespace qhinf {

struct EpsGrid {
  double lo = 1e-3;
  double hi = 1e3;
  int points_per_decade = 8;

  std::vector<double> points() const;
};

struct SynthesisTolerances {
  /// golden-section refinement stops once the eps bracket ratio falls below this
  double bracket_ratio = 1.05;
};

struct SynthesisConfig {
  double g = 1.0;
  std::optional<double> eps;
  EpsGrid eps_grid;
  std::vector<UncertaintySample> delta_grid;
  SynthesisTolerances tolerances;

  /// Throws InvalidConfig.
  void validate() const;
};

/// delta I for `points` evenly spaced delta in [-1, 1].
std::vector<UncertaintySample> scalar_delta_grid(Eigen::Index m, int points = 21);

/// `count` random symmetric samples Q diag(d) Q' with d uniform in [-1, 1], plus +I and -I.
std::vector<UncertaintySample> random_delta_grid(Eigen::Index m, std::uint64_t seed,
                                                 int count = 16);

/// Uncertainty-free plant used for the H-infinity design:
///   disturbance input  [2 sqrt(eps) Theta E', B1/g]
///   performance output [E/sqrt(eps); C1] with feedthrough [0; D12] on u
///   measurement feedthrough on the disturbance [0, D21/g]
struct ScaledPlant {
  Matrix A, B0, B1, B2, C1, D12, C2, D20, D21;
  CommutationStructure theta;
};

ScaledPlant scale_plant(const OpenPlant& plant, double g, double eps);

struct ControllerTriple {
  Matrix A_K, B_K, C_K;
};

/// Central controller built from the Riccati solutions. Throws SpectralRadiusViolation when
/// I - YX is singular.
ControllerTriple controller_matrices(const OpenPlant& plant, double g, double eps,
                                     const CareSolution& x, const CareSolution& y);

struct EpsEvaluation {
  double eps = 0.0;
  bool feasible = false;
  double worst_case_norm = 0.0;  ///< +inf when infeasible before the closed loop was formed
  double rho_xy = 0.0;
  std::string failure;           ///< empty when feasible
};

struct SynthesisReport {
  double g = 0.0;
  double eps_used = 0.0;
  bool epsilon_inert = false;
  CareSolution X, Y;
  AssumptionReport assumptions;
  CoherentController controller;
  bool scaled_sbr = false;
  double scaled_norm = 0.0;
  bool robust_sbr = false;
  std::vector<double> per_sample_norms;
  double worst_case_norm = 0.0;
  bool feasible = false;
  std::vector<EpsEvaluation> per_eps_trace;
};

/// Thrown when no candidate eps yields a feasible design; carries the evaluations.
class NoFeasibleEpsilon : public Error {
 public:
  NoFeasibleEpsilon(const std::string& what, std::vector<EpsEvaluation> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<EpsEvaluation>& trace() const { return trace_; }

 private:
  std::vector<EpsEvaluation> trace_;
};

/// Full design at a fixed eps. Riccati or assumption failures propagate as exceptions; the
/// report's `feasible` flag reflects the assumption chain plus the scaled closed-loop check.
SynthesisReport synthesize_at(const OpenPlant& plant, const SynthesisConfig& config, double eps);

/// Feasibility and objective at one eps; never throws for design failures.
EpsEvaluation evaluate_epsilon(const OpenPlant& plant, const SynthesisConfig& config, double eps);

struct EpsSearchResult {
  double eps = 0.0;
  bool epsilon_inert = false;
  std::vector<EpsEvaluation> trace;  ///< sorted by eps
};

/// Log-grid scan followed by golden-section refinement of the worst-case closed-loop norm.
EpsSearchResult search_epsilon(const OpenPlant& plant, const SynthesisConfig& config);

/// Runs the search when config.eps is absent, then the fixed-eps design.
/// Throws NoFeasibleEpsilon when no evaluated eps is feasible.
SynthesisReport synthesize(const OpenPlant& plant, const SynthesisConfig& config);

}  // namespace qhinf
