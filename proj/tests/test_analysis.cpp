#include <gtest/gtest.h>

#include <limits>

#include "oracles.hpp"
#include "qhinf/analysis.hpp"
#include "qhinf/cavity.hpp"
#include "qhinf/errors.hpp"
#include "qhinf/synthesis.hpp"

using namespace qhinf;

namespace {

CoherentController scalar_controller(double a, double b, double c) {
  const Matrix I = Matrix::Identity(2, 2);
  const auto J = canonical_theta(2);
  return complete_realization(a * I, b * I, c * I, J, J, J);
}

}  // namespace

TEST(HinfNorm, FirstOrderLowPass) {
  // 3 / (s + 2): peak 1.5 at w = 0
  EXPECT_NEAR(hinf_norm(Matrix::Constant(1, 1, -2.0), Matrix::Constant(1, 1, 3.0),
                        Matrix::Constant(1, 1, 1.0)),
              1.5, 1.5e-6);
}

TEST(HinfNorm, LightlyDampedResonance) {
  // w0^2 / (s^2 + 2 z w0 s + w0^2), peak 1 / (2 z sqrt(1 - z^2))
  const double z = 0.05, w0 = 3.0;
  Matrix a(2, 2);
  a << 0, 1, -w0 * w0, -2 * z * w0;
  const Matrix b = (Matrix(2, 1) << 0, w0 * w0).finished();
  const Matrix c = (Matrix(1, 2) << 1, 0).finished();
  const double peak = 1.0 / (2 * z * std::sqrt(1 - z * z));
  EXPECT_NEAR(hinf_norm(a, b, c) / peak, 1.0, 2e-6);
}

TEST(HinfNorm, FeedthroughOnly) {
  const Matrix a = -Matrix::Identity(2, 2);
  const Matrix d = (Matrix(2, 2) << 3, 0, 0, 4).finished();
  EXPECT_NEAR(hinf_norm(a, Matrix::Zero(2, 2), Matrix::Zero(2, 2), d), 4.0, 4e-6);
}

TEST(HinfNorm, UnstableSystemThrows) {
  EXPECT_THROW(hinf_norm(Matrix::Identity(1, 1), Matrix::Identity(1, 1), Matrix::Identity(1, 1)),
               UnstableSystem);
}

TEST(HinfNorm, FrequencyGainAtDc) {
  EXPECT_NEAR(frequency_gain(Matrix::Constant(1, 1, -2.0), Matrix::Constant(1, 1, 3.0),
                             Matrix::Constant(1, 1, 1.0), Matrix::Zero(1, 1), 0.0),
              1.5, 1e-15);
}

TEST(Sbr, VerdictFollowsAttenuation) {
  const Matrix a = Matrix::Constant(1, 1, -2.0);
  const Matrix b = Matrix::Constant(1, 1, 3.0);
  const Matrix c = Matrix::Constant(1, 1, 1.0);
  const auto pass = sbr_check(a, b, c, 1.6);
  EXPECT_TRUE(pass.verdict);
  ASSERT_TRUE(pass.witness.has_value());
  EXPECT_LT(oracle::max_eig(bounded_real_lhs(a, b, c, 1.6, *pass.witness)), 0.0);
  EXPECT_GT(pass.witness_min_eig, 0.0);
  EXPECT_FALSE(sbr_check(a, b, c, 1.4).verdict);
  EXPECT_FALSE(sbr_check(-a, b, c, 10.0).verdict);
}

TEST(ClosedLoop, CavityNominalControllerAtZeroDelta) {
  const auto plant = cavity::plant();
  const auto cl = close_loop(plant, scalar_controller(-0.5, -std::sqrt(5.0), -std::sqrt(0.5)));
  EXPECT_EQ(cl.n_total(), 4);
  EXPECT_LT(closed_loop_norm(cl, UncertaintySample::scalar(0.0, 2)), 1e-8);
  EXPECT_NEAR(closed_loop_norm(cl, UncertaintySample::scalar(1.0, 2)), 0.5709, 1e-3);
}

TEST(ClosedLoop, UnstableSampleGivesInfinity) {
  const auto plant = cavity::plant();
  const auto cl = close_loop(plant, scalar_controller(5.0, 0.0, 0.0));
  EXPECT_TRUE(std::isinf(closed_loop_norm(cl, UncertaintySample::scalar(0.0, 2))));
}

TEST(ClosedLoop, MismatchedControllerRejected) {
  const auto plant = cavity::plant();
  auto k = scalar_controller(-1.0, 1.0, 1.0);
  k.B_K = Matrix::Zero(2, 4);
  EXPECT_THROW(close_loop(plant, k), DimensionError);
}

TEST(RobustSbr, EmptySampleListIsInvalid) {
  const auto cl = close_loop(cavity::plant(), scalar_controller(-1.0, 1.0, 1.0));
  EXPECT_THROW(robust_sbr_check(cl, 1.0, {}), InvalidConfig);
}

TEST(ScaledEquivalence, RobustDesignIsCertified) {
  const auto plant = cavity::plant();
  SynthesisConfig config;
  config.g = 0.35;
  config.eps = 10.0;
  config.delta_grid = scalar_delta_grid(2, 11);
  const auto report = synthesize(plant, config);
  const auto cl = close_loop(plant, report.controller);
  const auto eq = scaled_equivalence_check(cl, 0.35, 10.0, config.delta_grid);
  EXPECT_TRUE(eq.scaled_sbr);
  EXPECT_TRUE(eq.robust_certified);
  for (double v : eq.sample_max_eigs) EXPECT_LT(v, 0.0);
  const auto robust = robust_sbr_check(cl, 0.35, config.delta_grid, &*eq.witness);
  EXPECT_TRUE(robust.verdict);
  EXPECT_TRUE(robust.common_witness_ok.value_or(false));
}

TEST(Sweep, SortsDeltasAndFormatsCsv) {
  const auto plant = cavity::plant();
  const auto k = scalar_controller(-0.5, -std::sqrt(5.0), -std::sqrt(0.5));
  const auto s = sweep(plant, {k}, {0.5, -0.5, 0.0}, 0.35);
  ASSERT_EQ(s.rows.size(), 3u);
  EXPECT_EQ(s.rows[0].delta, -0.5);
  EXPECT_EQ(s.rows[2].delta, 0.5);
  EXPECT_FALSE(s.rows[0].norm_reference.has_value());
  const std::string csv = sweep_to_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "delta,norm_robust,norm_reference,meets_g");
  EXPECT_NE(csv.find("\n-0.5,"), std::string::npos);
  EXPECT_NE(csv.find(",,true\n"), std::string::npos);
}

TEST(Sweep, CsvWritesInfinityForUnstablePoints) {
  SweepResult r;
  r.rows.push_back({0.25, std::numeric_limits<double>::infinity(), 0.123456789012, false});
  EXPECT_EQ(sweep_to_csv(r), "delta,norm_robust,norm_reference,meets_g\n0.25,inf,0.123456789,false\n");
}
