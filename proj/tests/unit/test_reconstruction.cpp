#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cases.hpp"
#include "thermodtn/oracle.hpp"
#include "thermodtn/reconstruction.hpp"

using namespace thermodtn;
using C = Complex;

namespace {

/// x_n-polynomial material; derivative lists are d^k/dx_n^k at the boundary.
MaterialJet<C> axis_material(int n, int order, const std::vector<double>& lambda, const std::vector<double>& mu,
                             const std::vector<double>& alpha, const std::vector<double>& beta, double omega) {
  RecoveredJet j;
  j.lambda = lambda;
  j.mu = mu;
  j.alpha = alpha;
  j.beta = beta;
  ReconstructionProblem pr{MetricJet<C>::euclidean(n, order), 1.1, omega, 1.3, 0.8, {}};
  return material_from_jet(j, pr, order);
}

std::vector<std::vector<double>> covectors(int n, int count) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) {
    const double r = 1.0 + 0.25 * i, th = 0.4 * i;
    if (n == 2)
      out.push_back({(i % 2 ? -1.0 : 1.0) * r});
    else
      out.push_back({r * std::cos(th), r * std::sin(th)});
  }
  return out;
}

double worst_rel(const RecoveredJet& got, const RecoveredJet& truth, int max_order) {
  double w = 0.0;
  for (const auto& e : compare_jets(got, truth))
    if (e.order <= max_order) w = std::max(w, e.rel_err);
  return w;
}

Eigen::MatrixXd identity_metric(int t) { return Eigen::MatrixXd::Identity(t, t); }

}  // namespace

TEST(Reconstruction, Order0FromSpotSymbol) {
  const C I(0.0, 1.0);
  Eigen::Matrix3cd p1;
  p1 << 4.0 / 3.0, -2.0 * I / 3.0, 0.0, 2.0 * I / 3.0, 4.0 / 3.0, 0.0, 0.0, 0.0, 1.0;
  const auto o = recover_order0(p1, Eigen::Matrix3cd::Zero(), {1.0}, identity_metric(1));
  EXPECT_NEAR(o.lambda, 0.0, 1e-14);
  EXPECT_NEAR(o.mu, 1.0, 1e-14);
  EXPECT_NEAR(o.alpha, 1.0, 1e-14);
  EXPECT_NEAR(o.beta, 0.0, 1e-14);
}

TEST(Reconstruction, Order0CouplingFromSubprincipalSymbol) {
  const auto m = axis_material(2, 2, {0.0}, {1.0}, {1.0}, {3.0}, 0.0);
  const auto p = forward_symbols(MetricJet<C>::euclidean(2, 2), m, {1.0}, 1);
  const auto o = recover_order0(p[0], p[1], {1.0}, identity_metric(1));
  EXPECT_NEAR(o.beta, 3.0, 1e-13);
  EXPECT_NEAR(o.mu, 1.0, 1e-13);
}

TEST(Reconstruction, Order0OnTheLambdaPlusMuBoundary) {
  for (int n : {2, 3}) {
    const auto m = axis_material(n, 2, {-1.0}, {1.0}, {0.5}, {0.2}, 0.0);
    const std::vector<double> xi = n == 2 ? std::vector<double>{0.7} : std::vector<double>{0.3, -0.9};
    const auto p = forward_symbols(MetricJet<C>::euclidean(n, 2), m, xi, 1);
    const auto o = recover_order0(p[0], p[1], xi, identity_metric(n - 1));
    EXPECT_NEAR(o.lambda, -1.0, 1e-12);
    EXPECT_NEAR(o.mu, 1.0, 1e-12);
    EXPECT_NEAR(o.alpha, 0.5, 1e-12);
    EXPECT_NEAR(o.beta, 0.2, 1e-12);
  }
}

TEST(Reconstruction, Order0OnCurvedBoundaryMetric) {
  std::mt19937 rng(31);
  auto sp = make_x_space(3, 3);
  const auto g = thermodtn::testing::random_metric(sp, 3, true, 3, rng);
  const auto m = axis_material(3, 3, {0.8, 0.1}, {1.4, -0.2}, {0.9}, {1.1}, 0.3);
  const auto pr = make_problem(g, m, covectors(3, 4), 1);
  const auto o = recover_order0(pr);
  EXPECT_NEAR(o.lambda, 0.8, 1e-12);
  EXPECT_NEAR(o.mu, 1.4, 1e-12);
  EXPECT_NEAR(o.alpha, 0.9, 1e-12);
  EXPECT_NEAR(o.beta, 1.1, 1e-12);
}

TEST(Reconstruction, InconsistentSamplesAreReported) {
  const auto m1 = axis_material(2, 2, {0.5}, {1.0}, {1.0}, {1.0}, 0.0);
  const auto m2 = axis_material(2, 2, {0.5}, {1.5}, {1.0}, {1.0}, 0.0);
  const auto g = MetricJet<C>::euclidean(2, 2);
  ReconstructionProblem pr{g, 1.1, 0.0, 1.3, 0.8, {}};
  pr.samples.push_back({{1.0}, forward_symbols(g, m1, {1.0}, 1)});
  pr.samples.push_back({{2.0}, forward_symbols(g, m2, {2.0}, 1)});
  try {
    (void)recover_order0(pr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentSymbol);
  }
}

TEST(Reconstruction, LayerUnknownsFollowFirstAppearance) {
  const auto s1 = layer_unknowns(1);
  ASSERT_EQ(s1.size(), 3u);
  EXPECT_EQ(s1[2].coefficient, Coefficient::Beta);
  EXPECT_EQ(s1[2].order, 0);
  const auto s3 = layer_unknowns(3);
  ASSERT_EQ(s3.size(), 4u);
  EXPECT_EQ(s3[0].order, 3);
  EXPECT_EQ(s3[2].coefficient, Coefficient::Alpha);
  EXPECT_EQ(s3[2].order, 2);
}

TEST(Reconstruction, DepthThreeRoundTrip) {
  const auto m = axis_material(2, 4, {0.6, 0.3, -0.4, 0.9}, {1.2, -0.2, 0.5, 0.3}, {0.9, 0.4, -0.6},
                               {1.1, -0.3, 0.7}, 0.3);
  const auto pr = make_problem(MetricJet<C>::euclidean(2, 4), m, covectors(2, 8), 3);
  const auto jet = layer_strip(pr, 3);
  EXPECT_EQ(jet.lambda.size(), 4u);
  EXPECT_EQ(jet.alpha.size(), 3u);
  EXPECT_LT(worst_rel(jet, jet_from_material(m, 3), 3), 1e-9);
  for (const auto& l : jet.layers) EXPECT_LT(l.residual, 1e-10);
}

TEST(Reconstruction, RoundTripOnWarpedMetric) {
  std::mt19937 rng(2);
  auto sp = make_x_space(3, 4);
  const auto g = thermodtn::testing::random_metric(sp, 3, true, 4, rng);
  const auto m = axis_material(3, 3, {0.7, 0.2, 0.3}, {1.3, 0.4, -0.5}, {1.1, -0.3}, {0.9, 0.5}, 0.4);
  const auto pr = make_problem(g, m, covectors(3, 6), 2);
  EXPECT_LT(worst_rel(layer_strip(pr, 2), jet_from_material(m, 2), 2), 1e-9);
}

TEST(Reconstruction, NoisySymbolsDegradeGracefully) {
  const auto m = axis_material(2, 3, {0.6, 0.3, -0.4}, {1.2, -0.2, 0.5}, {0.9, 0.4}, {1.1, -0.3}, 0.3);
  auto pr = make_problem(MetricJet<C>::euclidean(2, 3), m, covectors(2, 12), 2);
  std::mt19937 rng(5);
  std::normal_distribution<double> noise(0.0, 1e-8);
  for (auto& s : pr.samples)
    for (auto& p : s.p) {
      const double scale = p.cwiseAbs().maxCoeff();
      for (Eigen::Index i = 0; i < p.size(); ++i) p(i) += scale * C(noise(rng), noise(rng));
    }
  LayerOptions opt;
  opt.residual_tolerance = 1e-5;
  EXPECT_LT(worst_rel(layer_strip(pr, 2, opt), jet_from_material(m, 2), 2), 1e-4);
}

TEST(Reconstruction, ThermalClosedFormMatchesAffineSolve) {
  const auto m = axis_material(2, 3, {0.7, 0.2}, {1.3, -0.1}, {0.9, 0.37}, {1.0, -0.21}, 0.3);
  const auto pr = make_problem(MetricJet<C>::euclidean(2, 3), m, covectors(2, 4), 2);
  const auto jet = layer_strip(pr, 2);
  const auto cf = recover_normal_derivative_thermal(pr, jet);
  EXPECT_NEAR(cf.dbeta, -0.21, 1e-10);
  EXPECT_NEAR(cf.dalpha, 0.37, 1e-10);
  EXPECT_NEAR(cf.dbeta, jet.beta[1], 1e-8);
  EXPECT_NEAR(cf.dalpha, jet.alpha[1], 1e-8);
  // without the i omega theta0 factor the (n+1, n) entry does not give a real derivative
  EXPECT_GT(std::abs(cf.printed_dalpha - C(0.37)), 1e-3);
}

TEST(Reconstruction, StaticThermalDerivativeIsNotIdentifiable) {
  const auto m = axis_material(2, 3, {0.7, 0.2}, {1.3, -0.1}, {0.9, 0.37}, {1.0, -0.21}, 0.0);
  const auto pr = make_problem(MetricJet<C>::euclidean(2, 3), m, covectors(2, 4), 2);
  try {
    (void)layer_strip(pr, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficientLayer);
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
  }
  RecoveredJet known = layer_strip(pr, 1);
  try {
    (void)recover_normal_derivative_thermal(pr, known);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficientLayer);
  }
}

TEST(Reconstruction, LayerSymbolIsAffineInEachUnknown) {
  const auto m = axis_material(2, 3, {0.6, 0.3, -0.4}, {1.2, -0.2, 0.5}, {0.9, 0.4}, {1.1, -0.3}, 0.3);
  const auto pr = make_problem(MetricJet<C>::euclidean(2, 3), m, covectors(2, 3), 2);
  const auto truth = jet_from_material(m, 2);
  for (int s = 1; s <= 2; ++s)
    for (const auto& u : layer_unknowns(s))
      EXPECT_LE(affinity_second_difference(pr, truth, s, u, 0.3, 1.0), 1e-11) << s << coefficient_name(u.coefficient);
}

TEST(Reconstruction, ScaledCoefficientsGiveScaledSymbols) {
  // omega = 0 removes the only terms that do not scale with the coefficients
  const auto m = axis_material(2, 2, {0.6, 0.3}, {1.2, -0.2}, {0.9}, {1.1}, 0.0);
  auto pr = make_problem(MetricJet<C>::euclidean(2, 2), m, covectors(2, 4), 1);
  for (auto& s : pr.samples)
    for (auto& p : s.p) p *= 2.5;
  const auto jet = layer_strip(pr, 1);
  EXPECT_NEAR(jet.lambda[0], 1.5, 1e-12);
  EXPECT_NEAR(jet.mu[1], -0.5, 1e-12);
  EXPECT_NEAR(jet.alpha[0], 2.25, 1e-12);
  EXPECT_NEAR(jet.beta[0], 2.75, 1e-12);
}

TEST(Reconstruction, FitRecoversExactExpansion) {
  const auto m = axis_material(2, 4, {0.6, 0.3}, {1.2, -0.2}, {0.9, 0.4}, {1.1, -0.3}, 0.3);
  const auto g = MetricJet<C>::euclidean(2, 4);
  const int depth = 3;
  const auto exact = forward_symbols(g, m, {1.0}, depth);
  std::vector<DtnSample> samples;
  for (double t : {2.0, 3.0, 5.0, 8.0, 13.0, 21.0}) {
    DtnSample s;
    s.xi = {t};
    s.lambda = Eigen::MatrixXcd::Zero(3, 3);
    for (int k = 0; k <= depth; ++k) s.lambda += std::pow(t, 1 - k) * exact[static_cast<std::size_t>(k)];
    samples.push_back(s);
  }
  const auto fit = fit_symbols_from_samples(samples, {1.0}, depth);
  for (int k = 0; k <= depth; ++k) EXPECT_LT((fit.p[k] - exact[k]).norm(), 1e-10) << k;
  EXPECT_LT(fit.residual, 1e-12);
}

TEST(Reconstruction, FitOfHalfspaceOracle) {
  const auto m = axis_material(2, 4, {0.7}, {1.3}, {0.9}, {1.0}, 0.2);
  std::vector<DtnSample> samples;
  for (double t : {8.0, 11.0, 16.0, 22.0, 32.0, 45.0, 64.0, 90.0, 128.0}) samples.push_back(halfspace_multiplier(m, {t}));
  const auto fit = fit_symbols_from_samples(samples, {1.0}, 4);
  const auto exact = forward_symbols(MetricJet<C>::euclidean(2, 4), m, {1.0}, 4);
  EXPECT_LT((fit.p[0] - exact[0]).norm() / exact[0].norm(), 1e-6);
  EXPECT_LT((fit.p[1] - exact[1]).norm() / exact[0].norm(), 1e-5);
}

TEST(Reconstruction, FitOfSlabOracle) {
  const auto m = axis_material(2, 4, {0.5}, {1.0}, {1.0, 0.5}, {1.0}, 0.3);
  std::vector<DtnSample> samples;
  for (double t : {8.0, 11.0, 16.0, 22.0, 32.0, 45.0, 64.0, 90.0, 128.0}) samples.push_back(slab_dtn(m, {t}));
  const auto fit = fit_symbols_from_samples(samples, {1.0}, 4);
  const auto exact = forward_symbols(MetricJet<C>::euclidean(2, 4), m, {1.0}, 4);
  for (int k = 0; k <= 2; ++k) EXPECT_LT((fit.p[k] - exact[k]).norm() / exact[0].norm(), 1e-3) << k;
}

TEST(Reconstruction, FitRejectsBadSampleSets) {
  const auto m = axis_material(2, 2, {0.7}, {1.3}, {0.9}, {1.0}, 0.0);
  std::vector<DtnSample> samples;
  for (double t : {8.0, 16.0, 32.0}) samples.push_back(halfspace_multiplier(m, {t}));
  EXPECT_THROW((void)fit_symbols_from_samples(samples, {1.0}, 2), Error);
  samples.push_back(halfspace_multiplier(m, {-4.0}));
  samples.push_back(halfspace_multiplier(m, {64.0}));
  try {
    (void)fit_symbols_from_samples(samples, {1.0}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IllConditionedFit);
  }
}

TEST(Reconstruction, RecoveredJetValidation) {
  RecoveredJet j;
  j.lambda = {0.0};
  j.mu = {-1.0};
  j.alpha = {1.0};
  EXPECT_THROW(j.validate(), Error);
  j.mu = {1.0};
  EXPECT_NO_THROW(j.validate());
}
