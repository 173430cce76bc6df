#include <gtest/gtest.h>

#include "cases.hpp"
#include "thermodtn/dtn_assembly.hpp"

using namespace thermodtn;
using C = Complex;

namespace {

MaterialJet<C> constant_material(const SpacePtr& sp, double lambda, double mu, double alpha, double beta, double omega) {
  auto k = [&](double v) { return TaylorJet<C>::constant(sp, C(v)); };
  return {k(lambda), k(mu), k(alpha), k(beta), 1.0, omega, 1.0, 1.0};
}

}  // namespace

TEST(DtnAssembly, PrincipalSymbolSpotValue) {
  auto sp = make_x_space(2, 2);
  const auto ctx = make_context(MetricJet<C>::euclidean(2, 2), constant_material(sp, 0.0, 1.0, 1.0, 0.0, 0.0), {1.0}, 2);
  const auto table = build_table(ctx, 1);
  const C I(0.0, 1.0);
  Eigen::Matrix3cd expected;
  expected << 4.0 / 3.0, -2.0 * I / 3.0, 0.0, 2.0 * I / 3.0, 4.0 / 3.0, 0.0, 0.0, 0.0, 1.0;
  EXPECT_LT((table.p_at(1).value() - expected).norm(), 1e-14);
  EXPECT_LT((p1_closed_form(ctx).value() - expected).norm(), 1e-14);
}

TEST(DtnAssembly, PrincipalAndSubprincipalClosedForms) {
  for (const auto& c : thermodtn::testing::case_set(16, 3, 41)) {
    const auto ctx = make_context(c.metric, c.material, c.xi, 3);
    const auto table = build_table(ctx, 2);
    const double s1 = table.p_at(1).max_abs(), s0 = table.p_at(0).max_abs();
    EXPECT_LT((table.p_at(1) - p1_closed_form(ctx)).max_abs() / s1, 1e-12) << c.label;
    EXPECT_LT((table.p_at(0) - p0_closed_form(ctx, table.q_at(0))).max_abs() / s0, 1e-12) << c.label;
  }
}

TEST(DtnAssembly, GroupedResidualsVanish) {
  for (const auto& c : thermodtn::testing::case_set(8, 4, 3)) {
    const auto ctx = make_context(c.metric, c.material, c.xi, 4);
    const auto table = build_table(ctx, 4);
    for (int d = 2; d >= -2; --d) EXPECT_LT(grouped_residual(table, d).relative(), 1e-9) << c.label << " degree " << d;
  }
}

TEST(DtnAssembly, GroupedResidualsAreExactlyZeroInRationalMode) {
  for (long variant : {0L, 1L}) {
    const auto ctx = thermodtn::testing::rational_context(3, 4, 4, {3.0, 4.0}, variant);
    const auto table = build_table(ctx, 4);
    for (int d = 2; d >= -2; --d) EXPECT_TRUE(grouped_residual(table, d).value.is_zero()) << "degree " << d;
  }
}

TEST(DtnAssembly, SymbolsAreHomogeneous) {
  const auto c = thermodtn::testing::case_set(4, 3, 12)[3];
  std::vector<double> xi2 = c.xi;
  for (auto& v : xi2) v *= 2.5;
  const auto a = build_table(make_context(c.metric, c.material, c.xi, 3), 3);
  const auto b = build_table(make_context(c.metric, c.material, xi2, 3), 3);
  for (int k = 0; k <= 3; ++k) {
    const double t = std::pow(2.5, 1 - k);
    EXPECT_LT((b.p[k].value() - t * a.p[k].value()).norm() / (t * a.p[k].value().norm()), 1e-12) << k;
  }
}

TEST(DtnAssembly, SubprincipalThermalCouplingClosedForms) {
  for (const auto& c : thermodtn::testing::case_set(8, 2, 77)) {
    const auto ctx = make_context(c.metric, c.material, c.xi, 2);
    const auto table = build_table(ctx, 1);
    const auto cf = q0_thermal_closed_form(ctx);
    const int N = ctx.normal(), T = ctx.thermal();
    const C lam = c.material.lambda.value(), mu = c.material.mu.value(), al = c.material.alpha.value(),
            be = c.material.beta.value();
    EXPECT_LT(std::abs(table.q_at(0)(N, T).value() + be / (lam + 3.0 * mu)), 1e-13) << c.label;
    const C expected = C(0.0, 1.0) * mu * c.material.omega * be * c.material.theta0 / (al * (lam + 3.0 * mu));
    EXPECT_LT(std::abs(table.q_at(0)(T, N).value() - expected), 1e-13) << c.label;
    EXPECT_LT((table.q_at(0)(N, T) - cf.normal_thermal).max_abs(), 1e-12) << c.label;
    EXPECT_LT((table.q_at(0)(T, N) - cf.thermal_normal).max_abs(), 1e-12) << c.label;
  }
}

TEST(DtnAssembly, DecoupledThermalEntryIsAlphaTimesNorm) {
  auto sp = make_x_space(3, 3);
  const auto ctx =
      make_context(MetricJet<C>::euclidean(3, 3), constant_material(sp, 0.4, 1.1, 2.5, 0.0, 0.0), {0.6, 0.8}, 3);
  const auto table = build_table(ctx, 3);
  EXPECT_LT(std::abs(table.p_at(1)(3, 3).value() - C(2.5)), 1e-14);
  for (int j = 0; j >= -2; --j) EXPECT_LT(std::abs(table.p_at(j)(3, 3).value()), 1e-14) << j;
}

TEST(DtnAssembly, InsufficientJetOrderNamesTheRequirement) {
  EXPECT_EQ(required_orders(4), std::make_pair(4, 4));
  auto sp = make_x_space(2, 2);
  const auto ctx = make_context(MetricJet<C>::euclidean(2, 2), constant_material(sp, 0.0, 1.0, 1.0, 1.0, 0.0), {1.0}, 2);
  try {
    (void)build_table(ctx, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientJetOrder);
    EXPECT_NE(std::string(e.what()).find("needs x order >= 3"), std::string::npos);
  }
  const auto table = build_table(ctx, 2);
  EXPECT_THROW((void)grouped_residual(table, -1), Error);
}
