#include <gtest/gtest.h>

#include <array>
#include <random>

#include "thermodtn/jet.hpp"

using namespace thermodtn;
using C = Complex;

namespace {

TaylorJet<C> random_x_jet(const SpacePtr& sp, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TaylorJet<C> f(sp);
  const auto& xs = sp->layout->x;
  for (int p = 0; p < xs.size(); ++p) f.taylor(p, 0) = C(u(rng), u(rng));
  return f;
}

double distance(const TaylorJet<C>& a, const TaylorJet<C>& b) { return (a - b).max_abs(); }

}  // namespace

TEST(Jet, ProductOfLinearFactors) {
  auto sp = make_x_space(2, 4);
  const auto xn = TaylorJet<C>::x_coordinate(sp, 1);
  const auto f = (C(1.0) + xn) * (C(1.0) - xn);
  const std::array<int, 2> zero{0, 0}, d1{0, 1}, d2{0, 2}, d3{0, 3};
  EXPECT_EQ(f.derivative(zero), C(1.0));
  EXPECT_EQ(f.derivative(d1), C(0.0));
  EXPECT_EQ(f.derivative(d2), C(-2.0));
  EXPECT_EQ(f.derivative(d3), C(0.0));
}

TEST(Jet, SqrtOfConstant) {
  auto sp = make_x_space(3, 2);
  const auto r = sqrt(TaylorJet<C>::constant(sp, C(25.0)));
  EXPECT_NEAR(std::abs(r.value() - C(5.0)), 0.0, 1e-15);
  EXPECT_TRUE((r - TaylorJet<C>::constant(sp, C(5.0))).is_zero());
}

TEST(Jet, CovectorNormAtThreeFour) {
  auto sp = make_space(3, 1, {3.0, 4.0}, 2);
  const auto x1 = BiJet<C>::xi_coordinate(sp, 0), x2 = BiJet<C>::xi_coordinate(sp, 1);
  const auto r = sqrt(x1 * x1 + x2 * x2);
  const std::array<int, 3> none{0, 0, 0};
  const std::array<int, 2> k1{1, 0}, k2{0, 1}, k11{2, 0}, k12{1, 1};
  EXPECT_NEAR(std::abs(r.derivative(none) - C(5.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r.derivative(none, k1) - C(0.6)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r.derivative(none, k2) - C(0.8)), 0.0, 1e-15);
  // Hessian of |xi|: (|xi|^2 delta - xi xi^T) / |xi|^3
  EXPECT_NEAR(std::abs(r.derivative(none, k11) - C(16.0 / 125.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r.derivative(none, k12) - C(-12.0 / 125.0)), 0.0, 1e-15);
}

TEST(Jet, RingAxiomsOnRandomJets) {
  std::mt19937 rng(7);
  auto sp = make_x_space(3, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_x_jet(sp, rng), b = random_x_jet(sp, rng), c = random_x_jet(sp, rng);
    EXPECT_LT(distance(a * b, b * a), 1e-13);
    EXPECT_LT(distance((a * b) * c, a * (b * c)), 1e-12);
    EXPECT_LT(distance(a * (b + c), a * b + a * c), 1e-12);
    EXPECT_LT(distance((a + b) - b, a), 1e-14);
  }
}

TEST(Jet, ReciprocalAndSqrtInvertMultiplication) {
  std::mt19937 rng(11);
  auto sp = make_x_space(2, 6);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_x_jet(sp, rng);
    a.taylor(0, 0) = C(2.0, 0.3);
    EXPECT_LT(distance(a * reciprocal(a), TaylorJet<C>::constant(sp, C(1.0))), 1e-12);
    const auto s = sqrt(a);
    EXPECT_LT(distance(s * s, a), 1e-12);
    EXPECT_GT(s.value().real(), 0.0);
  }
}

TEST(Jet, LeibnizRule) {
  std::mt19937 rng(3);
  auto sp = make_x_space(2, 5);
  const auto a = random_x_jet(sp, rng), b = random_x_jet(sp, rng);
  for (int i = 0; i < 2; ++i) EXPECT_LT(distance((a * b).dx(i), a.dx(i) * b.truncated(4, 0) + a.truncated(4, 0) * b.dx(i)), 1e-12);
}

TEST(Jet, DerivativeConventionRoundTrip) {
  auto sp = make_space(2, 3, {1.5}, 3);
  BiJet<C> f(sp);
  const std::array<int, 2> J{1, 2};
  const std::array<int, 1> K{2};
  f.set_derivative(J, K, C(12.0));
  EXPECT_EQ(f.derivative(J, K), C(12.0));
  // Taylor coefficient is the derivative over J! K! = 1 * 2 * 2.
  const std::array<double, 2> x{0.5, 1.0};
  const std::array<double, 1> dxi{2.0};
  EXPECT_NEAR(std::abs(f.evaluate(x, dxi) - C(3.0 * 0.5 * 1.0 * 4.0)), 0.0, 1e-14);
}

TEST(Jet, JetArithDispatch) {
  auto sp = make_x_space(2, 3);
  const auto x = TaylorJet<C>::x_coordinate(sp, 0);
  const auto four = TaylorJet<C>::constant(sp, C(4.0));
  EXPECT_LT(distance(jet_arith(four, x, JetOp::Add), four + x), 1e-15);
  EXPECT_LT(distance(jet_arith(four, x, JetOp::Mul), four * x), 1e-15);
  EXPECT_LT(distance(jet_arith(four, four + x, JetOp::Div), four / (four + x)), 1e-15);
  EXPECT_NEAR(std::abs(jet_arith(four, four, JetOp::Sqrt).value() - C(2.0)), 0.0, 1e-15);
}

TEST(Jet, Errors) {
  auto sp = make_x_space(2, 3);
  const auto x = TaylorJet<C>::x_coordinate(sp, 0);
  try {
    (void)reciprocal(x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivisionByZeroJet);
  }
  try {
    (void)sqrt(TaylorJet<C>::constant(sp, C(-1.0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SqrtBranchError);
  }
  try {
    (void)(x + TaylorJet<C>::x_coordinate(make_x_space(3, 3), 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompatibleJets);
  }
  const std::array<int, 2> too_high{4, 0};
  try {
    (void)x.derivative(too_high);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfOrder);
  }
}

TEST(Jet, RationalSqrt) {
  auto sp = make_x_space(2, 3);
  const auto nine = TaylorJet<QComplex>::constant(sp, QComplex(mpq_class(mpz_class(9), mpz_class(4))));
  EXPECT_TRUE(sqrt(nine).value() == QComplex(mpq_class(mpz_class(3), mpz_class(2))));
  try {
    (void)sqrt(TaylorJet<QComplex>::constant(sp, QComplex(2L)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotRepresentable);
  }
}
