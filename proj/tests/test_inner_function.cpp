#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mspace/inner_function.hpp"
#include "oracles.hpp"

using namespace mspace;
using oracle::cplx;

TEST(BlaschkeFactor, VanishesAtItsZero) { EXPECT_EQ(std::abs(blaschke_factor({0, 2}, {0, 2})), 0.0); }

TEST(BlaschkeFactor, NormalizedToOneAtOrigin) {
  // |l^2+1|/(l^2+1) = 3/(-3) = -1 and (0 - 2i)/(0 + 2i) = -1
  const cplx v = blaschke_factor({0, 2}, 0.0);
  EXPECT_NEAR(v.real(), 1.0, 1e-15);
  EXPECT_NEAR(v.imag(), 0.0, 1e-15);
}

TEST(BlaschkeFactor, UnimodularOnTheLine) { EXPECT_NEAR(std::abs(blaschke_factor({3, 1}, 5.0)), 1.0, 1e-12); }

TEST(BlaschkeFactor, DegenerateNormalizationAtI) {
  const cplx v = blaschke_factor({0, 1}, 0.0);
  // normalization taken as 1, so b_i(0) = (0 - i)/(0 + i) = -1
  EXPECT_NEAR(v.real(), -1.0, 1e-15);
}

TEST(BlaschkeFactor, PoleAtConjugate) {
  EXPECT_THROW(blaschke_factor({1, 1}, {1, -1}), Error);
}

TEST(InnerFunction, PaleyWienerModulus) {
  const double tau = 3.0;
  const auto th = InnerFunction::paley_wiener(tau);
  for (double y : {0.0, 0.1, 1.0, 4.0})
    for (double x : {-2.0, 0.5, 7.0}) EXPECT_NEAR(th.modulus({x, y}), std::exp(-tau * y), 1e-14);
}

TEST(InnerFunction, ZeroIsAZero) {
  const InnerFunction th(0.0, ZeroSet::simple({{0, 2}}));
  EXPECT_EQ(std::abs(th.eval({0, 2})), 0.0);
  EXPECT_EQ(th.log_modulus({0, 2}), -std::numeric_limits<double>::infinity());
}

TEST(InnerFunction, UnimodularAtRealPoint) {
  const InnerFunction th(0.0, ZeroSet::simple({{0, 1}, {3, 1}}));
  EXPECT_NEAR(th.modulus(1.0), 1.0, 1e-10);
}

TEST(InnerFunction, AgreesWithNaiveProduct) {
  std::mt19937_64 rng(3);
  std::vector<cplx> zeros;
  std::uniform_real_distribution<double> u(-5, 5), v(0.1, 3);
  for (int k = 0; k < 12; ++k) zeros.push_back({u(rng), v(rng)});
  const InnerFunction th(1.5, ZeroSet::simple(zeros));
  for (int k = 0; k < 50; ++k) {
    const cplx z(u(rng), std::abs(u(rng)));
    const cplx a = th.eval(z), b = oracle::naive_theta(1.5, zeros, z);
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-12);
  }
}

TEST(InnerFunction, LogSpaceMatchesNaiveAboveThreshold) {
  std::vector<cplx> zeros;
  for (int k = 0; k < 60; ++k) zeros.push_back({0.1 * k, 0.5 + 0.01 * k});
  const InnerFunction th(0.0, ZeroSet::simple(zeros));
  ASSERT_GT(th.zero_set().factor_count(), InnerFunction::log_space_threshold);
  for (cplx z : {cplx(1.0, 0.3), cplx(-4.0, 2.0), cplx(10.0, 0.0)}) {
    const cplx a = th.eval(z), b = oracle::naive_theta(0.0, zeros, z);
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-11 * std::max(1.0, std::abs(b)));
  }
}

TEST(InnerFunction, MultiplicityRaisesThePower) {
  const InnerFunction once(0.0, ZeroSet::simple({{1, 1}}));
  const InnerFunction twice(0.0, ZeroSet({{{1, 1}, 2}}));
  const cplx z(0.3, 0.7);
  EXPECT_NEAR(std::abs(twice.eval(z) - once.eval(z) * once.eval(z)), 0.0, 1e-14);
}

TEST(InnerFunction, LogModulusAgreesWithEval) {
  std::mt19937_64 rng(5);
  const auto th = oracle::random_blaschke(rng, 40, 10, 0.1, 10, 0.7);
  std::uniform_real_distribution<double> u(-12, 12), v(0, 6);
  for (int k = 0; k < 200; ++k) {
    const cplx z(u(rng), v(rng));
    const double m = std::abs(th.eval(z));
    if (m > 1e-300) EXPECT_NEAR(std::exp(th.log_modulus(z)) / m, 1.0, 1e-10);
  }
}

TEST(InnerFunction, ModulusBoundOnUpperHalfPlaneGrid) {
  std::mt19937_64 rng(6);
  const auto th = oracle::random_blaschke(rng, 20, 5, 0.1, 5, 0.3);
  for (int i = 0; i <= 60; ++i)
    for (int j = 0; j <= 30; ++j) EXPECT_LE(th.modulus({-9.0 + 0.3 * i, 0.2 * j}), 1.0 + 1e-12);
}

TEST(InnerFunction, SymmetricZerosGiveEvenModulus) {
  const InnerFunction th(0.4, ZeroSet::simple({{2, 1}, {-2, 1}, {0, 3}}));
  for (double x : {0.3, 1.7, 5.0}) {
    const double y = 0.4;
    EXPECT_NEAR(th.modulus({x, y}), th.modulus({-x, y}), 1e-14);
  }
}

TEST(InnerFunction, BoundaryDerivativeModulus) {
  EXPECT_NEAR(InnerFunction::paley_wiener(2.5).boundary_derivative_modulus(-3.0), 2.5, 1e-15);
  const InnerFunction one(0.0, ZeroSet::simple({{0, 1}}));
  EXPECT_NEAR(one.boundary_derivative_modulus(0.0), 2.0, 1e-15);
  EXPECT_LT(one.boundary_derivative_modulus(1e6), 1e-11);
  EXPECT_THROW(InnerFunction().boundary_derivative_modulus(0.0), Error);
}

TEST(InnerFunction, BoundaryDerivativeMatchesPhaseDifference) {
  std::mt19937_64 rng(8);
  const auto th = oracle::random_blaschke(rng, 6, 3, 0.2, 2, 1.0);
  for (double x : {-2.0, 0.0, 1.3}) {
    const double fd = oracle::derivative([&](double t) { return th.phase_difference(t, x); }, x, 1e-3);
    EXPECT_NEAR(fd, th.boundary_derivative_modulus(x), 1e-8);
  }
}

TEST(InnerFunction, DerivativesMatchFiniteDifferences) {
  const InnerFunction th(0.5, ZeroSet::simple({{1, 1}, {-2, 0.5}}));
  const cplx z(0.2, 0.3);
  const auto d = th.derivatives(z, 2);
  const cplx h = 1e-3;
  auto f = [&](cplx w) { return th.eval(w); };
  const cplx d1 = (-f(z + 2.0 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2.0 * h)) / (12.0 * h);
  const cplx d2 = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
  EXPECT_NEAR(std::abs(d[1] - d1), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(d[2] - d2), 0.0, 1e-5);
}

TEST(InnerFunction, ContinuationPoleBelowTheAxis) {
  const InnerFunction th(0.0, ZeroSet::simple({{0, 1}}));
  EXPECT_THROW(th.eval({0, -1}), Error);
  EXPECT_NO_THROW(th.eval({0, -0.5}));
}

TEST(ZeroSet, RejectsPointsOffTheUpperHalfPlane) {
  EXPECT_THROW(ZeroSet::simple({{1, 0}}), Error);
  EXPECT_THROW(ZeroSet({{{1, 1}, 0}}), Error);
}

TEST(BlaschkeSum, Examples) {
  EXPECT_EQ(blaschke_sum(ZeroSet{}), 0.0);
  EXPECT_NEAR(blaschke_sum(ZeroSet::simple({{0, 1}})), 0.5, 1e-16);
  std::vector<cplx> z;
  double expect = 0.0;
  for (int n = 0; n <= 15; ++n) {
    z.push_back({0, std::ldexp(1.0, n)});
    expect += std::ldexp(1.0, n) / (1.0 + std::ldexp(1.0, 2 * n));
  }
  EXPECT_NEAR(blaschke_sum(ZeroSet::simple(z)), expect, 1e-15);
}

TEST(InnerFunctionJson, RoundTripAndConstantRejected) {
  const InnerFunction th(1.25, ZeroSet({{{1, 2}, 2}, {{-1, 0.5}, 1}}));
  nlohmann::json j;
  to_json(j, th);
  const auto back = inner_function_from_json(j);
  EXPECT_EQ(back.tau(), 1.25);
  ASSERT_EQ(back.zeros().size(), 2u);
  EXPECT_EQ(back.zeros()[0].multiplicity, 2);
  EXPECT_NEAR(std::abs(back.eval({0.3, 0.2}) - th.eval({0.3, 0.2})), 0.0, 1e-15);
  try {
    inner_function_from_json(nlohmann::json::parse(R"({"tau": 0})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::constant_function);
  }
}
