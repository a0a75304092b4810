#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mspace/geometry.hpp"

using namespace mspace;

namespace {
InnerFunction single_zero() { return InnerFunction(0.0, ZeroSet::simple({{0, 1}})); }
InnerFunction geometric_zeros() {
  std::vector<cplx> z;
  for (int n = 0; n <= 15; ++n) z.push_back({0, std::ldexp(1.0, n)});
  return InnerFunction(0.0, ZeroSet::simple(z));
}
// d_eps(0) = (1 - eps)/(1 + eps): nearest point of the pseudohyperbolic disk around i
double disk_distance(double eps) { return (1 - eps) / (1 + eps); }
}  // namespace

TEST(InSublevel, StrictInequality) {
  const auto pw = InnerFunction::paley_wiener(2.0);
  const double eps = std::exp(-2.0);
  EXPECT_FALSE(in_sublevel(pw, eps, {0, 1}) && pw.modulus({0, 1}) >= eps);
  EXPECT_TRUE(in_sublevel(pw, eps, {0, 1.1}));
  EXPECT_TRUE(in_sublevel(single_zero(), 0.5, {0, 1}));
  EXPECT_THROW(in_sublevel(pw, eps, {0, 0}), Error);
}

TEST(InSublevel, BoundaryPointIsOutside) {
  // |exp(2iz)| at z = i equals e^-2 up to rounding, so test on a value we control exactly
  const auto pw = InnerFunction::paley_wiener(2.0);
  const double eps = pw.modulus({0, 1});
  EXPECT_FALSE(in_sublevel(pw, eps, {0, 1}));
}

TEST(DistToSublevel, PaleyWienerClosedForm) {
  for (double tau : {1.0, 2.0 * std::numbers::pi})
    for (double eps : {0.2, 0.5, 0.8}) {
      const auto pw = InnerFunction::paley_wiener(tau);
      DistanceField f(pw, SublevelQuery::for_window(pw, eps, 10.0));
      for (double x : {-9.0, 0.0, 3.7}) EXPECT_NEAR(f(x), std::log(1 / eps) / tau, 1e-6);
    }
}

TEST(DistToSublevel, SingleZeroDisk) {
  const auto th = single_zero();
  for (double eps : {0.2, 1.0 / 3.0, 0.5, 0.8})
    EXPECT_NEAR(dist_to_sublevel(th, eps, 0.0, SublevelQuery::for_window(th, eps, 10.0)), disk_distance(eps), 1e-4);
}

TEST(DistToSublevel, SingleZeroOffAxis) {
  // disk centre i(1+e^2)/(1-e^2), radius 2e/(1-e^2); distance from x = |x - c| - r
  const auto th = single_zero();
  const double eps = 0.5, c = (1 + eps * eps) / (1 - eps * eps), r = 2 * eps / (1 - eps * eps);
  DistanceField f(th, SublevelQuery::for_window(th, eps, 10.0));
  for (double x : {0.4, -1.5, 3.0}) EXPECT_NEAR(f(x), std::hypot(x, c) - r, 1e-6);
}

TEST(DistToSublevel, TendsToZeroAsEpsilonGrows) {
  const auto th = single_zero();
  double prev = 1.0;
  for (double eps : {0.9, 0.99, 0.999}) {
    const double d = dist_to_sublevel(th, eps, 0.0, SublevelQuery::for_window(th, eps, 10.0));
    EXPECT_LT(d, prev);
    EXPECT_NEAR(d, disk_distance(eps), 1e-4);
    prev = d;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(DistToSublevel, OutOfWindow) {
  const auto th = single_zero();
  DistanceField f(th, SublevelQuery::for_window(th, 0.5, 10.0));
  EXPECT_THROW(f(100.0), Error);
  // a box that misses the level set entirely
  SublevelQuery q = SublevelQuery::for_window(th, 0.5, 10.0);
  q.box = {50, 60, 1e-3, 1};
  try {
    DistanceField g(th, q);
    g(55.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::level_set_out_of_window);
  }
}

TEST(DistToSublevel, MonotoneInEpsilonAndLipschitz) {
  const auto th = InnerFunction(0.5, ZeroSet::simple({{1, 0.5}, {-3, 2}, {6, 0.2}}));
  DistanceField lo(th, SublevelQuery::for_window(th, 0.3, 10.0)), hi(th, SublevelQuery::for_window(th, 0.6, 10.0));
  double prev_x = -8.0, prev_d = lo(-8.0);
  for (int i = 0; i <= 160; ++i) {
    const double x = -8.0 + 0.1 * i;
    const double d = lo(x);
    EXPECT_GT(d, 0.0);
    EXPECT_GE(d, hi(x) - 1e-9);
    EXPECT_LE(std::abs(d - prev_d), std::abs(x - prev_x) + 2e-9);
    prev_x = x;
    prev_d = d;
  }
}

TEST(DistToSublevel, BoundaryPointsLieOnTheLevelSet) {
  const auto th = geometric_zeros();
  DistanceField f(th, SublevelQuery::for_window(th, 0.5, 1e4));
  for (double x : {1.0, 37.0, 900.0, 8000.0, -5000.0}) {
    const cplx z = f.nearest_point(x);
    EXPECT_NEAR(th.log_modulus(z), std::log(0.5), 1e-9);
  }
}

TEST(DistToSpectrum, Examples) {
  EXPECT_DOUBLE_EQ(dist_to_spectrum(single_zero(), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(dist_to_spectrum(InnerFunction(0.0, ZeroSet::simple({{0, 1}, {4, 2}})), 4.0), 2.0);
  EXPECT_DOUBLE_EQ(dist_to_spectrum(geometric_zeros(), 0.0), 1.0);
  EXPECT_THROW(dist_to_spectrum(InnerFunction(), 0.0), Error);
}

TEST(Comparability, PaleyWienerConstantRatio) {
  const double tau = 3.0, eps = 0.4;
  const auto pw = InnerFunction::paley_wiener(tau);
  DistanceField f(pw, SublevelQuery::for_window(pw, eps, 10.0));
  const auto rep = comparability_report(f, {-5, -1, 0, 2, 8});
  EXPECT_NEAR(rep.min_ratio, std::log(1 / eps), 1e-5);
  EXPECT_NEAR(rep.max_ratio, std::log(1 / eps), 1e-5);
}

TEST(Comparability, SingleZeroAtOrigin) {
  const auto th = single_zero();
  DistanceField f(th, SublevelQuery::for_window(th, 1.0 / 3.0, 10.0));
  const auto rep = comparability_report(f, {0.0});
  EXPECT_NEAR(rep.d_eps[0], 0.5, 1e-4);
  EXPECT_NEAR(rep.inv_dtheta[0], 0.5, 1e-15);
  EXPECT_NEAR(rep.ratio[0], 1.0, 2e-4);
}

TEST(Comparability, GeometricZerosGrowLinearly) {
  const auto th = geometric_zeros();
  DistanceField f(th, SublevelQuery::for_window(th, 0.5, 1e4));
  std::vector<double> grid;
  for (int k = 0; k <= 40; ++k) grid.push_back(std::pow(1e4, k / 40.0));
  const auto rep = comparability_report(f, grid);
  EXPECT_LT(rep.max_ratio / rep.min_ratio, 100.0);
  double lo = 1e300, hi = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    lo = std::min(lo, rep.d_eps[i] / (1 + grid[i]));
    hi = std::max(hi, rep.d_eps[i] / (1 + grid[i]));
  }
  EXPECT_GT(lo, 0.05);
  EXPECT_LT(hi / lo, 20.0);
}

TEST(Comparability, CsvHeader) {
  const auto pw = InnerFunction::paley_wiener(1.0);
  DistanceField f(pw, SublevelQuery::for_window(pw, 0.5, 5.0));
  std::ostringstream os;
  write_csv(os, comparability_report(f, {0.0, 1.0}));
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "x,d_eps,d_0,inv_dtheta,ratio");
}

TEST(DistanceField, ParallelBuildMatchesSerial) {
  const auto th = geometric_zeros();
  DistanceField a(th, SublevelQuery::for_window(th, 0.5, 1e3), 1), b(th, SublevelQuery::for_window(th, 0.5, 1e3), 3);
  for (double x : {-700.0, 0.0, 12.0, 400.0}) EXPECT_EQ(a(x), b(x));
}
