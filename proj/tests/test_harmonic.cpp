#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mspace/harmonic.hpp"
#include "oracles.hpp"

using namespace mspace;

namespace {
InnerFunction geometric_zeros() {
  std::vector<cplx> z;
  for (int n = 0; n <= 15; ++n) z.push_back({0, std::ldexp(1.0, n)});
  return InnerFunction(0.0, ZeroSet::simple(z));
}

double poisson_quadrature(cplx z, const MeasurableSet& g) {
  double s = 0.0;
  for (const auto& iv : g.components()) {
    // substitute t = x + y tan(u) is exactly what we test, so integrate P_z(t) dt directly, split at x
    std::vector<double> br{iv.lo};
    if (z.real() > iv.lo && z.real() < iv.hi) br.push_back(z.real());
    br.push_back(iv.hi);
    s += oracle::simpson_pieces([&](double t) { return poisson_kernel(z, t); }, br, 1e-12);
  }
  return s;
}
}  // namespace

TEST(HarmonicMeasure, HalfAtI) { EXPECT_NEAR(harmonic_measure({0, 1}, normalize({{-1, 1}})), 0.5, 1e-12); }

TEST(HarmonicMeasure, TotalMassTendsToOne) {
  double prev = 0.0;
  for (double L : {10.0, 100.0, 1e4, 1e7}) {
    const double w = harmonic_measure({0.3, 2.0}, normalize({{-L, L}}));
    EXPECT_GT(w, prev);
    EXPECT_LE(w, 1.0);
    prev = w;
  }
  EXPECT_NEAR(prev, 1.0, 1e-6);
}

TEST(HarmonicMeasure, TranslationInvariant) {
  const auto g = normalize({{-1, 0.5}, {2, 3}});
  EXPECT_NEAR(harmonic_measure({4.0, 0.7}, g.translate(4.0)), harmonic_measure({0.0, 0.7}, g), 1e-14);
}

TEST(HarmonicMeasure, ComplementWithinWindow) {
  const auto g = normalize({{-3, -1}, {0, 2}, {5, 6}});
  const Interval win{-1e6, 1e6};
  const cplx z(0.5, 1.5);
  const double w = harmonic_measure(z, g) + harmonic_measure(z, g.complement_in(win));
  EXPECT_LE(w, 1.0);
  EXPECT_NEAR(w, 1.0, 1e-5);
}

TEST(HarmonicMeasure, MatchesPoissonQuadrature) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-5, 5), ly(std::log(0.01), std::log(10.0)), len(0.01, 2);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    std::vector<Interval> raw;
    for (int k = 0; k < 4; ++k) {
      const double a = u(rng);
      raw.push_back({a, a + len(rng)});
    }
    const auto g = normalize(raw);
    const cplx z(u(rng), std::exp(ly(rng)));
    worst = std::max(worst, std::abs(harmonic_measure(z, g) - poisson_quadrature(z, g)));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(HarmonicMeasure, RejectsRealPoints) { EXPECT_THROW(harmonic_measure({0, 0}, normalize({{0, 1}})), Error); }

TEST(VolbergInf, FullShadowIsNearOne) {
  const auto th = InnerFunction::paley_wiener(1.0);
  const UpperHalfPlaneGrid grid{-1, 1, 1e-2, 1, 20, 20};
  const auto r = volberg_inf(th, normalize({{-1e5, 1e5}}), grid);
  EXPECT_GT(r.value, 0.99);
}

TEST(VolbergInf, EmptySetFindsTheZeros) {
  const InnerFunction th(0.0, ZeroSet::simple({{0.3, 1.0}}));
  const UpperHalfPlaneGrid grid{-2, 2, 0.1, 10, 41, 41};
  const auto r = volberg_inf(th, MeasurableSet{}, grid);
  EXPECT_LT(r.value, 1e-6);
  EXPECT_NEAR(std::abs(r.argmin - cplx(0.3, 1.0)), 0.0, 1e-3);
  EXPECT_LE(r.value, r.grid_value);
}

TEST(VolbergInf, MonotoneInTheSet) {
  const auto th = InnerFunction(0.5, ZeroSet::simple({{0, 1}, {3, 2}}));
  const UpperHalfPlaneGrid grid{-5, 5, 1e-2, 20, 40, 30};
  const auto big = normalize({{-10, 0}, {1, 4}}), small = normalize({{-10, -2}, {1, 2}});
  EXPECT_LE(volberg_inf(th, small, grid).grid_value, volberg_inf(th, big, grid).grid_value);
}

TEST(VolbergInf, GeometricZerosStayPositive) {
  const auto th = geometric_zeros();
  const auto g = normalize({{-1e4, 0}});
  const UpperHalfPlaneGrid grid{-1e4, 1e4, 1e-2, 1e5, 200, 100};
  const auto s = volberg_sensitivity(th, g, grid);
  EXPECT_GT(s.base.value, 0.05);
  EXPECT_LT(s.resolution_change, 0.2);
}

TEST(VolbergInf, RefinementStaysInTheGridBox) {
  const auto th = InnerFunction::paley_wiener(1.0);
  const UpperHalfPlaneGrid grid{-10, 10, 1e-3, 100, 50, 50};
  const auto r = volberg_inf(th, normalize({{-20, 20}}), grid);
  EXPECT_LE(r.argmin.imag(), 100.0 * (1 + 1e-12));
  EXPECT_GE(r.argmin.real(), -10.0);
  EXPECT_LE(r.argmin.real(), 10.0);
}

TEST(UpperHalfPlaneGrid, Doubling) {
  const UpperHalfPlaneGrid g{-1, 1, 1e-2, 1, 11, 5};
  const auto r = g.doubled_resolution();
  EXPECT_EQ(r.nx, 21);
  EXPECT_EQ(r.ny, 9);
  EXPECT_DOUBLE_EQ(r.x(2), g.x(1));
  const auto e = g.doubled_extent();
  EXPECT_GT(e.x_hi - e.x_lo, g.x_hi - g.x_lo);
  EXPECT_GT(e.y_hi, g.y_hi);
}

TEST(HeatmapCsv, RowsAndHeader) {
  const UpperHalfPlaneGrid g{-1, 1, 1e-2, 1, 3, 2};
  std::ostringstream os;
  write_heatmap_csv(os, InnerFunction::paley_wiener(1.0), normalize({{0, 1}}), g);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "x,y,value");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 7);
}

TEST(DeltaBound, Formula) {
  EXPECT_NEAR(delta_bound(1, 1, 1), 1 / (4 * std::numbers::pi), 1e-16);
  EXPECT_LT(delta_bound(0.5, 3, 2), delta_bound(1.0, 3, 2));
  EXPECT_GT(delta_bound(0.5, 3, 2), delta_bound(0.5, 4, 2));
  EXPECT_GT(delta_bound(0.5, 3, 2), delta_bound(0.5, 3, 3));
  EXPECT_THROW(delta_bound(0, 1, 1), Error);
}

namespace {
Covering integer_covering(int R) {
  Covering cov;
  for (int k = -R; k <= R; ++k) cov.breakpoints.push_back(k);
  cov.edge.assign(cov.size(), false);
  cov.edge.front() = cov.edge.back() = true;
  cov.partial.assign(cov.size(), false);
  cov.integrals.assign(cov.size(), 1.0);
  cov.window = R;
  return cov;
}
}  // namespace

TEST(EdgeMeasure, WindowRatios) {
  const auto cov = integer_covering(10);
  const auto em = EdgeMeasure::from_covering(cov, 4);
  EXPECT_DOUBLE_EQ(mu_window_ratio(em, {2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(mu_window_ratio(em, {-3, 2}), 1.0);
  // below every segment height 1/4
  EXPECT_DOUBLE_EQ(mu_window_ratio(em, {0.1, 0.3}), 0.0);
  // brute-force count over a window cutting through intervals
  const Interval I{0.5, 3.25};
  double m = 0.0;
  for (const auto& s : em.segments)
    if (s.height < I.length()) m += overlap(s.base, I);
  EXPECT_DOUBLE_EQ(mu_window_ratio(em, I), m / I.length());
  EXPECT_THROW(mu_window_ratio(em, {1, 1}), Error);
}

TEST(CandidateFamily, Composition) {
  const auto cov = integer_covering(5);
  const auto fam = candidate_family(cov, 3, 2);
  // 8 interior intervals: unions 8 + 7 + 6 and dyadic 8 * (2 + 4)
  EXPECT_EQ(fam.size(), 8u + 7u + 6u + 48u);
}

TEST(ReverseCondition, PaleyWienerPositive) {
  const auto th = InnerFunction::paley_wiener(2.0 * std::numbers::pi);
  const double eps = 0.5;
  const auto cov = build_covering(th, eps, 1.0, 10.0);
  const auto em = EdgeMeasure::from_covering(cov, compute_N(cov.alpha_hat, 1.0, eps, 2.0));
  const auto fam = candidate_family(cov);
  const auto r = reverse_condition_inf(em, th, eps, 1.0, fam);
  EXPECT_GT(r.inf, 0.0);
  // exhaustive oracle over the admissible candidates
  double brute = 1e300;
  for (const auto& I : fam)
    if (window_meets_sublevel(th, eps, 1.0, I)) brute = std::min(brute, mu_window_ratio(em, I));
  EXPECT_DOUBLE_EQ(r.inf, brute);
}

TEST(ReverseCondition, ZeroRatioCandidatesAreInadmissible) {
  const auto th = InnerFunction::paley_wiener(2.0 * std::numbers::pi);
  const double eps = 0.5;
  const auto cov = build_covering(th, eps, 1.0, 10.0);
  const long N = compute_N(cov.alpha_hat, 1.0, eps, 2.0);
  const auto em = EdgeMeasure::from_covering(cov, N);
  std::vector<Interval> tiny;
  for (std::size_t k : cov.interior()) {
    const Interval iv = cov.interval(k);
    tiny.push_back({iv.lo, iv.lo + 0.5 * iv.length() / N});
  }
  for (const auto& I : tiny) {
    EXPECT_EQ(mu_window_ratio(em, I), 0.0);
    EXPECT_FALSE(window_meets_sublevel(th, eps, 1.0, I));
  }
  try {
    reverse_condition_inf(em, th, eps, 1.0, tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_family);
  }
}

TEST(ReverseCondition, GeometricCoveringPositive) {
  const auto th = geometric_zeros();
  const auto cov = build_covering(th, 0.5, 5.0, 1e4);
  const auto em = EdgeMeasure::from_covering(cov, compute_N(cov.alpha_hat, 1.0, 0.5, 2.0));
  const auto r = reverse_condition_inf(em, th, 0.5, 1.0, candidate_family(cov));
  EXPECT_GT(r.inf, 0.0);
  EXPECT_GT(r.admissible, 0u);
}
