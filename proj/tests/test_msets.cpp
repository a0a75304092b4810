#include <gtest/gtest.h>

#include <random>

#include "mspace/msets.hpp"

using namespace mspace;

namespace {
std::vector<Interval> comps(const MeasurableSet& s) { return {s.components().begin(), s.components().end()}; }
void expect_components(const MeasurableSet& s, std::vector<Interval> want) {
  const auto got = comps(s);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_DOUBLE_EQ(got[i].lo, want[i].lo);
    EXPECT_DOUBLE_EQ(got[i].hi, want[i].hi);
  }
}
}  // namespace

TEST(Normalize, MergesTouching) { expect_components(normalize({{0, 1}, {1, 2}}), {{0, 2}}); }
TEST(Normalize, AbsorbsNested) { expect_components(normalize({{0, 3}, {1, 2}}), {{0, 3}}); }
TEST(Normalize, Sorts) { expect_components(normalize({{5, 6}, {0, 1}}), {{0, 1}, {5, 6}}); }
TEST(Normalize, DropsEmpty) { expect_components(normalize({{2, 2}, {0, 1}}), {{0, 1}}); }

TEST(IntersectMeasure, Examples) {
  const auto g = normalize({{0, 1}});
  EXPECT_DOUBLE_EQ(intersect_measure(g, {0.5, 2}), 0.5);
  EXPECT_DOUBLE_EQ(intersect_measure(g, {3, 4}), 0.0);
  EXPECT_DOUBLE_EQ(intersect_measure(normalize({{-5, 5}}), {0.25, 0.75}), 0.5);
}

TEST(IntersectMeasure, MatchesPointCount) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  std::vector<Interval> raw;
  for (int k = 0; k < 30; ++k) {
    const double a = u(rng);
    raw.push_back({a, a + 0.5 * std::abs(u(rng)) / 5.0});
  }
  const auto g = normalize(raw);
  const Interval I{-3.3, 4.1};
  // midpoint-rule count with membership via the raw list
  const int n = 400000;
  double count = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = I.lo + (i + 0.5) * I.length() / n;
    bool in = false;
    for (const auto& r : raw) in = in || (x >= r.lo && x < r.hi);
    count += in;
  }
  EXPECT_NEAR(intersect_measure(g, I), count * I.length() / n, 1e-3);
}

TEST(Amplify, Examples) {
  auto a = amplify({0, 1}, 3);
  EXPECT_DOUBLE_EQ(a.lo, -1);
  EXPECT_DOUBLE_EQ(a.hi, 2);
  a = amplify({0.3, 0.9}, 1);
  EXPECT_DOUBLE_EQ(a.lo, 0.3);
  EXPECT_DOUBLE_EQ(a.hi, 0.9);
  a = amplify({2, 4}, 2);
  EXPECT_DOUBLE_EQ(a.lo, 1);
  EXPECT_DOUBLE_EQ(a.hi, 5);
  EXPECT_THROW(amplify({0, 1}, 0.5), Error);
}

TEST(Subdivide, Examples) {
  const auto s = subdivide({0, 1}, 4);
  ASSERT_EQ(s.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(s[k].lo, 0.25 * k);
    EXPECT_DOUBLE_EQ(s[k].hi, 0.25 * (k + 1));
  }
  const auto one = subdivide({-2, 7}, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].lo, -2);
  EXPECT_EQ(one[0].hi, 7);
  for (const auto& p : subdivide({-1, 2}, 3)) EXPECT_DOUBLE_EQ(p.length(), 1.0);
}

TEST(Subdivide, PartitionsExactly) {
  const auto s = subdivide({0.1, 0.7}, 7);
  EXPECT_EQ(s.front().lo, 0.1);
  EXPECT_EQ(s.back().hi, 0.7);
  for (std::size_t k = 0; k + 1 < s.size(); ++k) EXPECT_EQ(s[k].hi, s[k + 1].lo);
}

TEST(MeasurableSet, SetAlgebra) {
  const auto a = normalize({{0, 2}, {4, 6}});
  const auto b = normalize({{1, 5}});
  expect_components(a.intersect(b), {{1, 2}, {4, 5}});
  expect_components(a.unite(b), {{0, 6}});
  expect_components(a.complement_in({-1, 7}), {{-1, 0}, {2, 4}, {6, 7}});
  expect_components(a.translate(1.5), {{1.5, 3.5}, {5.5, 7.5}});
  EXPECT_TRUE(a.intersect(b).is_subset_of(a));
  EXPECT_FALSE(b.is_subset_of(a));
  EXPECT_TRUE(a.contains(0.0));
  EXPECT_FALSE(a.contains(2.0));
  EXPECT_DOUBLE_EQ(a.measure(), 4.0);
}

TEST(PeriodicSet, DensityAndAlignment) {
  const auto g = periodic_set(1.0, 0.25, 0.0, -10, 10);
  EXPECT_NEAR(g.measure(), 5.0, 1e-12);
  EXPECT_EQ(g.components().size(), 20u);
  EXPECT_DOUBLE_EQ(g.components().front().lo, -10.0);
  EXPECT_DOUBLE_EQ(g.components().front().hi, -9.75);
}

TEST(MeasurableSetJson, RoundTrip) {
  const auto a = normalize({{0, 2}, {4, 6}});
  const auto back = measurable_set_from_json(to_json_array(a));
  expect_components(back, comps(a));
  EXPECT_THROW(measurable_set_from_json(nlohmann::json::parse("[[1]]")), Error);
  EXPECT_THROW(measurable_set_from_json(nlohmann::json::parse("{}")), Error);
}
