#pragma once

// Whitney-type partition of a window into intervals I_n = [s_n, s_{n+1}) with
// \int_{I_n} dx / d_eps(x) = c, plus amplification/subdivision and the reference set F.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "mspace/errors.hpp"
#include "mspace/geometry.hpp"
#include "mspace/msets.hpp"
#include "mspace/quadrature.hpp"

namespace mspace {

struct Covering {
  std::vector<double> breakpoints;  // strictly increasing, spans [-R, R] around the anchor
  std::vector<bool> edge;           // interval crosses the window edge; excluded from analyses
  std::vector<bool> partial;        // edge interval cut at the edge of the search box (integral < c)
  std::vector<double> integrals;    // \int_{I_n} 1/d_eps as computed during construction
  double c = 1.0;
  double epsilon = 0.5;
  double alpha_hat = 1.0;
  double window = 0.0;  // half-width R
  double anchor = 0.0;

  std::size_t size() const noexcept { return breakpoints.empty() ? 0 : breakpoints.size() - 1; }
  Interval interval(std::size_t n) const { return {breakpoints[n], breakpoints[n + 1]}; }
  std::vector<std::size_t> interior() const {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < size(); ++n)
      if (!edge[n]) out.push_back(n);
    return out;
  }
  /// Index of the interval containing x, or size() when x is outside the covering.
  std::size_t locate(double x) const {
    if (breakpoints.empty() || x < breakpoints.front() || x >= breakpoints.back()) return size();
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    return static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  }
};

struct CoveringOptions {
  double rel_tol = 1e-12;        // quadrature of 1/d_eps
  double solve_tol = 1e-11;      // |F(s) - c| <= solve_tol * c
  int alpha_samples = 9;
};

namespace detail {

inline double reciprocal_integral(const DistanceField& field, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  const double sign = (b > a) ? 1.0 : -1.0;
  quad::Options opt;
  opt.rel_tol = rel_tol;
  opt.max_subdivisions = 20000;
  auto r = quad::integrate([&](double x) { return 1.0 / field(x); }, std::min(a, b), std::max(a, b), opt);
  return sign * r.value;
}

struct BreakpointStep {
  double s;
  bool partial;  // stopped at the edge of the computable range with integral < c
};

// Endpoint s with \int_{s0}^{s} 1/d_eps = dir * c (dir = +1 to the right, -1 to the left).
// Newton steps (F' = 1/d_eps) inside a maintained bracket, bisecting whenever Newton leaves it.
// The search never goes past `reach`; hitting it returns a partial step.
inline BreakpointStep solve_breakpoint(const DistanceField& field, double s0, double c, int dir, double reach,
                                       const CoveringOptions& opt) {
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();  // offsets from s0 along dir
  double cur = 0.0, F = 0.0;
  double step = c * field(s0);
  for (int it = 0; it < 200; ++it) {
    double next = cur + step;
    if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * std::max(lo, cur) + 1e-300;
    if (next >= reach) {
      if (lo >= reach) return {s0 + dir * reach, true};
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : reach;
    }
    F += dir * reciprocal_integral(field, s0 + dir * cur, s0 + dir * next, opt.rel_tol);
    cur = next;
    if (F < c) lo = cur; else hi = cur;
    if (std::abs(F - c) <= opt.solve_tol * c) return {s0 + dir * cur, false};
    if (std::isfinite(hi) && hi - lo <= 1e-15 * std::max(1.0, std::abs(s0) + hi)) return {s0 + dir * cur, false};
    if (lo >= reach) return {s0 + dir * reach, true};
    step = (c - F) * field(s0 + dir * cur);
  }
  throw Error(ErrorKind::domain, "breakpoint solve did not converge");
}

// Last x (from `from` towards `to`) at which the field can still report d_eps. The set of such
// x is an interval because x -> reach(x) - d_eps(x) is monotone near the box edge.
inline double computable_limit(const DistanceField& field, double from, double to) {
  auto ok = [&](double x) {
    try {
      (void)field(x);
      return true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::level_set_out_of_window) throw;
      return false;
    }
  };
  if (!ok(from)) (void)field(from);  // rethrow the real error
  if (ok(to)) return to;
  double good = from, bad = to;
  for (int it = 0; it < 80 && std::abs(bad - good) > 1e-13 * std::max(1.0, std::abs(good)); ++it) {
    const double mid = 0.5 * (good + bad);
    (ok(mid) ? good : bad) = mid;
  }
  return good;
}

}  // namespace detail

/// Grows breakpoints from the anchor in both directions until they pass +-R.
inline Covering build_covering(const DistanceField& field, double c, double R, double anchor = 0.0,
                               const CoveringOptions& opt = {}) {
  if (!(c > 0.0)) throw Error(ErrorKind::domain, "covering constant c must be positive");
  if (!(R > 0.0)) throw Error(ErrorKind::domain, "window half-width must be positive");
  if (!(anchor > -R && anchor < R)) throw Error(ErrorKind::domain, "anchor must lie inside the window");
  const double max_len = 2.0 * R;
  const auto& box = field.query().box;
  const double lim_hi = detail::computable_limit(field, R, box.x_hi);
  const double lim_lo = detail::computable_limit(field, -R, box.x_lo);
  auto step = [&](double s0, int dir) {
    const double to_limit = dir > 0 ? lim_hi - s0 : s0 - lim_lo;
    const auto r = detail::solve_breakpoint(field, s0, c, dir, std::min(to_limit, max_len), opt);
    if (r.partial && to_limit > max_len) {
      std::ostringstream msg;
      msg << "window too small: an interval starting at " << s0 << " is longer than the window";
      throw Error(ErrorKind::window_too_small, msg.str());
    }
    return r;
  };
  std::vector<detail::BreakpointStep> right{{anchor, false}}, left;
  while (right.back().s < R) right.push_back(step(right.back().s, +1));
  double s = anchor;
  while (s > -R) {
    left.push_back(step(s, -1));
    s = left.back().s;
  }
  Covering cov;
  cov.c = c;
  cov.epsilon = field.epsilon();
  cov.window = R;
  cov.anchor = anchor;
  for (auto it = left.rbegin(); it != left.rend(); ++it) cov.breakpoints.push_back(it->s);
  for (const auto& r : right) cov.breakpoints.push_back(r.s);
  const std::size_t n = cov.size();
  cov.edge.resize(n);
  cov.partial.assign(n, false);
  if (!left.empty() && left.back().partial) cov.partial.front() = true;
  if (right.back().partial) cov.partial.back() = true;
  cov.integrals.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Interval iv = cov.interval(k);
    cov.edge[k] = iv.lo < -R || iv.hi > R;
    cov.integrals[k] = detail::reciprocal_integral(field, iv.lo, iv.hi, opt.rel_tol);
  }
  if (cov.interior().empty()) throw Error(ErrorKind::window_too_small, "window too small: no interval fits inside the window");
  double alpha = 1.0;
  for (std::size_t k : cov.interior()) {
    const Interval iv = cov.interval(k);
    for (int j = 0; j < opt.alpha_samples; ++j) {
      const double x = iv.lo + iv.length() * j / opt.alpha_samples;
      const double d = field(x);
      alpha = std::max({alpha, iv.length() / d, d / iv.length()});
    }
  }
  cov.alpha_hat = alpha;
  return cov;
}

/// Convenience overload: builds the distance field for the window first.
inline Covering build_covering(const InnerFunction& theta, double epsilon, double c, double R, double anchor = 0.0) {
  DistanceField field(theta, SublevelQuery::for_window(theta, epsilon, R, anchor));
  return build_covering(field, c, R, anchor);
}

/// Smallest integer N >= max((1 + alpha) sqrt(2) N0, 40 * 8^{1/p} alpha / eps).
inline long compute_N(double alpha, double N0, double epsilon, double p) {
  if (!(alpha >= 1.0) || !(N0 > 0.0) || !(epsilon > 0.0) || !(p > 0.0))
    throw Error(ErrorKind::domain, "compute_N needs alpha >= 1 and positive N0, epsilon, p");
  const double first = (1.0 + alpha) * std::sqrt(2.0) * N0;
  const double second = 40.0 * std::pow(8.0, 1.0 / p) * alpha / epsilon;
  return static_cast<long>(std::ceil(std::max(first, second)));
}

/// Tile I_{k,l} ∩ I_n^{a,sigma}; k = -1 marks a part of I_n^{a,sigma} outside the covering.
struct Tile {
  long k;
  long l;
  Interval piece;
  double gamma_mass;  // |Gamma ∩ piece|
};

struct SubdivisionPlan {
  int a = 1;
  long N = 1;
  double gamma = 0.0;
  std::vector<std::size_t> indices;         // interior covering indices n
  std::vector<int> sigma;                   // selected piece k in {1..aN} per n
  std::vector<Interval> selected;           // I_n^{a,sigma}
  std::vector<std::vector<Tile>> tiles;     // A_n^sigma
  std::vector<std::vector<Tile>> kept;      // A_n^0
};

inline void to_json(nlohmann::json& j, const Covering& cov) {
  j = nlohmann::json{{"breakpoints", cov.breakpoints}, {"c", cov.c},           {"epsilon", cov.epsilon},
                     {"alpha_hat", cov.alpha_hat},     {"window", cov.window}, {"anchor", cov.anchor}};
  std::vector<bool> e(cov.edge.begin(), cov.edge.end());
  j["edge"] = e;
}

inline void write_csv(std::ostream& os, const Covering& cov) {
  os << "n,lo,hi,length,edge,integral\n";
  os.precision(17);
  for (std::size_t k = 0; k < cov.size(); ++k) {
    const Interval iv = cov.interval(k);
    os << k << ',' << iv.lo << ',' << iv.hi << ',' << iv.length() << ',' << (cov.edge[k] ? 1 : 0) << ','
       << cov.integrals[k] << '\n';
  }
}

}  // namespace mspace
