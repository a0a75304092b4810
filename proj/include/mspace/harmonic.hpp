#pragma once

// Harmonic measure in the upper half-plane, the Volberg functional |Theta(z)| + omega_z(Gamma),
// and the edge measure mu on the tops of the subdivided Carleson windows.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

#include "mspace/covering.hpp"
#include "mspace/errors.hpp"
#include "mspace/geometry.hpp"
#include "mspace/inner_function.hpp"
#include "mspace/msets.hpp"
#include "mspace/parallel.hpp"

namespace mspace {

/// omega_z(G) = (1/pi) sum_j [arctan((b_j - x)/y) - arctan((a_j - x)/y)].
inline double harmonic_measure(cplx z, const MeasurableSet& g) {
  const double x = z.real(), y = z.imag();
  if (!(y > 0.0)) throw Error(ErrorKind::domain, "harmonic measure needs Im z > 0");
  double s = 0.0;
  for (const auto& iv : g.components()) {
    const double u = (iv.hi - x) / y, v = (iv.lo - x) / y;
    // arctan u - arctan v for u > v, without cancellation
    s += std::atan2(u - v, 1.0 + u * v);
  }
  return s / std::numbers::pi;
}

/// Poisson kernel P_z(t) = (1/pi) y / ((t - x)^2 + y^2).
inline double poisson_kernel(cplx z, double t) {
  const double dx = t - z.real(), y = z.imag();
  return y / (std::numbers::pi * (dx * dx + y * y));
}

/// Rectangle of evaluation points in C+ with log-spaced heights.
struct UpperHalfPlaneGrid {
  double x_lo = -10.0, x_hi = 10.0;
  double y_lo = 1e-3, y_hi = 100.0;
  int nx = 200, ny = 100;

  UpperHalfPlaneGrid doubled_resolution() const {
    auto g = *this;
    g.nx = 2 * nx - 1;
    g.ny = 2 * ny - 1;
    return g;
  }
  UpperHalfPlaneGrid doubled_extent() const {
    auto g = *this;
    const double c = 0.5 * (x_lo + x_hi), h = x_hi - x_lo;
    g.x_lo = c - h;
    g.x_hi = c + h;
    g.y_hi = 2.0 * y_hi;
    g.y_lo = 0.5 * y_lo;
    return g;
  }
  double x(int i) const { return x_lo + (x_hi - x_lo) * i / (nx - 1.0); }
  double y(int j) const { return std::exp(std::log(y_lo) + (std::log(y_hi) - std::log(y_lo)) * j / (ny - 1.0)); }
};

inline double volberg_value(const InnerFunction& theta, const MeasurableSet& g, cplx z) {
  return theta.modulus(z) + harmonic_measure(z, g);
}

struct VolbergResult {
  double value = 0.0;  // upper bound on inf over C+
  cplx argmin;
  double grid_value = 0.0;
  cplx grid_argmin;
};

/// min over the grid of |Theta| + omega_z(G), then a Nelder-Mead pass in (x, log y) from the argmin.
inline VolbergResult volberg_inf(const InnerFunction& theta, const MeasurableSet& g, const UpperHalfPlaneGrid& grid,
                                 unsigned jobs = 1) {
  if (grid.nx < 2 || grid.ny < 2 || !(grid.y_lo > 0.0)) throw Error(ErrorKind::domain, "invalid upper half-plane grid");
  std::vector<double> rowmin(grid.ny);
  std::vector<int> rowarg(grid.ny);
  parallel_for(static_cast<std::size_t>(grid.ny), jobs, [&](std::size_t j) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    const double y = grid.y(static_cast<int>(j));
    for (int i = 0; i < grid.nx; ++i) {
      const double v = volberg_value(theta, g, cplx(grid.x(i), y));
      if (v < best) {
        best = v;
        arg = i;
      }
    }
    rowmin[j] = best;
    rowarg[j] = arg;
  });
  const auto jt = std::min_element(rowmin.begin(), rowmin.end());
  const int j0 = static_cast<int>(jt - rowmin.begin());
  VolbergResult r;
  r.grid_value = *jt;
  r.grid_argmin = cplx(grid.x(rowarg[j0]), grid.y(j0));

  // Nelder-Mead over (x, log y), kept inside the grid box
  const double ll = std::log(grid.y_lo), lh = std::log(grid.y_hi);
  auto box = [&](std::array<double, 2> p) {
    p[0] = std::clamp(p[0], grid.x_lo, grid.x_hi);
    p[1] = std::clamp(p[1], ll, lh);
    return p;
  };
  auto f = [&](const std::array<double, 2>& p) { return volberg_value(theta, g, cplx(p[0], std::exp(p[1]))); };
  const double hx = (grid.x_hi - grid.x_lo) / (grid.nx - 1.0);
  const double hl = (std::log(grid.y_hi) - std::log(grid.y_lo)) / (grid.ny - 1.0);
  const double x0 = r.grid_argmin.real(), l0 = std::log(r.grid_argmin.imag());
  std::array<std::array<double, 2>, 3> s{{{x0, l0},
                                          {x0 + (x0 + hx <= grid.x_hi ? hx : -hx), l0},
                                          {x0, l0 + (l0 + hl <= lh ? hl : -hl)}}};
  std::array<double, 3> fv{f(s[0]), f(s[1]), f(s[2])};
  for (int it = 0; it < 400; ++it) {
    std::array<int, 3> o{0, 1, 2};
    std::sort(o.begin(), o.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const auto best = s[o[0]], mid = s[o[1]], worst = s[o[2]];
    const double fb = fv[o[0]], fm = fv[o[1]], fw = fv[o[2]];
    if (std::abs(fw - fb) <= 1e-13 * (std::abs(fb) + 1e-300)) break;
    const std::array<double, 2> cen{0.5 * (best[0] + mid[0]), 0.5 * (best[1] + mid[1])};
    auto along = [&](double t) { return box({cen[0] + t * (worst[0] - cen[0]), cen[1] + t * (worst[1] - cen[1])}); };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fb) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) { s[o[2]] = xe; fv[o[2]] = fe; } else { s[o[2]] = xr; fv[o[2]] = fr; }
    } else if (fr < fm) {
      s[o[2]] = xr;
      fv[o[2]] = fr;
    } else {
      const auto xc = along(fr < fw ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fw)) {
        s[o[2]] = xc;
        fv[o[2]] = fc;
      } else {
        for (int k : {o[1], o[2]}) {
          s[k] = {0.5 * (s[k][0] + best[0]), 0.5 * (s[k][1] + best[1])};
          fv[k] = f(s[k]);
        }
      }
    }
  }
  const int kb = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  if (fv[kb] < r.grid_value) {
    r.value = fv[kb];
    r.argmin = cplx(s[kb][0], std::exp(s[kb][1]));
  } else {
    r.value = r.grid_value;
    r.argmin = r.grid_argmin;
  }
  return r;
}

struct VolbergSensitivity {
  VolbergResult base, doubled_resolution, doubled_extent;
  double resolution_change = 0.0;  // relative
  double extent_change = 0.0;
};

inline VolbergSensitivity volberg_sensitivity(const InnerFunction& theta, const MeasurableSet& g,
                                              const UpperHalfPlaneGrid& grid, unsigned jobs = 1) {
  VolbergSensitivity s;
  s.base = volberg_inf(theta, g, grid, jobs);
  s.doubled_resolution = volberg_inf(theta, g, grid.doubled_resolution(), jobs);
  s.doubled_extent = volberg_inf(theta, g, grid.doubled_extent(), jobs);
  s.resolution_change = std::abs(s.doubled_resolution.value - s.base.value) / s.base.value;
  s.extent_change = std::abs(s.doubled_extent.value - s.base.value) / s.base.value;
  return s;
}

inline void write_heatmap_csv(std::ostream& os, const InnerFunction& theta, const MeasurableSet& g,
                              const UpperHalfPlaneGrid& grid) {
  os << "x,y,value\n";
  os.precision(17);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const cplx z(grid.x(i), grid.y(j));
      os << z.real() << ',' << z.imag() << ',' << volberg_value(theta, g, z) << '\n';
    }
}

/// delta = 4 eta / ((2 + N (a + 1))^2 pi).
inline double delta_bound(double eta, double N, double a) {
  if (!(eta > 0.0) || !(N > 0.0) || !(a > 0.0)) throw Error(ErrorKind::domain, "delta_bound inputs must be positive");
  const double t = 2.0 + N * (a + 1.0);
  return 4.0 * eta / (t * t * std::numbers::pi);
}

/// Arc length on the segments {x in I_n, y = |I_n| / N}.
struct EdgeMeasure {
  struct Segment {
    Interval base;
    double height;
  };
  std::vector<Segment> segments;
  long N = 1;

  static EdgeMeasure from_covering(const Covering& cov, long N) {
    if (N < 1) throw Error(ErrorKind::domain, "N must be a positive integer");
    EdgeMeasure em;
    em.N = N;
    for (std::size_t k = 0; k < cov.size(); ++k) {
      const Interval iv = cov.interval(k);
      em.segments.push_back({iv, iv.length() / static_cast<double>(N)});
    }
    return em;
  }

  /// mu(S(I)) with S(I) = {x in I, 0 < y < |I|}.
  double window_mass(const Interval& interval) const {
    double m = 0.0;
    for (const auto& s : segments)
      if (s.height < interval.length()) m += overlap(s.base, interval);
    return m;
  }
};

inline double mu_window_ratio(const EdgeMeasure& em, const Interval& interval) {
  if (!(interval.length() > 0.0)) throw Error(ErrorKind::domain, "window interval must have positive length");
  return em.window_mass(interval) / interval.length();
}

/// Covering intervals, contiguous unions of up to `max_union` of them, and dyadic pieces
/// (levels 1..dyadic_levels) of each interval. Edge intervals are excluded.
inline std::vector<Interval> candidate_family(const Covering& cov, int max_union = 10, int dyadic_levels = 4) {
  std::vector<Interval> out;
  const auto idx = cov.interior();
  for (std::size_t p = 0; p < idx.size(); ++p) {
    for (int len = 1; len <= max_union && p + len <= idx.size(); ++len) {
      if (idx[p + len - 1] != idx[p] + static_cast<std::size_t>(len - 1)) break;
      out.push_back({cov.interval(idx[p]).lo, cov.interval(idx[p + len - 1]).hi});
    }
    for (int lev = 1; lev <= dyadic_levels; ++lev)
      for (const auto& piece : subdivide(cov.interval(idx[p]), 1 << lev)) out.push_back(piece);
  }
  return out;
}

/// S(I^{N0}) ∩ L(Theta, eps) nonempty, probed on a grid of the window (log-spaced heights up to N0|I|).
inline bool window_meets_sublevel(const InnerFunction& theta, double epsilon, double N0, const Interval& interval,
                                  int nx = 24, int ny = 24) {
  const Interval amp = amplify(interval, std::max(1.0, N0));
  const double top = N0 * interval.length();
  for (int j = 0; j < ny; ++j) {
    const double y = top * std::pow(1e-3, 1.0 - j / (ny - 1.0)) * (1.0 - 1e-9);
    for (int i = 0; i < nx; ++i) {
      const double x = amp.lo + amp.length() * (i + 0.5) / nx;
      if (in_sublevel(theta, epsilon, cplx(x, y))) return true;
    }
  }
  return false;
}

struct ReverseConditionResult {
  double inf = 0.0;
  Interval argmin;
  std::size_t admissible = 0;
  std::size_t skipped = 0;
};

/// inf of mu(S(I))/|I| over candidates I whose window S(I^{N0}) meets L(Theta, eps).
inline ReverseConditionResult reverse_condition_inf(const EdgeMeasure& em, const InnerFunction& theta, double epsilon,
                                                    double N0, const std::vector<Interval>& candidates) {
  ReverseConditionResult r;
  r.inf = std::numeric_limits<double>::infinity();
  for (const auto& iv : candidates) {
    if (!window_meets_sublevel(theta, epsilon, N0, iv)) {
      ++r.skipped;
      continue;
    }
    ++r.admissible;
    const double ratio = mu_window_ratio(em, iv);
    if (ratio < r.inf) {
      r.inf = ratio;
      r.argmin = iv;
    }
  }
  if (r.admissible == 0) throw Error(ErrorKind::empty_family, "empty admissible family");
  return r;
}

}  // namespace mspace
