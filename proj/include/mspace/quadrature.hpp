#pragma once

// Adaptive Gauss-Kronrod (7/15) integration over scalar, complex and Eigen-vector
// valued integrands, plus the improper-tail helpers used by the model-space norms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <queue>
#include <span>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mspace/errors.hpp"

namespace mspace::quad {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

struct Options {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  std::size_t max_subdivisions = 4000;
  bool throw_on_failure = true;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

namespace detail {

// QUADPACK qk15 abscissae and weights.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
};

template <class F>
auto gk15(F&& f, double a, double b) {
  using T = std::decay_t<decltype(f(a))>;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  T fc = f(center);
  T kronrod = fc * wgk[7];
  T gauss = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    T f1 = f(center - dx);
    T f2 = f(center + dx);
    T pair = f1 + f2;
    kronrod = kronrod + pair * wgk[j];
    if (j % 2 == 1) gauss = gauss + pair * wg[j / 2];
  }
  kronrod = kronrod * half;
  gauss = gauss * half;
  T diff = kronrod - gauss;
  return std::pair<T, double>{kronrod, magnitude(diff)};
}

}  // namespace detail

/// Integrates f over the union of consecutive panels [breaks[i], breaks[i+1]].
/// Subdivision always bisects the panel with the largest error estimate.
template <class F>
auto integrate(F&& f, std::span<const double> breaks, const Options& opt = {}) {
  using T = std::decay_t<decltype(f(0.0))>;
  using Seg = detail::Segment<T>;
  auto cmp = [](const Seg& l, const Seg& r) { return l.error < r.error; };
  std::priority_queue<Seg, std::vector<Seg>, decltype(cmp)> heap(cmp);
  Result<T> out;
  if (breaks.size() < 2) {
    out.value = T{};
    return out;
  }
  bool first = true;
  T total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    auto [v, e] = detail::gk15(f, breaks[i], breaks[i + 1]);
    out.evaluations += 15;
    total = first ? v : T(total + v);
    first = false;
    total_err += e;
    heap.push(Seg{breaks[i], breaks[i + 1], v, e});
  }
  if (first) {
    out.value = f(breaks[0]) * 0.0;
    return out;
  }
  std::size_t since_resum = 0;
  while (!heap.empty() && total_err > std::max(opt.abs_tol, opt.rel_tol * magnitude(total))) {
    if (heap.size() >= opt.max_subdivisions) {
      out.converged = false;
      break;
    }
    Seg s = heap.top();
    const double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b)) {
      out.converged = false;
      break;
    }
    heap.pop();
    auto [v1, e1] = detail::gk15(f, s.a, mid);
    auto [v2, e2] = detail::gk15(f, mid, s.b);
    out.evaluations += 30;
    total = total + (v1 + v2 - s.value);
    total_err += e1 + e2 - s.error;
    heap.push(Seg{s.a, mid, v1, e1});
    heap.push(Seg{mid, s.b, v2, e2});
    if (++since_resum == 64) {
      // keep the running sums from drifting
      since_resum = 0;
      auto copy = heap;
      T t = copy.top().value;
      double te = copy.top().error;
      copy.pop();
      while (!copy.empty()) {
        t = t + copy.top().value;
        te += copy.top().error;
        copy.pop();
      }
      total = t;
      total_err = te;
    }
  }
  out.value = total;
  out.error = total_err;
  if (!out.converged && opt.throw_on_failure) {
    std::ostringstream msg;
    msg << "quadrature tolerance unreachable within " << opt.max_subdivisions
        << " subdivisions (estimate " << magnitude(total) << ", error " << total_err << ")";
    throw QuadratureError(msg.str(), magnitude(total), total_err);
  }
  return out;
}

template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {}) {
  const std::array<double, 2> br{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(br), opt);
}

/// Integral of f over [start, +inf) via t = start / u, u in (0, 1]. Requires start > 0.
template <class F>
auto integrate_right_tail(F&& f, double start, const Options& opt = {}) {
  if (!(start > 0.0)) throw Error(ErrorKind::domain, "right tail start must be positive");
  auto g = [&](double u) { return f(start / u) * (start / (u * u)); };
  return integrate(g, 0.0, 1.0, opt);
}

/// Integral of f over (-inf, -start] via t = -start / u. Requires start > 0.
template <class F>
auto integrate_left_tail(F&& f, double start, const Options& opt = {}) {
  if (!(start > 0.0)) throw Error(ErrorKind::domain, "left tail start must be positive");
  auto g = [&](double u) { return f(-start / u) * (start / (u * u)); };
  return integrate(g, 0.0, 1.0, opt);
}

/// Tail beyond R of an integrand decaying like |t|^-q, extrapolated from its integral
/// over the trailing segment [R/2, R]. Exact for the pure power law.
inline double power_law_tail_factor(double q) {
  if (!(q > 1.0)) throw Error(ErrorKind::domain, "power-law tail needs decay exponent > 1");
  return 1.0 / (std::pow(2.0, q - 1.0) - 1.0);
}

/// n-point Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// A fixed composite quadrature rule: nodes with weights.
struct FixedRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Composite Gauss-Legendre rule with `order` points on each panel [breaks[i], breaks[i+1]].
inline FixedRule composite_gauss_legendre(std::span<const double> breaks, int order) {
  auto [x, w] = gauss_legendre(order);
  FixedRule rule;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double c = 0.5 * (breaks[i] + breaks[i + 1]);
    const double h = 0.5 * (breaks[i + 1] - breaks[i]);
    if (!(h > 0)) continue;
    for (int k = 0; k < order; ++k) {
      rule.nodes.push_back(c + h * x[k]);
      rule.weights.push_back(h * w[k]);
    }
  }
  return rule;
}

/// Uniform panel breakpoints on [a, b].
inline std::vector<double> uniform_breaks(double a, double b, std::size_t panels) {
  std::vector<double> br(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i)
    br[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(panels);
  br.back() = b;
  return br;
}

}  // namespace mspace::quad
