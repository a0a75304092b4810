#pragma once

// Sublevel sets L(Theta, eps) = {|Theta| < eps} and the distance d_eps(x) from real points.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mspace/errors.hpp"
#include "mspace/inner_function.hpp"
#include "mspace/parallel.hpp"

namespace mspace {

struct Box {
  double x_lo, x_hi, y_lo, y_hi;
};

/// Parameters of the grid pass used to locate {|Theta| = eps}.
struct SublevelQuery {
  double epsilon = 0.5;
  Box box{-15.0, 15.0, 1e-2, 100.0};
  int nx = 400;             // uniform x columns
  int ny = 160;             // log-spaced y rows
  int cluster_nodes = 64;   // extra sinh-clustered columns around each zero
  double refine_tol = 1e-12;

  /// Box [anchor - 1.5R, anchor + 1.5R] x (y_lo, 10R). y_lo is 1e-3 R, lowered below every
  /// zero and below the exponential level height when those sit lower.
  static SublevelQuery for_window(const InnerFunction& theta, double epsilon, double R, double anchor = 0.0) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::domain, "epsilon must lie in (0, 1)");
    if (!(R > 0.0)) throw Error(ErrorKind::domain, "window half-width must be positive");
    SublevelQuery q;
    q.epsilon = epsilon;
    double y_lo = 1e-3 * R;
    // bottom of the pseudohyperbolic disk of radius eps around each zero
    for (const auto& z : theta.zeros()) y_lo = std::min(y_lo, 0.1 * z.point.imag() * (1.0 - epsilon) / (1.0 + epsilon));
    if (theta.tau() > 0.0) y_lo = std::min(y_lo, 0.1 * std::log(1.0 / epsilon) / theta.tau());
    q.box = {anchor - 1.5 * R, anchor + 1.5 * R, y_lo, 10.0 * R};
    return q;
  }
};

/// |Theta(z)| < eps (strict).
inline bool in_sublevel(const InnerFunction& theta, double epsilon, cplx z) {
  if (!(z.imag() > 0.0)) throw Error(ErrorKind::domain, "sublevel membership needs Im z > 0");
  return theta.modulus(z) < epsilon;
}

/// dist(x, sigma(Theta)): nearest zero; +inf when the spectrum is {inf} only.
inline double dist_to_spectrum(const InnerFunction& theta, double x) {
  if (theta.is_constant()) throw Error(ErrorKind::constant_function, "constant inner function has empty spectrum");
  double d = std::numeric_limits<double>::infinity();
  for (const auto& z : theta.zeros()) d = std::min(d, std::abs(cplx(x, 0.0) - z.point));
  return d;
}

/// Distance function to L(Theta, eps), built once per (Theta, eps, box).
///
/// The box is classified on a (non-uniform x) x (log y) grid; every cell edge whose endpoints
/// straddle log|Theta| = log eps is bisected to a boundary point (marching squares, so the
/// curve pieces are also kept for plotting). A query picks the nearest boundary point through
/// the lower envelope of the lines -2 p_x x + |p|^2, then minimises the crossing radius along
/// rays from x over a small angular bracket around that point.
class DistanceField {
 public:
  DistanceField(InnerFunction theta, const SublevelQuery& query, unsigned jobs = 1)
      : theta_(std::move(theta)), q_(query) {
    if (theta_.is_constant()) throw Error(ErrorKind::constant_function, "constant inner function");
    if (!(q_.epsilon > 0.0 && q_.epsilon < 1.0)) throw Error(ErrorKind::domain, "epsilon must lie in (0, 1)");
    if (!(q_.box.y_lo > 0.0 && q_.box.y_hi > q_.box.y_lo && q_.box.x_hi > q_.box.x_lo))
      throw Error(ErrorKind::domain, "invalid search box");
    log_eps_ = std::log(q_.epsilon);
    build_grid();
    classify(jobs);
    extract();
    build_envelope();
  }

  const InnerFunction& theta() const noexcept { return theta_; }
  double epsilon() const noexcept { return q_.epsilon; }
  const SublevelQuery& query() const noexcept { return q_; }
  const std::vector<cplx>& boundary_points() const noexcept { return points_; }
  const std::vector<std::pair<cplx, cplx>>& boundary_segments() const noexcept { return segments_; }
  std::size_t grid_size() const noexcept { return xs_.size() * ys_.size(); }

  double operator()(double x) const { return std::abs(nearest_point(x) - cplx(x, 0.0)); }
  double d_eps(double x) const { return (*this)(x); }

  /// A point of {|Theta| = eps} realising d_eps(x) (to refine_tol).
  cplx nearest_point(double x) const {
    if (points_.empty()) throw Error(ErrorKind::level_set_out_of_window, "level set out of window: no sublevel points in the search box");
    if (!(x >= q_.box.x_lo && x <= q_.box.x_hi)) {
      std::ostringstream msg;
      msg << "level set out of window: x = " << x << " outside the search box";
      throw Error(ErrorKind::level_set_out_of_window, msg.str());
    }
    if (g(cplx(x, q_.box.y_lo)) < 0.0) {
      std::ostringstream msg;
      msg << "level set out of window: the sublevel set reaches below the search box at x = " << x;
      throw Error(ErrorKind::level_set_out_of_window, msg.str());
    }
    const std::size_t k = envelope_argmin(x);
    const cplx z0 = points_[k];
    const double r0 = std::abs(z0 - x);
    cplx best = polish(x, z0, r0, scales_[k]);
    const double d = std::abs(best - x);
    const double reach = std::min({x - q_.box.x_lo, q_.box.x_hi - x, q_.box.y_hi});
    if (d > reach * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "level set out of window: d_eps(" << x << ") = " << d << " exceeds the search box reach " << reach;
      throw Error(ErrorKind::level_set_out_of_window, msg.str());
    }
    return best;
  }

 private:
  double g(cplx z) const { return theta_.log_modulus(z) - log_eps_; }

  void build_grid() {
    const Box& b = q_.box;
    for (int i = 0; i < q_.nx; ++i) xs_.push_back(b.x_lo + (b.x_hi - b.x_lo) * i / (q_.nx - 1.0));
    for (const auto& z : theta_.zeros()) {
      const double cx = z.point.real(), s = z.point.imag();
      const double span = std::max(cx - b.x_lo, b.x_hi - cx);
      if (span <= 0) continue;
      const double umax = std::asinh(span / s);
      const int m = std::max(2, q_.cluster_nodes);
      for (int k = -m; k <= m; ++k) {
        const double x = cx + s * std::sinh(umax * k / m);
        if (x >= b.x_lo && x <= b.x_hi) xs_.push_back(x);
      }
    }
    std::sort(xs_.begin(), xs_.end());
    dedupe(xs_);
    const double ly0 = std::log(b.y_lo), ly1 = std::log(b.y_hi);
    for (int j = 0; j < q_.ny; ++j) ys_.push_back(std::exp(ly0 + (ly1 - ly0) * j / (q_.ny - 1.0)));
    for (const auto& z : theta_.zeros())
      if (z.point.imag() > b.y_lo && z.point.imag() < b.y_hi) ys_.push_back(z.point.imag());
    std::sort(ys_.begin(), ys_.end());
    dedupe(ys_);
  }

  static void dedupe(std::vector<double>& v) {
    std::vector<double> out;
    for (double t : v)
      if (out.empty() || t - out.back() > 1e-12 * std::max(1.0, std::abs(t))) out.push_back(t);
    v.swap(out);
  }

  void classify(unsigned jobs) {
    values_.assign(xs_.size() * ys_.size(), 0.0);
    parallel_for(ys_.size(), jobs, [&](std::size_t j) {
      for (std::size_t i = 0; i < xs_.size(); ++i) values_[j * xs_.size() + i] = g(cplx(xs_[i], ys_[j]));
    });
  }

  double value(std::size_t i, std::size_t j) const { return values_[j * xs_.size() + i]; }
  cplx node(std::size_t i, std::size_t j) const { return {xs_[i], ys_[j]}; }

  cplx bisect(cplx inside, cplx outside) const {
    const double tol = q_.refine_tol * std::max(1.0, std::abs(inside));
    for (int it = 0; it < 200 && std::abs(outside - inside) > tol; ++it) {
      const cplx mid = 0.5 * (inside + outside);
      (g(mid) < 0.0 ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  }

  // Crossing on the edge joining two grid nodes, or -1.
  long edge_crossing(std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
    const double v0 = value(i0, j0), v1 = value(i1, j1);
    const bool in0 = v0 < 0.0, in1 = v1 < 0.0;
    if (in0 == in1) return -1;
    const cplx a = node(i0, j0), b = node(i1, j1);
    points_.push_back(in0 ? bisect(a, b) : bisect(b, a));
    scales_.push_back(std::abs(b - a));
    return static_cast<long>(points_.size() - 1);
  }

  void extract() {
    const std::size_t nx = xs_.size(), ny = ys_.size();
    std::vector<long> hor(nx * ny, -1), ver(nx * ny, -1);
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i + 1 < nx; ++i) hor[j * nx + i] = edge_crossing(i, j, i + 1, j);
    for (std::size_t j = 0; j + 1 < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) ver[j * nx + i] = edge_crossing(i, j, i, j + 1);
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        // bottom, right, top, left
        const long e[4] = {hor[j * nx + i], ver[j * nx + i + 1], hor[(j + 1) * nx + i], ver[j * nx + i]};
        std::vector<long> c;
        for (long v : e)
          if (v >= 0) c.push_back(v);
        if (c.size() == 2) {
          segments_.emplace_back(points_[c[0]], points_[c[1]]);
        } else if (c.size() == 4) {
          const cplx mid = 0.5 * (node(i, j) + node(i + 1, j + 1));
          const bool center_in = g(mid) < 0.0;
          const bool bl_in = value(i, j) < 0.0;
          if (center_in == bl_in) {
            segments_.emplace_back(points_[e[0]], points_[e[1]]);
            segments_.emplace_back(points_[e[2]], points_[e[3]]);
          } else {
            segments_.emplace_back(points_[e[0]], points_[e[3]]);
            segments_.emplace_back(points_[e[1]], points_[e[2]]);
          }
        }
      }
    }
  }

  // Lower envelope of l_k(x) = -2 px_k x + |p_k|^2; d^2(x) = x^2 + min_k l_k(x).
  void build_envelope() {
    std::vector<std::size_t> order(points_.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    auto slope = [&](std::size_t k) { return -2.0 * points_[k].real(); };
    auto icpt = [&](std::size_t k) { return std::norm(points_[k]); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (slope(a) != slope(b)) return slope(a) > slope(b);
      return icpt(a) < icpt(b);
    });
    auto cross = [&](std::size_t a, std::size_t b) { return (icpt(b) - icpt(a)) / (slope(a) - slope(b)); };
    hull_.clear();
    breaks_.clear();
    for (std::size_t k : order) {
      if (!hull_.empty() && slope(hull_.back()) == slope(k)) continue;
      while (!hull_.empty()) {
        const double xk = cross(hull_.back(), k);
        if (!breaks_.empty() && xk <= breaks_.back()) {
          hull_.pop_back();
          breaks_.pop_back();
        } else {
          break;
        }
      }
      if (!hull_.empty()) breaks_.push_back(cross(hull_.back(), k));
      hull_.push_back(k);
    }
  }

  std::size_t envelope_argmin(double x) const {
    // breaks_[m] is where hull_[m+1] takes over from hull_[m]
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    return hull_[static_cast<std::size_t>(it - breaks_.begin())];
  }

  // Root of g(x + r e^{i angle}) near r_guess, or +inf when no sign change is found nearby.
  double ray_root(double x, double angle, double r_guess, double h) const {
    const cplx e = std::polar(1.0, angle);
    const double tol_scale = q_.refine_tol * std::max(1.0, r_guess);
    // warm-started Newton first; the bracketed search is the fallback
    double r = r_guess;
    for (int it = 0; it < 8; ++it) {
      const cplx z = x + r * e;
      const double f = g(z);
      const double df = (theta_.log_derivative(z) * e).real();
      if (!std::isfinite(f) || df == 0.0) break;
      const double step = f / df;
      r -= step;
      if (!(r > 0.0) || std::abs(r - r_guess) > h) break;
      if (std::abs(step) <= tol_scale) return r;
    }
    auto phi = [&](double t) { return g(x + t * e); };
    double a = std::max(r_guess - h, 0.5 * r_guess), b = r_guess + h;
    double fa = phi(a), fb = phi(b);
    for (int it = 0; it < 30 && fa <= 0.0; ++it) {
      a *= 0.5;
      fa = phi(a);
    }
    for (int it = 0; it < 30 && fb > 0.0; ++it) {
      b = r_guess + 2.0 * (b - r_guess);
      fb = phi(b);
    }
    if (!(fa > 0.0) || fb > 0.0) return std::numeric_limits<double>::infinity();
    r = std::clamp(r_guess, a, b);
    for (int it = 0; it < 200; ++it) {
      const cplx z = x + r * e;
      const double f = g(z);
      if (f == 0.0) return r;
      (f > 0.0 ? a : b) = r;
      const double df = (theta_.log_derivative(z) * e).real();
      double next = (df != 0.0 && std::isfinite(f)) ? r - f / df : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      const double step = std::abs(next - r);
      r = next;
      if (step <= tol_scale || b - a <= tol_scale) break;
    }
    return r;
  }

  // Brent minimisation of the crossing radius over angles in [lo, hi].
  template <class F>
  static std::pair<double, double> brent_min(F&& f, double lo, double hi, double tol) {
    constexpr double cgold = 0.3819660112501051;
    double a = lo, b = hi;
    double x = a + cgold * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double xm = 0.5 * (a + b);
      const double tol1 = tol * std::abs(x) + 1e-14, tol2 = 2.0 * tol1;
      if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
      bool golden = true;
      if (std::abs(e) > tol1 && std::isfinite(fx) && std::isfinite(fw) && std::isfinite(fv)) {
        const double r = (x - w) * (fx - fv);
        double q = (x - v) * (fx - fw);
        double p = (x - v) * q - (x - w) * r;
        q = 2.0 * (q - r);
        if (q > 0.0) p = -p;
        q = std::abs(q);
        const double etemp = e;
        e = d;
        if (!(std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x))) {
          d = p / q;
          const double u = x + d;
          if (u - a < tol2 || b - u < tol2) d = (xm - x >= 0) ? tol1 : -tol1;
          golden = false;
        }
      }
      if (golden) {
        e = (x >= xm) ? a - x : b - x;
        d = cgold * e;
      }
      const double u = (std::abs(d) >= tol1) ? x + d : x + ((d >= 0) ? tol1 : -tol1);
      const double fu = f(u);
      if (fu <= fx) {
        (u >= x ? a : b) = x;
        v = w; w = x; x = u;
        fv = fw; fw = fx; fx = fu;
      } else {
        (u < x ? a : b) = u;
        if (fu <= fw || w == x) {
          v = w; w = u;
          fv = fw; fw = fu;
        } else if (fu <= fv || v == x || v == w) {
          v = u;
          fv = fu;
        }
      }
    }
    return {x, fx};
  }

  cplx polish(double x, cplx z0, double r0, double h) const {
    if (!(r0 > 0.0)) return z0;
    constexpr double lo_lim = 1e-9, hi_lim = std::numbers::pi - 1e-9;
    const double theta0 = std::arg(z0 - x);
    const double half = std::clamp(3.0 * h / r0, 1e-7, 0.5);
    double best_r = r0, best_t = theta0;
    double r_hint = r0;
    auto radius = [&](double t) {
      const double r = ray_root(x, t, r_hint, std::max(h, 1e-3 * r_hint));
      if (std::isfinite(r)) r_hint = r;
      return r;
    };
    double center = theta0;
    for (int round = 0; round < 8; ++round) {
      const double lo = std::max(lo_lim, center - half), hi = std::min(hi_lim, center + half);
      r_hint = best_r;
      const auto [t, r] = brent_min(radius, lo, hi, 1e-10);
      if (r < best_r) {
        best_r = r;
        best_t = t;
      }
      // recentre when the minimum sits against the bracket edge
      const bool at_edge = (t - lo < 0.05 * (hi - lo) && lo > lo_lim) || (hi - t < 0.05 * (hi - lo) && hi < hi_lim);
      if (!at_edge) break;
      center = t;
    }
    if (best_r >= r0) return z0;
    return x + std::polar(best_r, best_t);
  }

  InnerFunction theta_;
  SublevelQuery q_;
  double log_eps_ = 0.0;
  std::vector<double> xs_, ys_, values_;
  std::vector<cplx> points_;
  std::vector<double> scales_;
  std::vector<std::pair<cplx, cplx>> segments_;
  std::vector<std::size_t> hull_;
  std::vector<double> breaks_;
};

/// d_eps(x) with a freshly built field for the query box.
inline double dist_to_sublevel(const InnerFunction& theta, double epsilon, double x, SublevelQuery q) {
  q.epsilon = epsilon;
  return DistanceField(theta, q)(x);
}

/// Sampled d_eps against min(d_0, 1/|Theta'|).
struct DistanceProfile {
  std::vector<double> x, d_eps, d_0, inv_dtheta, ratio;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

inline DistanceProfile comparability_report(const DistanceField& field, const std::vector<double>& grid, unsigned jobs = 1) {
  if (grid.empty()) throw Error(ErrorKind::domain, "comparability grid is empty");
  DistanceProfile p;
  const std::size_t n = grid.size();
  p.x = grid;
  p.d_eps.resize(n);
  p.d_0.resize(n);
  p.inv_dtheta.resize(n);
  p.ratio.resize(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const double x = grid[i];
    p.d_eps[i] = field(x);
    p.d_0[i] = dist_to_spectrum(field.theta(), x);
    p.inv_dtheta[i] = 1.0 / field.theta().boundary_derivative_modulus(x);
    p.ratio[i] = p.d_eps[i] / std::min(p.d_0[i], p.inv_dtheta[i]);
  });
  p.min_ratio = *std::min_element(p.ratio.begin(), p.ratio.end());
  p.max_ratio = *std::max_element(p.ratio.begin(), p.ratio.end());
  return p;
}

inline void write_csv(std::ostream& os, const DistanceProfile& p) {
  os << "x,d_eps,d_0,inv_dtheta,ratio\n";
  os.precision(17);
  for (std::size_t i = 0; i < p.x.size(); ++i)
    os << p.x[i] << ',' << p.d_eps[i] << ',' << p.d_0[i] << ',' << p.inv_dtheta[i] << ',' << p.ratio[i] << '\n';
}

}  // namespace mspace
