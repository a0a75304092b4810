#pragma once

// Reproducing kernels of K_Theta, kernel combinations as test functions, L^p norms by quadrature,
// and the Bernstein, Remez and domination engines.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "mspace/errors.hpp"
#include "mspace/geometry.hpp"
#include "mspace/inner_function.hpp"
#include "mspace/msets.hpp"
#include "mspace/parallel.hpp"
#include "mspace/quadrature.hpp"

namespace mspace {

/// k_lambda(z) = (i / 2 pi) (1 - conj(Theta(lambda)) Theta(z)) / (z - conj(lambda)).
inline cplx kernel_eval(const InnerFunction& theta, cplx lambda, cplx z) {
  if (!(lambda.imag() > 0.0)) throw Error(ErrorKind::domain, "kernel node needs Im lambda > 0");
  const cplx den = z - std::conj(lambda);
  if (den == 0.0) throw Error(ErrorKind::pole, "kernel evaluated at conj(lambda)");
  return I / (2.0 * std::numbers::pi) * (1.0 - std::conj(theta.eval(lambda)) * theta.eval(z)) / den;
}

/// f = sum_j a_j k_{lambda_j}. Nodes may also sit on the real line (boundary kernels).
class TestFunction {
 public:
  TestFunction() = default;
  TestFunction(InnerFunction theta, std::vector<cplx> nodes, std::vector<cplx> coeffs)
      : theta_(std::move(theta)), nodes_(std::move(nodes)), coeffs_(std::move(coeffs)) {
    if (nodes_.size() != coeffs_.size()) throw Error(ErrorKind::domain, "nodes and coefficients differ in length");
    for (const auto& l : nodes_) {
      if (l.imag() < 0.0) throw Error(ErrorKind::domain, "kernel node needs Im lambda >= 0");
      const cplx t = theta_.eval(l);
      conj_theta_.push_back(std::conj(t));
    }
  }

  static TestFunction kernel(InnerFunction theta, cplx lambda) {
    if (!(lambda.imag() > 0.0)) throw Error(ErrorKind::domain, "kernel node needs Im lambda > 0");
    return TestFunction(std::move(theta), {lambda}, {1.0});
  }

  const InnerFunction& theta() const noexcept { return theta_; }
  const std::vector<cplx>& nodes() const noexcept { return nodes_; }
  const std::vector<cplx>& coefficients() const noexcept { return coeffs_; }
  const std::vector<cplx>& conj_theta_at_nodes() const noexcept { return conj_theta_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  TestFunction scaled(cplx s) const {
    auto out = *this;
    for (auto& a : out.coeffs_) a *= s;
    return out;
  }

  cplx operator()(cplx z) const { return eval(z); }

  cplx eval(cplx z) const {
    const cplx th = theta_.eval(z);
    cplx s = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      const cplx den = z - std::conj(nodes_[j]);
      if (den == 0.0) throw Error(ErrorKind::pole, "test function evaluated at a kernel pole");
      s += coeffs_[j] * (1.0 - conj_theta_[j] * th) / den;
    }
    return s * I / (2.0 * std::numbers::pi);
  }

  /// f^(n)(z) by Leibniz on (1 - c Theta(z)) (z - conj lambda)^{-1}.
  cplx derivative(cplx z, int n) const {
    if (n < 0) throw Error(ErrorKind::domain, "derivative order must be >= 0");
    if (n == 0) return eval(z);
    const auto th = theta_.derivatives(z, n);
    std::vector<double> fact(n + 1, 1.0);
    for (int k = 1; k <= n; ++k) fact[k] = fact[k - 1] * k;
    cplx s = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      const cplx w = 1.0 / (z - std::conj(nodes_[j]));
      cplx acc = 0.0;
      for (int k = 0; k <= n; ++k) {
        const cplx dk = (k == 0) ? 1.0 - conj_theta_[j] * th[0] : -conj_theta_[j] * th[k];
        const int m = n - k;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        acc += fact[n] / (fact[k] * fact[m]) * dk * sign * fact[m] * std::pow(w, m + 1);
      }
      s += coeffs_[j] * acc;
    }
    return s * I / (2.0 * std::numbers::pi);
  }

 private:
  InnerFunction theta_;
  std::vector<cplx> nodes_, coeffs_, conj_theta_;
};

inline nlohmann::json to_json(const TestFunction& f) {
  nlohmann::json j{{"nodes", nlohmann::json::array()}, {"coefficients", nlohmann::json::array()}};
  for (const auto& l : f.nodes()) j["nodes"].push_back({{"re", l.real()}, {"im", l.imag()}});
  for (const auto& a : f.coefficients()) j["coefficients"].push_back({{"re", a.real()}, {"im", a.imag()}});
  return j;
}

enum class TailRule {
  none,       // window only
  power_law,  // |integrand| ~ |t|^-q, extrapolated from the trailing half of the window
  mapped,     // improper tail integrated exactly (see lp_integral and inner_product)
};

/// Window [center - R, center + R] plus the tail rule for the rest of the line.
struct QuadratureSpec {
  double center = 0.0;
  double R = 1000.0;
  double rel_tol = 1e-10;
  std::size_t max_subdivisions = 200000;
  TailRule tail = TailRule::power_law;

  double lo() const { return center - R; }
  double hi() const { return center + R; }
  quad::Options options() const {
    quad::Options o;
    o.rel_tol = rel_tol;
    o.max_subdivisions = max_subdivisions;
    return o;
  }
};

inline TailRule tail_rule_from_string(const std::string& s) {
  if (s == "none") return TailRule::none;
  if (s == "power_law") return TailRule::power_law;
  if (s == "mapped") return TailRule::mapped;
  throw Error(ErrorKind::config, "unknown tail rule \"" + s + "\"");
}

namespace detail {

// Panel breaks for integrands built from kernels: uniform panels resolving e^{i tau t},
// plus the real parts of the nodes and of the zeros of Theta, with their shoulders.
inline std::vector<double> panel_breaks(const InnerFunction& theta, std::span<const cplx> nodes, double lo, double hi) {
  std::vector<double> br;
  const double len = hi - lo;
  const auto panels = static_cast<std::size_t>(std::clamp(std::ceil(len * theta.tau() / std::numbers::pi), 8.0, 200000.0));
  br = quad::uniform_breaks(lo, hi, panels);
  auto add = [&](cplx p) {
    for (double k : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
      const double x = p.real() + k * p.imag();
      if (x > lo && x < hi) br.push_back(x);
    }
  };
  for (const auto& l : nodes) add(l);
  for (const auto& z : theta.zeros()) add(z.point);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

// Breaks restricted to [a, b].
inline std::vector<double> clip_breaks(const std::vector<double>& br, double a, double b) {
  std::vector<double> out{a};
  for (auto it = std::upper_bound(br.begin(), br.end(), a); it != br.end() && *it < b; ++it) out.push_back(*it);
  out.push_back(b);
  return out;
}

// Integral of f over [x0, +inf) (dir = +1) or (-inf, x0] (dir = -1) via t = x0 + dir L (1 - u) / u.
template <class F>
auto improper_tail(F&& f, double x0, int dir, double L, const quad::Options& opt) {
  auto g = [&](double u) {
    const double t = x0 + dir * L * (1.0 - u) / u;
    return f(t) * (L / (u * u));
  };
  return quad::integrate(g, 0.0, 1.0, opt);
}

// Integral over [0, inf) of f(s) ds, split at `split` with an improper tail beyond.
template <class F>
auto half_line(F&& f, double split, const quad::Options& opt) {
  const auto near = quad::integrate(f, 0.0, split, opt);
  const auto far = improper_tail(f, split, +1, split, opt);
  return near.value + far.value;
}

// Measure of g inside [a, b) divided by b - a.
inline double density_on(const MeasurableSet& g, double a, double b) { return g.intersect_measure({a, b}) / (b - a); }

// Exact tail of \int f conj(g) beyond the window edge x0 (dir = +1 right, -1 left).
//
// On the line conj(Theta) = 1/Theta, so f conj(g) = R0 + Theta R1 + R2 / Theta with rational
// R0, R1, R2. R0 is integrated directly; the Theta R1 tail is moved to the vertical line
// x0 + i s, where Theta decays, and the R2 / Theta tail to x0 - i s.
inline cplx sesquilinear_tail(const TestFunction& f, const TestFunction& g, double x0, int dir, double L,
                              const quad::Options& opt) {
  const auto& theta = f.theta();
  const auto& lf = f.nodes();
  const auto& lg = g.nodes();
  for (const auto& l : lf)
    if (dir * (l.real() - x0) >= 0.0) throw Error(ErrorKind::domain, "kernel node outside the quadrature window");
  for (const auto& l : lg)
    if (dir * (l.real() - x0) >= 0.0) throw Error(ErrorKind::domain, "kernel node outside the quadrature window");
  const double c4 = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
  auto rational = [&](cplx z, int which) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < lf.size(); ++j)
      for (std::size_t k = 0; k < lg.size(); ++k) {
        const cplx w = f.coefficients()[j] * std::conj(g.coefficients()[k]) / ((z - std::conj(lf[j])) * (z - lg[k]));
        const cplx cj = f.conj_theta_at_nodes()[j], dk = std::conj(g.conj_theta_at_nodes()[k]);
        if (which == 0) s += w * (1.0 + cj * dk);
        else if (which == 1) s -= w * cj;
        else s -= w * dk;
      }
    return c4 * s;
  };
  cplx total = improper_tail([&](double t) { return rational(cplx(t, 0.0), 0); }, x0, dir, L, opt).value;
  const double split = theta.tau() > 0.0 ? std::min(L, 40.0 / theta.tau()) : L;
  // up: \int_{x0}^{dir inf} Theta R1 = dir * i \int_0^inf Theta R1 (x0 + i s) ds
  const cplx up = half_line(
      [&](double s) {
        const cplx z(x0, s);
        return theta.eval(z) * rational(z, 1);
      },
      split, opt);
  const cplx down = half_line(
      [&](double s) {
        const cplx z(x0, -s);
        return rational(z, 2) / theta.eval(z);
      },
      split, opt);
  total += static_cast<double>(dir) * I * up - static_cast<double>(dir) * I * down;
  return total;
}

}  // namespace detail

/// \int |f|^p over the line (domain == nullptr) or over a finite union of intervals.
///
/// Inside the window the integral is adaptive. Beyond it:
///  - none: nothing;
///  - power_law: the trailing half segment [R/2, R] on each side times 1/(2^{p-1} - 1);
///  - mapped: p = 2 uses the exact kernel tail, tau = 0 maps t -> 1/u; other cases fall back to
///    power_law (e^{i tau t} makes the mapped integrand oscillate without bound).
/// For a domain the tail is multiplied by the domain's density over the trailing segment.
inline double lp_integral(const TestFunction& f, double p, const QuadratureSpec& q, const MeasurableSet* domain = nullptr) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::domain, "p must lie in (1, inf)");
  const auto opt = q.options();
  const auto br = detail::panel_breaks(f.theta(), f.nodes(), q.lo(), q.hi());
  auto integrand = [&](double t) { return std::pow(std::abs(f.eval(cplx(t, 0.0))), p); };
  double window = 0.0;
  if (domain == nullptr) {
    window = quad::integrate(integrand, std::span<const double>(br), opt).value;
  } else {
    const MeasurableSet inside = domain->intersect(Interval{q.lo(), q.hi()});
    for (const auto& iv : inside.components()) {
      const auto sub = detail::clip_breaks(br, iv.lo, iv.hi);
      window += quad::integrate(integrand, std::span<const double>(sub), opt).value;
    }
  }
  if (q.tail == TailRule::none) return window;
  double rho_l = 1.0, rho_r = 1.0;
  if (domain != nullptr) {
    rho_l = detail::density_on(*domain, q.lo(), q.center - 0.5 * q.R);
    rho_r = detail::density_on(*domain, q.center + 0.5 * q.R, q.hi());
  }
  double tail_l = 0.0, tail_r = 0.0;
  if (q.tail == TailRule::mapped && p == 2.0) {
    tail_l = detail::sesquilinear_tail(f, f, q.lo(), -1, q.R, opt).real();
    tail_r = detail::sesquilinear_tail(f, f, q.hi(), +1, q.R, opt).real();
  } else if (q.tail == TailRule::mapped && f.theta().tau() == 0.0) {
    tail_l = detail::improper_tail(integrand, q.lo(), -1, q.R, opt).value;
    tail_r = detail::improper_tail(integrand, q.hi(), +1, q.R, opt).value;
  } else {
    const double fac = quad::power_law_tail_factor(p);
    const auto bl = detail::clip_breaks(br, q.lo(), q.center - 0.5 * q.R);
    const auto brr = detail::clip_breaks(br, q.center + 0.5 * q.R, q.hi());
    tail_l = fac * quad::integrate(integrand, std::span<const double>(bl), opt).value;
    tail_r = fac * quad::integrate(integrand, std::span<const double>(brr), opt).value;
  }
  return window + rho_l * tail_l + rho_r * tail_r;
}

inline double lp_norm(const TestFunction& f, double p, const QuadratureSpec& q, const MeasurableSet* domain = nullptr) {
  return std::pow(lp_integral(f, p, q, domain), 1.0 / p);
}

/// <f, g> = \int f conj(g) over the line, with the same tail rules as lp_integral at p = 2.
inline cplx inner_product(const TestFunction& f, const TestFunction& g, const QuadratureSpec& q) {
  const auto opt = q.options();
  std::vector<cplx> all = f.nodes();
  all.insert(all.end(), g.nodes().begin(), g.nodes().end());
  const auto br = detail::panel_breaks(f.theta(), all, q.lo(), q.hi());
  auto integrand = [&](double t) {
    const cplx x(t, 0.0);
    return f.eval(x) * std::conj(g.eval(x));
  };
  cplx total = quad::integrate(integrand, std::span<const double>(br), opt).value;
  switch (q.tail) {
    case TailRule::none:
      break;
    case TailRule::mapped:
      total += detail::sesquilinear_tail(f, g, q.lo(), -1, q.R, opt) + detail::sesquilinear_tail(f, g, q.hi(), +1, q.R, opt);
      break;
    case TailRule::power_law: {
      const double fac = quad::power_law_tail_factor(2.0);
      const auto bl = detail::clip_breaks(br, q.lo(), q.center - 0.5 * q.R);
      const auto brr = detail::clip_breaks(br, q.center + 0.5 * q.R, q.hi());
      total += fac * (quad::integrate(integrand, std::span<const double>(bl), opt).value +
                      quad::integrate(integrand, std::span<const double>(brr), opt).value);
      break;
    }
  }
  return total;
}

/// conj(k_x(t)) for real x, t, written through the stable phase difference so that the
/// removable singularity at t = x costs nothing.
inline cplx conj_boundary_kernel(const InnerFunction& theta, double x, double t) {
  if (t == x) return theta.boundary_derivative_modulus(x) / (2.0 * std::numbers::pi);
  const double delta = theta.phase_difference(t, x);
  const cplx k = std::sin(0.5 * delta) * std::polar(1.0, 0.5 * delta) / (std::numbers::pi * (t - x));
  return std::conj(k);
}

/// f^(n)(x) = n! (2 pi i)^n \int f(t) conj(k_x(t))^{n+1} dt for real x.
inline cplx derivative_via_kernel(const TestFunction& f, int n, double x, const QuadratureSpec& q) {
  if (n < 0) throw Error(ErrorKind::domain, "derivative order must be >= 0");
  if (!(x > q.lo() && x < q.hi())) throw Error(ErrorKind::domain, "evaluation point outside the quadrature window");
  const auto& theta = f.theta();
  const auto opt = q.options();
  std::vector<cplx> pts = f.nodes();
  pts.push_back(cplx(x, 0.0));
  auto br = detail::panel_breaks(theta, pts, q.lo(), q.hi());
  // the kernel k_x has width ~ 1 / |Theta'(x)|
  const double w = 1.0 / theta.boundary_derivative_modulus(x);
  for (double k : {-8.0, -2.0, 2.0, 8.0})
    if (x + k * w > q.lo() && x + k * w < q.hi()) br.push_back(x + k * w);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  auto integrand = [&](double t) { return f.eval(cplx(t, 0.0)) * std::pow(conj_boundary_kernel(theta, x, t), n + 1); };
  cplx total = quad::integrate(integrand, std::span<const double>(br), opt).value;
  const double qexp = n + 2.0;
  if (q.tail == TailRule::mapped && n == 0) {
    const TestFunction kx(theta, {cplx(x, 0.0)}, {1.0});
    total += detail::sesquilinear_tail(f, kx, q.lo(), -1, q.R, opt) + detail::sesquilinear_tail(f, kx, q.hi(), +1, q.R, opt);
  } else if (q.tail == TailRule::mapped && theta.tau() == 0.0) {
    total += detail::improper_tail(integrand, q.lo(), -1, q.R, opt).value +
             detail::improper_tail(integrand, q.hi(), +1, q.R, opt).value;
  } else if (q.tail != TailRule::none) {
    const double fac = quad::power_law_tail_factor(qexp);
    const auto bl = detail::clip_breaks(br, q.lo(), q.center - 0.5 * q.R);
    const auto brr = detail::clip_breaks(br, q.center + 0.5 * q.R, q.hi());
    total += fac * (quad::integrate(integrand, std::span<const double>(bl), opt).value +
                    quad::integrate(integrand, std::span<const double>(brr), opt).value);
  }
  double nfact = 1.0;
  for (int k = 2; k <= n; ++k) nfact *= k;
  return nfact * std::pow(2.0 * std::numbers::pi * I, n) * total;
}

/// Fixed composite Gauss-Legendre rule on a window with d_eps cached at the nodes, shared by all
/// Bernstein ratios of one (Theta, eps) instance. Panels follow the local scale d_eps / 2.
class BernsteinRule {
 public:
  BernsteinRule(const DistanceField& field, double center, double R, int order = 12, unsigned jobs = 1)
      : epsilon_(field.epsilon()), center_(center), R_(R) {
    std::vector<double> br{center - R};
    while (br.back() < center + R) br.push_back(std::min(center + R, br.back() + 0.5 * field(br.back())));
    rule_ = quad::composite_gauss_legendre(std::span<const double>(br), order);
    d_.resize(rule_.nodes.size());
    parallel_for(d_.size(), jobs, [&](std::size_t i) { d_[i] = field(rule_.nodes[i]); });
  }

  double epsilon() const noexcept { return epsilon_; }
  std::size_t size() const noexcept { return d_.size(); }
  const quad::FixedRule& rule() const noexcept { return rule_; }

  /// \int |g|^p w over the line: the window sum plus the power-law tail of each trailing segment.
  template <class G>
  double integral(G&& g, double p) const {
    double win = 0.0, trail = 0.0;
    for (std::size_t i = 0; i < d_.size(); ++i) {
      const double v = rule_.weights[i] * g(i, rule_.nodes[i], d_[i]);
      win += v;
      if (std::abs(rule_.nodes[i] - center_) > 0.5 * R_) trail += v;
    }
    return win + quad::power_law_tail_factor(p) * trail;
  }

 private:
  double epsilon_, center_, R_;
  quad::FixedRule rule_;
  std::vector<double> d_;
};

/// ||f^(n) d_eps^n||_p / (n! (4/eps)^n ||f||_p).
inline double bernstein_ratio(const TestFunction& f, int n, double p, const BernsteinRule& rule) {
  if (n < 1) throw Error(ErrorKind::domain, "Bernstein order must be >= 1");
  if (!(p > 1.0)) throw Error(ErrorKind::domain, "p must lie in (1, inf)");
  const double num = rule.integral(
      [&](std::size_t, double t, double d) { return std::pow(std::abs(f.derivative(cplx(t, 0.0), n)) * std::pow(d, n), p); }, p);
  const double den = rule.integral([&](std::size_t, double t, double) { return std::pow(std::abs(f.eval(cplx(t, 0.0))), p); }, p);
  double nfact = 1.0;
  for (int k = 2; k <= n; ++k) nfact *= k;
  return std::pow(num / den, 1.0 / p) / (nfact * std::pow(4.0 / rule.epsilon(), n));
}

/// Classical Bernstein cross-check for Theta = exp(i sigma z). f = e^{i sigma x / 2} g with g of
/// exponential type sigma / 2, so ||f'||_p <= sigma ||f||_p and ||g'||_p <= (sigma / 2) ||g||_p.
struct ClassicalBernstein {
  double f_ratio = 0.0;  // ||f'||_p / (sigma ||f||_p)
  double g_ratio = 0.0;  // ||g'||_p / ((sigma / 2) ||g||_p)
  double weighted = 0.0; // ||f' d_eps||_p / ||f||_p, bounded by ln(1/eps)
};

inline ClassicalBernstein classical_bernstein(const TestFunction& f, double p, const BernsteinRule& rule) {
  const double sigma = f.theta().tau();
  if (!f.theta().zeros().empty() || !(sigma > 0.0))
    throw Error(ErrorKind::domain, "classical Bernstein check needs a Paley-Wiener inner function");
  auto fp = [&](double t) { return f.derivative(cplx(t, 0.0), 1); };
  auto fv = [&](double t) { return f.eval(cplx(t, 0.0)); };
  const double nf = rule.integral([&](std::size_t, double t, double) { return std::pow(std::abs(fv(t)), p); }, p);
  const double nfp = rule.integral([&](std::size_t, double t, double) { return std::pow(std::abs(fp(t)), p); }, p);
  const double nfd = rule.integral([&](std::size_t, double t, double d) { return std::pow(std::abs(fp(t)) * d, p); }, p);
  // g' = e^{-i sigma x / 2} (f' - i sigma / 2 f); |g| = |f|
  const double ngp =
      rule.integral([&](std::size_t, double t, double) { return std::pow(std::abs(fp(t) - 0.5 * I * sigma * fv(t)), p); }, p);
  ClassicalBernstein r;
  r.f_ratio = std::pow(nfp / nf, 1.0 / p) / sigma;
  r.g_ratio = std::pow(ngp / nf, 1.0 / p) / (0.5 * sigma);
  r.weighted = std::pow(nfd / nf, 1.0 / p);
  return r;
}

struct RemezReport {
  double lhs = 0.0;      // \int_J |f|^p
  double rhs = 0.0;      // (300 |J| / |E|)^{exponent} \int_E |f|^p (may overflow to inf)
  double log_lhs = 0.0;
  double log_rhs = 0.0;
  double M = 0.0;        // max over dist(z, J) <= 4 |J|
  double m = 0.0;        // max over J
  double exponent = 1.0;
  bool holds = false;
};

namespace detail {

// Golden/Brent-free refinement: ternary-like search for a max of phi on [a, b] around a sample.
template <class F>
double refine_max(F&& phi, double a, double b, double best) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 80 && (b - a) > 1e-14 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = phi(d);
    }
  }
  return std::max({best, fc, fd});
}

}  // namespace detail

/// Poles of the continuation of f: conj of the kernel nodes (unless the node's coefficient
/// vanishes) and conj of the zeros of Theta (through Theta(z) in the numerators).
inline std::vector<cplx> continuation_poles(const TestFunction& f) {
  std::vector<cplx> poles;
  bool theta_used = false;
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f.coefficients()[j] != 0.0) poles.push_back(std::conj(f.nodes()[j]));
    if (f.coefficients()[j] != 0.0 && f.conj_theta_at_nodes()[j] != 0.0) theta_used = true;
  }
  if (theta_used)
    for (const auto& z : f.theta().zeros()) poles.push_back(std::conj(z.point));
  return poles;
}

inline double distance_to_interval(cplx z, const Interval& j) {
  const double dx = z.real() < j.lo ? j.lo - z.real() : (z.real() > j.hi ? z.real() - j.hi : 0.0);
  return std::hypot(dx, z.imag());
}

/// \int_J |f|^p <= (300 |J| / |E|)^{p ln(M/m) / ln 2 + 1} \int_E |f|^p.
inline RemezReport remez_check(const TestFunction& f, const Interval& J, const MeasurableSet& E, double p,
                               const QuadratureSpec& q, int boundary_samples = 1024) {
  if (!(J.length() > 0.0)) throw Error(ErrorKind::domain, "Remez interval must have positive length");
  const MeasurableSet e = E.intersect(J);
  if (!(e.measure() > 0.0)) throw Error(ErrorKind::domain, "Remez set E must have positive measure inside J");
  const double L = J.length();
  for (const auto& pole : continuation_poles(f))
    if (distance_to_interval(pole, J) <= 4.0 * L) {
      std::ostringstream msg;
      msg << "continuation obstructed: pole at " << pole << " inside the 4|J| neighbourhood of J";
      throw Error(ErrorKind::continuation_obstructed, msg.str());
    }
  auto absf = [&](cplx z) { return std::abs(f.eval(z)); };
  // stadium boundary: two half circles of radius 4L around the ends, two horizontal segments
  const double r = 4.0 * L;
  const double perim = 2.0 * L + 2.0 * std::numbers::pi * r;
  auto boundary = [&](double s) -> cplx {
    s = std::fmod(std::fmod(s, perim) + perim, perim);
    if (s < L) return {J.lo + s, r};
    s -= L;
    if (s < std::numbers::pi * r) return J.hi + std::polar(r, std::numbers::pi / 2 - s / r);  // right cap, clockwise
    s -= std::numbers::pi * r;
    if (s < L) return {J.hi - s, -r};
    s -= L;
    return J.lo + std::polar(r, -std::numbers::pi / 2 - s / r);
  };
  auto phiM = [&](double s) { return absf(boundary(s)); };
  auto phim = [&](double x) { return absf(cplx(x, 0.0)); };
  auto sampled_max = [&](auto&& phi, double a, double b, int n) {
    double best = -1.0;
    int arg = 0;
    for (int i = 0; i < n; ++i) {
      const double v = phi(a + (b - a) * i / n);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    const double h = (b - a) / n;
    return detail::refine_max(phi, a + (arg - 1) * h, a + (arg + 1) * h, best);
  };
  RemezReport rep;
  rep.M = sampled_max(phiM, 0.0, perim, boundary_samples);
  {
    // the maximum over J may sit at an endpoint
    double best = std::max(phim(J.lo), phim(std::nextafter(J.hi, J.lo)));
    const int n = boundary_samples / 2;
    best = std::max(best, sampled_max(phim, J.lo, J.hi, n));
    rep.m = best;
  }
  rep.M = std::max(rep.M, rep.m);  // maximum principle; guards sampling noise
  auto opt = q.options();
  auto integrand = [&](double t) { return std::pow(phim(t), p); };
  const auto brJ = detail::panel_breaks(f.theta(), f.nodes(), J.lo, J.hi);
  rep.lhs = quad::integrate(integrand, std::span<const double>(brJ), opt).value;
  double rhs_int = 0.0;
  for (const auto& iv : e.components()) {
    const auto sub = detail::clip_breaks(brJ, iv.lo, iv.hi);
    rhs_int += quad::integrate(integrand, std::span<const double>(sub), opt).value;
  }
  rep.exponent = p * std::log(rep.M / rep.m) / std::numbers::ln2 + 1.0;
  rep.log_lhs = std::log(rep.lhs);
  rep.log_rhs = rep.exponent * std::log(300.0 * L / e.measure()) + std::log(rhs_int);
  rep.rhs = std::exp(rep.log_rhs);
  rep.holds = rep.log_lhs <= rep.log_rhs + std::log1p(1e-6);
  return rep;
}

/// Randomised node sets for the empirical sampling constant.
struct FamilySpec {
  int sets = 32;
  int min_nodes = 1;
  int max_nodes = 8;
  double im_lo = 0.05;  // Im lambda log-uniform in [im_lo, im_hi] * (R / 10)
  double im_hi = 5.0;
  double re_fraction = 0.5;  // Re lambda uniform in center +- re_fraction * R
  std::uint64_t seed = 42;
  std::vector<std::vector<cplx>> extra;  // node sets always included (e.g. the probe singletons)
};

inline std::vector<std::vector<cplx>> generate_family(const FamilySpec& spec, const QuadratureSpec& q) {
  if (spec.min_nodes < 1 || spec.max_nodes < spec.min_nodes || spec.sets < 0)
    throw Error(ErrorKind::domain, "invalid family specification");
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> count(spec.min_nodes, spec.max_nodes);
  std::uniform_real_distribution<double> re(q.center - spec.re_fraction * q.R, q.center + spec.re_fraction * q.R);
  std::uniform_real_distribution<double> logim(std::log(spec.im_lo * q.R / 10.0), std::log(spec.im_hi * q.R / 10.0));
  std::vector<std::vector<cplx>> out;
  for (int s = 0; s < spec.sets; ++s) {
    std::vector<cplx> nodes(count(rng));
    for (auto& l : nodes) {
      const double x = re(rng);
      l = cplx(x, std::exp(logim(rng)));
    }
    out.push_back(std::move(nodes));
  }
  out.insert(out.end(), spec.extra.begin(), spec.extra.end());
  if (out.empty()) throw Error(ErrorKind::empty_family, "empty test-function family");
  return out;
}

namespace detail {

// Gram matrices of one node set. A_ij = <k_j, k_i> = k_j(lambda_i) exactly; B_ij = \int_G k_j conj(k_i)
// over G inside the window plus the density-weighted tails of the full-line Gram matrix.
struct GramPair {
  Eigen::MatrixXcd A, B;
};

inline Eigen::MatrixXcd gram_window(const InnerFunction& theta, const std::vector<cplx>& nodes, const MeasurableSet* g,
                                    double lo, double hi, const QuadratureSpec& q) {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  const auto br = panel_breaks(theta, nodes, q.lo(), q.hi());
  std::vector<cplx> ct(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) ct[j] = std::conj(theta.eval(nodes[j]));
  auto integrand = [&](double t) {
    const cplx th = theta.eval(cplx(t, 0.0));
    Eigen::VectorXcd k(m);
    for (Eigen::Index j = 0; j < m; ++j) k(j) = I / (2.0 * std::numbers::pi) * (1.0 - ct[j] * th) / (t - std::conj(nodes[j]));
    Eigen::VectorXcd out(m * m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) out(i * m + j) = k(j) * std::conj(k(i));
    return out;
  };
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(m * m);
  auto add_piece = [&](double a, double b) {
    if (!(b > a)) return;
    const auto sub = clip_breaks(br, a, b);
    acc += quad::integrate(integrand, std::span<const double>(sub), q.options()).value;
  };
  if (g == nullptr) add_piece(lo, hi);
  else {
    const MeasurableSet inside = g->intersect(Interval{lo, hi});
    for (const auto& iv : inside.components()) add_piece(iv.lo, iv.hi);
  }
  Eigen::MatrixXcd M(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) M(i, j) = acc(i * m + j);
  return M;
}

inline GramPair gram_pair(const InnerFunction& theta, const std::vector<cplx>& nodes, const MeasurableSet& g,
                          const QuadratureSpec& q) {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  GramPair out;
  out.A.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) out.A(i, j) = kernel_eval(theta, nodes[j], nodes[i]);
  out.A = 0.5 * (out.A + out.A.adjoint()).eval();
  out.B = gram_window(theta, nodes, &g, q.lo(), q.hi(), q);
  if (q.tail != TailRule::none) {
    const double rho_l = density_on(g, q.lo(), q.center - 0.5 * q.R);
    const double rho_r = density_on(g, q.center + 0.5 * q.R, q.hi());
    Eigen::MatrixXcd tl(m, m), tr(m, m);
    if (q.tail == TailRule::mapped) {
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
          const TestFunction kj(theta, {nodes[j]}, {1.0}), ki(theta, {nodes[i]}, {1.0});
          tl(i, j) = sesquilinear_tail(kj, ki, q.lo(), -1, q.R, q.options());
          tr(i, j) = sesquilinear_tail(kj, ki, q.hi(), +1, q.R, q.options());
        }
    } else {
      const double fac = quad::power_law_tail_factor(2.0);
      tl = fac * gram_window(theta, nodes, nullptr, q.lo(), q.center - 0.5 * q.R, q);
      tr = fac * gram_window(theta, nodes, nullptr, q.center + 0.5 * q.R, q.hi(), q);
    }
    out.B += rho_l * tl + rho_r * tr;
  }
  out.B = 0.5 * (out.B + out.B.adjoint()).eval();
  return out;
}

// max a* A a / a* B a. A is factored first so that nearly dependent kernels are dropped
// instead of poisoning the problem; returns (ratio, maximiser, regularised).
inline std::tuple<double, Eigen::VectorXcd, bool> max_rayleigh(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(A);
  const Eigen::VectorXd s = ea.eigenvalues();
  const double smax = s.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > 1e-12 * smax) keep.push_back(i);
  const auto r = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXcd P(A.rows(), r);
  for (Eigen::Index c = 0; c < r; ++c) P.col(c) = ea.eigenvectors().col(keep[c]) / std::sqrt(s(keep[c]));
  const Eigen::MatrixXcd W = P.adjoint() * B * P;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ew(0.5 * (W + W.adjoint()));
  double lmin = ew.eigenvalues()(0);
  const double lmax = ew.eigenvalues()(r - 1);
  bool regularised = false;
  const double floor = 1e-13 * std::max(lmax, 1e-300);
  if (lmin < floor) {
    lmin = floor;
    regularised = true;
  }
  Eigen::VectorXcd a = P * ew.eigenvectors().col(0);
  return {1.0 / lmin, a, regularised};
}

}  // namespace detail

struct SamplingResult {
  double constant = 1.0;  // C_emp, a lower bound on the sampling constant
  TestFunction witness;
  std::size_t witness_set = 0;
  std::vector<double> per_set;
  std::vector<std::string> warnings;
};

/// C_emp = max over the family of \int |f|^p / \int_G |f|^p (window plus tails on both sides).
///
/// p = 2: exact generalised Rayleigh quotient per node set. Otherwise multistart gradient ascent
/// over the coefficients on a fixed Gauss-Legendre discretisation, followed by an adaptive
/// re-evaluation of the best candidate of each node set.
inline SamplingResult empirical_sampling_constant(const InnerFunction& theta, const MeasurableSet& g, double p,
                                                  const FamilySpec& spec, const QuadratureSpec& q, unsigned jobs = 1,
                                                  int restarts = 16) {
  if (!(g.intersect_measure({q.lo(), q.hi()}) > 0.0))
    throw Error(ErrorKind::domain, "Gamma has no mass inside the quadrature window");
  if (!(p > 1.0)) throw Error(ErrorKind::domain, "p must lie in (1, inf)");
  const auto family = generate_family(spec, q);
  const std::size_t n = family.size();
  std::vector<double> ratio(n);
  std::vector<TestFunction> wit(n);
  std::vector<char> reg(n, 0);

  if (p == 2.0) {
    parallel_for(n, jobs, [&](std::size_t s) {
      const auto gp = detail::gram_pair(theta, family[s], g, q);
      auto [r, a, rg] = detail::max_rayleigh(gp.A, gp.B);
      std::vector<cplx> coeff(a.data(), a.data() + a.size());
      ratio[s] = r;
      wit[s] = TestFunction(theta, family[s], coeff);
      reg[s] = rg;
    });
  } else {
    // numerator nodes cover the window, denominator nodes cover G inside it; trailing-segment
    // weights absorb the power-law tails
    std::vector<double> br{q.lo(), q.hi()};
    for (const auto& nodes : family) {
      const auto b = detail::panel_breaks(theta, nodes, q.lo(), q.hi());
      br.insert(br.end(), b.begin(), b.end());
    }
    for (double x : {q.center - 0.5 * q.R, q.center + 0.5 * q.R}) br.push_back(x);
    const MeasurableSet inside = g.intersect(Interval{q.lo(), q.hi()});
    for (const auto& iv : inside.components()) {
      br.push_back(iv.lo);
      br.push_back(iv.hi);
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    // split long panels so that each carries at most a few oscillations or node widths
    std::vector<double> fine{br.front()};
    double min_im = std::numeric_limits<double>::infinity();
    for (const auto& nodes : family)
      for (const auto& l : nodes) min_im = std::min(min_im, l.imag());
    const double hmax = std::min({0.5 * min_im, theta.tau() > 0 ? 1.0 / theta.tau() : q.R, q.R / 64.0});
    for (std::size_t i = 1; i < br.size(); ++i) {
      const int parts = std::max(1, static_cast<int>(std::ceil((br[i] - br[i - 1]) / hmax)));
      for (int k = 1; k <= parts; ++k) fine.push_back(br[i - 1] + (br[i] - br[i - 1]) * k / parts);
    }
    const auto rule = quad::composite_gauss_legendre(std::span<const double>(fine), 8);
    const double fac = q.tail == TailRule::none ? 0.0 : quad::power_law_tail_factor(p);
    const double rho_l = detail::density_on(g, q.lo(), q.center - 0.5 * q.R);
    const double rho_r = detail::density_on(g, q.center + 0.5 * q.R, q.hi());
    std::vector<double> wn(rule.nodes.size()), wd(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = rule.nodes[i], w = rule.weights[i];
      const bool left = t < q.center - 0.5 * q.R, right = t > q.center + 0.5 * q.R;
      wn[i] = w * (1.0 + ((left || right) ? fac : 0.0));
      wd[i] = w * ((g.contains(t) ? 1.0 : 0.0) + (left ? fac * rho_l : 0.0) + (right ? fac * rho_r : 0.0));
    }
    parallel_for(n, jobs, [&](std::size_t s) {
      const auto& nodes = family[s];
      const auto m = static_cast<Eigen::Index>(nodes.size());
      const auto nt = static_cast<Eigen::Index>(rule.nodes.size());
      Eigen::MatrixXcd K(nt, m);
      for (Eigen::Index j = 0; j < m; ++j) {
        const cplx ct = std::conj(theta.eval(nodes[j]));
        for (Eigen::Index i = 0; i < nt; ++i) {
          const double t = rule.nodes[i];
          K(i, j) = I / (2.0 * std::numbers::pi) * (1.0 - ct * theta.eval(cplx(t, 0.0))) / (t - std::conj(nodes[j]));
        }
      }
      // work in coordinates that whiten the discrete p = 2 numerator Gram matrix; the p = 2
      // maximiser is the first starting point
      const Eigen::MatrixXcd Gn = K.adjoint() * Eigen::Map<const Eigen::VectorXd>(wn.data(), nt).asDiagonal() * K;
      const Eigen::MatrixXcd Gd = K.adjoint() * Eigen::Map<const Eigen::VectorXd>(wd.data(), nt).asDiagonal() * K;
      auto [r2, a2, rg2] = detail::max_rayleigh(0.5 * (Gn + Gn.adjoint()), 0.5 * (Gd + Gd.adjoint()));
      (void)r2;
      (void)rg2;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eg(0.5 * (Gn + Gn.adjoint()));
      std::vector<Eigen::Index> keep;
      for (Eigen::Index i = 0; i < m; ++i)
        if (eg.eigenvalues()(i) > 1e-12 * eg.eigenvalues()(m - 1)) keep.push_back(i);
      const auto r = static_cast<Eigen::Index>(keep.size());
      Eigen::MatrixXcd P(m, r);
      for (Eigen::Index c = 0; c < r; ++c) P.col(c) = eg.eigenvectors().col(keep[c]) / std::sqrt(eg.eigenvalues()(keep[c]));
      const Eigen::MatrixXcd Kt = K * P;
      auto eval = [&](const Eigen::VectorXcd& b, Eigen::VectorXcd* grad) {
        const Eigen::VectorXcd u = Kt * b;
        double fn = 0.0, fd = 0.0;
        Eigen::VectorXcd vn(nt), vd(nt);
        for (Eigen::Index i = 0; i < nt; ++i) {
          const double au = std::abs(u(i));
          const double pw = au > 0 ? std::pow(au, p - 2.0) : 0.0;
          fn += wn[i] * pw * au * au;
          fd += wd[i] * pw * au * au;
          vn(i) = wn[i] * pw * u(i);
          vd(i) = wd[i] * pw * u(i);
        }
        if (grad) *grad = p * (Kt.adjoint() * vn / fn - Kt.adjoint() * vd / fd);  // 2 d log ratio / d conj(b)
        return std::log(fn) - std::log(fd);
      };
      std::mt19937_64 rng(spec.seed ^ (0x9e3779b97f4a7c15ULL * (s + 1)));
      std::normal_distribution<double> nd;
      double best = -std::numeric_limits<double>::infinity();
      Eigen::VectorXcd best_b;
      // P^{-1} a2 in the whitened basis: P^+ = P^* Gn restricted to the kept directions
      const Eigen::VectorXcd b2 = P.adjoint() * Gn * a2;
      for (int rs = 0; rs < restarts; ++rs) {
        Eigen::VectorXcd b(r);
        if (rs == 0) b = b2;
        else
          for (Eigen::Index j = 0; j < r; ++j) b(j) = cplx(nd(rng), nd(rng));
        b /= b.norm();
        Eigen::VectorXcd gr;
        double val = eval(b, &gr);
        double step = 0.1;
        for (int it = 0; it < 500; ++it) {
          const double gn = gr.squaredNorm();
          if (gn < 1e-24) break;
          bool moved = false;
          for (int ls = 0; ls < 30; ++ls) {
            Eigen::VectorXcd trial = b + step * gr;
            trial /= trial.norm();
            Eigen::VectorXcd g2;
            const double v2 = eval(trial, &g2);
            if (std::isfinite(v2) && v2 >= val + 1e-4 * step * gn) {
              moved = v2 - val > 1e-13 * std::max(1.0, std::abs(val));
              b = trial;
              val = v2;
              gr = g2;
              step *= 1.5;
              break;
            }
            step *= 0.25;
          }
          if (!moved) break;
        }
        if (val > best) {
          best = val;
          best_b = b;
        }
      }
      const Eigen::VectorXcd best_a = P * best_b;
      std::vector<cplx> coeff(best_a.data(), best_a.data() + best_a.size());
      wit[s] = TestFunction(theta, nodes, coeff);
      ratio[s] = lp_integral(wit[s], p, q) / lp_integral(wit[s], p, q, &g);
    });
  }
  SamplingResult res;
  res.per_set = ratio;
  const auto it = std::max_element(ratio.begin(), ratio.end());
  res.witness_set = static_cast<std::size_t>(it - ratio.begin());
  res.constant = std::max(1.0, *it);
  res.witness = wit[res.witness_set];
  for (std::size_t s = 0; s < n; ++s)
    if (reg[s]) res.warnings.push_back("node set " + std::to_string(s) + ": Gamma Gram matrix numerically singular, regularised");
  return res;
}

struct ProbeResult {
  double min = 1.0;
  cplx argmin;
  std::vector<double> values;
};

/// min over probe nodes of \int_G |k_lambda|^p / ||k_lambda||_p^p; its reciprocal is a lower
/// bound on the sampling constant of G.
inline ProbeResult density_probe(const InnerFunction& theta, const MeasurableSet& g, double p, const std::vector<cplx>& probes,
                                 const QuadratureSpec& q) {
  if (probes.empty()) throw Error(ErrorKind::empty_family, "no probe nodes");
  ProbeResult r;
  r.min = std::numeric_limits<double>::infinity();
  for (const auto& l : probes) {
    double v;
    if (p == 2.0) {
      // same Gram path as the sampling constant so a singleton family member matches exactly
      const auto gp = detail::gram_pair(theta, {l}, g, q);
      v = gp.B(0, 0).real() / gp.A(0, 0).real();
    } else {
      const auto k = TestFunction::kernel(theta, l);
      v = lp_integral(k, p, q, &g) / lp_integral(k, p, q);
    }
    r.values.push_back(v);
    if (v < r.min) {
      r.min = v;
      r.argmin = l;
    }
  }
  return r;
}

/// c_p = \int dt / (1 + |t|^p) by quadrature.
inline double c_p(double p) {
  if (!(p > 1.0)) throw Error(ErrorKind::domain, "p must lie in (1, inf)");
  quad::Options o;
  o.rel_tol = 1e-13;
  auto f = [&](double t) { return 1.0 / (1.0 + std::pow(std::abs(t), p)); };
  const double core = quad::integrate(f, 0.0, 1.0, o).value;
  const double tail = quad::integrate_right_tail(f, 1.0, o).value;
  return 2.0 * (core + tail);
}

/// C_1 = ((1 + eps) / (2 pi c_p))^p.
inline double c_one(double p, double epsilon) { return std::pow((1.0 + epsilon) / (2.0 * std::numbers::pi * c_p(p)), p); }

/// ((1 - eps) / (2 pi))^p y^{1-p} sqrt(pi) Gamma((p-1)/2) / Gamma(p/2), a lower bound for
/// ||k_lambda||_p^p when lambda = x + i y lies in L(Theta, eps).
inline double kernel_norm_lower_bound(double p, double y, double epsilon) {
  if (!(p > 1.0) || !(y > 0.0)) throw Error(ErrorKind::domain, "kernel norm bound needs p > 1 and y > 0");
  return std::pow((1.0 - epsilon) / (2.0 * std::numbers::pi), p) * std::pow(y, 1.0 - p) * std::sqrt(std::numbers::pi) *
         std::tgamma(0.5 * (p - 1.0)) / std::tgamma(0.5 * p);
}

struct BoundReport {
  double gamma = 0.0, p = 2.0, epsilon = 0.5;
  int a = 1;
  double c_emp = 1.0;
  double c_fit = 1.0;
  double delta_y = 0.0, m_y = 0.0;
  double thm2_shape = 0.0;  // exp(C a^2 / gamma ln(1/gamma))
  double cor_shape = 0.0;   // (1/gamma)^C
  double dyakonov = 0.0;    // 2^{1/(p delta_y)} / m_y
  double c_p = 0.0, c_1 = 0.0;
  bool corollary_applies = false;
  bool dyakonov_applies = false;
};

inline BoundReport theoretical_bounds(double gamma, int a, double p, double epsilon, double c_fit, double delta_y,
                                      double m_y, double c_emp = 1.0) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorKind::domain, "gamma must lie in (0, 1)");
  if (a < 1) throw Error(ErrorKind::domain, "a must be a positive integer");
  BoundReport r;
  r.gamma = gamma;
  r.a = a;
  r.p = p;
  r.epsilon = epsilon;
  r.c_emp = c_emp;
  r.c_fit = c_fit;
  r.delta_y = delta_y;
  r.m_y = m_y;
  r.thm2_shape = std::exp(c_fit * a * a / gamma * std::log(1.0 / gamma));
  r.cor_shape = std::pow(1.0 / gamma, c_fit);
  r.corollary_applies = a == 1;
  r.dyakonov_applies = delta_y > 0.0 && m_y > 0.0;
  r.dyakonov = r.dyakonov_applies ? std::pow(2.0, 1.0 / (p * delta_y)) / m_y : std::numeric_limits<double>::quiet_NaN();
  r.c_p = c_p(p);
  r.c_1 = c_one(p, epsilon);
  return r;
}

inline nlohmann::json to_json(const BoundReport& r) {
  return {{"gamma", r.gamma},
          {"a", r.a},
          {"p", r.p},
          {"epsilon", r.epsilon},
          {"c_emp", r.c_emp},
          {"c_fit", r.c_fit},
          {"thm2_shape", r.thm2_shape},
          {"cor_shape", r.cor_shape},
          {"dyakonov", r.dyakonov_applies ? nlohmann::json(r.dyakonov) : nlohmann::json(nullptr)},
          {"c_p", r.c_p},
          {"c_1", r.c_1},
          {"corollary_applies", r.corollary_applies},
          {"dyakonov_applies", r.dyakonov_applies}};
}

/// Least-squares line y = slope x + intercept.
struct LinearFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0, rss = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::domain, "linear fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  if (!(sxx > 0.0)) throw Error(ErrorKind::domain, "linear fit needs distinct abscissae");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.slope * x[i] + f.intercept);
    f.rss += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - f.rss / syy : 1.0;
  return f;
}

}  // namespace mspace
