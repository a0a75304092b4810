#pragma once

// Meromorphic inner functions Theta(z) = exp(i tau z) * prod b_lambda(z)^m with a finite
// list of zeros in the upper half-plane.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mspace/errors.hpp"

namespace mspace {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

struct Zero {
  cplx point;
  int multiplicity = 1;
};

/// Finite zero list in the open upper half-plane.
class ZeroSet {
 public:
  ZeroSet() = default;
  explicit ZeroSet(std::vector<Zero> zeros) : zeros_(std::move(zeros)) {
    for (const auto& z : zeros_) {
      if (!(z.point.imag() > 0.0)) {
        std::ostringstream msg;
        msg << "zero " << z.point << " is not in the open upper half-plane";
        throw Error(ErrorKind::domain, msg.str());
      }
      if (z.multiplicity < 1) throw Error(ErrorKind::domain, "zero multiplicity must be positive");
    }
  }
  static ZeroSet simple(const std::vector<cplx>& points) {
    std::vector<Zero> z;
    z.reserve(points.size());
    for (auto p : points) z.push_back({p, 1});
    return ZeroSet(std::move(z));
  }

  const std::vector<Zero>& zeros() const noexcept { return zeros_; }
  bool empty() const noexcept { return zeros_.empty(); }
  std::size_t size() const noexcept { return zeros_.size(); }
  /// Number of Blaschke factors counted with multiplicity.
  std::size_t factor_count() const noexcept {
    std::size_t n = 0;
    for (const auto& z : zeros_) n += static_cast<std::size_t>(z.multiplicity);
    return n;
  }

 private:
  std::vector<Zero> zeros_;
};

/// Sum of Im(lambda) / (1 + |lambda|^2) over the zeros, with multiplicity.
inline double blaschke_sum(const ZeroSet& zs) {
  double s = 0.0;
  for (const auto& z : zs.zeros()) s += z.multiplicity * z.point.imag() / (1.0 + std::norm(z.point));
  return s;
}

/// Unimodular constant |lambda^2 + 1| / (lambda^2 + 1); taken as 1 at lambda = i.
inline cplx blaschke_normalization(cplx lambda) {
  const cplx w = lambda * lambda + 1.0;
  const double aw = std::abs(w);
  if (aw <= 1e-15 * (1.0 + std::norm(lambda))) return 1.0;
  return aw / w;
}

/// b_lambda(z) = (|lambda^2+1| / (lambda^2+1)) (z - lambda) / (z - conj(lambda)).
inline cplx blaschke_factor(cplx lambda, cplx z) {
  if (!(lambda.imag() > 0.0)) throw Error(ErrorKind::domain, "Blaschke factor needs Im lambda > 0");
  const cplx den = z - std::conj(lambda);
  if (den == 0.0) throw Error(ErrorKind::pole, "evaluation at the pole conj(lambda) of a Blaschke factor");
  return blaschke_normalization(lambda) * (z - lambda) / den;
}

class InnerFunction {
 public:
  /// Number of factors above which products are evaluated in log space.
  static constexpr std::size_t log_space_threshold = 30;

  InnerFunction() = default;
  InnerFunction(double tau, ZeroSet zeros) : tau_(tau), zeros_(std::move(zeros)) {
    if (!(tau_ >= 0.0) || !std::isfinite(tau_)) throw Error(ErrorKind::domain, "tau must be a finite nonnegative real");
    norms_.reserve(zeros_.size());
    for (const auto& z : zeros_.zeros()) norms_.push_back(blaschke_normalization(z.point));
  }
  /// exp(i tau z); the Paley-Wiener model space instance.
  static InnerFunction paley_wiener(double tau) { return InnerFunction(tau, ZeroSet{}); }

  double tau() const noexcept { return tau_; }
  const ZeroSet& zero_set() const noexcept { return zeros_; }
  const std::vector<Zero>& zeros() const noexcept { return zeros_.zeros(); }
  bool is_constant() const noexcept { return tau_ == 0.0 && zeros_.empty(); }

  /// Theta(z). Below the real axis this is the meromorphic continuation (poles at conj zeros).
  cplx operator()(cplx z) const { return eval(z); }

  cplx eval(cplx z) const {
    if (zeros_.factor_count() > log_space_threshold) {
      // log Theta = i tau z + sum m (log c + log(z - lambda) - log(z - conj lambda))
      double logmod = -tau_ * z.imag();
      double phase = tau_ * z.real();
      for (std::size_t j = 0; j < zeros_.size(); ++j) {
        const auto& zr = zeros_.zeros()[j];
        const cplx num = z - zr.point;
        const cplx den = z - std::conj(zr.point);
        if (den == 0.0) throw Error(ErrorKind::pole, "evaluation at a pole of the continuation");
        if (num == 0.0) return 0.0;
        logmod += zr.multiplicity * (std::log(std::abs(num)) - std::log(std::abs(den)));
        phase += zr.multiplicity * (std::arg(norms_[j]) + std::arg(num) - std::arg(den));
      }
      return std::polar(std::exp(logmod), phase);
    }
    cplx v = std::exp(I * tau_ * z);
    for (std::size_t j = 0; j < zeros_.size(); ++j) {
      const auto& zr = zeros_.zeros()[j];
      const cplx den = z - std::conj(zr.point);
      if (den == 0.0) throw Error(ErrorKind::pole, "evaluation at a pole of the continuation");
      const cplx b = norms_[j] * (z - zr.point) / den;
      for (int m = 0; m < zr.multiplicity; ++m) v *= b;
    }
    return v;
  }

  /// log|Theta(z)| = -tau Im z + sum m log|b_lambda(z)|; -inf at a zero.
  double log_modulus(cplx z) const {
    double s = -tau_ * z.imag();
    for (const auto& zr : zeros_.zeros()) {
      const double num = std::abs(z - zr.point);
      const double den = std::abs(z - std::conj(zr.point));
      if (num == 0.0) return -std::numeric_limits<double>::infinity();
      s += zr.multiplicity * (std::log(num) - std::log(den));
    }
    return s;
  }

  double modulus(cplx z) const { return std::exp(log_modulus(z)); }

  /// Theta'(z) / Theta(z) = i tau + sum m (1/(z - lambda) - 1/(z - conj lambda)).
  cplx log_derivative(cplx z) const {
    cplx s = I * tau_;
    for (const auto& zr : zeros_.zeros())
      s += static_cast<double>(zr.multiplicity) * (1.0 / (z - zr.point) - 1.0 / (z - std::conj(zr.point)));
    return s;
  }

  /// k-th derivative of the logarithmic derivative.
  cplx log_derivative_derivative(cplx z, int k) const {
    if (k == 0) return log_derivative(z);
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    cplx s = 0.0;
    for (const auto& zr : zeros_.zeros()) {
      const cplx a = 1.0 / (z - zr.point);
      const cplx b = 1.0 / (z - std::conj(zr.point));
      s += static_cast<double>(zr.multiplicity) * (std::pow(a, k + 1) - std::pow(b, k + 1));
    }
    return sign * fact * s;
  }

  /// Theta(z), Theta'(z), ..., Theta^(n)(z) from Theta^(k+1) = sum_j C(k,j) Theta^(j) L^(k-j).
  std::vector<cplx> derivatives(cplx z, int n) const {
    std::vector<cplx> th(n + 1);
    std::vector<cplx> ld(n);
    th[0] = eval(z);
    for (int k = 0; k < n; ++k) ld[k] = log_derivative_derivative(z, k);
    for (int k = 0; k < n; ++k) {
      cplx s = 0.0;
      double binom = 1.0;
      for (int j = 0; j <= k; ++j) {
        s += binom * th[j] * ld[k - j];
        binom = binom * (k - j) / (j + 1);
      }
      th[k + 1] = s;
    }
    return th;
  }

  /// Argument of Theta on the real line, up to an additive constant.
  double boundary_phase(double x) const {
    double s = tau_ * x;
    for (std::size_t j = 0; j < zeros_.size(); ++j) {
      const auto& zr = zeros_.zeros()[j];
      s += zr.multiplicity * (std::arg(norms_[j]) + 2.0 * std::arg(cplx(x, 0.0) - zr.point));
    }
    return s;
  }

  /// arg Theta(x) - arg Theta(t) for real x, t, accurate when |x - t| is small.
  double phase_difference(double x, double t) const {
    double s = tau_ * (x - t);
    for (const auto& zr : zeros_.zeros()) {
      const cplx w = (x - t) / (cplx(t, 0.0) - zr.point);
      s += 2.0 * zr.multiplicity * std::atan2(w.imag(), 1.0 + w.real());
    }
    return s;
  }

  /// |Theta'(x)| = tau + sum 2 m Im(lambda) / |x - lambda|^2 on the real line.
  double boundary_derivative_modulus(double x) const {
    if (is_constant()) throw Error(ErrorKind::constant_function, "constant inner function");
    double s = tau_;
    for (const auto& zr : zeros_.zeros())
      s += 2.0 * zr.multiplicity * zr.point.imag() / std::norm(cplx(x, 0.0) - zr.point);
    return s;
  }

 private:
  double tau_ = 0.0;
  ZeroSet zeros_;
  std::vector<cplx> norms_;
};

inline cplx eval(const InnerFunction& theta, cplx z) { return theta.eval(z); }
inline double log_modulus(const InnerFunction& theta, cplx z) { return theta.log_modulus(z); }
inline double boundary_derivative_modulus(const InnerFunction& theta, double x) {
  return theta.boundary_derivative_modulus(x);
}

// JSON fragment {"tau": t, "zeros": [{"re": x, "im": y, "mult": m}]}

inline void to_json(nlohmann::json& j, const InnerFunction& theta) {
  j = nlohmann::json::object();
  j["tau"] = theta.tau();
  j["zeros"] = nlohmann::json::array();
  for (const auto& z : theta.zeros())
    j["zeros"].push_back({{"re", z.point.real()}, {"im", z.point.imag()}, {"mult", z.multiplicity}});
}

inline InnerFunction inner_function_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::config, "inner function spec must be an object");
  const double tau = j.value("tau", 0.0);
  std::vector<Zero> zeros;
  if (j.contains("zeros")) {
    for (const auto& z : j.at("zeros")) {
      if (!z.contains("re") || !z.contains("im")) throw Error(ErrorKind::config, "zero needs \"re\" and \"im\"");
      zeros.push_back({cplx(z.at("re").get<double>(), z.at("im").get<double>()), z.value("mult", 1)});
    }
  }
  InnerFunction theta(tau, ZeroSet(std::move(zeros)));
  if (theta.is_constant()) throw Error(ErrorKind::constant_function, "constant inner function");
  return theta;
}

}  // namespace mspace
