// Covering, density and a p = 2 sampling constant for the Paley-Wiener space with tau = 2 pi.

#include <cstdio>
#include <numbers>

#include "mspace/covering.hpp"
#include "mspace/density.hpp"
#include "mspace/harmonic.hpp"
#include "mspace/model_space.hpp"

using namespace mspace;

int main() {
  const auto theta = InnerFunction::paley_wiener(2.0 * std::numbers::pi);
  const double eps = 0.5;
  const Covering cov = build_covering(theta, eps, 1.0, 10.0);
  std::printf("covering: %zu intervals, |I_0| = %.6f, alpha_hat = %.3f\n", cov.size(), cov.interval(1).length(),
              cov.alpha_hat);

  // half of every unit cell
  const MeasurableSet g = periodic_set(1.0, 0.5, 0.0, -40.0, 40.0);
  std::printf("gamma* (a = 1): %.4f\n", max_gamma(g, cov, 1).gamma_star);

  const UpperHalfPlaneGrid grid{-10.0, 10.0, 1e-3, 100.0, 100, 50};
  std::printf("volberg inf <= %.4f\n", volberg_inf(theta, g, grid).value);

  QuadratureSpec q;
  q.R = 20.0;
  FamilySpec fam;
  fam.sets = 8;
  const auto res = empirical_sampling_constant(theta, g, 2.0, fam, q);
  std::printf("C_emp(p = 2) >= %.4f over %d node sets\n", res.constant, fam.sets);

  const auto f = TestFunction::kernel(theta, {0.3, 0.7});
  std::printf("||k||_2 = %.6f, k(lambda) = %.6f\n", lp_norm(f, 2.0, q), f({0.3, 0.7}).real());
}
