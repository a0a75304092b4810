#pragma once

// (gamma, a)-relative density of a set with respect to a covering, and the reference set F
// built from a dense set.

#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "mspace/covering.hpp"
#include "mspace/errors.hpp"
#include "mspace/msets.hpp"

namespace mspace {

struct GammaStar {
  double gamma_star = 1.0;
  std::size_t worst_index = 0;
};

/// min over interior n of |G ∩ I_n^a| / |I_n^a|.
inline GammaStar max_gamma(const MeasurableSet& g, const Covering& cov, int a) {
  if (a < 1) throw Error(ErrorKind::domain, "amplification must be a positive integer");
  const auto idx = cov.interior();
  if (idx.empty()) throw Error(ErrorKind::domain, "covering has no interior intervals");
  GammaStar out{std::numeric_limits<double>::infinity(), idx.front()};
  for (std::size_t n : idx) {
    const Interval amp = amplify(cov.interval(n), a);
    const double ratio = g.intersect_measure(amp) / amp.length();
    if (ratio < out.gamma_star) out = {ratio, n};
  }
  return out;
}

struct DensityReport {
  bool dense = true;
  double gamma = 0.0;
  int a = 1;
  GammaStar star;
  std::vector<std::size_t> violations;  // n with |G ∩ I_n^a| < gamma |I_n^a|
};

inline DensityReport is_dense(const MeasurableSet& g, const Covering& cov, double gamma, int a) {
  DensityReport r;
  r.gamma = gamma;
  r.a = a;
  r.star = max_gamma(g, cov, a);
  for (std::size_t n : cov.interior()) {
    const Interval amp = amplify(cov.interval(n), a);
    if (g.intersect_measure(amp) / amp.length() < gamma) r.violations.push_back(n);
  }
  r.dense = r.violations.empty();
  return r;
}

/// Reference set F = union over n of the kept tiles of I_n^{a,sigma}, for a (gamma, a)-dense Gamma.
///
/// sigma(n) picks the piece of the aN-subdivision of I_n^a with the largest Gamma fraction
/// (smallest k on ties); it satisfies |Gamma ∩ I_n^{a,sigma}| >= gamma |I_n^{a,sigma}| by
/// pigeonhole. Tiles of A_n^sigma are kept when |Gamma ∩ tile| >= (gamma/2) |tile|.
inline std::pair<MeasurableSet, SubdivisionPlan> build_reference_set(const Covering& cov, const MeasurableSet& gamma_set,
                                                                     int a, long N, double gamma) {
  if (a < 1 || N < 1) throw Error(ErrorKind::domain, "a and N must be positive integers");
  const DensityReport rep = is_dense(gamma_set, cov, gamma, a);
  if (!rep.dense) {
    std::ostringstream msg;
    msg << "density precondition fails at interval n = " << rep.violations.front() << " (gamma* = "
        << rep.star.gamma_star << " < " << gamma << ")";
    throw Error(ErrorKind::density_violation, msg.str());
  }
  SubdivisionPlan plan;
  plan.a = a;
  plan.N = N;
  plan.gamma = gamma;
  std::vector<Interval> f_parts;
  const long pieces = static_cast<long>(a) * N;
  for (std::size_t n : cov.interior()) {
    const auto sub = subdivide(amplify(cov.interval(n), a), static_cast<int>(pieces));
    int best_k = 0;
    double best_frac = -1.0;
    for (int k = 0; k < pieces; ++k) {
      const double frac = gamma_set.intersect_measure(sub[k]) / sub[k].length();
      if (frac > best_frac) {
        best_frac = frac;
        best_k = k;
      }
    }
    const Interval sel = sub[best_k];
    std::vector<Tile> tiles;
    // part left of the covering
    if (sel.lo < cov.breakpoints.front()) {
      const Interval out{sel.lo, std::min(sel.hi, cov.breakpoints.front())};
      tiles.push_back({-1, -1, out, gamma_set.intersect_measure(out)});
    }
    for (std::size_t k = 0; k < cov.size(); ++k) {
      const Interval ik = cov.interval(k);
      if (overlap(ik, sel) <= 0.0) continue;
      const auto cells = subdivide(ik, static_cast<int>(N));
      for (long l = 0; l < N; ++l) {
        const double lo = std::max(cells[l].lo, sel.lo), hi = std::min(cells[l].hi, sel.hi);
        if (hi > lo) {
          const Interval t{lo, hi};
          tiles.push_back({static_cast<long>(k), l + 1, t, gamma_set.intersect_measure(t)});
        }
      }
    }
    if (sel.hi > cov.breakpoints.back()) {
      const Interval out{std::max(sel.lo, cov.breakpoints.back()), sel.hi};
      tiles.push_back({-1, -1, out, gamma_set.intersect_measure(out)});
    }
    std::vector<Tile> kept;
    for (const auto& t : tiles)
      if (t.gamma_mass >= 0.5 * gamma * t.piece.length()) {
        kept.push_back(t);
        f_parts.push_back(t.piece);
      }
    plan.indices.push_back(n);
    plan.sigma.push_back(best_k + 1);
    plan.selected.push_back(sel);
    plan.tiles.push_back(std::move(tiles));
    plan.kept.push_back(std::move(kept));
  }
  return {MeasurableSet::normalize(std::move(f_parts)), std::move(plan)};
}

}  // namespace mspace
