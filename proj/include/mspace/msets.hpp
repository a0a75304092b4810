#pragma once

// Finite unions of half-open real intervals.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mspace/errors.hpp"

namespace mspace {

/// Half-open interval [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  double center() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double x) const noexcept { return lo <= x && x < hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

inline double overlap(const Interval& a, const Interval& b) noexcept {
  return std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
}

/// Interval with the same center and length a|I|.
inline Interval amplify(const Interval& interval, double a) {
  if (!(a >= 1.0)) throw Error(ErrorKind::domain, "amplification factor must be >= 1");
  if (a == 1.0) return interval;
  const double c = interval.center();
  const double h = 0.5 * a * interval.length();
  return {c - h, c + h};
}

/// m contiguous equal-length half-open pieces of I.
inline std::vector<Interval> subdivide(const Interval& interval, int m) {
  if (m < 1) throw Error(ErrorKind::domain, "subdivision count must be positive");
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(m));
  const double len = interval.length() / m;
  for (int k = 0; k < m; ++k) {
    const double lo = (k == 0) ? interval.lo : interval.lo + k * len;
    const double hi = (k == m - 1) ? interval.hi : interval.lo + (k + 1) * len;
    out.push_back({lo, hi});
  }
  return out;
}

/// Canonical finite union of sorted, disjoint, non-touching half-open intervals.
class MeasurableSet {
 public:
  MeasurableSet() = default;

  /// Sorts, absorbs nested pieces and merges touching ones.
  static MeasurableSet normalize(std::vector<Interval> raw) {
    for (const auto& iv : raw) {
      if (iv.hi < iv.lo) {
        std::ostringstream msg;
        msg << "reversed interval endpoints [" << iv.lo << ", " << iv.hi << ")";
        throw Error(ErrorKind::domain, msg.str());
      }
    }
    std::erase_if(raw, [](const Interval& iv) { return !(iv.hi > iv.lo); });
    std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    MeasurableSet s;
    for (const auto& iv : raw) {
      if (!s.parts_.empty() && iv.lo <= s.parts_.back().hi)
        s.parts_.back().hi = std::max(s.parts_.back().hi, iv.hi);
      else
        s.parts_.push_back(iv);
    }
    return s;
  }
  static MeasurableSet of(const Interval& iv) { return normalize({iv}); }

  const std::vector<Interval>& components() const noexcept { return parts_; }
  bool empty() const noexcept { return parts_.empty(); }

  double measure() const noexcept {
    double m = 0.0;
    for (const auto& iv : parts_) m += iv.length();
    return m;
  }

  bool contains(double x) const noexcept {
    auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == parts_.begin()) return false;
    return std::prev(it)->contains(x);
  }

  /// |G ∩ I| from endpoint arithmetic.
  double intersect_measure(const Interval& interval) const noexcept {
    auto it = std::upper_bound(parts_.begin(), parts_.end(), interval.lo,
                               [](double v, const Interval& iv) { return v < iv.hi; });
    double m = 0.0;
    for (; it != parts_.end() && it->lo < interval.hi; ++it) m += overlap(*it, interval);
    return m;
  }

  MeasurableSet intersect(const Interval& interval) const {
    std::vector<Interval> out;
    for (const auto& iv : parts_) {
      const double lo = std::max(iv.lo, interval.lo);
      const double hi = std::min(iv.hi, interval.hi);
      if (hi > lo) out.push_back({lo, hi});
    }
    return normalize(std::move(out));
  }

  MeasurableSet intersect(const MeasurableSet& other) const {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < parts_.size() && j < other.parts_.size()) {
      const double lo = std::max(parts_[i].lo, other.parts_[j].lo);
      const double hi = std::min(parts_[i].hi, other.parts_[j].hi);
      if (hi > lo) out.push_back({lo, hi});
      if (parts_[i].hi < other.parts_[j].hi) ++i; else ++j;
    }
    return normalize(std::move(out));
  }

  MeasurableSet unite(const MeasurableSet& other) const {
    auto all = parts_;
    all.insert(all.end(), other.parts_.begin(), other.parts_.end());
    return normalize(std::move(all));
  }

  /// Complement of the set inside the window.
  MeasurableSet complement_in(const Interval& window) const {
    std::vector<Interval> out;
    double cursor = window.lo;
    for (const auto& iv : parts_) {
      if (iv.hi <= window.lo) continue;
      if (iv.lo >= window.hi) break;
      if (iv.lo > cursor) out.push_back({cursor, std::min(iv.lo, window.hi)});
      cursor = std::max(cursor, iv.hi);
    }
    if (cursor < window.hi) out.push_back({cursor, window.hi});
    return normalize(std::move(out));
  }

  MeasurableSet translate(double shift) const {
    MeasurableSet s = *this;
    for (auto& iv : s.parts_) {
      iv.lo += shift;
      iv.hi += shift;
    }
    return s;
  }

  bool is_subset_of(const MeasurableSet& other) const {
    return std::abs(intersect(other).measure() - measure()) <= 1e-12 * std::max(1.0, measure());
  }

 private:
  std::vector<Interval> parts_;
};

inline MeasurableSet normalize(std::vector<Interval> raw) { return MeasurableSet::normalize(std::move(raw)); }
inline double intersect_measure(const MeasurableSet& g, const Interval& interval) {
  return g.intersect_measure(interval);
}

/// Union of [start + k period, start + k period + width) meeting [lo, hi), clipped to it.
inline MeasurableSet periodic_set(double period, double width, double start, double lo, double hi) {
  std::vector<Interval> parts;
  const double k0 = std::floor((lo - start) / period) - 1;
  for (double k = k0;; k += 1.0) {
    const double a = start + k * period;
    if (a >= hi) break;
    const double l = std::max(a, lo), r = std::min(a + width, hi);
    if (r > l) parts.push_back({l, r});
  }
  return MeasurableSet::normalize(std::move(parts));
}

// JSON fragment {"gamma_set": [[a, b], ...]}

inline nlohmann::json to_json_array(const MeasurableSet& g) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& iv : g.components()) arr.push_back({iv.lo, iv.hi});
  return arr;
}

inline MeasurableSet measurable_set_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw Error(ErrorKind::config, "gamma_set must be an array of [a, b] pairs");
  std::vector<Interval> raw;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::config, "gamma_set entries must be [a, b]");
    raw.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return MeasurableSet::normalize(std::move(raw));
}

}  // namespace mspace
