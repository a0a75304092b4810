#pragma once

// Level-set boundary and covering ticks as a standalone SVG picture.

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mspace/covering.hpp"
#include "mspace/geometry.hpp"

namespace mspace {

struct SvgOptions {
  double width = 1000.0;
  double height = 500.0;
  double y_max = 0.0;  // 0: twice the largest d_eps over the covering
};

inline void write_levelset_svg(std::ostream& os, const DistanceField& field, const Covering& cov, SvgOptions opt = {}) {
  const double x_lo = cov.breakpoints.front(), x_hi = cov.breakpoints.back();
  double y_max = opt.y_max;
  if (!(y_max > 0.0)) {
    for (std::size_t k = 0; k < cov.size(); ++k) y_max = std::max(y_max, cov.interval(k).length());
    y_max *= 2.0;
  }
  const double margin = 30.0;
  const double w = opt.width - 2 * margin, h = opt.height - 2 * margin;
  auto X = [&](double x) { return margin + w * (x - x_lo) / (x_hi - x_lo); };
  auto Y = [&](double y) { return margin + h * (1.0 - std::min(y, y_max) / y_max); };
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
     << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << X(x_lo) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(x_hi) << "\" y2=\"" << Y(0)
     << "\" stroke=\"black\"/>\n";
  os << "<g stroke=\"#1f77b4\" stroke-width=\"1\">\n";
  for (const auto& [a, b] : field.boundary_segments()) {
    if (a.real() < x_lo || a.real() > x_hi || b.real() < x_lo || b.real() > x_hi) continue;
    if (a.imag() > y_max && b.imag() > y_max) continue;
    os << "<line x1=\"" << X(a.real()) << "\" y1=\"" << Y(a.imag()) << "\" x2=\"" << X(b.real()) << "\" y2=\""
       << Y(b.imag()) << "\"/>\n";
  }
  os << "</g>\n<g stroke-width=\"1\">\n";
  for (std::size_t k = 0; k < cov.breakpoints.size(); ++k) {
    const double s = cov.breakpoints[k];
    const bool edge = (k > 0 && cov.edge[k - 1]) || (k < cov.size() && cov.edge[k]);
    os << "<line x1=\"" << X(s) << "\" y1=\"" << Y(0) - 6 << "\" x2=\"" << X(s) << "\" y2=\"" << Y(0) + 6
       << "\" stroke=\"" << (edge ? "#999999" : "#d62728") << "\"/>\n";
  }
  os << "</g>\n";
  os << "<text x=\"" << margin << "\" y=\"" << margin - 10 << "\" font-family=\"monospace\" font-size=\"12\">"
     << "{|Theta| = " << cov.epsilon << "} and covering, c = " << cov.c << ", y up to " << y_max << "</text>\n";
  os << "</svg>\n";
}

}  // namespace mspace
