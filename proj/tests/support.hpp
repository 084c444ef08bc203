#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "crtower/tower.hpp"

namespace crtower::testing {

// 2-cycle of mu x (1 - x), valid for mu > 3.
inline std::vector<double> two_cycle(double mu) {
  const double s = std::sqrt((mu + 1.0) * (mu - 3.0));
  return {(mu + 1.0 - s) / (2.0 * mu), (mu + 1.0 + s) / (2.0 * mu)};
}

inline double two_cycle_multiplier(double mu) { return -mu * mu + 2.0 * mu + 4.0; }

// Real root of mu^3 - 2 mu^2 - 4 mu - 8 = 0.
inline double flip_family_end() {
  const double r = std::sqrt(33.0);
  return 2.0 * (1.0 + std::cbrt(19.0 + 3.0 * r) + std::cbrt(19.0 - 3.0 * r)) / 3.0;
}

inline bool closing(const Node& n) {
  return n.kind == NodeKind::Attracting && n.subtype != AttractorType::A1 && n.subtype != AttractorType::A4;
}

// Every structural property a tower must have; empty when all hold.
inline std::vector<std::string> tower_violations(const Tower& t) {
  std::vector<std::string> bad;
  const auto& ns = t.nodes;
  if (ns.empty()) return {"no nodes"};
  if (t.weights.size() + 1 != ns.size()) bad.push_back("weight count");
  if (t.edge_count() != ns.size() * (ns.size() - 1) / 2) bad.push_back("edge count");
  for (std::size_t j = 0; j + 1 < ns.size(); ++j) {
    const Node& a = ns[j];
    const Node& b = ns[j + 1];
    if (!(b.rho < a.rho)) bad.push_back("rho not decreasing at " + std::to_string(j));
    if (a.attracting()) bad.push_back("attracting node before the end");
    const int pa = a.region.period;
    const int pb = b.region.period;
    if (pa < 1 || pb % pa != 0) bad.push_back("period divisibility at " + std::to_string(j));
    if (j < t.weights.size() && t.weights[j] * pa != pb) bad.push_back("weight mismatch at " + std::to_string(j));
    if (closing(b)) continue;
    if (!b.attracting() && pb <= pa) bad.push_back("period not increasing at " + std::to_string(j));
    const bool w2 = j < t.weights.size() && t.weights[j] == 2;
    if (w2 != (b.region.kind == RegionKind::Flip)) bad.push_back("weight 2 vs flip at " + std::to_string(j));
    if (!nested_inside(b.region, a.region)) bad.push_back("nesting at " + std::to_string(j + 1));
  }
  if (!ns.back().attracting()) bad.push_back("last node not attracting");
  // non-periodic endpoints land on the boundary orbit within |T| steps
  for (const Node& n : ns) {
    const auto& r = n.region;
    if (r.degenerate) continue;
    for (const Interval& j : r.intervals) {
      for (double q : {j.lo, j.hi}) {
        bool periodic = false;
        for (double p : r.base_points) periodic = periodic || std::abs(p - q) < 1e-12;
        if (periodic) continue;
        double x = q;
        bool hit = false;
        for (int s = 1; s <= r.period && !hit; ++s) {
          x = logistic(t.mu, x);
          for (double p : r.base_points) hit = hit || std::abs(p - x) < 1e-7;
        }
        if (!hit) bad.push_back("endpoint misses orbit(T) at node " + std::to_string(n.index));
      }
    }
  }
  return bad;
}

}  // namespace crtower::testing
