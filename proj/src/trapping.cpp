#include "crtower/trapping.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crtower {

namespace {

std::optional<double> branch_preimage(double mu, double y, bool right) {
  double disc = 0.25 - y / mu;
  if (disc < 0.0) {
    if (disc < -1e-15) return std::nullopt;
    disc = 0.0;
  }
  return kCritical + (right ? 1.0 : -1.0) * std::sqrt(disc);
}

double distance_outside(const Interval& j, double x) {
  if (x < j.lo) return j.lo - x;
  if (x > j.hi) return x - j.hi;
  return 0.0;
}

std::string located(const char* what, int index, double overshoot) {
  std::ostringstream os;
  os.precision(6);
  os << what << " at J_" << index << " (overshoot " << overshoot << ")";
  return os.str();
}

// period, kind, p1 and the boundary orbit under single l steps
CyclicTrappingRegion skeleton(const MapView& view, const PeriodicOrbit& orbit) {
  if (orbit.points.empty()) throw InputError("empty orbit");
  const double mu = view.mu();
  const int s = view.step();
  const int big_k = orbit.period * s;
  CyclicTrappingRegion region;
  region.boundary_orbit = orbit;
  region.p1 = orbit.nearest_to_critical();
  region.kind = orbit.kind == OrbitKind::Flip ? RegionKind::Flip : RegionKind::Regular;
  region.period = region.kind == RegionKind::Flip ? 2 * big_k : big_k;
  std::vector<double>& p = region.base_points;
  p.resize(static_cast<std::size_t>(big_k));
  for (int i = 0; i < big_k; ++i) {
    const auto u = static_cast<std::size_t>(i);
    p[u] = i % s == 0 ? orbit.points[static_cast<std::size_t>(i / s)] : logistic(mu, p[u - 1]);
  }
  return region;
}

}  // namespace

const char* to_string(RegionKind kind) { return kind == RegionKind::Flip ? "flip" : "regular"; }

bool CyclicTrappingRegion::interior_contains(double x) const {
  return std::any_of(intervals.begin(), intervals.end(), [x](const Interval& j) { return j.interior_contains(x); });
}

CyclicTrappingRegion degenerate_region(const MapView& view, const PeriodicOrbit& orbit) {
  CyclicTrappingRegion region = skeleton(view, orbit);
  region.degenerate = true;
  region.q1 = region.p1;
  const auto k = region.base_points.size();
  for (int i = 0; i < region.period; ++i) {
    const double x = region.base_points[static_cast<std::size_t>(i) % k];
    region.intervals.push_back(Interval{x, x});
  }
  return region;
}

CyclicTrappingRegion build_cyclic_region(const MapView& view, const PeriodicOrbit& orbit) {
  if (orbit.points.empty()) throw InputError("empty orbit");
  if (orbit.kind == OrbitKind::Superstable || std::abs(orbit.nearest_to_critical() - kCritical) <= kTolRoot)
    return degenerate_region(view, orbit);
  CyclicTrappingRegion region = skeleton(view, orbit);
  const double mu = view.mu();
  const int r = region.period;
  const std::vector<double>& p = region.base_points;
  auto p_at = [&](int i) { return p[static_cast<std::size_t>(i) % p.size()]; };

  try {
    region.q1 = symmetric_point(view, region.p1);
  } catch (const NotFoundError&) {
    throw ConstructionError("boundary point has no symmetric partner in the view", 1, 0.0);
  }
  std::vector<double> q(static_cast<std::size_t>(r));
  q[0] = region.q1;
  for (int i = r - 1; i >= 1; --i) {
    const double target = q[static_cast<std::size_t>((i + 1) % r)];
    const auto pre = branch_preimage(mu, target, p_at(i) > kCritical);
    if (!pre) throw ConstructionError(located("endpoint has no preimage", i + 1, target - mu / 4.0), i + 1, target - mu / 4.0);
    q[static_cast<std::size_t>(i)] = *pre;
  }
  for (int i = 0; i < r; ++i) region.intervals.push_back(Interval::spanning(p_at(i), q[static_cast<std::size_t>(i)]));

  const Interval& j1 = region.intervals.front();
  if (!j1.interior_contains(kCritical)) throw ConstructionError("critical point not interior to J_1", 1, 0.0);
  const Interval& j2 = region.intervals[static_cast<std::size_t>(r > 1 ? 1 : 0)];
  const double over = distance_outside(j2, mu / 4.0);
  if (over > kTolRegion) throw ConstructionError(located("critical value escapes", r > 1 ? 2 : 1, over), r > 1 ? 2 : 1, over);
  for (int i = 1; i < r; ++i) {
    if (region.intervals[static_cast<std::size_t>(i)].interior_contains(kCritical))
      throw ConstructionError(located("critical point inside", i + 1, 0.0), i + 1, 0.0);
  }
  std::vector<Interval> sorted = region.intervals;
  std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double overlap = sorted[i - 1].hi - sorted[i].lo;
    if (overlap > kTolRegion) throw ConstructionError(located("interiors overlap", static_cast<int>(i) + 1, overlap), static_cast<int>(i) + 1, overlap);
  }
  if (mu >= 4.0) region.degenerate = true;
  return region;
}

RegionReport verify_region(const MapView& view, const CyclicTrappingRegion& region, int samples) {
  if (samples < 100) throw InputError("verify_region needs at least 100 samples per interval");
  RegionReport rep;
  const double mu = view.mu();
  const int r = static_cast<int>(region.intervals.size());
  for (int i = 0; i < r; ++i) {
    const Interval& j = region.intervals[static_cast<std::size_t>(i)];
    const Interval& next = region.intervals[static_cast<std::size_t>((i + 1) % r)];
    // the critical value is the extreme image of J_1
    if (i == 0 && j.interior_contains(kCritical)) {
      const double d = distance_outside(next, logistic(mu, kCritical));
      if (d > rep.max_overshoot) {
        rep.max_overshoot = d;
        rep.worst_interval = i + 1;
      }
    }
    for (int n = 0; n < samples; ++n) {
      const double x = n == samples - 1 ? j.hi : j.lo + j.width() * n / (samples - 1);
      const double d = distance_outside(next, logistic(mu, x));
      if (d > rep.max_overshoot) {
        rep.max_overshoot = d;
        rep.worst_interval = i + 1;
      }
    }
  }
  rep.contains_critical = region.degenerate || (!region.intervals.empty() && region.first().interior_contains(kCritical));
  std::vector<Interval> sorted = region.intervals;
  std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  rep.disjoint = true;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i - 1].hi - sorted[i].lo > kTolRegion) rep.disjoint = false;
  }
  rep.pass = rep.max_overshoot <= kTolRegion && rep.disjoint && rep.contains_critical;
  return rep;
}

std::optional<int> escape_time(const MapView& view, const CyclicTrappingRegion& region, double x, int n_max) {
  if (n_max < 1) throw InputError("n_max must be positive");
  if (region.degenerate) return std::nullopt;
  const double mu = view.mu();
  for (int n = 0; n <= n_max; ++n) {
    if (region.interior_contains(x)) return n;
    x = logistic(mu, x);
  }
  return std::nullopt;
}

bool nested_inside(const CyclicTrappingRegion& inner, const CyclicTrappingRegion& outer) {
  return std::all_of(inner.intervals.begin(), inner.intervals.end(), [&](const Interval& a) {
    return std::any_of(outer.intervals.begin(), outer.intervals.end(),
                       [&](const Interval& b) { return a.lo > b.lo && a.hi < b.hi; });
  });
}

}  // namespace crtower
