#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "crtower/map_core.hpp"
#include "crtower/periodic.hpp"

namespace crtower {

enum class RegionKind { Regular, Flip };

const char* to_string(RegionKind kind);

/// Cycle of intervals J_1, ..., J_r with disjoint interiors, c inside J_1,
/// and l(J_i) inside J_{i+1} (indices mod r). Intervals are stored at the
/// level of single applications of l, so r is the period in base-map steps.
struct CyclicTrappingRegion {
  std::vector<Interval> intervals;
  int period = 0;
  RegionKind kind = RegionKind::Regular;
  PeriodicOrbit boundary_orbit;
  // boundary orbit under single l steps, starting at p1
  std::vector<double> base_points;
  double p1 = 0.0;
  double q1 = 0.0;
  // zero-width intervals (superstable orbit) or the full interval at mu = 4
  bool degenerate = false;

  const Interval& first() const { return intervals.front(); }
  /// True when x lies in the interior of some J_i.
  bool interior_contains(double x) const;
};

/// Raised when the candidate intervals fail to trap at this parameter.
class ConstructionError : public std::runtime_error {
 public:
  ConstructionError(const std::string& what, int interval_index, double overshoot)
      : std::runtime_error(what), interval_index_(interval_index), overshoot_(overshoot) {}
  int interval_index() const { return interval_index_; }
  double overshoot() const { return overshoot_; }

 private:
  int interval_index_;
  double overshoot_;
};

/// Region whose first interval spans p1 (the orbit point nearest c) and its
/// symmetric partner. The remaining endpoints follow the maximal convention:
/// l(J_i) = J_{i+1} endpoint to endpoint for i >= 2 and l(J_r) = J_1.
CyclicTrappingRegion build_cyclic_region(const MapView& view, const PeriodicOrbit& orbit);

/// Zero-width intervals at the orbit points. Used for superstable orbits and
/// as a node marker when no interval cycle traps.
CyclicTrappingRegion degenerate_region(const MapView& view, const PeriodicOrbit& orbit);

struct RegionReport {
  bool pass = false;
  bool contains_critical = false;
  bool disjoint = false;
  double max_overshoot = 0.0;
  int worst_interval = -1;
};

/// Maps `samples` uniformly spaced points of every J_i one step forward and
/// measures how far they land outside J_{i+1}.
RegionReport verify_region(const MapView& view, const CyclicTrappingRegion& region, int samples);

/// Least n <= n_max with l^n(x) in the interior of the region.
std::optional<int> escape_time(const MapView& view, const CyclicTrappingRegion& region, double x, int n_max);

/// Every interval of `inner` lies in the interior of some interval of `outer`.
bool nested_inside(const CyclicTrappingRegion& inner, const CyclicTrappingRegion& outer);

}  // namespace crtower
