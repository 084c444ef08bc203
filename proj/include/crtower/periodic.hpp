#pragma once

#include <vector>

#include "crtower/map_core.hpp"

namespace crtower {

enum class OrbitKind { Regular, Flip, Superstable };
enum class Stability { Attracting, Repelling, Neutral };

const char* to_string(OrbitKind kind);
const char* to_string(Stability stability);

/// A periodic orbit of a view, points in dynamical order starting from the
/// point nearest c.
struct PeriodicOrbit {
  std::vector<double> points;
  int period = 0;  // under the view
  int step = 1;    // view step; base-map period is period * step
  double multiplier = 0.0;
  OrbitKind kind = OrbitKind::Regular;
  Stability stability = Stability::Repelling;

  int base_period() const { return period * step; }
  double nearest_to_critical() const { return points.front(); }
  double rho() const;
};

struct Classification {
  OrbitKind kind;
  Stability stability;
  int region_period;  // in base-map steps: k if regular, 2k if flip
};

Classification classify_orbit(const PeriodicOrbit& orbit);

/// Builds the orbit of `point` under the view, polishing every orbit point
/// and computing the multiplier. `point` should already be close to a
/// period-k point.
PeriodicOrbit make_orbit(const MapView& view, double point, int k);

struct OrbitScan {
  std::vector<PeriodicOrbit> orbits;
  std::size_t root_count = 0;
  /// Set when some orbit point was not among the scanned roots, which means
  /// the grid was too coarse to separate neighbouring roots.
  bool coarse_scan = false;
};

/// All orbits of exact period k of the view found by a uniform scan of
/// F^k(x) - x over the whole domain.
OrbitScan find_periodic_orbits(const MapView& view, int k, int scan_density);

/// Same as find_periodic_orbits restricted to roots inside `window`; orbit
/// points outside the window are obtained by iteration and polished.
OrbitScan find_periodic_orbits_in(const MapView& view, int k, Interval window, int scan_density);

/// Roots of F^k(x) - x in `window`, refined to kTolRoot and polished.
std::vector<double> periodic_roots(const MapView& view, int k, Interval window, int scan_density);

/// Smallest j dividing k with |F^j(x) - x| <= tol.
int minimal_period(const MapView& view, double x, int k, double tol = 1e-9);

struct WindowRecord {
  int period = 0;
  double mu_birth = 0.0;
  double mu_end = 0.0;
};

/// Whether the base map at mu has a real orbit of exact period k.
bool has_period_orbit(double mu, int k);

/// Parameter at which a period-k orbit pair is created (saddle-node with
/// D = +1). Bisection on orbit existence followed by a Newton polish of
/// (F^k(x) = x, (F^k)'(x) = 1) when it converges.
double solve_window_birth(int k, Interval mu_bracket);

/// Boundary point p1(mu) of the period-k_region cyclic trapping region
/// family: the repelling orbit point nearest c among regular period-k_region
/// orbits and flip period-k_region/2 orbits.
std::optional<PeriodicOrbit> region_boundary_orbit(double mu, int k_region);

/// Signed crisis residual: negative while l^preperiod(c) stays on the c side
/// of p1, zero at the crisis.
double crisis_residual(double mu, int k_region, int preperiod);

/// Parameter solving l^preperiod(c) = p1(mu) by bisection.
double solve_crisis(int k_region, int preperiod, Interval mu_bracket);

/// Birth and first crisis of the period-k window inside the bracket.
WindowRecord solve_window(int k, Interval mu_bracket);

}  // namespace crtower
