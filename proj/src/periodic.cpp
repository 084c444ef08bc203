#include "crtower/periodic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace crtower {

namespace {

constexpr double kMergeDistance = 10.0 * kTolRoot;
constexpr double kGolden = 0.6180339887498949;

struct Residual {
  double g;   // F^k(x) - x
  double dg;  // (F^k)'(x) - 1
};

double residual(const MapView& v, double x, int k) {
  double y = x;
  for (int i = 0; i < k; ++i) y = v.apply(y);
  return y - x;
}

Residual residual_with_slope(const MapView& v, double x, int k) {
  const double mu = v.mu();
  const long long n = static_cast<long long>(k) * v.step();
  double y = x;
  double d = 1.0;
  for (long long i = 0; i < n; ++i) {
    d *= logistic_slope(mu, y);
    y = logistic(mu, y);
  }
  return {y - x, d - 1.0};
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// a carries sign sa; the other end carries -sa
double bisect(const MapView& v, int k, double a, double b, int sa) {
  while (b - a > kTolRoot) {
    const double m = 0.5 * (a + b);
    const double gm = residual(v, m, k);
    if (gm == 0.0) return m;
    if (sign_of(gm) == sa) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Newton steps that only ever reduce |g| and stay inside [a, b].
double polish(const MapView& v, int k, double x, double a, double b) {
  Residual r = residual_with_slope(v, x, k);
  for (int it = 0; it < 6 && r.g != 0.0; ++it) {
    if (r.dg == 0.0 || !std::isfinite(r.dg)) break;
    const double xn = x - r.g / r.dg;
    if (!(xn >= a && xn <= b)) break;
    const Residual rn = residual_with_slope(v, xn, k);
    if (!(std::abs(rn.g) < std::abs(r.g))) break;
    x = xn;
    r = rn;
  }
  return x;
}

// Minimizes s*g over [a, b] by golden section; returns the minimizer.
double golden_min(const MapView& v, int k, double a, double b, int s) {
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = s * residual(v, x1, k);
  double f2 = s * residual(v, x2, k);
  while (b - a > 0.1 * kTolRoot) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = s * residual(v, x1, k);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = s * residual(v, x2, k);
    }
    if (f1 <= 0.0) return x1;
    if (f2 <= 0.0) return x2;
  }
  return 0.5 * (a + b);
}

std::vector<double> merge_sorted(std::vector<double> roots) {
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (!out.empty() && r - out.back() <= kMergeDistance) continue;
    out.push_back(r);
  }
  return out;
}

void rotate_to_critical(std::vector<double>& pts) {
  auto it = std::min_element(pts.begin(), pts.end(), [](double a, double b) {
    return std::abs(a - kCritical) < std::abs(b - kCritical);
  });
  std::rotate(pts.begin(), it, pts.end());
}

const double* nearest(const std::vector<double>& sorted, double x) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  const double* best = nullptr;
  double bd = 0.0;
  if (it != sorted.end()) {
    best = &*it;
    bd = *it - x;
  }
  if (it != sorted.begin()) {
    const double* p = &*(it - 1);
    if (!best || x - *p < bd) best = p;
  }
  return best;
}

std::vector<double> orbit_points(const MapView& view, double x, int k, const std::vector<double>& roots) {
  const Interval& dom = view.domain();
  // polishing every point costs k^2 * step map evaluations
  const bool affordable = static_cast<double>(k) * k * view.step() <= 2e7;
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(k));
  pts.push_back(x);
  for (int i = 1; i < k; ++i) {
    double y = view.apply(pts.back());
    const double* r = nearest(roots, y);
    if (r && std::abs(*r - y) <= 1e-7) {
      y = *r;
    } else if (affordable) {
      y = polish(view, k, std::clamp(y, dom.lo, dom.hi), dom.lo, dom.hi);
    }
    pts.push_back(y);
  }
  return pts;
}

int count_orbits(double mu, int k) {
  const int density = std::max(1000 * k, 4000);
  return static_cast<int>(find_periodic_orbits(MapView::base(mu), k, density).orbits.size());
}

// Newton on (F^k(x) - x, (F^k)'(x) - 1) in the unknowns (x, mu).
std::optional<double> newton_fold(int k, double x, double mu) {
  auto F = [k](double xx, double mm) {
    const MapView v = MapView::base(std::clamp(mm, 1e-6, 4.0));
    const Residual r = residual_with_slope(v, xx, k);
    return Eigen::Vector2d(r.g, r.dg);
  };
  const double h = 1e-7;
  for (int it = 0; it < 40; ++it) {
    const Eigen::Vector2d f = F(x, mu);
    if (f.lpNorm<Eigen::Infinity>() < 1e-14) return mu;
    Eigen::Matrix2d J;
    J.col(0) = (F(x + h, mu) - F(x - h, mu)) / (2.0 * h);
    J.col(1) = (F(x, mu + h) - F(x, mu - h)) / (2.0 * h);
    const Eigen::Vector2d step = J.fullPivLu().solve(-f);
    if (!step.allFinite()) return std::nullopt;
    x += step(0);
    mu += step(1);
    if (!(mu > 0.0 && mu <= 4.0) || !(x >= 0.0 && x <= 1.0)) return std::nullopt;
    if (step.lpNorm<Eigen::Infinity>() < 1e-15) break;
  }
  const Eigen::Vector2d f = F(x, mu);
  if (f.lpNorm<Eigen::Infinity>() < 1e-11) return mu;
  return std::nullopt;
}

}  // namespace

const char* to_string(OrbitKind kind) {
  switch (kind) {
    case OrbitKind::Regular: return "regular";
    case OrbitKind::Flip: return "flip";
    case OrbitKind::Superstable: return "superstable";
  }
  return "?";
}

const char* to_string(Stability stability) {
  switch (stability) {
    case Stability::Attracting: return "attracting";
    case Stability::Repelling: return "repelling";
    case Stability::Neutral: return "neutral";
  }
  return "?";
}

double PeriodicOrbit::rho() const { return std::abs(points.front() - kCritical); }

Classification classify_orbit(const PeriodicOrbit& orbit) {
  const double d = orbit.multiplier;
  Classification c{};
  if (d < -kTolSuper) {
    c.kind = OrbitKind::Flip;
  } else if (d > kTolSuper) {
    c.kind = OrbitKind::Regular;
  } else {
    c.kind = OrbitKind::Superstable;
  }
  const double a = std::abs(d);
  if (a < 1.0 - kTolNeutral) {
    c.stability = Stability::Attracting;
  } else if (a > 1.0 + kTolNeutral) {
    c.stability = Stability::Repelling;
  } else {
    c.stability = Stability::Neutral;
  }
  c.region_period = c.kind == OrbitKind::Flip ? 2 * orbit.base_period() : orbit.base_period();
  return c;
}

int minimal_period(const MapView& view, double x, int k, double tol) {
  double y = x;
  for (int j = 1; j <= k; ++j) {
    y = view.apply(y);
    if (k % j == 0 && std::abs(y - x) <= tol) return j;
  }
  return k;
}

std::vector<double> periodic_roots(const MapView& view, int k, Interval window, int scan_density) {
  if (k < 1) throw InputError("period must be positive");
  if (scan_density < 2) throw InputError("scan density too small");
  const Interval& dom = view.domain();
  const double lo = std::max(window.lo, dom.lo);
  const double hi = std::min(window.hi, dom.hi);
  if (!(lo < hi)) return {};

  const int n = scan_density;
  std::vector<double> xs(static_cast<std::size_t>(n));
  std::vector<double> gs(xs.size());
  std::vector<int> sg(xs.size());
  for (int i = 0; i < n; ++i) {
    const double x = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
    xs[static_cast<std::size_t>(i)] = x;
    gs[static_cast<std::size_t>(i)] = residual(view, x, k);
  }

  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    sg[u] = sign_of(gs[u]);
    const bool end = i == 0 || i == n - 1;
    if (end && std::abs(gs[u]) <= kTolRoot) {
      // a root sitting on the scan boundary; its sign just inside follows g'
      roots.push_back(xs[u]);
      const int s = sign_of(residual_with_slope(view, xs[u], k).dg);
      sg[u] = i == 0 ? s : -s;
    } else if (gs[u] == 0.0) {
      roots.push_back(xs[u]);
    }
  }

  for (int i = 0; i + 1 < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (sg[u] != 0 && sg[u + 1] != 0 && sg[u] != sg[u + 1]) {
      const double r = bisect(view, k, xs[u], xs[u + 1], sg[u]);
      roots.push_back(polish(view, k, r, xs[u], xs[u + 1]));
    }
  }

  // near-tangent pairs hidden inside one cell
  for (int i = 1; i + 1 < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const int s = sg[u];
    if (s == 0 || sg[u - 1] != s || sg[u + 1] != s) continue;
    if (!(s * gs[u] < s * gs[u - 1] && s * gs[u] <= s * gs[u + 1])) continue;
    const double m = golden_min(view, k, xs[u - 1], xs[u + 1], s);
    const double gm = residual(view, m, k);
    if (s * gm > 0.0) continue;
    if (gm == 0.0) {
      roots.push_back(m);
      continue;
    }
    roots.push_back(polish(view, k, bisect(view, k, xs[u - 1], m, s), xs[u - 1], m));
    roots.push_back(polish(view, k, bisect(view, k, m, xs[u + 1], -s), m, xs[u + 1]));
  }

  return merge_sorted(std::move(roots));
}

PeriodicOrbit make_orbit(const MapView& view, double point, int k) {
  if (k < 1) throw InputError("period must be positive");
  const Interval& dom = view.domain();
  const double x = polish(view, k, std::clamp(point, dom.lo, dom.hi), dom.lo, dom.hi);
  PeriodicOrbit orbit;
  orbit.points = orbit_points(view, x, k, {});
  rotate_to_critical(orbit.points);
  orbit.period = k;
  orbit.step = view.step();
  orbit.multiplier = iterate_with_derivative(view, orbit.points.front(), k).derivative;
  const Classification c = classify_orbit(orbit);
  orbit.kind = c.kind;
  orbit.stability = c.stability;
  return orbit;
}

OrbitScan find_periodic_orbits_in(const MapView& view, int k, Interval window, int scan_density) {
  if (k < 1) throw InputError("period must be positive");
  if (scan_density < 1000 * k) throw InputError("scan density must be at least 1000 * period");
  OrbitScan scan;
  const std::vector<double> roots = periodic_roots(view, k, window, scan_density);
  scan.root_count = roots.size();
  std::vector<bool> used(roots.size(), false);

  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (minimal_period(view, roots[i], k) != k) continue;

    PeriodicOrbit orbit;
    orbit.points = orbit_points(view, roots[i], k, roots);
    for (double p : orbit.points) {
      const double* r = nearest(roots, p);
      if (r && std::abs(*r - p) <= 1e-8) {
        used[static_cast<std::size_t>(r - roots.data())] = true;
      } else if (window.contains(p)) {
        scan.coarse_scan = true;
      }
    }
    rotate_to_critical(orbit.points);
    orbit.period = k;
    orbit.step = view.step();
    orbit.multiplier = iterate_with_derivative(view, orbit.points.front(), k).derivative;
    const Classification c = classify_orbit(orbit);
    orbit.kind = c.kind;
    orbit.stability = c.stability;

    const bool seen = std::any_of(scan.orbits.begin(), scan.orbits.end(), [&](const PeriodicOrbit& o) {
      return std::abs(o.points.front() - orbit.points.front()) <= kMergeDistance;
    });
    if (!seen) scan.orbits.push_back(std::move(orbit));
  }
  return scan;
}

OrbitScan find_periodic_orbits(const MapView& view, int k, int scan_density) {
  return find_periodic_orbits_in(view, k, view.domain(), scan_density);
}

bool has_period_orbit(double mu, int k) { return count_orbits(mu, k) > 0; }

double solve_window_birth(int k, Interval mu_bracket) {
  if (k < 1) throw InputError("period must be positive");
  if (!(mu_bracket.lo < mu_bracket.hi) || mu_bracket.lo <= 0.0 || mu_bracket.hi > 4.0)
    throw InputError("bracket must be an increasing subinterval of (0, 4]");
  double lo = mu_bracket.lo;
  double hi = mu_bracket.hi;
  const int target = count_orbits(hi, k);
  if (count_orbits(lo, k) == target) throw NotFoundError("no change in the period-k orbit count across the bracket");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (count_orbits(mid, k) == target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double mu_bis = 0.5 * (lo + hi);

  // seed Newton at the closest pair of newborn roots
  const MapView v = MapView::base(hi);
  const OrbitScan scan = find_periodic_orbits(v, k, std::max(1000 * k, 4000));
  std::vector<double> pts;
  for (const auto& o : scan.orbits) pts.insert(pts.end(), o.points.begin(), o.points.end());
  std::sort(pts.begin(), pts.end());
  if (pts.empty()) return mu_bis;
  double x0 = pts.front();
  double gap = 2.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] - pts[i] < gap) {
      gap = pts[i + 1] - pts[i];
      x0 = 0.5 * (pts[i] + pts[i + 1]);
    }
  }
  const auto refined = newton_fold(k, x0, mu_bis);
  if (refined && mu_bracket.contains(*refined) && std::abs(*refined - mu_bis) <= 1e-8) return *refined;
  return mu_bis;
}

std::optional<PeriodicOrbit> region_boundary_orbit(double mu, int k_region) {
  if (k_region < 1) throw InputError("region period must be positive");
  const MapView v = MapView::base(mu);
  std::optional<PeriodicOrbit> best;
  auto consider = [&](int k, OrbitKind want) {
    const OrbitScan scan = find_periodic_orbits(v, k, std::max(1000 * k, 20000));
    for (const auto& o : scan.orbits) {
      if (o.kind != want || o.stability != Stability::Repelling) continue;
      if (!best || o.rho() > best->rho()) best = o;
    }
  };
  consider(k_region, OrbitKind::Regular);
  if (k_region % 2 == 0) consider(k_region / 2, OrbitKind::Flip);
  return best;
}

double crisis_residual(double mu, int k_region, int preperiod) {
  const auto orbit = region_boundary_orbit(mu, k_region);
  if (!orbit) throw NotFoundError("boundary orbit of the region family does not exist at this parameter");
  const double p1 = orbit->nearest_to_critical();
  double x = kCritical;
  for (int i = 0; i < preperiod; ++i) x = logistic(mu, x);
  return (p1 > kCritical ? 1.0 : -1.0) * (x - p1);
}

double solve_crisis(int k_region, int preperiod, Interval mu_bracket) {
  if (preperiod < 1) throw InputError("preperiod must be positive");
  if (!(mu_bracket.lo < mu_bracket.hi) || mu_bracket.lo <= 1.0 || mu_bracket.hi > 4.0)
    throw InputError("bracket must be an increasing subinterval of (1, 4]");
  double lo = mu_bracket.lo;
  double hi = mu_bracket.hi;
  const int slo = sign_of(crisis_residual(lo, k_region, preperiod));
  const int shi = sign_of(crisis_residual(hi, k_region, preperiod));
  if (shi == 0) return hi;
  if (slo == 0) return lo;
  if (slo == shi) throw NotFoundError("crisis residual has no sign change in the bracket");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const int sm = sign_of(crisis_residual(mid, k_region, preperiod));
    if (sm == 0) return mid;
    if (sm == slo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

WindowRecord solve_window(int k, Interval mu_bracket) {
  WindowRecord w;
  w.period = k;
  w.mu_birth = solve_window_birth(k, mu_bracket);
  const int preperiod = 2 * k;
  const double start = w.mu_birth + 1e-7;
  if (!(start < mu_bracket.hi)) throw NotFoundError("bracket ends at the window birth");
  const int s0 = sign_of(crisis_residual(start, k, preperiod));
  const double step = std::min(1e-4, (mu_bracket.hi - start) / 100.0);
  double prev = start;
  for (double mu = start + step;; mu += step) {
    if (mu > mu_bracket.hi) mu = mu_bracket.hi;
    if (sign_of(crisis_residual(mu, k, preperiod)) != s0) {
      w.mu_end = solve_crisis(k, preperiod, Interval{prev, mu});
      return w;
    }
    if (mu >= mu_bracket.hi) break;
    prev = mu;
  }
  throw NotFoundError("no crisis found inside the bracket");
}

}  // namespace crtower
