#include "crtower/tower.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace crtower {

namespace {

constexpr int kMaxBands = 64;

struct Probe {
  std::optional<PeriodicOrbit> cycle;
  std::vector<int> band_counts;
  // reach of the band holding c, per entry of band_counts
  std::vector<double> band_reach;
  // the critical orbit left the view's domain: precision is exhausted
  bool unresolved = false;
};

struct Candidate {
  int period;
  // J_1 of the window encloses the attractor band at c
  double min_halfwidth;
};

std::optional<PeriodicOrbit> interior_fixed_point(const MapView& view) {
  const OrbitScan scan = find_periodic_orbits(view, 1, 4000);
  const double skip = std::max(1e-9 * view.domain().width(), 100.0 * kTolRoot);
  for (const auto& o : scan.orbits) {
    if (std::abs(o.points.front() - view.boundary()) > skip) return o;
  }
  return std::nullopt;
}

MapView renormalize(double mu, const CyclicTrappingRegion& region) {
  return MapView::renormalized(mu, region.period, region.first(), region.p1);
}

std::optional<double> cyclic_bands(const std::vector<double>& orbit, const std::vector<double>& sorted,
                                   const std::vector<std::size_t>& gaps_desc, int n, double width) {
  std::vector<double> cuts;
  for (int i = 0; i < n - 1; ++i) {
    const std::size_t g = gaps_desc[static_cast<std::size_t>(i)];
    if (sorted[g + 1] - sorted[g] <= 1e-9 * width) return std::nullopt;
    cuts.push_back(0.5 * (sorted[g] + sorted[g + 1]));
  }
  std::sort(cuts.begin(), cuts.end());
  auto band = [&](double x) { return static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin()); };
  std::vector<int> next(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i + 1 < orbit.size(); ++i) {
    const auto a = static_cast<std::size_t>(band(orbit[i]));
    const int b = band(orbit[i + 1]);
    if (next[a] == -1) {
      next[a] = b;
    } else if (next[a] != b) {
      return std::nullopt;
    }
  }
  int at = 0;
  for (int step = 1; step <= n; ++step) {
    at = next[static_cast<std::size_t>(at)];
    if (at < 0) return std::nullopt;
    if (at == 0) {
      if (step != n) return std::nullopt;
      const int home = band(kCritical);
      double reach = 0.0;
      for (double x : orbit) {
        if (band(x) == home) reach = std::max(reach, std::abs(x - kCritical));
      }
      return reach;
    }
  }
  return std::nullopt;
}

Probe probe_attractor(const MapView& view, const TowerOptions& o) {
  Probe probe;
  const double width = view.domain().width();
  double x = kCritical;
  for (int i = 0; i < o.n_transient; ++i) x = view.apply(x);
  if (!view.contains(x)) {
    probe.unresolved = true;
    return probe;
  }

  double y = x;
  const int limit = std::min(o.n_detect, 4096);
  for (int m = 1; m <= limit; ++m) {
    y = view.apply(y);
    if (!view.contains(y)) {
      probe.unresolved = true;
      return probe;
    }
    if (std::abs(y - x) >= 1e-7 * width) continue;
    // chaotic near-returns expand strongly; skip them before any polishing
    if (std::abs(iterate_with_derivative(view, x, m).derivative) > 2.0) continue;
    const PeriodicOrbit orbit = make_orbit(view, x, m);
    if (minimal_period(view, orbit.points.front(), m) == m && std::abs(orbit.multiplier) <= 1.0 + kTolNeutral) {
      probe.cycle = orbit;
      break;
    }
  }

  std::vector<double> orbit(static_cast<std::size_t>(std::max(o.band_samples, 16)));
  for (auto& v : orbit) {
    v = x;
    x = view.apply(x);
  }
  if (!std::all_of(orbit.begin(), orbit.end(), [&](double v) { return view.contains(v); })) {
    probe.unresolved = true;
    return probe;
  }
  std::vector<double> sorted = orbit;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> gaps(sorted.size() - 1);
  std::iota(gaps.begin(), gaps.end(), std::size_t{0});
  std::sort(gaps.begin(), gaps.end(), [&](std::size_t a, std::size_t b) {
    return sorted[a + 1] - sorted[a] > sorted[b + 1] - sorted[b];
  });
  for (int n = 2; n <= kMaxBands; ++n) {
    if (const auto reach = cyclic_bands(orbit, sorted, gaps, n, width)) {
      probe.band_counts.push_back(n);
      probe.band_reach.push_back(*reach);
    }
  }
  return probe;
}

std::vector<Candidate> candidate_periods(const Probe& probe) {
  std::map<int, double> ds;
  auto add_divisors = [&](int n, double reach) {
    for (int d = 3; d <= std::min(n, kMaxBands); ++d) {
      if (n % d != 0) continue;
      auto [it, fresh] = ds.emplace(d, reach);
      if (!fresh) it->second = std::min(it->second, reach);
    }
  };
  if (probe.cycle) add_divisors(probe.cycle->period, probe.cycle->rho());
  for (std::size_t i = 0; i < probe.band_counts.size(); ++i) add_divisors(probe.band_counts[i], probe.band_reach[i]);
  std::vector<Candidate> out;
  for (const auto& [d, reach] : ds) out.push_back({d, 0.5 * reach});
  return out;
}

// Regular repelling d-orbit of the view whose region traps inside `outer`,
// searched on windows around c that halve in width.
std::optional<CyclicTrappingRegion> find_window(const MapView& view, Candidate cand, const CyclicTrappingRegion& outer,
                                                const TowerOptions& o) {
  const int d = cand.period;
  const Interval& dom = view.domain();
  const double half = std::min(kCritical - dom.lo, dom.hi - kCritical);
  const double floor = std::max({half * 1e-9, 0.1 * o.min_rho, cand.min_halfwidth});
  for (double w = half; w >= floor; w *= 0.5) {
    OrbitScan scan = find_periodic_orbits_in(view, d, Interval{kCritical - w, kCritical + w}, 1000 * d);
    std::sort(scan.orbits.begin(), scan.orbits.end(),
              [](const PeriodicOrbit& a, const PeriodicOrbit& b) { return a.rho() > b.rho(); });
    for (const auto& orbit : scan.orbits) {
      if (orbit.kind != OrbitKind::Regular || orbit.stability != Stability::Repelling) continue;
      CyclicTrappingRegion region;
      try {
        region = build_cyclic_region(view, orbit);
      } catch (const ConstructionError&) {
        continue;
      }
      if (!verify_region(view, region, 100).pass || !nested_inside(region, outer)) continue;
      return region;
    }
  }
  return std::nullopt;
}

std::vector<double> sample_cantor(const MapView& view, const CyclicTrappingRegion& inner, const TowerOptions& o) {
  const int s = view.step();
  const std::size_t want = static_cast<std::size_t>(std::max(64, o.cantor_samples / s));
  const double lo = view.domain().lo;
  const double quantum = view.domain().width() * 1e-10;
  std::vector<double> found;
  std::deque<double> queue;
  std::unordered_set<long long> seen;
  auto push = [&](double x) {
    if (seen.insert(std::llround((x - lo) / quantum)).second) {
      found.push_back(x);
      queue.push_back(x);
    }
  };
  // points outside [V^2(c), V(c)] are wandering preimages, not part of the node
  const double v1 = view.apply(kCritical);
  const double v2 = view.apply(v1);
  const double core_lo = std::min(v1, v2) - quantum;
  const double core_hi = std::max(v1, v2) + quantum;
  // endpoints such as q1 come back from preimage() a rounding error inside
  auto deep_inside = [&](double x) {
    const double margin = 100.0 * quantum;
    return std::any_of(inner.intervals.begin(), inner.intervals.end(),
                       [&](const Interval& j) { return x > j.lo + margin && x < j.hi - margin; });
  };
  for (double p : inner.boundary_orbit.points) push(p);
  while (!queue.empty() && found.size() < want) {
    const double y = queue.front();
    queue.pop_front();
    for (bool right : {false, true}) {
      const auto x = view.preimage(y, right);
      if (x && *x >= core_lo && *x <= core_hi && !deep_inside(*x)) push(*x);
    }
  }
  // carry the sample through the other intervals of the enclosing cycle
  std::vector<double> all;
  all.reserve(found.size() * static_cast<std::size_t>(s));
  for (double x : found) {
    double z = x;
    all.push_back(z);
    for (int j = 1; j < s; ++j) {
      z = logistic(view.mu(), z);
      all.push_back(z);
    }
  }
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<double> chaotic_sample(double mu, const TowerOptions& o) {
  std::vector<double> out(static_cast<std::size_t>(std::max(o.band_samples, 16)));
  if (mu >= 4.0) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(i) / static_cast<double>(out.size() - 1);
    return out;
  }
  double x = kCritical;
  for (int i = 0; i < o.n_transient; ++i) x = logistic(mu, x);
  for (auto& v : out) {
    v = x;
    x = logistic(mu, x);
  }
  return out;
}

Node periodic_attractor(const MapView& view, const PeriodicOrbit& orbit, int index) {
  Node n;
  n.index = index;
  n.kind = NodeKind::Attracting;
  n.subtype = std::abs(orbit.multiplier - 1.0) <= kTolCrisis ? AttractorType::A4 : AttractorType::A1;
  n.superstable = std::abs(orbit.multiplier) <= kTolSuper;
  n.orbit = orbit;
  n.p1 = orbit.nearest_to_critical();
  n.rho = orbit.rho();
  n.period = orbit.base_period();
  try {
    n.region = build_cyclic_region(view, orbit);
  } catch (const ConstructionError&) {
    n.region = degenerate_region(view, orbit);
  }
  n.attractor_sample = n.region.base_points;
  return n;
}

Node closing_node(const Tower& t, AttractorType type, const TowerOptions& o) {
  const Node& last = t.nodes.back();
  Node n;
  n.index = static_cast<int>(t.nodes.size());
  n.kind = NodeKind::Attracting;
  n.subtype = type;
  n.rho = 0.0;
  n.region = last.region;
  n.period = last.region.period;
  n.attractor_sample = chaotic_sample(t.mu, o);
  return n;
}

void compute_weights(Tower& t) {
  t.weights.clear();
  for (std::size_t j = 0; j + 1 < t.nodes.size(); ++j)
    t.weights.push_back(t.nodes[j + 1].region.period / std::max(1, t.nodes[j].region.period));
}

Interval image(double mu, Interval k) {
  const double a = logistic(mu, k.lo);
  const double b = logistic(mu, k.hi);
  Interval out = Interval::spanning(a, b);
  if (k.interior_contains(kCritical)) out.hi = logistic(mu, kCritical);
  return out;
}

std::vector<double> targets_of(const Node& n) {
  switch (n.kind) {
    case NodeKind::Zero: return {0.0};
    case NodeKind::FlipOrbit:
    case NodeKind::CantorSet: return n.periodic_points();
    case NodeKind::Attracting:
      if (n.subtype == AttractorType::A1 || n.subtype == AttractorType::A4) return n.attractor_sample;
      return {kCritical};
  }
  return {};
}

}  // namespace

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Zero: return "Zero";
    case NodeKind::FlipOrbit: return "FlipOrbit";
    case NodeKind::CantorSet: return "CantorSet";
    case NodeKind::Attracting: return "Attracting";
  }
  return "?";
}

const char* to_string(AttractorType type) {
  switch (type) {
    case AttractorType::None: return "none";
    case AttractorType::A1: return "A1";
    case AttractorType::A2: return "A2";
    case AttractorType::A3: return "A3";
    case AttractorType::A4: return "A4";
    case AttractorType::A5: return "A5";
    case AttractorType::A3Suspected: return "A3-suspected";
  }
  return "?";
}

std::vector<double> Node::periodic_points() const {
  if (kind == NodeKind::Zero) return {0.0};
  if (!orbit) return {};
  return region.base_points;
}

Tower build_tower(double mu, const TowerOptions& o) {
  if (!(mu > 1.0 && mu <= 4.0)) throw InputError("mu must lie in (1, 4]");
  if (o.max_depth < 1) throw InputError("max_depth must be positive");
  Tower t;
  t.mu = mu;
  const MapView base = MapView::base(mu);

  Node zero;
  zero.kind = NodeKind::Zero;
  zero.rho = kCritical;
  zero.p1 = 0.0;
  zero.orbit = make_orbit(base, 0.0, 1);
  zero.region = build_cyclic_region(base, *zero.orbit);
  zero.period = 1;
  if (mu >= 4.0) {
    // the whole interval is a single chain class
    t.degenerate = true;
    zero.kind = NodeKind::Attracting;
    zero.subtype = AttractorType::A2;
    zero.rho = 0.0;
    zero.attractor_sample = chaotic_sample(mu, o);
    t.nodes.push_back(zero);
    return t;
  }
  t.nodes.push_back(zero);

  MapView view = base;
  auto truncate = [&] {
    t.truncated = true;
    t.nodes.push_back(closing_node(t, AttractorType::A3Suspected, o));
  };
  auto deep_enough = [&](const CyclicTrappingRegion& r) {
    return std::abs(r.p1 - kCritical) < o.min_rho || r.period > o.max_step;
  };

  for (;;) {
    const int index = static_cast<int>(t.nodes.size());
    if (index > o.max_depth) {
      truncate();
      break;
    }
    const CyclicTrappingRegion outer = t.nodes.back().region;

    const auto pstar = interior_fixed_point(view);
    if (pstar && std::abs(pstar->multiplier) <= 1.0 + kTolNeutral) {
      t.nodes.push_back(periodic_attractor(view, *pstar, index));
      break;
    }
    if (pstar && pstar->multiplier < 0.0) {
      std::optional<CyclicTrappingRegion> region;
      try {
        region = build_cyclic_region(view, *pstar);
      } catch (const ConstructionError&) {
      }
      if (region && verify_region(view, *region, 100).pass && nested_inside(*region, outer)) {
        if (deep_enough(*region)) {
          truncate();
          break;
        }
        Node n;
        n.index = index;
        n.kind = NodeKind::FlipOrbit;
        n.orbit = *pstar;
        n.p1 = pstar->nearest_to_critical();
        n.rho = pstar->rho();
        n.period = pstar->base_period();
        n.region = *region;
        t.nodes.push_back(std::move(n));
        view = renormalize(mu, *region);
        continue;
      }
    }

    const Probe probe = probe_attractor(view, o);
    if (probe.unresolved) {
      truncate();
      break;
    }
    std::optional<CyclicTrappingRegion> window;
    for (const Candidate& cand : candidate_periods(probe)) {
      window = find_window(view, cand, outer, o);
      if (window) break;
    }
    if (window) {
      if (deep_enough(*window)) {
        truncate();
        break;
      }
      Node n;
      n.index = index;
      n.kind = NodeKind::CantorSet;
      n.orbit = window->boundary_orbit;
      n.p1 = window->p1;
      n.rho = std::abs(window->p1 - kCritical);
      n.period = window->boundary_orbit.base_period();
      n.cantor_sample = sample_cantor(view, *window, o);
      n.region = *window;
      t.nodes.push_back(std::move(n));
      view = renormalize(mu, *window);
      continue;
    }
    if (probe.cycle) {
      t.nodes.push_back(periodic_attractor(view, *probe.cycle, index));
      break;
    }
    const double v2 = view.apply(view.apply(kCritical));
    const bool crisis = std::abs(v2 - view.boundary()) <= kTolCrisis;
    t.nodes.push_back(closing_node(t, crisis ? AttractorType::A5 : AttractorType::A2, o));
    break;
  }
  compute_weights(t);
  return t;
}

EdgeWitness edge_witness(const Tower& tower, int i, int j, double delta, int n_max) {
  const int count = static_cast<int>(tower.nodes.size());
  if (!(0 <= i && i < j && j < count)) throw InputError("edge_witness needs 0 <= i < j < node count");
  if (!(delta > 0.0) || n_max < 1) throw InputError("edge_witness needs delta > 0 and n_max >= 1");
  const Node& from = tower.nodes[static_cast<std::size_t>(i)];
  if (!from.p1) throw InputError("source node has no periodic point");
  const double mu = tower.mu;
  const double p = *from.p1;
  const double sigma = p < kCritical ? 1.0 : -1.0;
  const std::vector<double> targets = targets_of(tower.nodes[static_cast<std::size_t>(j)]);
  if (targets.empty()) throw NotFoundError("target node has no sample points");

  constexpr int kGrid = 4096;
  for (int m = 0; m <= 40; ++m) {
    const double off = delta * std::ldexp(1.0, -m);
    const Interval k = Interval::spanning(p, p + sigma * off);
    Interval img = k;
    for (int n = 1; n <= n_max; ++n) {
      img = image(mu, img);
      for (double y : targets) {
        if (!img.contains(y)) continue;
        // solve l^n(x) = y on k through a sign change
        auto f = [&](double x) {
          for (int s = 0; s < n; ++s) x = logistic(mu, x);
          return x - y;
        };
        double xa = k.lo;
        double fa = f(xa);
        for (int g = 1; g <= kGrid; ++g) {
          const double xb = k.lo + k.width() * g / kGrid;
          const double fb = f(xb);
          if ((fa <= 0.0) != (fb <= 0.0) || fb == 0.0) {
            double a = xa, b = xb;
            double sa = fa;
            for (int it = 0; it < 200 && b - a > 4e-16 * std::max(1.0, std::abs(a)); ++it) {
              const double mid = 0.5 * (a + b);
              const double fm = f(mid);
              if ((fm <= 0.0) == (sa <= 0.0)) {
                a = mid;
                sa = fm;
              } else {
                b = mid;
              }
            }
            EdgeWitness w;
            w.start = fb == 0.0 ? xb : 0.5 * (a + b);
            double z = w.start;
            w.path.push_back(z);
            for (int s = 0; s < n; ++s) {
              z = logistic(mu, z);
              w.path.push_back(z);
            }
            return w;
          }
          xa = xb;
          fa = fb;
        }
      }
      if (img.width() >= 1.0 - 1e-15) break;
    }
  }
  std::ostringstream os;
  os << "no orbit from N" << i << " to N" << j << " found within " << n_max << " steps";
  throw NotFoundError(os.str());
}

}  // namespace crtower
