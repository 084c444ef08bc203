#include "crtower/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace crtower {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_into(double x, double lo, double len) {
  double y = std::fmod(x - lo, len);
  if (y < 0.0) y += len;
  return lo + y;
}

std::vector<double> node_points(const Node& n) {
  switch (n.kind) {
    case NodeKind::Zero:
    case NodeKind::FlipOrbit: return n.periodic_points();
    case NodeKind::CantorSet: return n.cantor_sample;
    case NodeKind::Attracting: return n.attractor_sample;
  }
  return {};
}

double required_coverage(const Node& n) {
  const bool sampled = n.kind == NodeKind::CantorSet ||
                       (n.kind == NodeKind::Attracting && n.subtype != AttractorType::A1 && n.subtype != AttractorType::A4);
  return sampled ? 0.9 : 1.0;
}

}  // namespace

MapSpec logistic_spec(double mu) {
  if (!(mu > 0.0 && mu <= 4.0)) throw InputError("mu must lie in (0, 4]");
  return MapSpec{[mu](double x) { return logistic(mu, x); }, 0.0, 1.0, "logistic"};
}

MapSpec circle_spec(double beta) {
  if (!(beta > 0.0 && beta * kTwoPi < 2.0)) throw InputError("beta must keep a < Psi(a) < 2 pi");
  return MapSpec{[beta](double a) { return wrap_into(a + beta * (1.0 - std::cos(a)), 0.0, kTwoPi); }, 0.0, kTwoPi,
                 "circle"};
}

double GridSystem::distance(double u, double v) const {
  const double d = std::abs(u - v);
  if (!wrap) return d;
  const double len = hi - lo;
  const double m = std::fmod(d, len);
  return std::min(m, len - m);
}

int GridSystem::nearest_cell(double x) const {
  if (wrap) {
    const auto a = static_cast<long long>(std::llround((wrap_into(x, lo, hi - lo) - lo) / h));
    return static_cast<int>(a % size);
  }
  const auto a = std::llround((x - lo) / h);
  return static_cast<int>(std::clamp<long long>(a, 0, size - 1));
}

GridSystem build_grid_graph(const MapSpec& spec, int cells, double epsilon, bool wrap, std::size_t edge_budget) {
  if (cells < 100) throw InputError("grid needs at least 100 cells");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  GridSystem g;
  g.size = cells;
  g.lo = spec.lo;
  g.hi = spec.hi;
  g.epsilon = epsilon;
  g.wrap = wrap;
  g.h = wrap ? (spec.hi - spec.lo) / cells : (spec.hi - spec.lo) / (cells - 1);
  const double reach = epsilon + 0.5 * g.h;
  const double len = spec.hi - spec.lo;

  g.cells.resize(static_cast<std::size_t>(cells));
  g.images.resize(g.cells.size());
  for (int a = 0; a < cells; ++a) {
    const auto u = static_cast<std::size_t>(a);
    g.cells[u] = spec.lo + a * g.h;
    g.images[u] = spec.f(g.cells[u]);
  }

  // contiguous index range [first, last] per cell, trimmed to the exact rule
  std::vector<long long> first(g.cells.size());
  std::vector<long long> last(g.cells.size());
  std::size_t total = 0;
  auto within = [&](double y, long long b) {
    const double xb = spec.lo + static_cast<double>(b) * g.h;
    return g.distance(y, xb) <= reach;
  };
  for (int a = 0; a < cells; ++a) {
    const auto u = static_cast<std::size_t>(a);
    const double y = g.images[u];
    const double t = (y - spec.lo) / g.h;
    long long b0 = std::llround(t);
    long long lo_i = static_cast<long long>(std::ceil(t - reach / g.h)) - 1;
    long long hi_i = static_cast<long long>(std::floor(t + reach / g.h)) + 1;
    if (!wrap) {
      b0 = std::clamp<long long>(b0, 0, cells - 1);
      lo_i = std::max<long long>(lo_i, 0);
      hi_i = std::min<long long>(hi_i, cells - 1);
    }
    while (lo_i < b0 && !within(y, lo_i)) ++lo_i;
    while (hi_i > b0 && !within(y, hi_i)) --hi_i;
    lo_i = std::min(lo_i, b0);
    hi_i = std::max(hi_i, b0);
    if (wrap && hi_i - lo_i + 1 >= cells) {
      lo_i = 0;
      hi_i = cells - 1;
    }
    first[u] = lo_i;
    last[u] = hi_i;
    total += static_cast<std::size_t>(hi_i - lo_i + 1);
    if (total > edge_budget) throw ResourceError("edge budget exceeded; lower the grid size or epsilon");
  }
  (void)len;

  g.offsets.resize(g.cells.size() + 1);
  g.targets.reserve(total);
  for (int a = 0; a < cells; ++a) {
    const auto u = static_cast<std::size_t>(a);
    g.offsets[u] = static_cast<std::uint32_t>(g.targets.size());
    std::vector<std::uint32_t> row;
    for (long long b = first[u]; b <= last[u]; ++b) {
      long long idx = b % cells;
      if (idx < 0) idx += cells;
      row.push_back(static_cast<std::uint32_t>(idx));
    }
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    g.targets.insert(g.targets.end(), row.begin(), row.end());
  }
  g.offsets.back() = static_cast<std::uint32_t>(g.targets.size());
  return g;
}

Condensation condense(const GridSystem& g) {
  const int n = g.size;
  Condensation c;
  c.component_of.assign(static_cast<std::size_t>(n), -1);

  // iterative Tarjan; components come out sinks first
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::uint32_t>> call;
  int counter = 0;
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] != -1) continue;
    call.emplace_back(root, g.offsets[static_cast<std::size_t>(root)]);
    index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = 1;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      const auto uv = static_cast<std::size_t>(v);
      if (next < g.offsets[uv + 1]) {
        const int w = static_cast<int>(g.targets[next++]);
        const auto uw = static_cast<std::size_t>(w);
        if (index[uw] == -1) {
          index[uw] = low[uw] = counter++;
          stack.push_back(w);
          on_stack[uw] = 1;
          call.emplace_back(w, g.offsets[uw]);
        } else if (on_stack[uw]) {
          low[uv] = std::min(low[uv], index[uw]);
        }
        continue;
      }
      if (low[uv] == index[uv]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          c.component_of[static_cast<std::size_t>(w)] = c.component_count;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        c.members.push_back(std::move(comp));
        ++c.component_count;
      }
      const int done = v;
      call.pop_back();
      if (!call.empty()) {
        const auto up = static_cast<std::size_t>(call.back().first);
        low[up] = std::min(low[up], low[static_cast<std::size_t>(done)]);
      }
    }
  }

  // reverse Tarjan order is topological (upstream first)
  for (int k = c.component_count - 1; k >= 0; --k) {
    const auto& m = c.members[static_cast<std::size_t>(k)];
    bool rec = m.size() > 1;
    if (!rec) {
      const auto u = static_cast<std::size_t>(m.front());
      for (std::uint32_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
        if (static_cast<int>(g.targets[e]) == m.front()) rec = true;
      }
    }
    if (rec) c.recurrent.push_back(k);
  }

  // reachability between recurrent components over the component graph
  const std::size_t r = c.recurrent.size();
  std::vector<int> position(static_cast<std::size_t>(c.component_count), -1);
  for (std::size_t i = 0; i < r; ++i) position[static_cast<std::size_t>(c.recurrent[i])] = static_cast<int>(i);
  c.reach.assign(r, std::vector<bool>(r, false));
  std::vector<char> seen;
  std::vector<int> queue;
  for (std::size_t i = 0; i < r; ++i) {
    seen.assign(static_cast<std::size_t>(c.component_count), 0);
    queue.assign(1, c.recurrent[i]);
    seen[static_cast<std::size_t>(c.recurrent[i])] = 1;
    while (!queue.empty()) {
      const int k = queue.back();
      queue.pop_back();
      if (position[static_cast<std::size_t>(k)] >= 0) c.reach[i][static_cast<std::size_t>(position[static_cast<std::size_t>(k)])] = true;
      for (int v : c.members[static_cast<std::size_t>(k)]) {
        const auto uv = static_cast<std::size_t>(v);
        for (std::uint32_t e = g.offsets[uv]; e < g.offsets[uv + 1]; ++e) {
          const int kk = c.component_of[g.targets[e]];
          if (!seen[static_cast<std::size_t>(kk)]) {
            seen[static_cast<std::size_t>(kk)] = 1;
            queue.push_back(kk);
          }
        }
      }
    }
  }
  // group recurrent components whose cells are grid neighbours
  std::vector<int> parent(r);
  for (std::size_t i = 0; i < r; ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (std::size_t i = 0; i < r; ++i) {
    for (int v : c.members[static_cast<std::size_t>(c.recurrent[i])]) {
      for (int nb : {v - 1, v + 1}) {
        if (g.wrap) nb = (nb + n) % n;
        if (nb < 0 || nb >= n) continue;
        const int pj = position[static_cast<std::size_t>(c.component_of[static_cast<std::size_t>(nb)])];
        if (pj < 0) continue;
        const int a = find(static_cast<int>(i));
        const int b = find(pj);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
    }
  }
  std::vector<int> class_of(r, -1);
  for (std::size_t i = 0; i < r; ++i) {
    const int root = find(static_cast<int>(i));
    if (class_of[static_cast<std::size_t>(root)] < 0) {
      class_of[static_cast<std::size_t>(root)] = static_cast<int>(c.classes.size());
      c.classes.emplace_back();
    }
    c.classes[static_cast<std::size_t>(class_of[static_cast<std::size_t>(root)])].push_back(static_cast<int>(i));
  }
  const std::size_t nc = c.classes.size();
  auto reaches = [&](std::size_t a, std::size_t b) {
    for (int i : c.classes[a]) {
      for (int j : c.classes[b]) {
        if (c.reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) return true;
      }
    }
    return false;
  };
  // upstream first: a class reaching more classes comes earlier
  std::vector<int> downstream(nc, 0);
  for (std::size_t a = 0; a < nc; ++a) {
    for (std::size_t b = 0; b < nc; ++b) downstream[a] += reaches(a, b) ? 1 : 0;
  }
  std::vector<std::size_t> order(nc);
  for (std::size_t a = 0; a < nc; ++a) order[a] = a;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return downstream[a] > downstream[b]; });
  std::vector<std::vector<int>> sorted;
  for (std::size_t a : order) sorted.push_back(std::move(c.classes[a]));
  c.classes = std::move(sorted);
  c.class_reach.assign(nc, std::vector<bool>(nc, false));
  for (std::size_t a = 0; a < nc; ++a) {
    for (std::size_t b = 0; b < nc; ++b) c.class_reach[a][b] = reaches(a, b);
  }
  return c;
}

bool Condensation::classes_total() const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      if (!class_reach[i][j] || class_reach[j][i]) return false;
    }
  }
  return true;
}

bool Condensation::is_total() const {
  for (std::size_t i = 0; i < recurrent.size(); ++i) {
    for (std::size_t j = i + 1; j < recurrent.size(); ++j) {
      if (!reach[i][j]) return false;
    }
  }
  return true;
}

std::string ComparisonReport::summary() const {
  std::ostringstream os;
  os << components << " components, order " << (order_total ? "total" : "partial") << ", match: "
     << (pass() ? "pass" : "fail");
  return os.str();
}

ComparisonReport compare_with_tower(const Tower& tower, const Condensation& cond, const GridSystem& grid,
                                    double match_radius) {
  if (!(match_radius >= grid.h + grid.epsilon))
    throw InputError("match radius must be at least grid spacing plus epsilon");
  ComparisonReport rep;
  rep.components = static_cast<int>(cond.classes.size());
  rep.raw_components = static_cast<int>(cond.recurrent.size());
  rep.nodes = static_cast<int>(tower.nodes.size());
  rep.count_match = rep.components == rep.nodes;
  rep.order_total = cond.classes_total();

  // component id -> class index
  std::vector<int> position(static_cast<std::size_t>(cond.component_count), -1);
  for (std::size_t k = 0; k < cond.classes.size(); ++k) {
    for (int i : cond.classes[k]) position[static_cast<std::size_t>(cond.recurrent[static_cast<std::size_t>(i)])] = static_cast<int>(k);
  }
  const int span = static_cast<int>(std::ceil(match_radius / grid.h));

  std::ostringstream diag;
  rep.location_match = true;
  for (const Node& n : tower.nodes) {
    const std::vector<double> pts = node_points(n);
    std::vector<int> hits(cond.classes.size(), 0);
    for (double x : pts) {
      const int a = grid.nearest_cell(x);
      std::vector<char> found(cond.classes.size(), 0);
      for (int b = a - span; b <= a + span; ++b) {
        int idx = b;
        if (grid.wrap) {
          idx = ((b % grid.size) + grid.size) % grid.size;
        } else if (b < 0 || b >= grid.size) {
          continue;
        }
        const auto ui = static_cast<std::size_t>(idx);
        if (grid.distance(grid.cells[ui], x) > match_radius) continue;
        const int pos = position[static_cast<std::size_t>(cond.component_of[ui])];
        if (pos >= 0) found[static_cast<std::size_t>(pos)] = 1;
      }
      for (std::size_t k = 0; k < found.size(); ++k) hits[k] += found[k];
    }
    NodeMatch m;
    m.node = n.index;
    for (std::size_t k = 0; k < hits.size(); ++k) {
      const double cov = pts.empty() ? 0.0 : static_cast<double>(hits[k]) / static_cast<double>(pts.size());
      if (cov > m.coverage) {
        m.coverage = cov;
        m.component = static_cast<int>(k);
      }
    }
    m.ok = m.component >= 0 && m.coverage >= required_coverage(n);
    if (!m.ok) {
      rep.location_match = false;
      diag << "node " << n.index << " (" << to_string(n.kind) << ") best coverage " << m.coverage << "; ";
    }
    rep.matches.push_back(m);
  }

  rep.order_matches = true;
  for (std::size_t i = 0; i < rep.matches.size(); ++i) {
    if (rep.matches[i].component != static_cast<int>(i)) rep.order_matches = false;
  }
  if (!rep.count_match)
    diag << rep.components << " recurrent classes (" << rep.raw_components << " components) vs " << rep.nodes
         << " nodes; ";
  if (!rep.order_total) diag << "reachability is not a total order; ";
  if (!rep.order_matches) diag << "component order differs from rho order; ";
  rep.diagnostics = diag.str();
  return rep;
}

std::string components_json(double mu, const GridSystem& grid, const Condensation& cond,
                            const ComparisonReport* report) {
  nlohmann::ordered_json out;
  out["mu"] = mu;
  out["M"] = grid.size;
  out["epsilon"] = grid.epsilon;
  out["components"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < cond.classes.size(); ++k) {
    std::vector<int> cells;
    for (int i : cond.classes[k]) {
      const auto& m = cond.members[static_cast<std::size_t>(cond.recurrent[static_cast<std::size_t>(i)])];
      cells.insert(cells.end(), m.begin(), m.end());
    }
    std::sort(cells.begin(), cells.end());
    nlohmann::ordered_json ranges = nlohmann::ordered_json::array();
    std::size_t s = 0;
    while (s < cells.size()) {
      std::size_t e = s;
      while (e + 1 < cells.size() && cells[e + 1] == cells[e] + 1) ++e;
      ranges.push_back({cells[s], cells[e]});
      s = e + 1;
    }
    nlohmann::ordered_json comp;
    comp["cells"] = ranges;
    comp["recurrent"] = true;
    comp["sccs"] = cond.classes[k].size();
    comp["matched_node"] = nullptr;
    if (report) {
      for (const auto& m : report->matches) {
        if (m.component == static_cast<int>(k) && m.ok) comp["matched_node"] = m.node;
      }
    }
    out["components"].push_back(comp);
  }
  return out.dump(2);
}

}  // namespace crtower
