#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crtower/tower.hpp"

namespace crtower {

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A map on [lo, hi], or on the circle of that length when used with wrap.
struct MapSpec {
  std::function<double(double)> f;
  double lo = 0.0;
  double hi = 1.0;
  std::string name;
};

MapSpec logistic_spec(double mu);
/// Psi(a) = a + beta (1 - cos a) mod 2 pi; every orbit creeps up to 0 = 2 pi.
MapSpec circle_spec(double beta = 0.25);

/// Cells x_a on a uniform grid with an edge a -> b whenever
/// |f(x_a) - x_b| <= epsilon + h/2 (circle distance when wrapping).
struct GridSystem {
  int size = 0;
  double lo = 0.0;
  double hi = 1.0;
  double h = 0.0;
  double epsilon = 0.0;
  bool wrap = false;
  std::vector<double> cells;
  std::vector<double> images;
  // compressed adjacency: targets of a are targets[offsets[a] .. offsets[a+1])
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> targets;

  std::size_t edge_count() const { return targets.size(); }
  double distance(double u, double v) const;
  /// Index of the cell nearest x.
  int nearest_cell(double x) const;
};

GridSystem build_grid_graph(const MapSpec& spec, int cells, double epsilon, bool wrap,
                            std::size_t edge_budget = 50'000'000);

struct Condensation {
  std::vector<int> component_of;
  int component_count = 0;
  /// Recurrent components (more than one cell, or a self-loop), upstream first.
  std::vector<int> recurrent;
  /// reach[i][j]: recurrent[i] reaches recurrent[j]
  std::vector<std::vector<bool>> reach;
  std::vector<std::vector<int>> members;
  /// Recurrent components grouped when their cells are grid neighbours: each
  /// group lies inside one component of the graph with slack epsilon + h.
  /// Entries are positions in `recurrent`; groups are listed upstream first.
  std::vector<std::vector<int>> classes;
  /// class_reach[i][j]: some member of class i reaches some member of class j
  std::vector<std::vector<bool>> class_reach;

  bool is_total() const;
  bool classes_total() const;
};

Condensation condense(const GridSystem& grid);

struct NodeMatch {
  int node = 0;
  int component = -1;  // index into Condensation::classes
  double coverage = 0.0;
  bool ok = false;
};

struct ComparisonReport {
  /// Number of recurrent classes; `raw_components` counts recurrent SCCs.
  int components = 0;
  int raw_components = 0;
  int nodes = 0;
  bool count_match = false;
  bool order_total = false;
  bool order_matches = false;
  bool location_match = false;
  std::vector<NodeMatch> matches;
  std::string diagnostics;

  bool pass() const { return count_match && order_total && order_matches && location_match; }
  /// "N components, order total, match: pass"
  std::string summary() const;
};

ComparisonReport compare_with_tower(const Tower& tower, const Condensation& cond, const GridSystem& grid,
                                    double match_radius);

/// {mu, M, epsilon, components: [{cells: [[lo, hi], ...], recurrent, matched_node}]}
/// listing the recurrent components. `report` may be null.
std::string components_json(double mu, const GridSystem& grid, const Condensation& cond,
                            const ComparisonReport* report);

}  // namespace crtower
