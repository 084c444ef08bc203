#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crtower/map_core.hpp"
#include "crtower/periodic.hpp"
#include "crtower/trapping.hpp"

namespace crtower {

enum class NodeKind { Zero, FlipOrbit, CantorSet, Attracting };
enum class AttractorType { None, A1, A2, A3, A4, A5, A3Suspected };

const char* to_string(NodeKind kind);
const char* to_string(AttractorType type);

/// One chain-recurrence class of the map.
struct Node {
  int index = 0;
  NodeKind kind = NodeKind::Zero;
  AttractorType subtype = AttractorType::None;
  double rho = 0.0;
  std::optional<double> p1;
  /// Boundary orbit of the node's region; for a Cantor set its accessible
  /// orbit, for a periodic attractor the attracting orbit itself.
  std::optional<PeriodicOrbit> orbit;
  CyclicTrappingRegion region;
  /// Points approximating a Cantor node.
  std::vector<double> cantor_sample;
  /// Points of an attracting node: the cycle for A1, the post-transient
  /// critical orbit otherwise.
  std::vector<double> attractor_sample;
  bool superstable = false;
  /// Base-map period of the node's orbit, or of its region when it has none.
  int period = 1;

  bool attracting() const { return kind == NodeKind::Attracting; }
  /// Repelling periodic points of the node, one per base-map step.
  std::vector<double> periodic_points() const;
};

struct Tower {
  double mu = 0.0;
  std::vector<Node> nodes;
  /// weights[j] = |T(N_{j+1})| / |T(N_j)|
  std::vector<int> weights;
  bool truncated = false;
  bool degenerate = false;

  std::size_t edge_count() const { return nodes.size() * (nodes.size() - 1) / 2; }
};

struct TowerOptions {
  /// Deepest node index expanded; a deeper tower ends in an A3-suspected tail.
  int max_depth = 64;
  double tol_root = kTolRoot;
  int n_transient = 10000;
  int n_detect = 100000;
  int band_samples = 4096;
  int cantor_samples = 4096;
  /// Repelling nodes closer than this to c are beyond binary64 resolution;
  /// the tower is truncated there.
  double min_rho = 1e-6;
  /// Largest base-map period of a renormalized view.
  int max_step = 1 << 22;
};

Tower build_tower(double mu, const TowerOptions& opts = {});

struct EdgeWitness {
  double start = 0.0;
  /// Orbit of `start` up to and including the landing point.
  std::vector<double> path;
};

/// A point within delta of p1(N_i), on the side facing c, whose orbit lands
/// on N_j within n_max steps.
EdgeWitness edge_witness(const Tower& tower, int i, int j, double delta, int n_max);

enum class TowerFormat { Dot, Json };

std::string serialize_tower(const Tower& tower, TowerFormat format);

}  // namespace crtower
