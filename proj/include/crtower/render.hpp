#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crtower/tower.hpp"

namespace crtower {

enum class MarkKind { Periodic, Cantor };

const char* to_string(MarkKind kind);

struct NodeMark {
  int row = 0;  // 0 is x = 0
  double x = 0.0;
  int level = 0;  // node index in the tower
  int layer = 0;  // 0 for the first Cantor node of the column, 1 for the second, ...
  MarkKind kind = MarkKind::Periodic;
};

struct SweepColumn {
  double mu = 0.0;
  std::vector<std::uint32_t> attractor_hist;
  std::vector<NodeMark> node_marks;
  std::vector<NodeKind> node_kinds;
  bool warning = false;
  std::string message;

  std::uint64_t mass() const;
};

struct RenderOptions {
  int n_transient = 2000;
  int n_samples = 20000;
  /// 0 picks the hardware concurrency.
  int threads = 0;
  TowerOptions tower;
};

/// Pixel row of x for an image of the given height.
int pixel_row(double x, int height);

/// Column i samples mu_lo + (i + 1/2)(mu_hi - mu_lo)/columns.
std::vector<SweepColumn> sweep(double mu_lo, double mu_hi, int columns, int height, const RenderOptions& opts = {});

SweepColumn render_column(double mu, int height, const RenderOptions& opts = {});

/// Binary P6 image, top row x = 1.
std::vector<std::uint8_t> encode_ppm(const std::vector<SweepColumn>& columns);
std::size_t write_ppm(const std::vector<SweepColumn>& columns, const std::string& path);

/// "mu,x,level,kind" with one row per mark.
std::string marks_csv(const std::vector<SweepColumn>& columns);
void write_csv(const std::vector<SweepColumn>& columns, const std::string& path);

}  // namespace crtower
