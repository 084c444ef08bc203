#include "crtower/render.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <thread>
#include <tuple>

namespace crtower {

namespace {

using Rgb = std::array<std::uint8_t, 3>;

constexpr Rgb kGreen{0, 170, 0};
constexpr std::array<Rgb, 6> kCantorPalette{{
    {220, 0, 0},
    {0, 0, 220},
    {230, 140, 0},
    {150, 0, 200},
    {0, 160, 160},
    {120, 80, 20},
}};

Rgb cantor_colour(int layer) {
  if (layer < 2) return kCantorPalette[static_cast<std::size_t>(layer)];
  return kCantorPalette[2 + static_cast<std::size_t>((layer - 2) % 4)];
}

double percentile99(std::vector<std::uint32_t> v) {
  v.erase(std::remove(v.begin(), v.end(), 0u), v.end());
  if (v.empty()) return 1.0;
  const std::size_t k = (v.size() - 1) * 99 / 100;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return static_cast<double>(v[k]);
}

}  // namespace

const char* to_string(MarkKind kind) { return kind == MarkKind::Periodic ? "periodic" : "cantor"; }

std::uint64_t SweepColumn::mass() const {
  std::uint64_t m = 0;
  for (auto v : attractor_hist) m += v;
  return m;
}

int pixel_row(double x, int height) {
  const int r = static_cast<int>(std::floor(x * height));
  return std::clamp(r, 0, height - 1);
}

SweepColumn render_column(double mu, int height, const RenderOptions& opts) {
  SweepColumn col;
  col.mu = mu;
  col.attractor_hist.assign(static_cast<std::size_t>(height), 0);
  double x = kCritical;
  for (int i = 0; i < opts.n_transient; ++i) x = logistic(mu, x);
  for (int i = 0; i < opts.n_samples; ++i) {
    x = logistic(mu, x);
    ++col.attractor_hist[static_cast<std::size_t>(pixel_row(x, height))];
  }

  Tower t;
  try {
    t = build_tower(mu, opts.tower);
  } catch (const std::exception& e) {
    col.warning = true;
    col.message = e.what();
    return col;
  }
  std::set<std::tuple<int, int, int>> seen;
  auto add = [&](double v, int level, int layer, MarkKind kind) {
    const int row = pixel_row(v, height);
    if (seen.emplace(row, level, static_cast<int>(kind)).second) col.node_marks.push_back({row, v, level, layer, kind});
  };
  int cantor_layer = 0;
  for (const Node& n : t.nodes) {
    col.node_kinds.push_back(n.kind);
    if (n.kind == NodeKind::Zero || n.kind == NodeKind::FlipOrbit) {
      for (double v : n.periodic_points()) add(v, n.index, 0, MarkKind::Periodic);
    } else if (n.kind == NodeKind::CantorSet) {
      for (double v : n.cantor_sample) add(v, n.index, cantor_layer, MarkKind::Cantor);
      ++cantor_layer;
    }
  }
  return col;
}

std::vector<SweepColumn> sweep(double mu_lo, double mu_hi, int columns, int height, const RenderOptions& opts) {
  if (!(mu_lo < mu_hi && mu_lo > 1.0 && mu_hi <= 4.0)) throw InputError("sweep needs 1 < mu_lo < mu_hi <= 4");
  if (columns < 16 || height < 16) throw InputError("columns and height must be at least 16");
  std::vector<SweepColumn> out(static_cast<std::size_t>(columns));
  const double step = (mu_hi - mu_lo) / columns;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < columns; i = next++) {
      out[static_cast<std::size_t>(i)] = render_column(mu_lo + (i + 0.5) * step, height, opts);
    }
  };
  unsigned n = opts.threads > 0 ? static_cast<unsigned>(opts.threads) : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(columns));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

std::vector<std::uint8_t> encode_ppm(const std::vector<SweepColumn>& columns) {
  if (columns.empty()) throw InputError("no columns to encode");
  const int w = static_cast<int>(columns.size());
  const int h = static_cast<int>(columns.front().attractor_hist.size());
  const std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> img(header.begin(), header.end());
  const std::size_t base = img.size();
  img.resize(base + static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 255);
  auto put = [&](int col, int row, Rgb c) {
    const std::size_t at = base + (static_cast<std::size_t>(h - 1 - row) * static_cast<std::size_t>(w) + static_cast<std::size_t>(col)) * 3;
    img[at] = c[0];
    img[at + 1] = c[1];
    img[at + 2] = c[2];
  };
  for (int i = 0; i < w; ++i) {
    const SweepColumn& c = columns[static_cast<std::size_t>(i)];
    if (static_cast<int>(c.attractor_hist.size()) != h) throw InputError("columns differ in height");
    const double dmax = percentile99(c.attractor_hist);
    for (int r = 0; r < h; ++r) {
      const double d = c.attractor_hist[static_cast<std::size_t>(r)];
      if (d == 0.0) continue;
      const auto g = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::min(1.0, d / dmax))));
      put(i, r, {g, g, g});
    }
    for (const NodeMark& m : c.node_marks) put(i, m.row, m.kind == MarkKind::Periodic ? kGreen : cantor_colour(m.layer));
  }
  return img;
}

std::size_t write_ppm(const std::vector<SweepColumn>& columns, const std::string& path) {
  const auto bytes = encode_ppm(columns);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
  return bytes.size();
}

std::string marks_csv(const std::vector<SweepColumn>& columns) {
  std::string out = "mu,x,level,kind\n";
  char buf[96];
  for (const SweepColumn& c : columns) {
    for (const NodeMark& m : c.node_marks) {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%d,%s\n", c.mu, m.x, m.level, to_string(m.kind));
      out += buf;
    }
  }
  return out;
}

void write_csv(const std::vector<SweepColumn>& columns, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << marks_csv(columns);
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace crtower
