#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "crtower/oracle.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace crtower;

namespace {

// reach[a] = every cell reachable from a, by plain breadth-first search
std::vector<std::vector<char>> closure(const GridSystem& g) {
  const auto n = static_cast<std::size_t>(g.size);
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<std::size_t> stack{a};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (auto e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
        const std::size_t w = g.targets[e];
        if (!reach[a][w]) {
          reach[a][w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  return reach;
}

std::set<int> recurrent_cells(const Condensation& c) {
  std::set<int> out;
  for (int k : c.recurrent) out.insert(c.members[static_cast<std::size_t>(k)].begin(), c.members[static_cast<std::size_t>(k)].end());
  return out;
}

}  // namespace

TEST(Oracle, EdgesFollowTheSlackInequality) {
  for (bool wrap : {false, true}) {
    const MapSpec spec = wrap ? circle_spec() : logistic_spec(3.7);
    const GridSystem g = build_grid_graph(spec, 300, 0.004, wrap);
    const double len = spec.hi - spec.lo;
    for (int a = 0; a < g.size; ++a) {
      std::set<std::uint32_t> expect;
      for (int b = 0; b < g.size; ++b) {
        double d = std::abs(spec.f(spec.lo + a * g.h) - (spec.lo + b * g.h));
        if (wrap) d = std::min(std::fmod(d, len), len - std::fmod(d, len));
        if (d <= g.epsilon + g.h / 2) expect.insert(static_cast<std::uint32_t>(b));
      }
      const std::set<std::uint32_t> got(g.targets.begin() + g.offsets[static_cast<std::size_t>(a)],
                                        g.targets.begin() + g.offsets[static_cast<std::size_t>(a) + 1]);
      EXPECT_FALSE(got.empty());
      EXPECT_EQ(got, expect) << "cell " << a << (wrap ? " (circle)" : "");
    }
  }
}

TEST(Oracle, ComponentsAgreeWithMutualReachability) {
  const GridSystem g = build_grid_graph(logistic_spec(3.83), 400, 0.003, false);
  const Condensation c = condense(g);
  const auto reach = closure(g);
  for (std::size_t a = 0; a < reach.size(); ++a) {
    for (std::size_t b = 0; b < reach.size(); ++b) {
      const bool same = a == b || (reach[a][b] && reach[b][a]);
      EXPECT_EQ(same, c.component_of[a] == c.component_of[b]) << a << ' ' << b;
    }
  }
  // recurrent: more than one cell, or a cell that returns to itself
  for (int k = 0; k < c.component_count; ++k) {
    const auto& m = c.members[static_cast<std::size_t>(k)];
    const bool rec = m.size() > 1 || reach[static_cast<std::size_t>(m[0])][static_cast<std::size_t>(m[0])];
    EXPECT_EQ(rec, std::count(c.recurrent.begin(), c.recurrent.end(), k) == 1);
  }
}

TEST(Oracle, FixedPointRegimeHasTwoClasses) {
  const GridSystem g = build_grid_graph(logistic_spec(2.5), 1000, 0.005, false);
  const Condensation c = condense(g);
  ASSERT_EQ(c.recurrent.size(), 2u);
  ASSERT_EQ(c.classes.size(), 2u);
  EXPECT_TRUE(c.is_total());
  const auto& first = c.members[static_cast<std::size_t>(c.recurrent[0])];
  const auto& second = c.members[static_cast<std::size_t>(c.recurrent[1])];
  EXPECT_NEAR(g.cells[static_cast<std::size_t>(first.front())], 0.0, 0.01);
  for (int a : second) EXPECT_NEAR(g.cells[static_cast<std::size_t>(a)], 0.6, 0.02);
}

TEST(Oracle, CircleIsOneChainClass) {
  const GridSystem g = build_grid_graph(circle_spec(0.25), 2000, 0.01, true);
  const Condensation c = condense(g);
  ASSERT_EQ(c.recurrent.size(), 1u);
  EXPECT_EQ(c.members[static_cast<std::size_t>(c.recurrent[0])].size(), 2000u);
  EXPECT_EQ(c.component_count, 1);
}

TEST(Oracle, CircleOrbitsCreepToZero) {
  const MapSpec s = circle_spec(0.25);
  for (double a = 0.1; a < 2 * std::numbers::pi; a += 0.5) {
    double x = a;
    for (int i = 0; i < 20000; ++i) x = s.f(x);
    EXPECT_LT(std::min(x, 2 * std::numbers::pi - x), 1e-3) << a;
  }
}

TEST(Oracle, HugeSlackJoinsEverything) {
  const GridSystem g = build_grid_graph(logistic_spec(3.3), 200, 1.0, false);
  const Condensation c = condense(g);
  EXPECT_EQ(c.component_count, 1);
  EXPECT_EQ(c.recurrent.size(), 1u);
}

TEST(Oracle, RecurrentSetGrowsWithSlack) {
  for (double mu : {3.2, 3.83}) {
    const auto small = recurrent_cells(condense(build_grid_graph(logistic_spec(mu), 4000, 2e-4, false)));
    const auto large = recurrent_cells(condense(build_grid_graph(logistic_spec(mu), 4000, 5e-4, false)));
    EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end())) << mu;
  }
}

TEST(Oracle, MatchesTowersAtDefaultGrid) {
  for (double mu : {2.5, 3.2, 3.5}) {
    const GridSystem g = build_grid_graph(logistic_spec(mu), 4000, 5e-4, false);
    const Condensation c = condense(g);
    const auto rep = compare_with_tower(build_tower(mu), c, g, 2 * (g.h + g.epsilon));
    EXPECT_TRUE(rep.pass()) << mu << ": " << rep.diagnostics;
    EXPECT_EQ(rep.components, static_cast<int>(build_tower(mu).nodes.size()));
  }
}

TEST(Oracle, WindowResolvesOnFinerGrid) {
  const GridSystem g = build_grid_graph(logistic_spec(3.83), 16000, 2e-4, false);
  const auto rep = compare_with_tower(build_tower(3.83), condense(g), g, 2 * (g.h + g.epsilon));
  EXPECT_TRUE(rep.pass()) << rep.diagnostics;
  EXPECT_EQ(rep.summary(), "3 components, order total, match: pass");
}

TEST(Oracle, MatchRadiusTooSmall) {
  const GridSystem g = build_grid_graph(logistic_spec(2.5), 1000, 0.005, false);
  EXPECT_THROW(compare_with_tower(build_tower(2.5), condense(g), g, 0.001), InputError);
}

TEST(Oracle, EdgeBudget) {
  EXPECT_THROW(build_grid_graph(logistic_spec(3.5), 10000, 0.5, false, 1'000'000), ResourceError);
  EXPECT_THROW(build_grid_graph(logistic_spec(3.5), 50, 0.01, false), InputError);
  EXPECT_THROW(build_grid_graph(logistic_spec(3.5), 500, 0.0, false), InputError);
}

TEST(Oracle, JsonDump) {
  const GridSystem g = build_grid_graph(logistic_spec(3.2), 4000, 5e-4, false);
  const Condensation c = condense(g);
  const auto rep = compare_with_tower(build_tower(3.2), c, g, 2 * (g.h + g.epsilon));
  const auto j = nlohmann::json::parse(components_json(3.2, g, c, &rep));
  EXPECT_EQ(j["M"], 4000);
  ASSERT_EQ(j["components"].size(), 3u);
  EXPECT_EQ(j["components"][0]["matched_node"], 0);
  EXPECT_EQ(j["components"][2]["matched_node"], 2);
  EXPECT_EQ(j["components"][0]["cells"][0][0], 0);
}
