#include "crtower/cli.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "crtower/oracle.hpp"
#include "crtower/render.hpp"
#include "crtower/tower.hpp"

namespace crtower {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

Interval parse_bracket(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw InputError("bracket must be lo:hi");
  try {
    std::size_t used = 0;
    const double lo = std::stod(s.substr(0, colon), &used);
    if (used != colon) throw InputError("bad bracket: " + s);
    const std::string rest = s.substr(colon + 1);
    const double hi = std::stod(rest, &used);
    if (used != rest.size()) throw InputError("bad bracket: " + s);
    if (!(lo < hi)) throw InputError("bracket needs lo < hi");
    return {lo, hi};
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InputError*>(&e)) throw;
    throw InputError("bad bracket: " + s);
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chain-recurrent towers of the logistic map"};
  app.require_subcommand(1);

  double mu = 0.0;
  std::string format = "json";
  int max_depth = 64;
  double tol = kTolRoot;
  auto* tower_cmd = app.add_subcommand("tower", "Build and print the tower graph");
  tower_cmd->add_option("--mu", mu, "Parameter in (1, 4]")->required();
  tower_cmd->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
  tower_cmd->add_option("--max-depth", max_depth, "Node budget")->check(CLI::Range(1, 4096));
  tower_cmd->add_option("--tol", tol, "Root tolerance")->check(CLI::Range(1e-15, 1e-6));

  int period = 3;
  std::string bracket;
  auto* window_cmd = app.add_subcommand("window", "Locate a periodic window");
  window_cmd->add_option("--period", period, "Orbit period")->check(CLI::Range(1, 64));
  window_cmd->add_option("--bracket", bracket, "Parameter bracket lo:hi")->required();

  int grid = 4000;
  double eps = 5e-4;
  bool compare = false;
  bool circle = false;
  double radius = 0.0;
  std::string dump;
  auto* oracle_cmd = app.add_subcommand("oracle", "Grid chain-recurrence oracle");
  oracle_cmd->add_option("--mu", mu, "Parameter in (1, 4]");
  oracle_cmd->add_option("--grid", grid, "Number of cells")->check(CLI::Range(100, 2'000'000));
  oracle_cmd->add_option("--eps", eps, "Chain slack")->check(CLI::PositiveNumber);
  oracle_cmd->add_flag("--compare", compare, "Compare with the tower");
  oracle_cmd->add_option("--radius", radius, "Match radius (default 2 (h + eps))")->check(CLI::NonNegativeNumber);
  oracle_cmd->add_flag("--circle", circle, "Use the circle map instead of the logistic map");
  oracle_cmd->add_option("--json", dump, "Write recurrent components as JSON");

  double mu_lo = 2.8;
  double mu_hi = 4.0;
  int columns = 2000;
  int height = 1200;
  int threads = 0;
  std::string out_path;
  std::string csv_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "Render a bifurcation diagram");
  sweep_cmd->add_option("--mu-lo", mu_lo, "Left parameter");
  sweep_cmd->add_option("--mu-hi", mu_hi, "Right parameter");
  sweep_cmd->add_option("--columns", columns, "Image width")->check(CLI::Range(16, 100000));
  sweep_cmd->add_option("--height", height, "Image height")->check(CLI::Range(16, 100000));
  sweep_cmd->add_option("--threads", threads, "Worker threads, 0 for all cores")->check(CLI::Range(0, 1024));
  sweep_cmd->add_option("--out", out_path, "PPM output path")->required();
  sweep_cmd->add_option("--csv", csv_path, "CSV output path for node marks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 1;
  }

  try {
    if (*tower_cmd) {
      TowerOptions opts;
      opts.max_depth = max_depth;
      opts.tol_root = tol;
      const Tower t = build_tower(mu, opts);
      out << serialize_tower(t, format == "dot" ? TowerFormat::Dot : TowerFormat::Json);
    } else if (*window_cmd) {
      const WindowRecord w = solve_window(period, parse_bracket(bracket));
      out << "{\"period\": " << w.period << ", \"mu_birth\": " << num(w.mu_birth) << ", \"mu_end\": " << num(w.mu_end)
          << "}\n";
    } else if (*oracle_cmd) {
      if (!circle && oracle_cmd->count("--mu") == 0) throw InputError("--mu is required unless --circle is given");
      if (circle && compare) throw InputError("--compare needs the logistic map");
      const MapSpec spec = circle ? circle_spec() : logistic_spec(mu);
      const GridSystem g = build_grid_graph(spec, grid, eps, circle);
      const Condensation c = condense(g);
      ComparisonReport rep;
      if (compare) {
        const Tower t = build_tower(mu);
        rep = compare_with_tower(t, c, g, radius > 0.0 ? radius : 2.0 * (g.h + eps));
        out << rep.summary() << '\n';
        if (!rep.diagnostics.empty()) err << rep.diagnostics << '\n';
      } else {
        out << c.classes.size() << " components (" << c.recurrent.size() << " recurrent SCCs), order "
            << (c.classes_total() ? "total" : "partial") << '\n';
      }
      if (!dump.empty()) {
        std::ofstream f(dump);
        f << components_json(circle ? 0.0 : mu, g, c, compare ? &rep : nullptr) << '\n';
        if (!f) throw std::runtime_error("cannot write " + dump);
      }
    } else if (*sweep_cmd) {
      RenderOptions opts;
      opts.threads = threads;
      const auto cols = sweep(mu_lo, mu_hi, columns, height, opts);
      int warnings = 0;
      for (const auto& col : cols) {
        if (col.warning) {
          ++warnings;
          err << "warning: mu=" << num(col.mu) << ": " << col.message << '\n';
        }
      }
      write_ppm(cols, out_path);
      if (!csv_path.empty()) write_csv(cols, csv_path);
      if (warnings) err << warnings << " columns rendered without tower marks\n";
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace crtower
