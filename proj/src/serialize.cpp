#include <cstdio>
#include <sstream>

#include "crtower/tower.hpp"

namespace crtower {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "null"; }

std::string json(const Tower& t) {
  std::ostringstream os;
  os << "{\n  \"mu\": " << num(t.mu) << ",\n  \"truncated\": " << (t.truncated ? "true" : "false")
     << ",\n  \"nodes\": [";
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const Node& n = t.nodes[i];
    os << (i ? ",\n" : "\n") << "    {\"index\": " << n.index << ", \"kind\": \"" << to_string(n.kind) << "\", \"subtype\": ";
    if (n.subtype == AttractorType::None) {
      os << "null";
    } else {
      os << '"' << to_string(n.subtype) << '"';
    }
    os << ", \"period\": " << n.period << ", \"rho\": " << num(n.rho) << ", \"p1\": " << opt_num(n.p1)
       << ", \"multiplier\": " << (n.orbit ? num(n.orbit->multiplier) : "null") << ", \"j1\": ";
    if (n.region.intervals.empty()) {
      os << "null";
    } else {
      os << '[' << num(n.region.first().lo) << ", " << num(n.region.first().hi) << ']';
    }
    os << ", \"weight_to_next\": ";
    if (i < t.weights.size()) {
      os << t.weights[i];
    } else {
      os << "null";
    }
    os << '}';
  }
  os << "\n  ]\n}\n";
  return os.str();
}

std::string dot(const Tower& t) {
  std::ostringstream os;
  os << "digraph tower {\n  rankdir=TB;\n  label=\"mu = " << num(t.mu) << (t.truncated ? " (truncated)" : "") << "\";\n";
  for (const Node& n : t.nodes) {
    os << "  n" << n.index << " [label=\"N" << n.index << ' ' << to_string(n.kind);
    if (n.subtype != AttractorType::None) os << ' ' << to_string(n.subtype);
    os << "\\nperiod " << n.period << "\\nrho " << num(n.rho) << "\"];\n";
  }
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < t.nodes.size(); ++j) os << "  n" << i << " -> n" << j << ";\n";
  }
  for (const Node& n : t.nodes) os << "  { rank=same; n" << n.index << "; }\n";
  os << "}\n";
  return os.str();
}

}  // namespace

std::string serialize_tower(const Tower& tower, TowerFormat format) {
  return format == TowerFormat::Json ? json(tower) : dot(tower);
}

}  // namespace crtower
