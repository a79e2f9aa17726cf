#pragma once

// Plain-text tabular form of routing problems and solutions: one row per
// node, one row per metric entry, one row per visit, one row per route.
// Used by the validate subcommand and the test oracle harness.

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "omcr/routing.hpp"

namespace omcr {

inline void write_routing_text(std::ostream& out, const RoutingProblem& p,
                               const RoutingSolution& s) {
  const int n = static_cast<int>(p.operations.size());
  out << "# omcr-routing v1\n";
  out << std::setprecision(17);
  out << "problem " << n << ' ' << p.capacity << ' ' << p.fleet << ' ' << p.horizon_h << ' '
      << p.cd_per_km << ' ' << p.ct_per_h << '\n';
  out << "depot " << p.depot.x << ' ' << p.depot.y << '\n';
  for (const auto& op : p.operations)
    out << "node " << op.node << ' ' << op.site << ' ' << op.op_index << ' ' << op.service_h << ' '
        << op.window.earliest << ' ' << op.window.latest << '\n';
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      out << "metric " << i << ' ' << j << ' ' << p.dist_km.at(i, j) << ' ' << p.time_h.at(i, j)
          << '\n';
  out << "solution " << s.vehicles << ' ' << s.transport_cost << '\n';
  for (int i = 1; i <= n; ++i)
    out << "visit " << i << ' ' << s.times[i - 1] << ' ' << s.loads[i - 1] << '\n';
  for (const auto& r : s.routes) {
    out << "route";
    for (int node : r) out << ' ' << node;
    out << '\n';
  }
  for (const auto& [i, j] : s.arc_set) out << "arc " << i << ' ' << j << '\n';
}

inline void read_routing_text(std::istream& in, RoutingProblem& p, RoutingSolution& s) {
  p = RoutingProblem{};
  s = RoutingSolution{};
  std::string line;
  int n = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string tag;
    row >> tag;
    if (tag == "problem") {
      row >> n >> p.capacity >> p.fleet >> p.horizon_h >> p.cd_per_km >> p.ct_per_h;
      p.dist_km = SquareMatrix(n + 1);
      p.time_h = SquareMatrix(n + 1);
      s.times.assign(n, 0.0);
      s.loads.assign(n, 0.0);
    } else if (tag == "depot") {
      row >> p.depot.x >> p.depot.y;
    } else if (tag == "node") {
      OperationNode op;
      row >> op.node >> op.site >> op.op_index >> op.service_h >> op.window.earliest >>
          op.window.latest;
      p.operations.push_back(op);
    } else if (tag == "metric") {
      int i = 0, j = 0;
      double d = 0, t = 0;
      row >> i >> j >> d >> t;
      p.dist_km.at(i, j) = p.dist_km.at(j, i) = d;
      p.time_h.at(i, j) = p.time_h.at(j, i) = t;
    } else if (tag == "solution") {
      row >> s.vehicles >> s.transport_cost;
    } else if (tag == "visit") {
      int i = 0;
      double t = 0, y = 0;
      row >> i >> t >> y;
      s.times.at(i - 1) = t;
      s.loads.at(i - 1) = y;
    } else if (tag == "route") {
      std::vector<int> r;
      int node = 0;
      while (row >> node) r.push_back(node);
      row.clear();  // extraction stops at end of line
      s.routes.push_back(std::move(r));
    } else if (tag == "arc") {
      int i = 0, j = 0;
      row >> i >> j;
      s.arc_set.emplace_back(i, j);
    } else {
      throw std::runtime_error("read_routing_text: unknown row tag '" + tag + "'");
    }
    if (row.fail()) throw std::runtime_error("read_routing_text: malformed row '" + line + "'");
  }
  if (n < 0 || static_cast<int>(p.operations.size()) != n)
    throw std::runtime_error("read_routing_text: node rows do not match the declared size");
}

}  // namespace omcr
