#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "omcr/planning.hpp"
#include "omcr/units.hpp"

namespace omcr {

struct VehicleSpec {
  int capacity = 1;       // Q, spare parts
  double cd_per_km = 0.0; // transport cost per km per unit of capacity
  double ct_per_h = 0.0;  // transport cost per hour
  double speed_kmh = 1.0;
};

// One aggregate node: operation o of a site, with the window produced by the
// planner and a unit spare-part demand.
struct OperationNode {
  int node = 0;      // id in the aggregate graph, 1..n (0 is the depot)
  int site = 0;      // index into the site list
  int op_index = 0;  // operation number within the site plan, 0-based
  double service_h = 0.0;
  TimeWindow window;
};

struct SquareMatrix {
  int n = 0;
  std::vector<double> v;

  SquareMatrix() = default;
  explicit SquareMatrix(int size) : n(size), v(static_cast<std::size_t>(size) * size, 0.0) {}
  double& at(int i, int j) { return v[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(i) * n + j]; }
};

struct RoutingProblem {
  Point depot;
  std::vector<OperationNode> operations;
  SquareMatrix dist_km;  // (n+1) x (n+1), node 0 = depot
  SquareMatrix time_h;
  int capacity = 1;  // Q
  int fleet = 1;     // m
  double cd_per_km = 0.0;
  double ct_per_h = 0.0;
  double horizon_h = 0.0;
};

struct RoutingSolution {
  std::vector<std::vector<int>> routes;     // op node ids; depot start/end implicit
  std::vector<std::pair<int, int>> arc_set; // traversed arcs, depot legs included
  std::vector<double> loads;                // y per op node (index node-1)
  std::vector<double> times;                // realized start s per op node (index node-1)
  int vehicles = 0;
  double transport_cost = 0.0;  // $/h averaged over the horizon
};

struct infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double euclid(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Aggregate one node per (site, operation). Metrics are inherited from the
// site geometry, so two operations of the same site sit at distance zero.
inline RoutingProblem build_operation_graph(const MaintenancePlan& plan,
                                            std::span<const Site> sites, Point depot,
                                            const VehicleSpec& vehicle) {
  if (plan.site_plans.size() != sites.size())
    throw std::invalid_argument("build_operation_graph: plan/sites size mismatch");
  if (plan.total_operations() == 0)
    throw std::invalid_argument("build_operation_graph: empty plan");

  RoutingProblem p;
  p.depot = depot;
  p.capacity = vehicle.capacity;
  p.cd_per_km = vehicle.cd_per_km;
  p.ct_per_h = vehicle.ct_per_h;
  p.horizon_h = plan.horizon_h;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto& sp = plan.site_plans[i];
    for (int o = 0; o < sp.nop; ++o) {
      OperationNode node;
      node.node = static_cast<int>(p.operations.size()) + 1;
      node.site = static_cast<int>(i);
      node.op_index = o;
      node.service_h = sites[i].mttr_h;
      node.window = sp.windows[o];
      p.operations.push_back(node);
    }
  }
  const int n = static_cast<int>(p.operations.size());
  p.fleet = std::max(1, (n + vehicle.capacity - 1) / vehicle.capacity);
  p.dist_km = SquareMatrix(n + 1);
  p.time_h = SquareMatrix(n + 1);
  auto pos_of = [&](int node) -> Point {
    return node == 0 ? depot : sites[p.operations[node - 1].site].pos;
  };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const double d = euclid(pos_of(i), pos_of(j));
      p.dist_km.at(i, j) = d;
      p.time_h.at(i, j) = d / vehicle.speed_kmh;
    }
  return p;
}

inline double arc_cost(const RoutingProblem& p, int i, int j) {
  return p.capacity * p.cd_per_km * p.dist_km.at(i, j) + p.ct_per_h * p.time_h.at(i, j);
}

// Transport cost recomputed from the routes alone.
inline double transport_cost_of(const RoutingProblem& p,
                                const std::vector<std::vector<int>>& routes) {
  double c = 0.0;
  for (const auto& r : routes) {
    int prev = 0;
    for (int node : r) {
      c += arc_cost(p, prev, node);
      prev = node;
    }
    c += arc_cost(p, prev, 0);
  }
  return c / p.horizon_h;
}

inline double total_route_km(const RoutingProblem& p, const std::vector<std::vector<int>>& routes) {
  double km = 0.0;
  for (const auto& r : routes) {
    int prev = 0;
    for (int node : r) {
      km += p.dist_km.at(prev, node);
      prev = node;
    }
    km += p.dist_km.at(prev, 0);
  }
  return km;
}

// Sort operations oldest-to-newest (by window centre) and chunk into
// consecutive sublists of at most Q elements. Ties are broken by
// (site, op_index) so the order is stable.
inline std::vector<std::vector<int>> split_operations(std::span<const OperationNode> operations,
                                                      int capacity) {
  if (capacity < 1) throw std::invalid_argument("split_operations: capacity must be >= 1");
  std::vector<int> order(operations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& oa = operations[a];
    const auto& ob = operations[b];
    const double ca = 0.5 * (oa.window.earliest + oa.window.latest);
    const double cb = 0.5 * (ob.window.earliest + ob.window.latest);
    if (ca != cb) return ca < cb;
    if (oa.site != ob.site) return oa.site < ob.site;
    return oa.op_index < ob.op_index;
  });
  std::vector<std::vector<int>> lists;
  for (std::size_t i = 0; i < order.size(); i += capacity) {
    const std::size_t end = std::min(order.size(), i + capacity);
    lists.emplace_back();
    for (std::size_t k = i; k < end; ++k) lists.back().push_back(operations[order[k]].node);
  }
  return lists;
}

namespace detail {

// Depth-first branch and bound over route extensions. The lower bound is the
// cost so far plus a minimum spanning connector over the unvisited nodes,
// the depot, and the open route end.
class ExactSolver {
 public:
  explicit ExactSolver(const RoutingProblem& p) : p_(p), n_(static_cast<int>(p.operations.size())) {}

  bool solve(RoutingSolution& out) {
    best_cost_ = std::numeric_limits<double>::infinity();
    best_routes_.clear();
    routes_.clear();
    cur_.clear();
    visited_ = 0;
    dfs(0, 0.0, 0.0, -1);
    if (best_routes_.empty()) return false;
    out = assemble(best_routes_);
    return true;
  }

 private:
  const RoutingProblem& p_;
  int n_;
  std::uint32_t visited_ = 0;
  std::vector<std::vector<int>> routes_, best_routes_;
  std::vector<int> cur_;
  double best_cost_ = 0.0;

  double mst_bound(int open_end) const {
    // Prim over {unvisited} u {0} u {open route end}; a lower bound on the
    // remaining arcs of any completion.
    std::vector<int> nodes;
    nodes.push_back(0);
    if (open_end > 0) nodes.push_back(open_end);
    for (int i = 1; i <= n_; ++i)
      if (!(visited_ & (1u << i))) nodes.push_back(i);
    if (nodes.size() <= 1) return 0.0;
    std::vector<double> key(nodes.size(), std::numeric_limits<double>::infinity());
    std::vector<bool> in(nodes.size(), false);
    key[0] = 0.0;
    double total = 0.0;
    for (std::size_t it = 0; it < nodes.size(); ++it) {
      int pick = -1;
      for (std::size_t k = 0; k < nodes.size(); ++k)
        if (!in[k] && (pick < 0 || key[k] < key[pick])) pick = static_cast<int>(k);
      in[pick] = true;
      total += key[pick];
      for (std::size_t k = 0; k < nodes.size(); ++k)
        if (!in[k]) key[k] = std::min(key[k], arc_cost(p_, nodes[pick], nodes[k]));
    }
    return total;
  }

  int unvisited_count() const {
    int c = 0;
    for (int i = 1; i <= n_; ++i)
      if (!(visited_ & (1u << i))) ++c;
    return c;
  }

  void record_if_better(double cost) {
    if (cost < best_cost_ - 1e-12 ||
        (std::abs(cost - best_cost_) <= 1e-12 && routes_ < best_routes_)) {
      best_cost_ = cost;
      best_routes_ = routes_;
    }
  }

  // last < 0 means no route is open. time/cost are the open route's state.
  void dfs(double cost, double time, double load, int last) {
    if (cost + mst_bound(last > 0 ? last : 0) > best_cost_ + 1e-12) return;
    const int remaining = unvisited_count();

    if (last > 0) {
      // extend the open route
      if (static_cast<int>(load) < p_.capacity) {
        for (int j = 1; j <= n_; ++j) {
          if (visited_ & (1u << j)) continue;
          const auto& op = p_.operations[j - 1];
          const double arrive = time + p_.operations[last - 1].service_h + p_.time_h.at(last, j);
          const double s = std::max(op.window.earliest, arrive);
          if (s > op.window.latest + 1e-9) continue;
          visited_ |= (1u << j);
          cur_.push_back(j);
          dfs(cost + arc_cost(p_, last, j), s, load + 1.0, j);
          cur_.pop_back();
          visited_ &= ~(1u << j);
        }
      }
      // close the open route
      const double closed = cost + arc_cost(p_, last, 0);
      routes_.push_back(cur_);
      cur_.clear();
      if (remaining == 0) {
        if (static_cast<int>(routes_.size()) == p_.fleet) record_if_better(closed);
      } else {
        dfs(closed, 0.0, 0.0, -1);
      }
      cur_ = routes_.back();
      routes_.pop_back();
      return;
    }

    // open a new route, if one more vehicle is available and needed
    const int routes_left = p_.fleet - static_cast<int>(routes_.size());
    if (remaining == 0 || routes_left <= 0) return;
    if (static_cast<std::int64_t>(routes_left) * p_.capacity < remaining) return;
    if (remaining < routes_left) return;  // every route must serve at least one operation
    const int min_first = routes_.empty() ? 0 : routes_.back().front();
    for (int j = 1; j <= n_; ++j) {
      if (visited_ & (1u << j)) continue;
      if (j < min_first) continue;  // routes ordered by first node: kills fleet symmetry
      const auto& op = p_.operations[j - 1];
      visited_ |= (1u << j);
      cur_.push_back(j);
      dfs(cost + arc_cost(p_, 0, j), op.window.earliest, 1.0, j);
      cur_.pop_back();
      visited_ &= ~(1u << j);
    }
  }

  RoutingSolution assemble(const std::vector<std::vector<int>>& routes) const {
    RoutingSolution s;
    s.routes = routes;
    s.vehicles = static_cast<int>(routes.size());
    s.loads.assign(n_, 0.0);
    s.times.assign(n_, 0.0);
    for (const auto& r : routes) {
      int prev = 0;
      double t = 0.0, y = 0.0;
      for (int node : r) {
        const auto& op = p_.operations[node - 1];
        t = (prev == 0) ? op.window.earliest
                        : std::max(op.window.earliest,
                                   t + p_.operations[prev - 1].service_h + p_.time_h.at(prev, node));
        y += 1.0;
        s.times[node - 1] = t;
        s.loads[node - 1] = y;
        s.arc_set.emplace_back(prev, node);
        prev = node;
      }
      s.arc_set.emplace_back(prev, 0);
    }
    s.transport_cost = transport_cost_of(p_, s.routes);
    return s;
  }
};

}  // namespace detail

inline constexpr int kExactSolverCap = 12;

// Exact CVRPTW solve of a small aggregate problem: minimal transport cost,
// exactly fleet routes, each operation once, loads within capacity, realized
// times within windows. Ties resolve to the lexicographically smallest route
// list.
inline RoutingSolution solve_exact(const RoutingProblem& p, int node_cap = kExactSolverCap) {
  const int n = static_cast<int>(p.operations.size());
  if (n == 0) throw std::invalid_argument("solve_exact: no operations");
  if (n > node_cap || n > 31)
    throw std::invalid_argument("solve_exact: instance exceeds the exact cap");
  if (p.fleet < 1 || p.fleet > n) throw std::invalid_argument("solve_exact: fleet out of range");
  if (static_cast<std::int64_t>(p.capacity) * p.fleet < n)
    throw infeasible_error("solve_exact: capacity * fleet < operations");
  detail::ExactSolver solver(p);
  RoutingSolution s;
  if (!solver.solve(s)) throw infeasible_error("solve_exact: no window-feasible schedule");
  return s;
}

namespace detail {

inline RoutingProblem subproblem(const RoutingProblem& p, const std::vector<int>& nodes, int fleet) {
  RoutingProblem sub;
  sub.depot = p.depot;
  sub.capacity = p.capacity;
  sub.fleet = fleet;
  sub.cd_per_km = p.cd_per_km;
  sub.ct_per_h = p.ct_per_h;
  sub.horizon_h = p.horizon_h;
  const int k = static_cast<int>(nodes.size());
  sub.dist_km = SquareMatrix(k + 1);
  sub.time_h = SquareMatrix(k + 1);
  for (int a = 0; a < k; ++a) {
    OperationNode op = p.operations[nodes[a] - 1];
    op.node = a + 1;
    sub.operations.push_back(op);
  }
  auto global = [&](int local) { return local == 0 ? 0 : nodes[local - 1]; };
  for (int a = 0; a <= k; ++a)
    for (int b = 0; b <= k; ++b) {
      sub.dist_km.at(a, b) = p.dist_km.at(global(a), global(b));
      sub.time_h.at(a, b) = p.time_h.at(global(a), global(b));
    }
  return sub;
}

}  // namespace detail

// Divide-and-conquer driver: time-sorted sublists of at most Q operations,
// each solved exactly with the smallest feasible vehicle count, results
// concatenated. Every sublist's routes start and end at the depot, matching
// the resupply rule.
inline RoutingSolution solve_long_term(const MaintenancePlan& plan, std::span<const Site> sites,
                                       Point depot, const VehicleSpec& vehicle) {
  RoutingProblem p = build_operation_graph(plan, sites, depot, vehicle);
  const auto sublists = split_operations(p.operations, p.capacity);

  RoutingSolution combined;
  const int n = static_cast<int>(p.operations.size());
  combined.loads.assign(n, 0.0);
  combined.times.assign(n, 0.0);
  for (const auto& nodes : sublists) {
    const int k = static_cast<int>(nodes.size());
    RoutingSolution sub_sol;
    bool solved = false;
    std::string last_error;
    for (int m = std::max(1, (k + p.capacity - 1) / p.capacity); m <= k && !solved; ++m) {
      RoutingProblem sub = detail::subproblem(p, nodes, m);
      try {
        sub_sol = solve_exact(sub, std::max(kExactSolverCap, p.capacity));
        solved = true;
      } catch (const infeasible_error& e) {
        last_error = e.what();
      }
    }
    if (!solved) {
      std::ostringstream msg;
      msg << "solve_long_term: sublist infeasible even with one vehicle per operation ("
          << last_error << "); windows:";
      for (int node : nodes) {
        const auto& op = p.operations[node - 1];
        msg << " node " << node << " [" << op.window.earliest << ", " << op.window.latest << "]";
      }
      throw infeasible_error(msg.str());
    }
    for (const auto& r : sub_sol.routes) {
      std::vector<int> route;
      int prev = 0;
      for (int local : r) {
        const int g = nodes[local - 1];
        route.push_back(g);
        combined.loads[g - 1] = sub_sol.loads[local - 1];
        combined.times[g - 1] = sub_sol.times[local - 1];
        combined.arc_set.emplace_back(prev, g);
        prev = g;
      }
      combined.arc_set.emplace_back(prev, 0);
      combined.routes.push_back(std::move(route));
    }
    combined.vehicles += sub_sol.vehicles;
  }
  combined.transport_cost = transport_cost_of(p, combined.routes);
  return combined;
}

// ---- constraint validator ----------------------------------------------

struct ConstraintCheck {
  int id = 0;  // constraint number, 5..14
  bool pass = true;
  std::string detail;
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const ConstraintCheck& check(int id) const {
    for (const auto& c : checks)
      if (c.id == id) return c;
    throw std::out_of_range("ConstraintReport: unknown constraint id");
  }
};

// Re-checks every constraint of the routing formulation independently of the
// solver: fleet sizing (5), depot departures (6), self loops (7), in-degree
// (8), out-degree (9), load propagation (10) and bounds (12), time
// propagation (11), windows (13), and arc-set integrity (14).
inline ConstraintReport validate_solution(const RoutingProblem& p, const RoutingSolution& s) {
  const int n = static_cast<int>(p.operations.size());
  ConstraintReport rep;
  auto add = [&](int id, bool pass, std::string detail) {
    rep.checks.push_back({id, pass, std::move(detail)});
  };
  auto name = [](int i, int j) {
    std::ostringstream o;
    o << "arc (" << i << ", " << j << ")";
    return o.str();
  };

  // (14) first, structurally: arcs reference valid nodes, each at most once
  {
    bool ok = true;
    std::string d;
    auto arcs = s.arc_set;
    std::sort(arcs.begin(), arcs.end());
    for (std::size_t a = 0; a < arcs.size() && ok; ++a) {
      const auto [i, j] = arcs[a];
      if (i < 0 || i > n || j < 0 || j > n) {
        ok = false;
        d = name(i, j) + " out of range";
      } else if (a > 0 && arcs[a] == arcs[a - 1] && !(i == 0 && j == 0)) {
        ok = false;
        d = name(i, j) + " duplicated";
      }
    }
    add(14, ok, d);
  }

  add(5, static_cast<std::int64_t>(p.capacity) * p.fleet >= n,
      p.capacity * p.fleet >= n ? ""
                                : "capacity * fleet < operation count");

  {
    int departures = 0;
    for (const auto& [i, j] : s.arc_set)
      if (i == 0 && j != 0) ++departures;
    add(6, departures == p.fleet,
        departures == p.fleet ? ""
                              : std::to_string(departures) + " depot departures, fleet is " +
                                    std::to_string(p.fleet));
  }

  {
    bool ok = true;
    std::string d;
    for (const auto& [i, j] : s.arc_set)
      if (i == j) {
        ok = false;
        d = name(i, j) + " is a self loop";
        break;
      }
    add(7, ok, d);
  }

  {
    std::vector<int> indeg(n + 1, 0);
    for (const auto& [i, j] : s.arc_set)
      if (j >= 1 && j <= n && i != j) ++indeg[j];
    bool ok = true;
    std::string d;
    for (int j = 1; j <= n; ++j)
      if (indeg[j] != 1) {
        ok = false;
        d = "operation " + std::to_string(j) + " entered " + std::to_string(indeg[j]) + " times";
        break;
      }
    add(8, ok, d);
  }

  {
    std::vector<int> outdeg(n + 1, 0);
    for (const auto& [i, j] : s.arc_set)
      if (i >= 1 && i <= n && j >= 1 && i != j) ++outdeg[i];
    bool ok = true;
    std::string d;
    for (int i = 1; i <= n; ++i)
      if (outdeg[i] > 1) {
        ok = false;
        d = "operation " + std::to_string(i) + " has out-degree " + std::to_string(outdeg[i]);
        break;
      }
    add(9, ok, d);
  }

  {
    // (10): along every operation-to-operation arc the load rises by the
    // successor's unit demand
    bool ok = s.loads.size() == static_cast<std::size_t>(n);
    std::string d = ok ? "" : "loads vector has wrong size";
    const double q = p.capacity;
    for (const auto& [i, j] : s.arc_set) {
      if (!ok) break;
      if (i >= 1 && j >= 1 && i != j) {
        const double yi = s.loads[i - 1], yj = s.loads[j - 1];
        if (yi - yj + (1.0 + q) > q + 1e-9) {
          ok = false;
          d = name(i, j) + ": load " + std::to_string(yi) + " -> " + std::to_string(yj);
        }
      }
    }
    add(10, ok, d);
  }

  {
    bool ok = s.times.size() == static_cast<std::size_t>(n);
    std::string d = ok ? "" : "times vector has wrong size";
    for (const auto& [i, j] : s.arc_set) {
      if (!ok) break;
      if (i >= 1 && j >= 1 && i != j) {
        const double need =
            s.times[i - 1] + p.operations[i - 1].service_h + p.time_h.at(i, j);
        if (s.times[j - 1] + 1e-9 < need) {
          ok = false;
          d = name(i, j) + ": start " + std::to_string(s.times[j - 1]) + " before " +
              std::to_string(need);
        }
      }
    }
    add(11, ok, d);
  }

  {
    bool ok = s.loads.size() == static_cast<std::size_t>(n);
    std::string d = ok ? "" : "loads vector has wrong size";
    for (int i = 1; i <= n && ok; ++i)
      if (s.loads[i - 1] < 1.0 - 1e-9 || s.loads[i - 1] > p.capacity + 1e-9) {
        ok = false;
        d = "operation " + std::to_string(i) + " load " + std::to_string(s.loads[i - 1]) +
            " outside [1, Q]";
      }
    add(12, ok, d);
  }

  {
    bool ok = s.times.size() == static_cast<std::size_t>(n);
    std::string d = ok ? "" : "times vector has wrong size";
    for (int i = 1; i <= n && ok; ++i) {
      const auto& w = p.operations[i - 1].window;
      if (s.times[i - 1] + 1e-9 < w.earliest || s.times[i - 1] > w.latest + 1e-9) {
        ok = false;
        d = "operation " + std::to_string(i) + " start " + std::to_string(s.times[i - 1]) +
            " outside [" + std::to_string(w.earliest) + ", " + std::to_string(w.latest) + "]";
      }
    }
    add(13, ok, d);
  }

  std::sort(rep.checks.begin(), rep.checks.end(),
            [](const ConstraintCheck& a, const ConstraintCheck& b) { return a.id < b.id; });
  return rep;
}

}  // namespace omcr
