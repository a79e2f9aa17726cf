#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "omcr/planning.hpp"
#include "omcr/reliability.hpp"
#include "omcr/routing.hpp"

namespace omcr {

struct CostBreakdown {
  double transport = 0.0;
  double operations = 0.0;
  double downtime = 0.0;
  double total = 0.0;  // always the exact sum of the three components
};

inline CostBreakdown make_breakdown(double transport, double operations, double downtime) {
  return {transport, operations, downtime, transport + operations + downtime};
}

struct ConvergenceConfig {
  double rel_tol = 0.01;
  int max_iter = 20;
};

struct IterationRecord {
  int iteration = 0;
  std::vector<int> nops;
  CostBreakdown costs;
};

struct OmcrResult {
  MaintenancePlan plan;
  RoutingSolution schedule;
  CostBreakdown costs;
  std::vector<double> availability;  // per site
  int iterations = 0;
  std::vector<double> cost_trace;    // per-iteration totals
  std::vector<IterationRecord> trace;
  DowntimeMatrix ttd;
};

// Interval downtime estimates from the realized routing times: for every
// site, one entry per operation (interval from the previous realized start,
// or 0) plus the terminal entry up to the horizon.
inline DowntimeMatrix compute_ttd_matrix(const RoutingSolution& schedule,
                                         const MaintenancePlan& plan,
                                         std::span<const Site> sites) {
  if (plan.site_plans.size() != sites.size())
    throw std::invalid_argument("compute_ttd_matrix: plan/sites size mismatch");
  const int n = plan.total_operations();
  if (static_cast<int>(schedule.times.size()) != n)
    throw std::invalid_argument("compute_ttd_matrix: schedule does not cover the plan");

  // realized start per (site, op), gathered from the node numbering used by
  // build_operation_graph (site-major, op order preserved)
  std::vector<std::vector<double>> realized(sites.size());
  {
    int node = 0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      realized[i].resize(plan.site_plans[i].nop);
      for (int o = 0; o < plan.site_plans[i].nop; ++o) realized[i][o] = schedule.times[node++];
    }
  }

  DowntimeMatrix m(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    double prev = 0.0;
    for (int o = 0; o < plan.site_plans[i].nop; ++o) {
      const double s = realized[i][o];
      if (s < prev)
        throw std::invalid_argument("compute_ttd_matrix: realized starts not increasing on site " +
                                    std::to_string(sites[i].id));
      m[i].push_back(s > prev ? expected_downtime(prev, s, sites[i].model) : DowntimeEstimate{});
      prev = s;
    }
    m[i].push_back(prev < plan.horizon_h
                       ? expected_downtime(prev, plan.horizon_h, sites[i].model)
                       : DowntimeEstimate{});
  }
  return m;
}

inline std::vector<double> availabilities_from(const DowntimeMatrix& m, const MaintenancePlan& plan) {
  std::vector<double> a;
  a.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::vector<double> ttds, probs;
    for (const auto& e : m[i]) {
      ttds.push_back(e.ttd_h);
      probs.push_back(e.failure_prob);
    }
    a.push_back(site_availability(plan.site_plans[i].starts, ttds, probs, plan.horizon_h));
  }
  return a;
}

// The joint loop: plan with zero assumed downtime, route, measure the
// downtime the routing actually implies, feed it back, repeat until the
// total rate settles. Iterations are not guaranteed monotone, so the
// lowest-cost iterate is returned.
inline OmcrResult run_omcr(std::span<const Site> sites, Point depot, const VehicleSpec& vehicle,
                           double horizon_h, const ConvergenceConfig& conv = {},
                           const PlanningOptions& planning = {}) {
  if (!(horizon_h > 0.0)) throw std::invalid_argument("run_omcr: horizon must be > 0");
  OmcrResult best;
  double best_total = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  std::vector<IterationRecord> records;
  DowntimeMatrix feedback;  // empty on the first iteration

  double prev_total = std::numeric_limits<double>::infinity();
  int k = 0;
  while (k < conv.max_iter) {
    ++k;
    MaintenancePlan plan = plan_all(sites, horizon_h, feedback, planning);
    RoutingSolution schedule;
    try {
      schedule = solve_long_term(plan, sites, depot, vehicle);
    } catch (const infeasible_error& e) {
      throw infeasible_error("run_omcr: iteration " + std::to_string(k) + ": " + e.what());
    }
    DowntimeMatrix ttd = compute_ttd_matrix(schedule, plan, sites);
    const auto [ops_cost, down_cost] = maintenance_cost(plan, sites, ttd);
    const CostBreakdown costs = make_breakdown(schedule.transport_cost, ops_cost, down_cost);
    trace.push_back(costs.total);
    IterationRecord rec;
    rec.iteration = k;
    for (const auto& sp : plan.site_plans) rec.nops.push_back(sp.nop);
    rec.costs = costs;
    records.push_back(rec);

    if (costs.total < best_total) {
      best_total = costs.total;
      best.plan = std::move(plan);
      best.availability = availabilities_from(ttd, best.plan);
      best.schedule = std::move(schedule);
      best.costs = costs;
      best.ttd = ttd;
    }

    const bool converged =
        std::isfinite(prev_total) && std::abs(costs.total - prev_total) <= conv.rel_tol * prev_total;
    prev_total = costs.total;
    if (converged) break;
    feedback = std::move(ttd);
  }
  best.iterations = k;
  best.cost_trace = std::move(trace);
  best.trace = std::move(records);
  return best;
}

}  // namespace omcr
