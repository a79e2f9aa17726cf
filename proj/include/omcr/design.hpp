#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "omcr/loop.hpp"

namespace omcr {

// Depot at the failure-probability-weighted mean of the site positions:
// closer to the sites most likely to fail within the horizon. Degenerate
// all-zero weights fall back to the unweighted centroid.
inline Point barycentre_location(std::span<const Site> sites, double horizon_h,
                                 bool* used_fallback = nullptr) {
  if (sites.empty()) throw std::invalid_argument("barycentre_location: no sites");
  double wx = 0.0, wy = 0.0, w = 0.0;
  for (const auto& s : sites) {
    const double f = weibull_cdf(horizon_h, s.model);
    wx += s.pos.x * f;
    wy += s.pos.y * f;
    w += f;
  }
  if (used_fallback) *used_fallback = false;
  if (w <= 0.0) {
    if (used_fallback) *used_fallback = true;
    wx = wy = 0.0;
    for (const auto& s : sites) {
      wx += s.pos.x;
      wy += s.pos.y;
    }
    return {wx / sites.size(), wy / sites.size()};
  }
  return {wx / w, wy / w};
}

// Candidate depot positions next to the sites themselves, deduplicated and
// order-independent.
inline std::vector<Point> near_site_candidates(std::span<const Site> sites) {
  if (sites.empty()) throw std::invalid_argument("near_site_candidates: no sites");
  std::vector<Point> c;
  c.reserve(sites.size());
  for (const auto& s : sites) c.push_back(s.pos);
  std::sort(c.begin(), c.end(), [](const Point& a, const Point& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

struct CandidateEval {
  Point depot;
  int capacity = 0;
  bool ok = false;
  CostBreakdown costs;
  std::string error;
};

struct DesignResult {
  Point depot;
  int capacity = 0;
  CostBreakdown costs;
  OmcrResult best_run;
  std::vector<CandidateEval> per_candidate;
};

// Evaluate the full (depot, capacity) grid and keep the cheapest pair.
// Failed evaluations stay in the table but are excluded from the arg-min.
inline DesignResult optimize_design(std::span<const Site> sites, std::span<const int> capacities,
                                    std::span<const Point> depot_candidates, double horizon_h,
                                    const VehicleSpec& vehicle_base,
                                    const ConvergenceConfig& conv = {},
                                    const PlanningOptions& planning = {}) {
  if (capacities.empty() || depot_candidates.empty())
    throw std::invalid_argument("optimize_design: empty capacity or candidate set");
  DesignResult result;
  bool found = false;
  for (const Point& depot : depot_candidates)
    for (int q : capacities) {
      CandidateEval eval;
      eval.depot = depot;
      eval.capacity = q;
      VehicleSpec v = vehicle_base;
      v.capacity = q;
      try {
        OmcrResult run = run_omcr(sites, depot, v, horizon_h, conv, planning);
        eval.ok = true;
        eval.costs = run.costs;
        const bool better =
            !found || run.costs.total < result.costs.total ||
            (run.costs.total == result.costs.total &&
             (q < result.capacity ||
              (q == result.capacity && (depot.x < result.depot.x ||
                                        (depot.x == result.depot.x && depot.y < result.depot.y)))));
        if (better) {
          found = true;
          result.depot = depot;
          result.capacity = q;
          result.costs = run.costs;
          result.best_run = std::move(run);
        }
      } catch (const std::exception& e) {
        eval.error = e.what();
      }
      result.per_candidate.push_back(std::move(eval));
    }
  if (!found) throw std::runtime_error("optimize_design: every candidate evaluation failed");
  return result;
}

}  // namespace omcr
