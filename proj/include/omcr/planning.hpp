#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "omcr/golden.hpp"
#include "omcr/reliability.hpp"
#include "omcr/units.hpp"

namespace omcr {

struct Site {
  int id = 0;
  Point pos;
  double mttr_h = 1.0;   // on-site service duration of one replacement
  double cr = 0.0;       // replacement cost per operation, $
  double cp_per_h = 0.0; // unavailability penalty rate, $/h
  FailureModel model;
  // hard service window: no operation window may leave [a, b]
  double hard_earliest_h = 0.0;
  double hard_latest_h = std::numeric_limits<double>::infinity();
};

struct TimeWindow {
  double earliest = 0.0;
  double latest = 0.0;
};

struct SitePlan {
  int nop = 0;
  std::vector<double> starts;       // strictly increasing, within [0, horizon]
  std::vector<TimeWindow> windows;  // symmetric around starts, mutually disjoint
};

struct MaintenancePlan {
  std::vector<SitePlan> site_plans;
  double horizon_h = 0.0;

  int total_operations() const {
    int n = 0;
    for (const auto& sp : site_plans) n += sp.nop;
    return n;
  }
};

// Per-site rows of interval downtime estimates. Each row carries one entry
// per operation (the interval ending at that operation) plus a terminal
// entry for the residual interval between the last operation and the
// horizon end. Dropping the terminal interval would make downtime beyond
// the last visit free, which lets the planner push every start toward zero.
using DowntimeMatrix = std::vector<std::vector<DowntimeEstimate>>;

struct PlanningOptions {
  double window_ratio = 0.25;  // half-width as a fraction of the smaller adjacent gap
  int nop_cap = 200;
};

// Averaged cost rates per the planning cost model: operations cost is
// sum(CR_i * nop_i) / tau, downtime cost is sum over intervals of
// CP_i * failure_prob * ttd / tau.
inline std::pair<double, double> maintenance_cost(const MaintenancePlan& plan,
                                                  std::span<const Site> sites,
                                                  const DowntimeMatrix& ttds) {
  if (plan.site_plans.size() != sites.size() || ttds.size() != sites.size())
    throw std::invalid_argument("maintenance_cost: plan/sites/ttds size mismatch");
  const double tau = plan.horizon_h;
  if (!(tau > 0.0)) throw std::invalid_argument("maintenance_cost: horizon must be > 0");
  double ops = 0.0, down = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto& sp = plan.site_plans[i];
    const auto& row = ttds[i];
    if (row.size() != static_cast<std::size_t>(sp.nop) &&
        row.size() != static_cast<std::size_t>(sp.nop) + 1)
      throw std::invalid_argument("maintenance_cost: ttd row does not match plan shape");
    ops += sites[i].cr * sp.nop;
    for (const auto& e : row) down += sites[i].cp_per_h * e.failure_prob * e.ttd_h;
  }
  return {ops / tau, down / tau};
}

namespace detail {

// Downtime weight (sum of failure_prob * ttd, hours) of one inter-operation
// interval under the site's failure model.
inline double interval_weight(const Site& site, double a, double b) {
  if (b <= a) return 0.0;
  const DowntimeEstimate e = expected_downtime(a, b, site.model);
  return e.failure_prob * e.ttd_h;
}

// Downtime weight of a whole candidate plan, including the terminal
// interval up to the horizon.
inline double plan_weight(const Site& site, const std::vector<double>& starts, double horizon_h) {
  double w = 0.0, prev = 0.0;
  for (double s : starts) {
    w += interval_weight(site, prev, s);
    prev = s;
  }
  if (prev < horizon_h) w += interval_weight(site, prev, horizon_h);
  return w;
}

inline std::vector<double> equally_spaced_starts(int nop, double lo, double hi) {
  std::vector<double> s(nop);
  for (int o = 1; o <= nop; ++o) s[o - 1] = lo + o * (hi - lo) / (nop + 1);
  return s;
}

// One pass of coordinate-wise golden-section refinement. Each start moves
// within the open interval between its neighbours (horizon boundaries for
// the first and last), kept MTTR apart. A move is only kept when it lowers
// the two adjacent interval weights.
inline void refine_starts(const Site& site, std::vector<double>& starts, double span_lo,
                          double span_hi) {
  const int n = static_cast<int>(starts.size());
  for (int o = 0; o < n; ++o) {
    const double left = (o == 0 ? span_lo : starts[o - 1]) + site.mttr_h;
    const double right = (o == n - 1 ? span_hi : starts[o + 1]) - site.mttr_h;
    if (right - left < 4.0 * site.mttr_h) continue;
    const double prev_b = (o == 0 ? span_lo : starts[o - 1]);
    const double next_b = (o == n - 1 ? span_hi : starts[o + 1]);
    auto local = [&](double s) {
      return interval_weight(site, prev_b, s) + interval_weight(site, s, next_b);
    };
    const double before = local(starts[o]);
    const double tol = std::max(1e-6, 1e-4 * (right - left));
    const double cand = golden_section_minimize(local, left, right, tol);
    if (local(cand) < before) starts[o] = cand;
  }
}

inline std::vector<TimeWindow> make_windows(const Site& site, const std::vector<double>& starts,
                                            double horizon_h, const PlanningOptions& opt) {
  std::vector<TimeWindow> w(starts.size());
  const int n = static_cast<int>(starts.size());
  const double span_lo = std::max(0.0, site.hard_earliest_h);
  const double span_hi = std::min(horizon_h, site.hard_latest_h);
  for (int o = 0; o < n; ++o) {
    const double gap_prev = starts[o] - (o == 0 ? span_lo : starts[o - 1]);
    const double gap_next = (o == n - 1 ? span_hi : starts[o + 1]) - starts[o];
    double delta = opt.window_ratio * std::min(gap_prev, gap_next);
    // symmetric window, clamped to [0, tau] and the site's hard window
    const double lo = std::max(0.0, site.hard_earliest_h);
    const double hi = std::min(horizon_h, site.hard_latest_h);
    delta = std::min({delta, starts[o] - lo, hi - starts[o]});
    if (delta < 0.0) delta = 0.0;
    w[o] = {starts[o] - delta, starts[o] + delta};
  }
  // truncate any residual overlap between consecutive windows
  for (int o = 0; o + 1 < n; ++o) {
    if (w[o].latest > w[o + 1].earliest) {
      const double mid = 0.5 * (starts[o] + starts[o + 1]);
      w[o].latest = std::min(w[o].latest, mid);
      w[o + 1].earliest = std::max(w[o + 1].earliest, mid);
      // keep symmetry by shrinking the opposite side too
      w[o].earliest = std::max(w[o].earliest, 2.0 * starts[o] - w[o].latest);
      w[o + 1].latest = std::min(w[o + 1].latest, 2.0 * starts[o + 1] - w[o + 1].earliest);
    }
  }
  return w;
}

}  // namespace detail

// Choose the operation count and start times for one site. The candidate
// objective is the site's operations + downtime rate; the downtime term is
// active only once a previous iteration has reported nonzero downtime
// (ttd_feedback), matching the optimistic first pass where a vehicle is
// assumed to arrive instantly on failure. The integer sweep over nop is
// exact; the sweep stops once the operations cost alone exceeds the best
// total seen.
inline SitePlan plan_site(const Site& site, double horizon_h, std::span<const double> ttd_feedback,
                          const PlanningOptions& opt = {}) {
  if (!(horizon_h > 0.0)) throw std::invalid_argument("plan_site: horizon must be > 0");
  const double span_lo = std::max(0.0, site.hard_earliest_h);
  const double span_hi = std::min(horizon_h, site.hard_latest_h);
  if (!(span_lo < span_hi))
    throw std::invalid_argument("plan_site: empty hard service window");
  bool downtime_on = false;
  for (double v : ttd_feedback)
    if (v > 0.0) downtime_on = true;

  const int nop_max = std::min(
      opt.nop_cap, std::max(1, static_cast<int>(std::ceil(horizon_h / (2.0 * site.mttr_h)))));

  double best_cost = std::numeric_limits<double>::infinity();
  int best_nop = 1;
  std::vector<double> best_starts;
  for (int nop = 1; nop <= nop_max; ++nop) {
    const double ops_cost = site.cr * nop / horizon_h;
    if (ops_cost >= best_cost) break;  // downtime is nonnegative; larger nop cannot win
    auto starts = detail::equally_spaced_starts(nop, span_lo, span_hi);
    double down_cost = 0.0;
    if (downtime_on && site.cp_per_h > 0.0) {
      detail::refine_starts(site, starts, span_lo, span_hi);
      down_cost = site.cp_per_h * detail::plan_weight(site, starts, horizon_h) / horizon_h;
    }
    const double cost = ops_cost + down_cost;
    if (cost < best_cost) {
      best_cost = cost;
      best_nop = nop;
      best_starts = std::move(starts);
    }
  }

  SitePlan sp;
  sp.nop = best_nop;
  sp.starts = std::move(best_starts);
  sp.windows = detail::make_windows(site, sp.starts, horizon_h, opt);
  return sp;
}

// Sites are planned independently; interaction only happens through routing
// and the downtime feedback.
inline MaintenancePlan plan_all(std::span<const Site> sites, double horizon_h,
                                const DowntimeMatrix& ttd_feedback = {},
                                const PlanningOptions& opt = {}) {
  if (!ttd_feedback.empty() && ttd_feedback.size() != sites.size())
    throw std::invalid_argument("plan_all: feedback size mismatch");
  MaintenancePlan plan;
  plan.horizon_h = horizon_h;
  plan.site_plans.reserve(sites.size());
  std::vector<double> fb;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    fb.clear();
    if (!ttd_feedback.empty())
      for (const auto& e : ttd_feedback[i]) fb.push_back(e.ttd_h);
    plan.site_plans.push_back(plan_site(sites[i], horizon_h, fb, opt));
  }
  return plan;
}

}  // namespace omcr
