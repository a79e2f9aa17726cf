#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "omcr/design.hpp"
#include "omcr/loop.hpp"
#include "omcr/units.hpp"

namespace omcr {

struct ScenarioConfig {
  int n_sites = 10;
  double radius_km = 50.0;
  double eta_years = 1.0;
  double beta_regular = 2.0;  // first half of the sites
  double beta_rapid = 3.0;    // second half
  double mttr_h = 3.0;
  double cr = 100000.0;
  std::vector<double> cp_values = {10.0, 100.0, 1000.0};
  std::vector<double> horizons_months = {2, 4, 6, 8, 12, 18, 24};
  std::vector<int> capacities = {4, 6, 8};
  double speed_kmh = 80.0;
  double cd_per_km = 2.0;
  double ct_per_h = 30.0;
  int replications = 10;
  std::uint64_t seed = 1;
  double window_ratio = 0.25;
  std::vector<std::string> depot_methods = {"barycentre"};
  int threads = 0;  // 0 = one worker per hardware thread

  VehicleSpec vehicle(int capacity) const {
    return VehicleSpec{capacity, cd_per_km, ct_per_h, speed_kmh};
  }
  PlanningOptions planning() const {
    PlanningOptions o;
    o.window_ratio = window_ratio;
    return o;
  }
};

struct Instance {
  std::vector<Site> sites;
  double radius_km = 0.0;
  std::uint64_t seed = 0;
};

struct ReplicatedStat {
  double mean = 0.0;
  double half_width = 0.0;  // 95% confidence half-width
  int n = 0;
  bool low_confidence = false;  // fewer than two replicates
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t replication_seed(std::uint64_t seed, int replication) {
  std::uint64_t s = seed ^ (0xA24BAED4963EE407ull + static_cast<std::uint64_t>(replication));
  return splitmix64(s);
}

// Uniform in [0, 1) straight from the engine bits, so results do not depend
// on the standard library's distribution implementation.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Two-sided 95% Student-t quantiles for small replicate counts.
inline double t_quantile_975(int df) {
  static constexpr double table[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045};
  if (df < 1) return 0.0;
  if (df <= 29) return table[df - 1];
  return 1.96;
}

inline ReplicatedStat replicate_stat(const std::vector<double>& xs) {
  ReplicatedStat s;
  s.n = static_cast<int>(xs.size());
  if (xs.empty()) {
    s.low_confidence = true;
    return s;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / xs.size();
  if (xs.size() < 2) {
    s.low_confidence = true;
    return s;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  const double sd = std::sqrt(ss / (xs.size() - 1));
  s.half_width = t_quantile_975(s.n - 1) * sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

template <typename Fn>
void parallel_replications(int reps, int threads, const Fn& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, reps));
  if (threads == 1) {
    for (int r = 0; r < reps; ++r) fn(r);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (int r = w; r < reps; r += threads) fn(r);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

// Random instance per the experiment recipe: positions area-uniform in a
// disc of radius R, the first ceil(N/2) sites with the regular shape
// parameter and the rest with the rapid one, Euclidean metrics.
inline Instance generate_instance(std::uint64_t seed, const ScenarioConfig& config,
                                  int n_override = 0) {
  const int n = n_override > 0 ? n_override : config.n_sites;
  if (n < 1) throw std::invalid_argument("generate_instance: need at least one site");
  Instance inst;
  inst.radius_km = config.radius_km;
  inst.seed = seed;
  std::mt19937_64 rng(seed);
  const int regular = (config.n_sites + 1) / 2;  // split fixed by the base site count
  for (int i = 0; i < n; ++i) {
    const double r = config.radius_km * std::sqrt(detail::uniform01(rng));
    const double theta = 2.0 * std::numbers::pi * detail::uniform01(rng);
    Site s{i,
           {r * std::cos(theta), r * std::sin(theta)},
           config.mttr_h,
           config.cr,
           config.cp_values.empty() ? 0.0 : config.cp_values.front(),
           FailureModel::from_years(config.eta_years,
                                    (i % config.n_sites) < regular ? config.beta_regular
                                                                   : config.beta_rapid)};
    inst.sites.push_back(std::move(s));
  }
  return inst;
}

inline double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / xs.size();
}

inline double annual_distance_km(const OmcrResult& run, std::span<const Site> sites, Point depot,
                                 const VehicleSpec& vehicle, double horizon_h) {
  const RoutingProblem p = build_operation_graph(run.plan, sites, depot, vehicle);
  return total_route_km(p, run.schedule.routes) * (kHoursPerYear / horizon_h);
}

struct SweepKey {
  double cp = 0.0;
  double horizon_months = 0.0;
  int capacity = 0;
  std::string method;
};

struct ReplicateRecord {
  int replication = 0;
  SweepKey key;
  bool ok = false;
  std::string error;
  double total = 0, transport = 0, operations = 0, downtime = 0, availability = 0, annual_km = 0;
  double ops_per_site = 0;
};

struct SweepRow {
  SweepKey key;
  ReplicatedStat total, transport, operations, downtime, availability, annual_km, ops_per_site;
};

struct ScenarioResult {
  std::vector<SweepRow> rows;
  std::vector<ReplicateRecord> raw;
  int failures = 0;
};

namespace detail {

// One OMCR evaluation under the named depot method. "near_site" evaluates
// every site-adjacent candidate and keeps the cheapest.
inline OmcrResult run_with_method(std::vector<Site>& sites, const std::string& method,
                                  const VehicleSpec& vehicle, double horizon_h,
                                  const ScenarioConfig& config, Point* depot_out) {
  if (method == "barycentre") {
    const Point depot = barycentre_location(sites, horizon_h);
    if (depot_out) *depot_out = depot;
    return run_omcr(sites, depot, vehicle, horizon_h, {}, config.planning());
  }
  if (method == "near_site") {
    const auto candidates = near_site_candidates(sites);
    std::vector<int> caps = {vehicle.capacity};
    VehicleSpec base = vehicle;
    DesignResult d = optimize_design(sites, caps, candidates, horizon_h, base, {}, config.planning());
    if (depot_out) *depot_out = d.depot;
    return std::move(d.best_run);
  }
  throw std::invalid_argument("unknown depot method '" + method + "'");
}

}  // namespace detail

// Full factorial sweep over (cp, horizon, capacity, depot method), replicated
// with independent instances. Replication r is deterministic given (seed, r).
inline ScenarioResult run_scenario(const ScenarioConfig& config) {
  const int reps = config.replications;
  if (reps < 1) throw std::invalid_argument("run_scenario: replications must be >= 1");
  std::vector<std::vector<ReplicateRecord>> per_rep(reps);

  detail::parallel_replications(reps, config.threads, [&](int r) {
    Instance inst = generate_instance(detail::replication_seed(config.seed, r), config);
    for (double cp : config.cp_values)
      for (double hm : config.horizons_months)
        for (int q : config.capacities)
          for (const auto& method : config.depot_methods) {
            ReplicateRecord rec;
            rec.replication = r;
            rec.key = {cp, hm, q, method};
            std::vector<Site> sites = inst.sites;
            for (auto& s : sites) s.cp_per_h = cp;
            const double horizon_h = months_to_hours(hm);
            const VehicleSpec vehicle = config.vehicle(q);
            try {
              Point depot;
              OmcrResult run =
                  detail::run_with_method(sites, method, vehicle, horizon_h, config, &depot);
              rec.ok = true;
              rec.total = run.costs.total;
              rec.transport = run.costs.transport;
              rec.operations = run.costs.operations;
              rec.downtime = run.costs.downtime;
              rec.availability = mean_of(run.availability);
              rec.annual_km = annual_distance_km(run, sites, depot, vehicle, horizon_h);
              rec.ops_per_site =
                  static_cast<double>(run.plan.total_operations()) / sites.size();
            } catch (const std::exception& e) {
              rec.error = e.what();
            }
            per_rep[r].push_back(std::move(rec));
          }
  });

  ScenarioResult result;
  for (int r = 0; r < reps; ++r)
    for (auto& rec : per_rep[r]) result.raw.push_back(std::move(rec));

  // aggregate per cell, in axis order
  for (double cp : config.cp_values)
    for (double hm : config.horizons_months)
      for (int q : config.capacities)
        for (const auto& method : config.depot_methods) {
          std::vector<double> total, transport, operations, downtime, availability, annual_km,
              ops_per_site;
          int cell_failures = 0;
          for (const auto& rec : result.raw) {
            if (rec.key.cp != cp || rec.key.horizon_months != hm || rec.key.capacity != q ||
                rec.key.method != method)
              continue;
            if (!rec.ok) {
              ++cell_failures;
              continue;
            }
            total.push_back(rec.total);
            transport.push_back(rec.transport);
            operations.push_back(rec.operations);
            downtime.push_back(rec.downtime);
            availability.push_back(rec.availability);
            annual_km.push_back(rec.annual_km);
            ops_per_site.push_back(rec.ops_per_site);
          }
          result.failures += cell_failures;
          if (cell_failures * 5 > reps)
            throw std::runtime_error("run_scenario: more than 20% of replications failed");
          SweepRow row;
          row.key = {cp, hm, q, method};
          row.total = detail::replicate_stat(total);
          row.transport = detail::replicate_stat(transport);
          row.operations = detail::replicate_stat(operations);
          row.downtime = detail::replicate_stat(downtime);
          row.availability = detail::replicate_stat(availability);
          row.annual_km = detail::replicate_stat(annual_km);
          row.ops_per_site = detail::replicate_stat(ops_per_site);
          result.rows.push_back(std::move(row));
        }
  return result;
}

struct ExtensionRow {
  std::string method;
  int n_sites = 0;
  ReplicatedStat annual_km, total;
};

struct ExtensionRecord {
  int replication = 0;
  std::string method;
  int n_sites = 0;
  bool ok = false;
  double annual_km = 0, total = 0;
};

struct ExtensionResult {
  std::vector<ExtensionRow> rows;
  std::vector<ExtensionRecord> raw;
};

// Depot chosen once from the initial sites (both heuristics), then sites are
// added without relocating it. Uses the first value of each config axis.
inline ExtensionResult extension_study(const ScenarioConfig& config, int initial_n, int added,
                                       int step = 5) {
  if (initial_n < 1 || added < 0 || step < 1)
    throw std::invalid_argument("extension_study: bad initial_n/added/step");
  const double cp = config.cp_values.at(0);
  const double horizon_h = months_to_hours(config.horizons_months.at(0));
  const VehicleSpec vehicle = config.vehicle(config.capacities.at(0));

  std::vector<int> counts;
  for (int n = initial_n; n < initial_n + added; n += step) counts.push_back(n);
  counts.push_back(initial_n + added);

  const int reps = config.replications;
  std::vector<std::vector<ExtensionRecord>> per_rep(reps);
  detail::parallel_replications(reps, config.threads, [&](int r) {
    ScenarioConfig base_cfg = config;
    base_cfg.n_sites = initial_n;
    Instance full =
        generate_instance(detail::replication_seed(config.seed, r), base_cfg, initial_n + added);
    for (auto& s : full.sites) s.cp_per_h = cp;
    const std::vector<Site> base(full.sites.begin(), full.sites.begin() + initial_n);

    const Point depot_bary = barycentre_location(base, horizon_h);
    Point depot_near{};
    {
      const auto candidates = near_site_candidates(base);
      double best = std::numeric_limits<double>::infinity();
      for (const Point& c : candidates) {
        const OmcrResult run = run_omcr(base, c, vehicle, horizon_h, {}, config.planning());
        if (run.costs.total < best) {
          best = run.costs.total;
          depot_near = c;
        }
      }
    }

    for (int n : counts) {
      const std::vector<Site> sites(full.sites.begin(), full.sites.begin() + n);
      for (const auto& [method, depot] :
           {std::pair<std::string, Point>{"barycentre", depot_bary}, {"near_site", depot_near}}) {
        ExtensionRecord rec;
        rec.replication = r;
        rec.method = method;
        rec.n_sites = n;
        try {
          const OmcrResult run = run_omcr(sites, depot, vehicle, horizon_h, {}, config.planning());
          rec.ok = true;
          rec.total = run.costs.total;
          rec.annual_km = annual_distance_km(run, sites, depot, vehicle, horizon_h);
        } catch (const std::exception&) {
        }
        per_rep[r].push_back(std::move(rec));
      }
    }
  });

  ExtensionResult result;
  for (int r = 0; r < reps; ++r)
    for (auto& rec : per_rep[r]) result.raw.push_back(std::move(rec));
  for (const char* method : {"barycentre", "near_site"})
    for (int n : counts) {
      std::vector<double> km, total;
      for (const auto& rec : result.raw)
        if (rec.ok && rec.method == method && rec.n_sites == n) {
          km.push_back(rec.annual_km);
          total.push_back(rec.total);
        }
      ExtensionRow row;
      row.method = method;
      row.n_sites = n;
      row.annual_km = detail::replicate_stat(km);
      row.total = detail::replicate_stat(total);
      result.rows.push_back(std::move(row));
    }
  return result;
}

}  // namespace omcr
