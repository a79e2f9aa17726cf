#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "omcr/planning.hpp"
#include "omcr/units.hpp"

using namespace omcr;

namespace {

Site make_site(int id, double cp, double beta = 2.0, double eta_years = 1.0) {
  return Site{id, {0.0, 0.0}, 3.0, 100000.0, cp, FailureModel::from_years(eta_years, beta)};
}

// Candidate cost with the same interval model plan_site uses.
double candidate_cost(const Site& site, double horizon_h, int nop, bool downtime_on) {
  auto starts = detail::equally_spaced_starts(nop, 0.0, horizon_h);
  double down = 0.0;
  if (downtime_on && site.cp_per_h > 0.0) {
    detail::refine_starts(site, starts, 0.0, horizon_h);
    down = site.cp_per_h * detail::plan_weight(site, starts, horizon_h) / horizon_h;
  }
  return site.cr * nop / horizon_h + down;
}

}  // namespace

TEST_CASE("maintenance cost rates") {
  SECTION("operations rate, one site with three operations") {
    const double tau = 732.0 * 24.0;  // 2 years in hours
    MaintenancePlan plan;
    plan.horizon_h = tau;
    plan.site_plans.push_back({3, {tau / 4, tau / 2, 3 * tau / 4}, {}});
    std::vector<Site> sites{make_site(0, 100.0)};
    DowntimeMatrix ttds{{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}};
    const auto [ops, down] = maintenance_cost(plan, sites, ttds);
    CHECK_THAT(ops, Catch::Matchers::WithinRel(300000.0 / 17568.0, 1e-12));
    CHECK(down == 0.0);
  }
  SECTION("downtime rate, hand value") {
    MaintenancePlan plan;
    plan.horizon_h = 1000.0;
    plan.site_plans.push_back({1, {500.0}, {}});
    std::vector<Site> sites{make_site(0, 100.0)};
    DowntimeMatrix ttds{{{10.0, 0.5}}};
    const auto [ops, down] = maintenance_cost(plan, sites, ttds);
    CHECK_THAT(down, Catch::Matchers::WithinAbs(0.5, 1e-12));
  }
  SECTION("shape mismatch is rejected") {
    MaintenancePlan plan;
    plan.horizon_h = 1000.0;
    plan.site_plans.push_back({2, {300.0, 600.0}, {}});
    std::vector<Site> sites{make_site(0, 100.0)};
    DowntimeMatrix bad{{{1.0, 0.1}, {1.0, 0.1}, {1.0, 0.1}, {1.0, 0.1}}};
    CHECK_THROWS_AS(maintenance_cost(plan, sites, bad), std::invalid_argument);
  }
}

TEST_CASE("plan_site basics") {
  const double tau = months_to_hours(6);
  SECTION("all-zero feedback proposes a single operation") {
    const Site site = make_site(0, 100.0);
    const std::vector<double> fb{0.0, 0.0};
    const SitePlan sp = plan_site(site, tau, fb);
    CHECK(sp.nop == 1);
    CHECK_THAT(sp.starts[0], Catch::Matchers::WithinRel(tau / 2.0, 1e-12));
  }
  SECTION("zero penalty keeps a single operation regardless of feedback") {
    const Site site = make_site(0, 0.0);
    const std::vector<double> fb{24.0, 24.0, 24.0};
    CHECK(plan_site(site, tau, fb).nop == 1);
  }
  SECTION("deterministic") {
    const Site site = make_site(0, 100.0);
    const std::vector<double> fb{24.0};
    const SitePlan a = plan_site(site, tau, fb);
    const SitePlan b = plan_site(site, tau, fb);
    CHECK(a.nop == b.nop);
    CHECK(a.starts == b.starts);
  }
}

TEST_CASE("plan_site equals exhaustive search over nop") {
  // eta = 1 y, beta = 2, CP = 100 $/h, CR = 100000 $, tau = 6 months,
  // nonzero feedback so the downtime term is live
  const Site site = make_site(0, 100.0);
  const double tau = months_to_hours(6);
  const std::vector<double> fb{24.0};
  const SitePlan sp = plan_site(site, tau, fb);

  int oracle_nop = 1;
  double oracle_cost = std::numeric_limits<double>::infinity();
  for (int nop = 1; nop <= 20; ++nop) {
    const double c = candidate_cost(site, tau, nop, true);
    if (c < oracle_cost) {
      oracle_cost = c;
      oracle_nop = nop;
    }
  }
  CHECK(sp.nop == oracle_nop);

  // local-minimum certificate
  const double chosen = candidate_cost(site, tau, sp.nop, true);
  if (sp.nop > 1) CHECK(chosen <= candidate_cost(site, tau, sp.nop - 1, true) + 1e-9);
  CHECK(chosen <= candidate_cost(site, tau, sp.nop + 1, true) + 1e-9);
}

TEST_CASE("refinement never increases the planning cost") {
  const Site site = make_site(0, 500.0, 3.0);
  const double tau = months_to_hours(12);
  for (int nop = 1; nop <= 5; ++nop) {
    auto starts = detail::equally_spaced_starts(nop, 0.0, tau);
    const double before = detail::plan_weight(site, starts, tau);
    detail::refine_starts(site, starts, 0.0, tau);
    const double after = detail::plan_weight(site, starts, tau);
    CHECK(after <= before + 1e-9);
    CHECK(std::is_sorted(starts.begin(), starts.end()));
  }
}

TEST_CASE("windows are symmetric, in-horizon and disjoint") {
  const Site site = make_site(0, 1000.0);
  const double tau = months_to_hours(24);
  const std::vector<double> fb{300.0};
  const SitePlan sp = plan_site(site, tau, fb);
  REQUIRE(sp.windows.size() == sp.starts.size());
  for (std::size_t o = 0; o < sp.windows.size(); ++o) {
    const auto& w = sp.windows[o];
    CHECK(w.earliest >= 0.0);
    CHECK(w.latest <= tau);
    CHECK(w.earliest <= sp.starts[o]);
    CHECK(sp.starts[o] <= w.latest);
    CHECK_THAT(sp.starts[o] - w.earliest,
               Catch::Matchers::WithinAbs(w.latest - sp.starts[o], 1e-9));
    if (o > 0) CHECK(sp.windows[o - 1].latest <= w.earliest + 1e-9);
  }
}

TEST_CASE("hard service window clamps all operation windows") {
  Site site = make_site(0, 400.0);
  const double tau = months_to_hours(12);
  site.hard_earliest_h = 0.2 * tau;
  site.hard_latest_h = 0.8 * tau;
  const std::vector<double> fb{100.0};
  const SitePlan sp = plan_site(site, tau, fb);
  for (const auto& w : sp.windows) {
    CHECK(w.earliest >= site.hard_earliest_h - 1e-9);
    CHECK(w.latest <= site.hard_latest_h + 1e-9);
  }
}

TEST_CASE("plan_all is per-site independent") {
  const double tau = months_to_hours(8);
  std::vector<Site> sites{make_site(0, 100.0, 2.0), make_site(1, 500.0, 3.0),
                          make_site(2, 10.0, 2.0, 1.5)};
  SECTION("zero feedback gives one operation per site") {
    const MaintenancePlan plan = plan_all(sites, tau);
    CHECK(plan.total_operations() == static_cast<int>(sites.size()));
  }
  SECTION("single-site instance matches plan_site") {
    std::vector<Site> one{sites[1]};
    DowntimeMatrix fb{{{40.0, 0.4}, {40.0, 0.4}}};
    const MaintenancePlan plan = plan_all(one, tau, fb);
    const std::vector<double> fbv{40.0, 40.0};
    const SitePlan direct = plan_site(sites[1], tau, fbv);
    CHECK(plan.site_plans[0].nop == direct.nop);
    CHECK(plan.site_plans[0].starts == direct.starts);
  }
  SECTION("permuting sites permutes the plan") {
    DowntimeMatrix fb{{{40.0, 0.4}}, {{80.0, 0.2}}, {{15.0, 0.7}}};
    const MaintenancePlan plan = plan_all(sites, tau, fb);
    std::vector<Site> rev{sites[2], sites[1], sites[0]};
    DowntimeMatrix fbr{fb[2], fb[1], fb[0]};
    const MaintenancePlan plan_rev = plan_all(rev, tau, fbr);
    for (int i = 0; i < 3; ++i) {
      CHECK(plan.site_plans[i].nop == plan_rev.site_plans[2 - i].nop);
      CHECK(plan.site_plans[i].starts == plan_rev.site_plans[2 - i].starts);
    }
  }
}
