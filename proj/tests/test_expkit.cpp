#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "omcr/expkit.hpp"

using namespace omcr;

TEST_CASE("instance generation") {
  ScenarioConfig cfg;
  cfg.n_sites = 10;
  SECTION("same seed, same instance") {
    const Instance a = generate_instance(99, cfg);
    const Instance b = generate_instance(99, cfg);
    REQUIRE(a.sites.size() == b.sites.size());
    for (std::size_t i = 0; i < a.sites.size(); ++i) {
      CHECK(a.sites[i].pos == b.sites[i].pos);
      CHECK(a.sites[i].model.beta == b.sites[i].model.beta);
    }
    const Instance c = generate_instance(100, cfg);
    CHECK_FALSE(a.sites[0].pos == c.sites[0].pos);
  }
  SECTION("shape split is half regular, half rapid") {
    const Instance a = generate_instance(7, cfg);
    int regular = 0;
    for (const auto& s : a.sites)
      if (s.model.beta == cfg.beta_regular) ++regular;
    CHECK(regular == 5);
  }
  SECTION("all pairwise distances within the disc diameter") {
    const Instance a = generate_instance(3, cfg);
    for (const auto& s : a.sites)
      for (const auto& t : a.sites) CHECK(euclid(s.pos, t.pos) <= 2.0 * cfg.radius_km + 1e-9);
  }
  SECTION("extension keeps the base prefix") {
    const Instance base = generate_instance(5, cfg);
    const Instance ext = generate_instance(5, cfg, 25);
    REQUIRE(ext.sites.size() == 25);
    for (std::size_t i = 0; i < base.sites.size(); ++i)
      CHECK(ext.sites[i].pos == base.sites[i].pos);
  }
}

TEST_CASE("replicate statistics") {
  SECTION("single replication flags low confidence with zero half-width") {
    const ReplicatedStat s = detail::replicate_stat({42.0});
    CHECK(s.mean == 42.0);
    CHECK(s.half_width == 0.0);
    CHECK(s.n == 1);
    CHECK(s.low_confidence);
  }
  SECTION("aggregate mean is the arithmetic mean of replicates") {
    const ReplicatedStat s = detail::replicate_stat({1.0, 2.0, 3.0, 6.0});
    CHECK_THAT(s.mean, Catch::Matchers::WithinAbs(3.0, 1e-12));
    CHECK(s.n == 4);
    CHECK(s.half_width > 0.0);
  }
  SECTION("doubling replications does not raise the half-width in expectation") {
    std::mt19937_64 rng(1234);
    double hw_small = 0.0, hw_big = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<double> xs;
      for (int i = 0; i < 16; ++i)
        xs.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53);
      hw_small +=
          detail::replicate_stat(std::vector<double>(xs.begin(), xs.begin() + 8)).half_width;
      hw_big += detail::replicate_stat(xs).half_width;
    }
    CHECK(hw_big < hw_small);
  }
}

TEST_CASE("scenario sweep smoke") {
  ScenarioConfig cfg;
  cfg.n_sites = 4;
  cfg.replications = 2;
  cfg.cp_values = {100.0};
  cfg.horizons_months = {2.0, 6.0};
  cfg.capacities = {4};
  cfg.threads = 1;
  const ScenarioResult r = run_scenario(cfg);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.raw.size() == 4);
  CHECK(r.failures == 0);
  for (const auto& row : r.rows) {
    CHECK(row.total.n == 2);
    CHECK(row.total.mean > 0.0);
    CHECK(row.availability.mean >= 0.0);
    CHECK(row.availability.mean <= 1.0);
    CHECK(row.annual_km.mean >= 0.0);
    // aggregate equals the mean of its raw replicates
    double sum = 0.0;
    int n = 0;
    for (const auto& rec : r.raw)
      if (rec.ok && rec.key.horizon_months == row.key.horizon_months) {
        sum += rec.total;
        ++n;
      }
    CHECK_THAT(row.total.mean, Catch::Matchers::WithinRel(sum / n, 1e-12));
  }
  SECTION("seed determinism end to end") {
    const ScenarioResult r2 = run_scenario(cfg);
    REQUIRE(r2.rows.size() == r.rows.size());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      CHECK(r2.rows[i].total.mean == r.rows[i].total.mean);
      CHECK(r2.rows[i].annual_km.mean == r.rows[i].annual_km.mean);
    }
  }
}

TEST_CASE("extension study smoke") {
  ScenarioConfig cfg;
  cfg.n_sites = 4;
  cfg.replications = 2;
  cfg.cp_values = {100.0};
  cfg.horizons_months = {4.0};
  cfg.capacities = {4};
  cfg.threads = 1;
  SECTION("added = 0 gives a single point per method") {
    const ExtensionResult r = extension_study(cfg, 4, 0);
    CHECK(r.rows.size() == 2);
    for (const auto& row : r.rows) CHECK(row.n_sites == 4);
  }
  SECTION("annual distance grows with the site count") {
    const ExtensionResult r = extension_study(cfg, 4, 8, 4);
    double prev_bary = 0.0;
    for (const auto& row : r.rows)
      if (row.method == "barycentre") {
        CHECK(row.annual_km.mean >= prev_bary - 1e-9);
        prev_bary = row.annual_km.mean;
      }
  }
}
