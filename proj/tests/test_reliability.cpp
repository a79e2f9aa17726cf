#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "omcr/reliability.hpp"
#include "omcr/units.hpp"

using namespace omcr;

TEST_CASE("weibull cdf fixed points") {
  const FailureModel m2 = FailureModel::from_years(1.0, 2.0);
  CHECK(weibull_cdf(0.0, m2) == 0.0);
  CHECK_THAT(weibull_cdf(m2.eta_h, m2), Catch::Matchers::WithinAbs(1.0 - std::exp(-1.0), 1e-12));
  // t = 2*eta, beta = 2: 1 - e^-4
  CHECK_THAT(weibull_cdf(2.0 * m2.eta_h, m2), Catch::Matchers::WithinAbs(0.9816843611112658, 1e-12));
  CHECK_THROWS_AS(weibull_cdf(-1.0, m2), std::domain_error);
}

TEST_CASE("weibull pdf fixed points") {
  const FailureModel m2 = FailureModel::from_years(1.0, 2.0);
  CHECK(weibull_pdf(0.0, m2) == 0.0);
  const FailureModel m1(500.0, 1.0);
  CHECK_THAT(weibull_pdf(500.0, m1), Catch::Matchers::WithinRel(std::exp(-1.0) / 500.0, 1e-12));
  CHECK_THROWS_AS(weibull_pdf(-0.1, m2), std::domain_error);
}

TEST_CASE("model construction guards") {
  CHECK_THROWS_AS(FailureModel(0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(FailureModel(100.0, 0.9), std::invalid_argument);
  CHECK_NOTHROW(FailureModel(100.0, 1.0));
}

TEST_CASE("cdf monotone and pdf integrates to the cdf") {
  std::mt19937_64 rng(7);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  for (int trial = 0; trial < 25; ++trial) {
    const FailureModel m = FailureModel::from_years(uni(0.5, 2.0), uni(1.0, 3.0));
    const double T = uni(0.1, 2.0) * kHoursPerYear;
    const double integral =
        adaptive_simpson([&](double t) { return weibull_pdf(t, m); }, 0.0, T, 1e-10);
    CHECK_THAT(integral, Catch::Matchers::WithinAbs(weibull_cdf(T, m), 1e-8));
    const double t1 = uni(0.0, T), t2 = uni(0.0, T);
    CHECK(weibull_cdf(std::min(t1, t2), m) <= weibull_cdf(std::max(t1, t2), m));
  }
}

TEST_CASE("expected downtime of a uniform density is half the interval") {
  // synthetic model: failure instant uniform on [0, L]
  const double L = 120.0;
  auto cdf = [&](double t) { return std::min(t / L, 1.0); };
  auto pdf = [&](double t) { return t <= L ? 1.0 / L : 0.0; };
  const DowntimeEstimate e = expected_downtime(0.0, L, cdf, pdf);
  CHECK_THAT(e.ttd_h, Catch::Matchers::WithinAbs(L / 2.0, 1e-6));
  CHECK_THAT(e.failure_prob, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("flat cdf across the interval gives zero downtime") {
  auto cdf = [](double) { return 0.4; };
  auto pdf = [](double) { return 0.0; };
  const DowntimeEstimate e = expected_downtime(100.0, 100.5, cdf, pdf);
  CHECK(e.ttd_h == 0.0);
  CHECK(e.failure_prob == 0.0);
}

TEST_CASE("downtime quadrature agrees with Monte-Carlo sampling") {
  const FailureModel m = FailureModel::from_years(1.0, 2.0);
  const double next = years_to_hours(0.5);
  const DowntimeEstimate e = expected_downtime(0.0, next, m);

  std::mt19937_64 rng(42);
  const int samples = 200000;
  double sum = 0.0;
  long accepted = 0;
  for (int i = 0; i < samples; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double t = m.eta_h * std::pow(-std::log1p(-u), 1.0 / m.beta);
    if (t <= next) {
      sum += next - t;
      ++accepted;
    }
  }
  const double mc = sum / accepted;
  CHECK_THAT(e.ttd_h, Catch::Matchers::WithinRel(mc, 0.01));
  CHECK_THAT(e.failure_prob,
             Catch::Matchers::WithinRel(static_cast<double>(accepted) / samples, 0.02));
}

TEST_CASE("downtime bounds and right-enlargement monotonicity") {
  std::mt19937_64 rng(11);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  for (int trial = 0; trial < 40; ++trial) {
    const FailureModel m = FailureModel::from_years(uni(0.5, 1.5), uni(1.0, 3.0));
    const double a = uni(0.0, 1.0) * kHoursPerYear;
    const double b = a + uni(10.0, 1.0 * kHoursPerYear);
    const DowntimeEstimate e = expected_downtime(a, b, m);
    CHECK(e.ttd_h >= 0.0);
    CHECK(e.ttd_h <= b - a + 1e-9);
    CHECK(e.failure_prob >= 0.0);
    CHECK(e.failure_prob <= 1.0);
    const DowntimeEstimate wider = expected_downtime(a, b + 100.0, m);
    CHECK(wider.failure_prob >= e.failure_prob - 1e-12);
  }
  CHECK_THROWS_AS(expected_downtime(10.0, 10.0, FailureModel(100.0, 2.0)), std::invalid_argument);
}

TEST_CASE("site availability") {
  const std::vector<double> starts{250.0, 500.0};
  SECTION("no downtime") {
    const std::vector<double> ttds{0.0, 0.0}, probs{0.3, 0.6};
    CHECK(site_availability(starts, ttds, probs, 1000.0) == 1.0);
  }
  SECTION("full-horizon outage") {
    const std::vector<double> s1{1000.0}, ttds{1000.0}, probs{1.0};
    CHECK(site_availability(s1, ttds, probs, 1000.0) == 0.0);
  }
  SECTION("hand value") {
    const std::vector<double> s1{500.0}, ttds{100.0}, probs{0.5};
    CHECK_THAT(site_availability(s1, ttds, probs, 1000.0),
               Catch::Matchers::WithinAbs(0.95, 1e-12));
  }
  SECTION("always clamped to [0, 1]") {
    const std::vector<double> s1{400.0}, ttds{1000.0}, probs{1.0};
    CHECK(site_availability(s1, ttds, probs, 500.0) == 0.0);
  }
}
