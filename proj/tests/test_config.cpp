#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "omcr/config.hpp"

using namespace omcr;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = std::string("/tmp/omcr_test_") + name;
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("shipped defaults round-trip") {
  const ScenarioConfig c = parse_config(OMCR_SOURCE_DIR "/configs/table3.json");
  CHECK(c.n_sites == 10);
  CHECK(c.radius_km == 50.0);
  CHECK(c.cp_values == std::vector<double>{10.0, 100.0, 1000.0});
  CHECK(c.capacities == std::vector<int>{4, 6, 8});

  const std::string path = write_temp("roundtrip.json", config_to_json(c).dump(2));
  const ScenarioConfig c2 = parse_config(path);
  CHECK(config_to_json(c2) == config_to_json(c));
  CHECK(config_digest(c2) == config_digest(c));
}

TEST_CASE("scalar cp becomes a one-element axis, lists stay lists") {
  const std::string one = write_temp("cp1.json", R"({"cp_per_hour": 50})");
  CHECK(parse_config(one).cp_values == std::vector<double>{50.0});
  const std::string three = write_temp("cp3.json", R"({"cp_per_hour": [10, 100, 1000]})");
  CHECK(parse_config(three).cp_values.size() == 3);
}

TEST_CASE("digest is stable under key reordering") {
  const std::string a = write_temp("ka.json", R"({"n_sites": 8, "radius_km": 40})");
  const std::string b = write_temp("kb.json", R"({"radius_km": 40, "n_sites": 8})");
  CHECK(config_digest(parse_config(a)) == config_digest(parse_config(b)));
  const std::string c = write_temp("kc.json", R"({"radius_km": 41, "n_sites": 8})");
  CHECK(config_digest(parse_config(c)) != config_digest(parse_config(a)));
}

TEST_CASE("validation names the offending key") {
  const std::string neg = write_temp("neg.json", R"({"radius_km": -5})");
  CHECK_THROWS_WITH(parse_config(neg), Catch::Matchers::ContainsSubstring("radius_km"));
  const std::string unknown = write_temp("unk.json", R"({"radius": 50})");
  CHECK_THROWS_WITH(parse_config(unknown), Catch::Matchers::ContainsSubstring("unknown key"));
  const std::string bad = write_temp("bad.json", "{not json");
  CHECK_THROWS_WITH(parse_config(bad), Catch::Matchers::ContainsSubstring("malformed"));
  CHECK_THROWS_WITH(parse_config("/tmp/omcr_missing_config.json"),
                    Catch::Matchers::ContainsSubstring("cannot open"));
}
