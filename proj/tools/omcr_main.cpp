// Command-line front end: studies over the maintenance + routing stack with
// CSV outputs. Exit codes: 0 ok, 1 usage, 2 infeasible, 3 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omcr/config.hpp"
#include "omcr/csv.hpp"
#include "omcr/design.hpp"
#include "omcr/expkit.hpp"
#include "omcr/loop.hpp"
#include "omcr/routing_io.hpp"

namespace {

constexpr const char* kToolVersion = "omcr 1.0.0";

double parse_duration_hours(const std::string& text) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw CLI::ValidationError("duration", "expected <number><unit>, got '" + text + "'");
  }
  std::string unit = text.substr(pos);
  for (auto& c : unit) c = static_cast<char>(std::tolower(c));
  if (unit == "h" || unit == "hour" || unit == "hours") return value;
  if (unit == "d" || unit == "day" || unit == "days") return value * omcr::kHoursPerDay;
  if (unit == "m" || unit == "mo" || unit == "month" || unit == "months")
    return omcr::months_to_hours(value);
  if (unit == "y" || unit == "yr" || unit == "year" || unit == "years")
    return omcr::years_to_hours(value);
  throw CLI::ValidationError("duration", "unknown unit '" + unit + "' in '" + text + "'");
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> n_sites;
  std::optional<int> replications;
  std::optional<int> threads;
  std::vector<double> cps;
  std::vector<int> qs;
  std::vector<double> horizons_months;
  std::optional<double> radius_km;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "JSON configuration file");
  cmd->add_option("--out-dir", a.out_dir, "output directory");
  cmd->add_option("--seed", a.seed, "base random seed");
  cmd->add_option("--n", a.n_sites, "number of production sites");
  cmd->add_option("--reps", a.replications, "replication count");
  cmd->add_option("--threads", a.threads, "worker threads (0 = auto)");
  cmd->add_option("--cp", a.cps, "penalty cost scenario values, $/h");
  cmd->add_option("--q", a.qs, "vehicle capacities");
  cmd->add_option("--horizon-months", a.horizons_months, "scheduling horizons, months");
  cmd->add_option("--radius-km", a.radius_km, "site distribution radius, km");
}

omcr::ScenarioConfig resolve_config(const CommonArgs& a) {
  omcr::ScenarioConfig c = a.config_path.empty() ? omcr::ScenarioConfig{}
                                                 : omcr::parse_config(a.config_path);
  if (a.seed) c.seed = *a.seed;
  if (a.n_sites) c.n_sites = *a.n_sites;
  if (a.replications) c.replications = *a.replications;
  if (a.threads) c.threads = *a.threads;
  if (!a.cps.empty()) c.cp_values = a.cps;
  if (!a.qs.empty()) c.capacities = a.qs;
  if (!a.horizons_months.empty()) c.horizons_months = a.horizons_months;
  if (a.radius_km) c.radius_km = *a.radius_km;
  return c;
}

std::string out_path(const CommonArgs& a, const std::string& name) {
  std::filesystem::create_directories(a.out_dir);
  return (std::filesystem::path(a.out_dir) / name).string();
}

void write_manifest(const CommonArgs& a, omcr::RunManifest m) {
  std::ofstream out(out_path(a, "manifest.json"));
  out << omcr::manifest_to_json(m).dump(2) << "\n";
}

std::vector<std::string> sweep_header() {
  return {"cp_per_hour", "horizon_months", "capacity", "depot_method", "metric",
          "mean",        "half_width",     "n"};
}

void write_sweep_csv(const std::string& path, const std::string& digest,
                     const omcr::ScenarioResult& result) {
  omcr::CsvWriter csv(path, digest, sweep_header());
  auto emit = [&](const omcr::SweepRow& row, const char* metric, const omcr::ReplicatedStat& s) {
    csv.write_row({omcr::csv_num(row.key.cp), omcr::csv_num(row.key.horizon_months),
                   std::to_string(row.key.capacity), row.key.method, metric, omcr::csv_num(s.mean),
                   omcr::csv_num(s.half_width), std::to_string(s.n)});
  };
  for (const auto& row : result.rows) {
    emit(row, "total_cost", row.total);
    emit(row, "transport_cost", row.transport);
    emit(row, "operations_cost", row.operations);
    emit(row, "downtime_cost", row.downtime);
    emit(row, "availability", row.availability);
    emit(row, "annual_km", row.annual_km);
    emit(row, "ops_per_site", row.ops_per_site);
  }
}

void write_raw_csv(const std::string& path, const std::string& digest,
                   const omcr::ScenarioResult& result) {
  omcr::CsvWriter csv(path, digest,
                      {"replication", "cp_per_hour", "horizon_months", "capacity", "depot_method",
                       "ok", "total_cost", "transport_cost", "operations_cost", "downtime_cost",
                       "availability", "annual_km", "ops_per_site"});
  for (const auto& r : result.raw)
    csv.write_row({std::to_string(r.replication), omcr::csv_num(r.key.cp),
                   omcr::csv_num(r.key.horizon_months), std::to_string(r.key.capacity),
                   r.key.method, r.ok ? "1" : "0", omcr::csv_num(r.total),
                   omcr::csv_num(r.transport), omcr::csv_num(r.operations),
                   omcr::csv_num(r.downtime), omcr::csv_num(r.availability),
                   omcr::csv_num(r.annual_km), omcr::csv_num(r.ops_per_site)});
}

void write_extension_csv(const std::string& path, const std::string& digest,
                         const omcr::ExtensionResult& result) {
  omcr::CsvWriter csv(path, digest,
                      {"depot_method", "n_sites", "metric", "mean", "half_width", "n"});
  for (const auto& row : result.rows) {
    csv.write_row({row.method, std::to_string(row.n_sites), "annual_km",
                   omcr::csv_num(row.annual_km.mean), omcr::csv_num(row.annual_km.half_width),
                   std::to_string(row.annual_km.n)});
    csv.write_row({row.method, std::to_string(row.n_sites), "total_cost",
                   omcr::csv_num(row.total.mean), omcr::csv_num(row.total.half_width),
                   std::to_string(row.total.n)});
  }
}

int cmd_solve(const CommonArgs& args, double horizon_h) {
  omcr::ScenarioConfig config = resolve_config(args);
  const std::string digest = omcr::config_digest(config);
  omcr::Instance inst = generate_instance(config.seed, config);
  std::vector<omcr::Site> sites = inst.sites;
  const omcr::VehicleSpec vehicle = config.vehicle(config.capacities.at(0));
  const omcr::Point depot = omcr::barycentre_location(sites, horizon_h);
  const omcr::OmcrResult run =
      omcr::run_omcr(sites, depot, vehicle, horizon_h, {}, config.planning());

  {
    omcr::CsvWriter csv(out_path(args, "costs.csv"), digest,
                        {"metric", "value"});
    csv.write_row({"transport_cost", omcr::csv_num(run.costs.transport)});
    csv.write_row({"operations_cost", omcr::csv_num(run.costs.operations)});
    csv.write_row({"downtime_cost", omcr::csv_num(run.costs.downtime)});
    csv.write_row({"total_cost", omcr::csv_num(run.costs.total)});
    csv.write_row({"mean_availability", omcr::csv_num(omcr::mean_of(run.availability))});
    csv.write_row({"iterations", std::to_string(run.iterations)});
  }
  {
    omcr::CsvWriter csv(out_path(args, "trace.csv"), digest,
                        {"iteration", "site", "nop", "transport_cost", "operations_cost",
                         "downtime_cost", "total_cost"});
    for (const auto& rec : run.trace)
      for (std::size_t i = 0; i < rec.nops.size(); ++i)
        csv.write_row({std::to_string(rec.iteration), std::to_string(i),
                       std::to_string(rec.nops[i]), omcr::csv_num(rec.costs.transport),
                       omcr::csv_num(rec.costs.operations), omcr::csv_num(rec.costs.downtime),
                       omcr::csv_num(rec.costs.total)});
  }
  {
    const omcr::RoutingProblem problem =
        omcr::build_operation_graph(run.plan, sites, depot, vehicle);
    std::ofstream out(out_path(args, "routing.txt"));
    out << "# manifest_digest=" << digest << "\n";
    omcr::RoutingProblem with_fleet = problem;
    with_fleet.fleet = run.schedule.vehicles;
    omcr::write_routing_text(out, with_fleet, run.schedule);
  }
  write_manifest(args, {"solve", digest, config.seed, kToolVersion,
                        {"costs.csv", "trace.csv", "routing.txt"}});
  std::cout << "total " << run.costs.total << " $/h over " << run.iterations << " iterations ("
            << run.plan.total_operations() << " operations)\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args, const char* name,
              const std::function<void(omcr::ScenarioConfig&)>& preset) {
  omcr::ScenarioConfig config = resolve_config(args);
  preset(config);
  const std::string digest = omcr::config_digest(config);
  const omcr::ScenarioResult result = omcr::run_scenario(config);
  const std::string table = std::string(name) + ".csv";
  const std::string raw = std::string(name) + "_replicates.csv";
  write_sweep_csv(out_path(args, table), digest, result);
  write_raw_csv(out_path(args, raw), digest, result);
  write_manifest(args, {name, digest, config.seed, kToolVersion, {table, raw}});
  std::cout << name << ": " << result.rows.size() << " cells, " << result.raw.size()
            << " replicate runs, " << result.failures << " failures\n";
  return 0;
}

int cmd_extension(const CommonArgs& args, const char* name, int initial_n, int added, int step) {
  omcr::ScenarioConfig config = resolve_config(args);
  const std::string digest = omcr::config_digest(config);
  const omcr::ExtensionResult result = omcr::extension_study(config, initial_n, added, step);
  const std::string table = std::string(name) + ".csv";
  write_extension_csv(out_path(args, table), digest, result);
  write_manifest(args, {name, digest, config.seed, kToolVersion, {table}});
  std::cout << name << ": " << result.rows.size() << " rows\n";
  return 0;
}

int cmd_validate(const std::string& input) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open " + input);
  omcr::RoutingProblem problem;
  omcr::RoutingSolution solution;
  omcr::read_routing_text(in, problem, solution);
  const omcr::ConstraintReport report = omcr::validate_solution(problem, solution);
  for (const auto& c : report.checks)
    std::cout << "constraint (" << c.id << ") " << (c.pass ? "pass" : "FAIL")
              << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
  return report.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed-maintenance planning, routing and design studies"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string horizon_text = "6months";
  std::string validate_input;
  int initial_n = 10, added = 30, step = 5;

  auto* solve = app.add_subcommand("solve", "single instance, full optimization loop");
  add_common(solve, args);
  solve->add_option("--horizon", horizon_text, "scheduling horizon, e.g. 6months, 732h, 2y");

  auto* sweep = app.add_subcommand("horizon-sweep", "costs and availability vs horizon");
  add_common(sweep, args);

  auto* depot = app.add_subcommand("depot-study", "barycentre vs near-site depot, growing sites");
  add_common(depot, args);
  depot->add_option("--initial-n", initial_n, "sites used to fix the depot");
  depot->add_option("--added", added, "sites added after the depot is fixed");
  depot->add_option("--step", step, "site-count step between evaluations");

  auto* capacity = app.add_subcommand("capacity-study", "vehicle capacity comparison");
  add_common(capacity, args);

  auto* extension = app.add_subcommand("extension-study", "site-count extension study");
  add_common(extension, args);
  extension->add_option("--initial-n", initial_n, "sites used to fix the depot");
  extension->add_option("--added", added, "sites added after the depot is fixed");
  extension->add_option("--step", step, "site-count step between evaluations");

  auto* validate = app.add_subcommand("validate", "replay a stored routing solution");
  validate->add_option("--input", validate_input, "routing text file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(args, parse_duration_hours(horizon_text));
    if (sweep->parsed())
      return cmd_sweep(args, "horizon_sweep", [](omcr::ScenarioConfig& c) {
        c.capacities = {c.capacities.at(0)};
      });
    if (capacity->parsed())
      return cmd_sweep(args, "capacity_study", [](omcr::ScenarioConfig& c) {
        c.cp_values = {c.cp_values.size() > 1 ? c.cp_values.at(1) : c.cp_values.at(0)};
        c.horizons_months = {4.0};
        c.depot_methods = {"barycentre"};
      });
    if (depot->parsed()) return cmd_extension(args, "depot_study", initial_n, added, step);
    if (extension->parsed()) return cmd_extension(args, "extension_study", initial_n, added, step);
    if (validate->parsed()) return cmd_validate(validate_input);
  } catch (const omcr::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
