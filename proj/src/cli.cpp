#include "floodsp/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "floodsp/analysis.hpp"
#include "floodsp/extensive_form.hpp"
#include "floodsp/fixtures.hpp"
#include "floodsp/geo.hpp"
#include "floodsp/geo_remap.hpp"
#include "floodsp/grid.hpp"
#include "floodsp/heuristic.hpp"
#include "floodsp/mitigation.hpp"
#include "floodsp/recourse.hpp"
#include "floodsp/scenario.hpp"
#include "floodsp/scenario_gen.hpp"

namespace floodsp::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

json envelope_to_json(const ResultEnvelope& env) {
  return json{{"schema_version", env.schema_version},
              {"command", env.command},
              {"config", env.config},
              {"timing", env.timing},
              {"result", env.result}};
}

ResultEnvelope envelope_from_json(const json& doc) {
  for (const char* key : {"schema_version", "command", "config", "timing", "result"}) {
    if (!doc.contains(key)) throw std::runtime_error(std::string("envelope: missing key '") + key + "'");
  }
  ResultEnvelope env;
  env.schema_version = doc.at("schema_version").get<int>();
  if (env.schema_version < 1 || env.schema_version > kSchemaVersion) {
    throw std::runtime_error("envelope: unsupported schema version " + std::to_string(env.schema_version));
  }
  env.command = doc.at("command").get<std::string>();
  env.config = doc.at("config");
  env.timing = doc.at("timing");
  env.result = doc.at("result");
  return env;
}

namespace {

// Non-finite numbers become strings so envelopes round-trip.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

struct InstanceOptions {
  std::string network;
  std::string scenarios;
  int rhat = 3;
  double shed_weight = 1.0;
  double over_weight = 1.0;
  bool normalize = false;

  [[nodiscard]] json to_json() const {
    return {{"network", network}, {"scenarios", scenarios},     {"rhat", rhat},
            {"shed_weight", shed_weight}, {"over_weight", over_weight}, {"normalize", normalize}};
  }
};

struct SolverOptions {
  double rel_gap = 0.0;
  long node_limit = 0;
  double time_limit = 0.0;
  bool log_events = false;

  [[nodiscard]] json to_json() const {
    return {{"rel_gap", rel_gap}, {"node_limit", node_limit}, {"time_limit", time_limit}};
  }
};

void add_instance(CLI::App* sub, InstanceOptions& o, bool with_scenarios = true) {
  sub->add_option("--network", o.network, "Network JSON file")->required()->check(CLI::ExistingFile);
  if (with_scenarios) {
    sub->add_option("--scenarios", o.scenarios, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_flag("--normalize", o.normalize, "Rescale scenario probabilities to sum to 1");
  }
  sub->add_option("--rhat", o.rhat, "Unattainable flood level")->check(CLI::Range(2, 64));
  sub->add_option("--shed-weight", o.shed_weight, "Load-shed penalty");
  sub->add_option("--over-weight", o.over_weight, "Overgeneration penalty");
}

void add_solver(CLI::App* sub, SolverOptions& o) {
  sub->add_option("--gap", o.rel_gap, "Relative optimality gap")->check(CLI::NonNegativeNumber);
  sub->add_option("--node-limit", o.node_limit, "Branch-and-bound node limit (0 = none)");
  sub->add_option("--time-limit", o.time_limit, "Time limit in seconds (0 = none)");
  sub->add_flag("--log-events", o.log_events, "Write solver events as JSON lines to stderr");
}

lp::BnbConfig bnb_config(const SolverOptions& o, std::ostream& err) {
  lp::BnbConfig cfg;
  cfg.rel_gap = o.rel_gap;
  cfg.node_limit = o.node_limit;
  cfg.time_limit_s = o.time_limit;
  if (o.log_events) {
    cfg.log = [&err](const lp::SolverEvent& e) {
      err << json{{"event", e.kind}, {"nodes", e.nodes}, {"incumbent", number(e.incumbent)}, {"bound", number(e.bound)}}
                 .dump()
          << '\n';
    };
  }
  return cfg;
}

struct Instance {
  GridNetwork network;
  FloodScenarioSet scenarios;
  CostSchedule schedule;
  LossWeights weights;
};

Instance load_instance(const InstanceOptions& o) {
  Instance in;
  in.network = load_network(o.network);
  const auto violations = validate(in.network);
  if (!violations.empty()) {
    throw std::runtime_error("invalid network: " + violations.front().entity + ": " + violations.front().message);
  }
  if (!o.scenarios.empty()) in.scenarios = load_scenarios(o.scenarios, in.network, o.normalize);
  in.schedule = CostSchedule::from_network(in.network);
  in.weights = LossWeights{o.shed_weight, o.over_weight};
  in.weights.check();
  return in;
}

json levels_json(const MitigationPlan& plan, const GridNetwork& network) { return plan_to_json(plan, network)["levels"]; }

void write_json(const fs::path& path, const json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << doc.dump(2) << '\n';
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

json evaluation_json(const PlanEvaluation& ev, const FloodScenarioSet& scenarios) {
  json per = json::array();
  for (size_t w = 0; w < scenarios.scenarios.size(); ++w) {
    per.push_back({{"scenario", scenarios.scenarios[w].id},
                   {"probability", scenarios.scenarios[w].probability},
                   {"loss", ev.losses[w]},
                   {"served_load", ev.served_load[w]}});
  }
  return {{"expected_loss", ev.expected_loss}, {"scenarios", per}};
}

json spared_json(const SparedCapacity& s) {
  return {{"load", s.load},       {"generation", s.generation},       {"transmission", s.transmission},
          {"load_pu", s.load_pu}, {"generation_pu", s.generation_pu}, {"transmission_pu", s.transmission_pu}};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

// --- subcommands -------------------------------------------------------------

struct ValidateOptions {
  InstanceOptions inst;
};

int cmd_validate(const ValidateOptions& o, ResultEnvelope& env) {
  env.config = {{"network", o.inst.network}, {"scenarios", o.inst.scenarios}, {"normalize", o.inst.normalize}};
  const auto network = load_network(o.inst.network);
  json violations = json::array();
  for (const auto& v : validate(network)) violations.push_back({{"entity", v.entity}, {"message", v.message}});
  env.result["violations"] = violations;
  env.result["buses"] = network.num_buses();
  env.result["branches"] = network.num_branches();
  env.result["substations"] = network.num_substations();
  if (!o.inst.scenarios.empty() && violations.empty()) {
    try {
      const auto set = load_scenarios(o.inst.scenarios, network, o.inst.normalize);
      env.result["scenarios"] = set.size();
      env.result["level_count"] = set.level_count;
    } catch (const std::exception& e) {
      env.result["violations"].push_back({{"entity", "scenarios"}, {"message", e.what()}});
    }
  }
  return env.result["violations"].empty() ? 0 : 2;
}

struct FixtureOptions {
  std::string name;
  std::string dir;
};

int cmd_make_fixture(const FixtureOptions& o, ResultEnvelope& env) {
  env.config = {{"name", o.name}, {"dir", o.dir}};
  const auto fx = make_fixture(o.name);
  const fs::path dir(o.dir);
  write_json(dir / "network.json", network_to_json(fx.network));
  write_json(dir / "scenarios.json", scenarios_to_json(fx.scenarios, fx.network));
  env.result = {{"network", (dir / "network.json").string()},
                {"scenarios", (dir / "scenarios.json").string()},
                {"rhat", fx.rhat},
                {"scenario_count", fx.scenarios.size()}};
  if (fx.name == "coastal40") {
    json verts = json::array();
    const auto coast = gulf_coastline();
    for (const auto& p : coast.vertices()) verts.push_back({p.lon, p.lat});
    write_json(dir / "coastline.json", json{{"vertices", verts}});
    env.result["coastline"] = (dir / "coastline.json").string();
  }
  return 0;
}

struct GenOptions {
  std::string network;
  std::string coastline;
  std::string out;
  int count = 25;
  std::uint64_t seed = 2017;
  std::optional<double> mean_km;
  double cone_nmi = 89.0;
  double peak = 1.5;
  double decay = 40.0;
  double bearing = 315.0;
  double dry_below = 0.0;
  std::string thresholds = "0.534,1.0,1.464";
};

int cmd_gen_scenarios(const GenOptions& o, ResultEnvelope& env) {
  const auto network = load_network(o.network);
  const auto coast = load_coastline(o.coastline);
  LandfallDistribution dist{coast, o.mean_km.value_or(coast.length_km() / 2.0), o.cone_nmi};
  InundationKernel kernel{o.peak, o.decay, o.bearing, o.dry_below};
  DepthThresholds thresholds{parse_list(o.thresholds)};
  env.config = {{"network", o.network},   {"coastline", o.coastline},     {"out", o.out},
                {"count", o.count},       {"seed", o.seed},               {"mean_km", dist.mean_km},
                {"cone_nmi", o.cone_nmi}, {"peak_depth_m", o.peak},       {"decay_km", o.decay},
                {"bearing_deg", o.bearing}, {"dry_below_m", o.dry_below}, {"thresholds", thresholds.heights}};
  const auto set = generate_scenarios(network, dist, kernel, thresholds, o.count, o.seed);
  write_json(o.out, scenarios_to_json(set, network));
  const auto landfalls = stratified_landfalls(dist, o.count, o.seed);
  json marks = json::array();
  for (size_t i = 0; i < landfalls.size(); ++i) {
    const auto p = coast.point_at(landfalls[i]);
    int flooded = 0;
    for (int k = 0; k < network.num_substations(); ++k) flooded += set.scenarios[i].levels[static_cast<size_t>(k)] > 0;
    marks.push_back({{"scenario", set.scenarios[i].id},
                     {"arc_km", landfalls[i]},
                     {"lon", p.lon},
                     {"lat", p.lat},
                     {"flooded_substations", flooded}});
  }
  env.result = {{"scenarios", o.out},
                {"count", set.size()},
                {"level_count", set.level_count},
                {"sigma_km", sigma_from_cone(o.cone_nmi) * geo::kKmPerNmi},
                {"landfalls", marks}};
  return 0;
}

struct HeuristicOptions {
  InstanceOptions inst;
  int budget = 0;
  std::vector<double> eta_flow;
  double eta_gen = 0.0;
  std::string plan_out;
  std::string plan_dir;
};

int cmd_heuristic(const HeuristicOptions& o, ResultEnvelope& env) {
  const auto in = load_instance(o.inst);
  const auto grid = o.eta_flow.empty() ? kDefaultEtaFlow : o.eta_flow;
  env.config = o.inst.to_json();
  env.config["budget"] = o.budget;
  env.config["eta_flow"] = grid;
  env.config["eta_gen"] = o.eta_gen;
  std::vector<PortfolioEntry> entries;
  if (o.eta_gen == 0.0) {
    entries = portfolio(Budget{o.budget}, in.network, in.scenarios, in.schedule, o.inst.rhat, grid);
  } else {
    for (double eta : grid) {
      auto plan = greedy(AttributeWeights{1.0, o.eta_gen, eta}, Budget{o.budget}, in.network, in.scenarios,
                         in.schedule, o.inst.rhat)
                      .plan;
      auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.plan == plan; });
      if (it == entries.end()) entries.push_back({std::move(plan), {eta}});
      else it->eta_flow.push_back(eta);
    }
  }
  json list = json::array();
  int best = -1;
  double best_loss = lp::kInfinity;
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto ev = evaluate_plan(in.network, entries[i].plan, in.scenarios, in.weights);
    if (ev.expected_loss < best_loss - 1e-12) {
      best_loss = ev.expected_loss;
      best = static_cast<int>(i);
    }
    list.push_back({{"eta_flow", entries[i].eta_flow},
                    {"plan", levels_json(entries[i].plan, in.network)},
                    {"cost", plan_cost(entries[i].plan, in.schedule)},
                    {"expected_loss", ev.expected_loss}});
    if (!o.plan_dir.empty()) {
      write_json(fs::path(o.plan_dir) / ("plan-" + std::to_string(i) + ".json"), plan_to_json(entries[i].plan, in.network));
    }
  }
  json ranking = json::array();
  std::vector<size_t> order(entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return list[a]["expected_loss"].get<double>() < list[b]["expected_loss"].get<double>();
  });
  for (size_t i : order) ranking.push_back(i);
  env.result = {{"portfolio", list}, {"ranking", ranking}, {"best", best}};
  if (best >= 0) {
    env.result["plan"] = list[static_cast<size_t>(best)]["plan"];
    env.result["expected_loss"] = best_loss;
    if (!o.plan_out.empty()) write_json(o.plan_out, plan_to_json(entries[static_cast<size_t>(best)].plan, in.network));
  }
  return 0;
}

struct SolveOptions {
  InstanceOptions inst;
  SolverOptions solver;
  int budget = 0;
  bool relax_status = false;
  bool no_heuristic = false;
  std::vector<std::string> service_levels;
  std::string lp_out;
  std::string plan_out;
};

ExtensiveOptions extensive_options(const SolveOptions& o, const GridNetwork& network) {
  ExtensiveOptions eo;
  eo.relax_status = o.relax_status;
  for (const auto& spec : o.service_levels) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw std::runtime_error("--service-level expects BUS=FRACTION, got '" + spec + "'");
    eo.service_levels[network.bus_index(spec.substr(0, eq))] = std::stod(spec.substr(eq + 1));
  }
  return eo;
}

json solve_config(const SolveOptions& o) {
  json c = o.inst.to_json();
  c["budget"] = o.budget;
  c["relax_status"] = o.relax_status;
  c["service_levels"] = o.service_levels;
  c["solver"] = o.solver.to_json();
  c["heuristic_warm_start"] = !o.no_heuristic;
  return c;
}

struct Solved {
  ExtensiveForm form;
  ExtensiveSolution sol;
  double heuristic_objective = lp::kInfinity;
};

Solved solve_instance(const SolveOptions& o, const Instance& in, std::ostream& err) {
  Solved s{build_extensive_form(in.network, in.scenarios, in.schedule, Budget{o.budget}, o.inst.rhat, in.weights,
                                extensive_options(o, in.network)),
           {},
           lp::kInfinity};
  auto cfg = bnb_config(o.solver, err);
  if (!o.no_heuristic) {
    for (const auto& entry : portfolio(Budget{o.budget}, in.network, in.scenarios, in.schedule, o.inst.rhat)) {
      auto v = complete_solution(s.form, in.network, in.scenarios, entry.plan, in.weights);
      if (s.form.model.max_violation(v) <= cfg.feasibility_tol)
        s.heuristic_objective = std::min(s.heuristic_objective, s.form.model.objective_value(v));
      cfg.candidates.push_back(std::move(v));
    }
  }
  s.sol = solve_extensive_form(s.form, cfg);
  return s;
}

int cmd_solve(const SolveOptions& o, ResultEnvelope& env, std::ostream& err) {
  env.config = solve_config(o);
  const auto in = load_instance(o.inst);
  const auto s = solve_instance(o, in, err);
  if (!o.lp_out.empty()) {
    auto f = open_out(o.lp_out);
    lp::write_lp_format(s.form.model, f);
  }
  env.result = {{"status", lp::to_string(s.sol.milp.status)},
                {"objective", number(s.sol.objective)},
                {"bound", number(s.sol.milp.bound)},
                {"nodes", s.sol.milp.nodes},
                {"lp_iterations", s.sol.milp.lp_iterations},
                {"heuristic_objective", number(s.heuristic_objective)},
                {"variables", s.form.model.num_variables()},
                {"constraints", s.form.model.num_constraints()},
                {"binaries", s.form.binary_count}};
  if (!s.sol.solved()) return 1;
  env.result["plan"] = levels_json(s.sol.plan, in.network);
  env.result["plan_cost"] = plan_cost(s.sol.plan, in.schedule);
  if (o.service_levels.empty()) {
    env.result["evaluation"] = evaluation_json(evaluate_plan(in.network, s.sol.plan, in.scenarios, in.weights), in.scenarios);
  }
  env.result["spared"] = spared_json(spared_capacity(s.sol.plan, in.network, in.scenarios));
  if (!o.plan_out.empty()) write_json(o.plan_out, plan_to_json(s.sol.plan, in.network));
  return 0;
}

int cmd_check_unique(const SolveOptions& o, ResultEnvelope& env, std::ostream& err) {
  env.config = solve_config(o);
  const auto in = load_instance(o.inst);
  const auto s = solve_instance(o, in, err);
  env.result = {{"status", lp::to_string(s.sol.milp.status)}, {"objective", number(s.sol.objective)}};
  if (!s.sol.solved()) return 1;
  env.result["plan"] = levels_json(s.sol.plan, in.network);
  std::vector<double> point;
  for (int v : s.form.x_vars) point.push_back(s.sol.milp.values[static_cast<size_t>(v)]);
  const auto u = lp::check_uniqueness(s.form.model, s.form.x_vars, point, s.sol.objective, bnb_config(o.solver, err));
  env.result["unique"] = u.unique;
  env.result["cut_status"] = lp::to_string(u.cut_status);
  env.result["cut_objective"] = number(u.cut_objective);
  if (u.witness) env.result["witness"] = levels_json(extract_plan(s.form, *u.witness), in.network);
  return 0;
}

struct EvalOptions {
  InstanceOptions inst;
  std::string plan;
  bool zero_plan = false;
};

int cmd_eval(const EvalOptions& o, ResultEnvelope& env) {
  env.config = o.inst.to_json();
  env.config["plan"] = o.plan;
  env.config["zero_plan"] = o.zero_plan;
  const auto in = load_instance(o.inst);
  const auto plan = o.zero_plan ? MitigationPlan(in.network.num_substations(), o.inst.rhat)
                                : load_plan(o.plan, in.network, o.inst.rhat);
  env.result = evaluation_json(evaluate_plan(in.network, plan, in.scenarios, in.weights), in.scenarios);
  env.result["plan"] = levels_json(plan, in.network);
  env.result["plan_cost"] = plan_cost(plan, in.schedule);
  env.result["spared"] = spared_json(spared_capacity(plan, in.network, in.scenarios));
  return 0;
}

struct SweepCliOptions {
  InstanceOptions inst;
  SolverOptions solver;
  std::string max_budget = "auto";
  bool check_unique = false;
  bool relax_status = false;
  bool verbose = false;
  std::string out_dir;
};

void write_sweep_tables(const fs::path& dir, const SweepReport& rep, const Nestedness& nest, const GridNetwork& network) {
  auto sweep_csv = open_out(dir / "sweep.csv");
  sweep_csv << "budget,status,objective,bound,plan_cost,nodes,lp_iterations,heuristic_objective,unique,"
               "spared_load,spared_generation,spared_transmission,spared_load_pu,spared_generation_pu,"
               "spared_transmission_pu\n";
  for (const auto& r : rep.rows) {
    sweep_csv << r.budget << ',' << r.status << ',' << format_double(r.objective) << ',' << format_double(r.bound) << ','
              << r.plan_cost << ',' << r.nodes << ',' << r.lp_iterations << ',' << format_double(r.heuristic_objective)
              << ',' << (r.unique ? (*r.unique ? "yes" : "no") : "") << ',' << format_double(r.spared.load) << ','
              << format_double(r.spared.generation) << ',' << format_double(r.spared.transmission) << ','
              << format_double(r.spared.load_pu) << ',' << format_double(r.spared.generation_pu) << ','
              << format_double(r.spared.transmission_pu) << '\n';
  }
  auto plans_csv = open_out(dir / "plans.csv");
  plans_csv << "budget,substation,level\n";
  for (const auto& r : rep.rows) {
    if (r.plan.num_substations() == 0) continue;
    for (int k = 0; k < network.num_substations(); ++k) {
      plans_csv << r.budget << ',' << network.substations()[static_cast<size_t>(k)].id << ',' << r.plan.level(k) << '\n';
    }
  }
  auto tr_csv = open_out(dir / "transitions.csv");
  tr_csv << "budget,substation,from_level,to_level,direction\n";
  for (const auto& t : rep.transitions) {
    tr_csv << t.budget << ',' << network.substations()[static_cast<size_t>(t.substation)].id << ',' << t.from_level << ','
           << t.to_level << ',' << (t.upward ? "up" : "down") << '\n';
  }
  auto iv_csv = open_out(dir / "intervals.csv");
  iv_csv << "substation,level,first_budget,last_budget\n";
  for (const auto& iv : nest.intervals) {
    iv_csv << network.substations()[static_cast<size_t>(iv.substation)].id << ',' << iv.level << ',' << iv.first << ','
           << iv.last << '\n';
  }
}

int cmd_sweep(const SweepCliOptions& o, ResultEnvelope& env, std::ostream& err) {
  env.config = o.inst.to_json();
  env.config["max_budget"] = o.max_budget;
  env.config["check_unique"] = o.check_unique;
  env.config["relax_status"] = o.relax_status;
  env.config["solver"] = o.solver.to_json();
  env.config["out_dir"] = o.out_dir;
  const auto in = load_instance(o.inst);
  SweepOptions so;
  if (o.max_budget != "auto") {
    size_t used = 0;
    const int f = std::stoi(o.max_budget, &used);
    if (used != o.max_budget.size() || f < 0) throw std::runtime_error("--max-budget must be 'auto' or a nonnegative integer");
    so.max_budget = f;
  }
  so.check_unique = o.check_unique;
  so.relax_status = o.relax_status;
  so.bnb = bnb_config(o.solver, err);
  if (o.verbose) so.progress = [&err](int f, double obj) { err << "budget " << f << " objective " << format_double(obj) << '\n'; };
  const auto rep = sweep(in.network, in.scenarios, in.schedule, o.inst.rhat, in.weights, so);
  const auto nest = nestedness(rep);

  json rows = json::array();
  bool monotone = true;
  int failures = 0;
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    if (!r.error.empty() || r.plan.num_substations() == 0 || !std::isfinite(r.objective)) ++failures;
    if (i > 0 && r.objective > rep.rows[i - 1].objective + 1e-6) monotone = false;
    json row = {{"budget", r.budget},
                {"status", r.status},
                {"objective", number(r.objective)},
                {"bound", number(r.bound)},
                {"plan_cost", r.plan_cost},
                {"nodes", r.nodes},
                {"lp_iterations", r.lp_iterations},
                {"heuristic_objective", number(r.heuristic_objective)},
                {"seconds", r.seconds},
                {"spared", spared_json(r.spared)}};
    if (r.plan.num_substations() > 0) row["plan"] = levels_json(r.plan, in.network);
    if (r.unique) row["unique"] = *r.unique;
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  json violations = json::array();
  for (const auto& [a, b] : nest.violations) violations.push_back({a, b});
  json changes = json::object();
  for (int k = 0; k < in.network.num_substations(); ++k) {
    changes[in.network.substations()[static_cast<size_t>(k)].id] =
        nest.change_counts.empty() ? 0 : nest.change_counts[static_cast<size_t>(k)];
  }
  env.result = {{"rhat", rep.rhat},
                {"rows", rows},
                {"monotone", monotone},
                {"failures", failures},
                {"nestedness_violations", violations},
                {"change_counts", changes}};
  if (!o.out_dir.empty()) write_sweep_tables(o.out_dir, rep, nest, in.network);
  return failures == 0 ? 0 : 1;
}

struct CompareOptions {
  InstanceOptions inst;
  SolverOptions solver;
  int budget = 0;
  std::string rhat_values = "3,4";
};

int cmd_compare_rhat(const CompareOptions& o, ResultEnvelope& env, std::ostream& err) {
  env.config = o.inst.to_json();
  env.config.erase("rhat");
  env.config["budget"] = o.budget;
  env.config["rhat_values"] = o.rhat_values;
  env.config["solver"] = o.solver.to_json();
  const auto in = load_instance(o.inst);
  std::vector<int> values;
  for (double v : parse_list(o.rhat_values)) values.push_back(static_cast<int>(v));
  const auto cmp = compare_rhat(in.network, in.scenarios, in.schedule, in.weights, Budget{o.budget}, values,
                                bnb_config(o.solver, err));
  json results = json::array();
  for (const auto& r : cmp.results) {
    json levels = json::object();
    for (size_t k = 0; k < r.levels.size(); ++k) levels[in.network.substations()[k].id] = r.levels[k];
    results.push_back({{"rhat", r.rhat}, {"status", r.status}, {"objective", number(r.objective)}, {"plan", levels}});
  }
  json differing = json::array();
  for (const auto& d : cmp.differing) {
    json ids = json::array();
    for (int k : d) ids.push_back(in.network.substations()[static_cast<size_t>(k)].id);
    differing.push_back(ids);
  }
  env.result = {{"budget", cmp.budget}, {"results", results}, {"differing", differing}, {"ordered", cmp.ordered}};
  return 0;
}

struct RemapOptions {
  std::string from;
  std::string to;
  std::string out;
};

int cmd_remap(const RemapOptions& o, ResultEnvelope& env) {
  env.config = {{"from", o.from}, {"to", o.to}, {"mapping_out", o.out}};
  const auto a = remap::load_points_csv(o.from);
  const auto b = remap::load_points_csv(o.to);
  const auto asg = remap::remap(a, b);
  json pairs = json::array();
  for (size_t i = 0; i < a.size(); ++i) {
    pairs.push_back({{"from", a[i].id}, {"to", b[static_cast<size_t>(asg.target[i])].id}, {"distance_km", asg.distance[i]}});
  }
  env.result = {{"total_km", asg.total}, {"pairs", pairs}, {"lp_iterations", asg.lp_iterations}};
  if (!o.out.empty()) {
    auto f = open_out(o.out);
    remap::write_mapping_csv(f, a, b, asg);
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flood mitigation planning for power grids"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string envelope_out;
  bool compact = false;
  app.add_option("--out", envelope_out, "Write the result envelope here instead of stdout");
  app.add_flag("--compact", compact, "Single-line JSON output");

  ValidateOptions vo;
  auto* validate_cmd = app.add_subcommand("validate", "Check a network (and optionally a scenario set)");
  validate_cmd->add_option("--network", vo.inst.network, "Network JSON file")->required()->check(CLI::ExistingFile);
  validate_cmd->add_option("--scenarios", vo.inst.scenarios, "Scenario JSON file")->check(CLI::ExistingFile);
  validate_cmd->add_flag("--normalize", vo.inst.normalize, "Rescale scenario probabilities");

  FixtureOptions fo;
  auto* fixture_cmd = app.add_subcommand("make-fixture", "Write a bundled instance to disk");
  fixture_cmd->add_option("--name", fo.name, "tiny3, star8, ring12 or coastal40")->required();
  fixture_cmd->add_option("--dir", fo.dir, "Output directory")->required();

  GenOptions go;
  auto* gen_cmd = app.add_subcommand("gen-scenarios", "Sample landfalls and build a scenario set");
  gen_cmd->add_option("--network", go.network)->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--coastline", go.coastline, "Coastline JSON {\"vertices\": [[lon, lat], ...]}")
      ->required()
      ->check(CLI::ExistingFile);
  gen_cmd->add_option("--out-scenarios", go.out, "Scenario JSON to write")->required();
  gen_cmd->add_option("--count", go.count, "Number of stratified landfalls")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", go.seed);
  gen_cmd->add_option("--mean-km", go.mean_km, "Mean landfall arc length (default: coastline midpoint)");
  gen_cmd->add_option("--cone-nmi", go.cone_nmi, "Cone-of-uncertainty radius")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--peak-depth", go.peak)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--decay-km", go.decay)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--bearing", go.bearing, "Storm track bearing, degrees");
  gen_cmd->add_option("--dry-below", go.dry_below, "Depths below this are dry (m)")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--thresholds", go.thresholds, "Comma-separated protection heights (m)");

  HeuristicOptions ho;
  auto* heur_cmd = app.add_subcommand("heuristic", "Greedy portfolio over eta_flow values");
  add_instance(heur_cmd, ho.inst);
  heur_cmd->add_option("--budget", ho.budget)->required()->check(CLI::NonNegativeNumber);
  heur_cmd->add_option("--eta-flow", ho.eta_flow, "Flow weights (default grid 0..0.15)");
  heur_cmd->add_option("--eta-gen", ho.eta_gen, "Generation weight")->check(CLI::NonNegativeNumber);
  heur_cmd->add_option("--plan-out", ho.plan_out, "Best plan file");
  heur_cmd->add_option("--plan-dir", ho.plan_dir, "Directory for every portfolio plan");

  SolveOptions so;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the extensive form at one budget");
  add_instance(solve_cmd, so.inst);
  add_solver(solve_cmd, so.solver);
  solve_cmd->add_option("--budget", so.budget)->required()->check(CLI::NonNegativeNumber);
  solve_cmd->add_flag("--relax-status", so.relax_status, "Continuous operational statuses");
  solve_cmd->add_flag("--no-heuristic", so.no_heuristic, "Skip the greedy warm starts");
  solve_cmd->add_option("--service-level", so.service_levels, "BUS=FRACTION minimum expected served share");
  solve_cmd->add_option("--lp-out", so.lp_out, "Export the model in LP format");
  solve_cmd->add_option("--plan-out", so.plan_out, "Write the optimal plan");

  SolveOptions uo;
  auto* unique_cmd = app.add_subcommand("check-unique", "Solve, then re-solve with a no-good cut");
  add_instance(unique_cmd, uo.inst);
  add_solver(unique_cmd, uo.solver);
  unique_cmd->add_option("--budget", uo.budget)->required()->check(CLI::NonNegativeNumber);

  EvalOptions eo;
  auto* eval_cmd = app.add_subcommand("eval", "Expected loss of a fixed plan");
  add_instance(eval_cmd, eo.inst);
  auto* plan_opt = eval_cmd->add_option("--plan", eo.plan, "Plan JSON")->check(CLI::ExistingFile);
  auto* zero_opt = eval_cmd->add_flag("--zero-plan", eo.zero_plan, "Evaluate without mitigation");
  plan_opt->excludes(zero_opt);
  eval_cmd->callback([&] {
    if (eo.plan.empty() && !eo.zero_plan) throw CLI::RequiredError("--plan or --zero-plan");
  });

  SweepCliOptions wo;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve every budget from 0 to the maximum");
  add_instance(sweep_cmd, wo.inst);
  add_solver(sweep_cmd, wo.solver);
  sweep_cmd->add_option("--max-budget", wo.max_budget, "'auto' or an integer");
  sweep_cmd->add_flag("--check-unique", wo.check_unique, "Probe each optimum with a no-good cut");
  sweep_cmd->add_flag("--relax-status", wo.relax_status);
  sweep_cmd->add_flag("--verbose", wo.verbose, "Progress on stderr");
  sweep_cmd->add_option("--out-dir", wo.out_dir, "Directory for report.json and CSV tables")->required();

  CompareOptions co;
  auto* cmp_cmd = app.add_subcommand("compare-rhat", "Optimal plans for several unattainable levels");
  add_instance(cmp_cmd, co.inst);
  add_solver(cmp_cmd, co.solver);
  cmp_cmd->add_option("--budget", co.budget)->required()->check(CLI::NonNegativeNumber);
  cmp_cmd->add_option("--rhat-values", co.rhat_values, "Comma-separated values");

  RemapOptions ro;
  auto* remap_cmd = app.add_subcommand("remap", "Minimum-distance assignment of points");
  remap_cmd->add_option("--from", ro.from, "CSV id,lon,lat")->required()->check(CLI::ExistingFile);
  remap_cmd->add_option("--to", ro.to, "CSV id,lon,lat")->required()->check(CLI::ExistingFile);
  remap_cmd->add_option("--mapping-out", ro.out, "CSV from_id,to_id,distance_km");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  ResultEnvelope env;
  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (*validate_cmd) {
      env.command = "validate";
      code = cmd_validate(vo, env);
    } else if (*fixture_cmd) {
      env.command = "make-fixture";
      code = cmd_make_fixture(fo, env);
    } else if (*gen_cmd) {
      env.command = "gen-scenarios";
      code = cmd_gen_scenarios(go, env);
    } else if (*heur_cmd) {
      env.command = "heuristic";
      code = cmd_heuristic(ho, env);
    } else if (*solve_cmd) {
      env.command = "solve";
      code = cmd_solve(so, env, err);
    } else if (*unique_cmd) {
      env.command = "check-unique";
      code = cmd_check_unique(uo, env, err);
    } else if (*eval_cmd) {
      env.command = "eval";
      code = cmd_eval(eo, env);
    } else if (*sweep_cmd) {
      env.command = "sweep";
      code = cmd_sweep(wo, env, err);
      if (envelope_out.empty()) envelope_out = (fs::path(wo.out_dir) / "report.json").string();
    } else if (*cmp_cmd) {
      env.command = "compare-rhat";
      code = cmd_compare_rhat(co, env, err);
    } else if (*remap_cmd) {
      env.command = "remap";
      code = cmd_remap(ro, env);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  env.timing["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto text = envelope_to_json(env).dump(compact ? -1 : 2);
  try {
    if (envelope_out.empty()) {
      out << text << '\n';
    } else {
      auto f = open_out(envelope_out);
      f << text << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  if (code == 2) err << "validation found " << env.result["violations"].size() << " violation(s)\n";
  return code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("floodsp");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace floodsp::cli
