#include "relayplan/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relayplan/evaluation.hpp"
#include "relayplan/merge.hpp"
#include "relayplan/multi_demand.hpp"
#include "relayplan/plan_io.hpp"
#include "relayplan/single_demand.hpp"
#include "relayplan/validator.hpp"

namespace relayplan {

namespace {

constexpr double kFlowMatchTol = 1e-6;

struct RadioFlags {
    double area = 200.0;
    double r = 10.0;
    double multiplier = 1.4142135623730951;
    double f = 1.0;
    int C = 8;
    int m = 10;
    std::string flow_range;
    std::uint64_t seed = 1;

    RadioConfig config() const {
        RadioConfig c;
        c.r = r;
        c.R = multiplier * r;
        c.f = f;
        c.C = C;
        return c;
    }
};

void add_radio_flags(CLI::App* cmd, RadioFlags& flags) {
    cmd->add_option("--area", flags.area, "side of the square region, m")->capture_default_str();
    cmd->add_option("--radius", flags.r, "transmission range r, m")->capture_default_str();
    cmd->add_option("--interference", flags.multiplier, "interference range as a multiple of r")->capture_default_str();
    cmd->add_option("--flow", flags.f, "flow per activated slot f")->capture_default_str();
    cmd->add_option("--max-paths", flags.C, "maximum paths per demand C")->capture_default_str();
    cmd->add_option("--flow-range", flags.flow_range, "requirement range LO:HI (default per scenario kind)");
    cmd->add_option("--seed", flags.seed, "random seed")->capture_default_str();
}

std::pair<double, double> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw MalformedInput("--flow-range must look like LO:HI");
    try {
        std::size_t used_lo = 0, used_hi = 0;
        const double lo = std::stod(text.substr(0, colon), &used_lo);
        const double hi = std::stod(text.substr(colon + 1), &used_hi);
        if (used_lo != colon || used_hi != text.size() - colon - 1) throw std::invalid_argument("trailing text");
        if (!(lo > 0.0) || !(hi >= lo)) throw MalformedInput("--flow-range needs 0 < LO <= HI");
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw MalformedInput("--flow-range must look like LO:HI");
    }
}

bool is_kind_name(const std::string& s) {
    try {
        parse_kind(s);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

std::string links_csv(const PlacementPlan& plan) {
    std::string out = "path,demand,hop,tx,rx,tx_x,tx_y,rx_x,rx_y,slot\n";
    char buf[256];
    for (std::size_t p = 0; p < plan.paths.size(); ++p) {
        const auto& path = plan.paths[p];
        for (std::size_t h = 0; h < path.hop_count(); ++h) {
            const auto a = plan.nodes[path.nodes[h]].pos;
            const auto b = plan.nodes[path.nodes[h + 1]].pos;
            std::snprintf(buf, sizeof buf, "%zu,%s,%zu,%zu,%zu,%.6f,%.6f,%.6f,%.6f,%d\n", p,
                          plan.demands[path.demand].id.c_str(), h, path.nodes[h], path.nodes[h + 1], a.x, a.y, b.x, b.y,
                          path.slots[h]);
            out += buf;
        }
    }
    return out;
}

void emit(const std::string& contents, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << contents;
    } else {
        write_file_atomic(path, contents);
    }
}

int cmd_plan(const std::string& scenario, const RadioFlags& flags, bool no_merge, bool best_effort,
             const std::string& out_path, const std::string& format, std::ostream& out, std::ostream& err) {
    RadioConfig config = flags.config();
    std::vector<Demand> demands;
    bool hidden = false;
    ScenarioSpec spec;
    bool generated = false;
    if (is_kind_name(scenario)) {
        spec.kind = parse_kind(scenario);
        spec.area = flags.area;
        spec.m = flags.m;
        std::tie(spec.flow_low, spec.flow_high) =
            flags.flow_range.empty() ? default_flow_range(spec.kind) : parse_range(flags.flow_range);
        spec.seed = flags.seed;
        spec.config = config;
        generated = true;
    } else {
        auto input = scenario_from_json(read_file(scenario), config);
        config = input.config;
        if (auto* s = std::get_if<ScenarioSpec>(&input.source)) {
            spec = *s;
            generated = true;
        } else {
            demands = std::get<std::vector<Demand>>(input.source);
        }
    }
    if (generated) {
        try {
            spec.validate();
        } catch (const std::invalid_argument& e) {
            throw MalformedInput(e.what());
        }
        try {
            demands = gen_scenario(spec);
        } catch (const ScenarioInfeasible& e) {
            throw MalformedInput(e.what());
        }
        hidden = spec.kind == ScenarioKind::Unknown;
    }
    std::vector<std::optional<double>> required;
    for (auto& d : demands) {
        required.push_back(d.required_flow);
        if (hidden) d.required_flow.reset();
    }

    PipelineResult result;
    try {
        result = run_pipeline(demands, config, {.merge = !no_merge && !hidden, .best_effort = best_effort});
    } catch (const DemandTooClose& e) {
        err << "error: " << e.what()
            << "; the terminals are close enough to talk over at most a few hops, so there is nothing to place\n";
        return kExitInfeasible;
    } catch (const RequirementInfeasible& e) {
        err << "error: " << e.what() << " (use --best-effort to plan anyway)\n";
        return kExitInfeasible;
    } catch (const ConstructionInfeasible& e) {
        err << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }
    auto& plan = result.plan;
    for (std::size_t d = 0; d < plan.demands.size(); ++d) plan.demands[d].required_flow = required[d];
    if (no_merge && !hidden && !best_effort) {
        for (std::size_t d = 0; d < plan.demands.size(); ++d) {
            if (required[d] && *required[d] > planned_flow(plan, d) + 1e-9) {
                err << "error: " << RequirementInfeasible(plan.demands[d].id, *required[d], planned_flow(plan, d)).what()
                    << " (use --best-effort to plan anyway)\n";
                return kExitInfeasible;
            }
        }
    }

    const auto violations = validate(plan);
    emit(format == "csv" ? links_csv(plan) : plan_to_json(plan, violations), out_path, out);
    if (!violations.empty()) {
        err << "error: schedule has " << violations.size() << " conflicts, first: " << describe(violations.front())
            << "\n";
        return kExitInvalid;
    }
    return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
    const auto plan = plan_from_json(read_file(path));
    std::vector<Violation> violations;
    std::vector<FlowMeasurement> measured;
    try {
        violations = validate(plan);
        measured = simulate_flow(plan);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    for (const auto& v : violations) out << "violation: " << describe(v) << "\n";
    bool flows_match = true;
    char buf[200];
    for (std::size_t d = 0; d < measured.size(); ++d) {
        const double recorded = plan.achieved[d];
        const bool ok = std::fabs(measured[d].flow - recorded) <= kFlowMatchTol;
        flows_match = flows_match && ok;
        std::snprintf(buf, sizeof buf, "%s measured %.9g recorded %.9g%s\n", measured[d].demand_id.c_str(),
                      measured[d].flow, recorded, ok ? "" : "  MISMATCH");
        out << buf;
        for (const auto& [p, flow] : measured[d].path_flows) {
            if (std::fabs(flow - plan.paths[p].achieved_flow) > kFlowMatchTol) {
                flows_match = false;
                std::snprintf(buf, sizeof buf, "  path %zu measured %.9g recorded %.9g  MISMATCH\n", p, flow,
                              plan.paths[p].achieved_flow);
                out << buf;
            }
        }
    }
    out << violations.size() << " violations, flows " << (flows_match ? "match" : "do not match") << "\n";
    return violations.empty() && flows_match ? kExitOk : kExitInvalid;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) {
        try {
            std::size_t used = 0;
            if constexpr (std::is_same_v<T, int>) {
                out.push_back(std::stoi(item, &used));
            } else {
                out.push_back(std::stod(item, &used));
            }
            if (used != item.size()) throw std::invalid_argument("trailing text");
        } catch (const std::logic_error&) {
            throw MalformedInput(std::string(flag) + " expects a comma-separated list of numbers");
        }
    }
    if (out.empty()) throw MalformedInput(std::string(flag) + " needs at least one value");
    return out;
}

int cmd_eval(const std::string& scenario, const RadioFlags& flags, const std::string& areas,
             const std::string& multipliers, const std::string& counts, int runs, const std::string& out_dir,
             std::ostream& out) {
    GridSpec grid;
    try {
        grid.kind = parse_kind(scenario);
    } catch (const std::invalid_argument& e) {
        throw MalformedInput(e.what());
    }
    grid.areas = areas.empty() ? std::vector<double>{flags.area} : parse_list<double>(areas, "--areas");
    grid.interference_multipliers = multipliers.empty() ? std::vector<double>{flags.multiplier}
                                                        : parse_list<double>(multipliers, "--interference-multipliers");
    grid.demand_counts = counts.empty() ? std::vector<int>{flags.m} : parse_list<int>(counts, "--demand-counts");
    if (!flags.flow_range.empty()) grid.flow_range = parse_range(flags.flow_range);
    grid.runs = runs;
    grid.first_seed = flags.seed;
    grid.base = flags.config();
    try {
        grid.validate();
    } catch (const std::invalid_argument& e) {
        throw MalformedInput(e.what());
    }
    const auto records = run_batch(grid);
    const auto aggregate = aggregate_csv(records);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file_atomic((std::filesystem::path(out_dir) / "runs.csv").string(), per_run_csv(records));
        write_file_atomic((std::filesystem::path(out_dir) / "aggregate.csv").string(), aggregate);
    }
    out << aggregate;
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Relay placement and slot scheduling for multi-demand wireless mesh networks", "relayplan"};
    app.require_subcommand(1);

    RadioFlags flags;
    std::string scenario, out_path, format = "json";
    bool no_merge = false, best_effort = false;
    auto* plan = app.add_subcommand("plan", "plan relays and slots for a scenario");
    plan->add_option("--scenario", scenario, "scenario JSON file, or a generator kind: aggregation, definite, unknown")
        ->required();
    add_radio_flags(plan, flags);
    plan->add_option("--demands", flags.m, "demand count for generated scenarios")->capture_default_str();
    plan->add_flag("--no-merge", no_merge, "skip pruning and merging");
    plan->add_flag("--best-effort", best_effort, "lower unreachable requirements instead of failing");
    plan->add_option("--out", out_path, "output file (default stdout)");
    plan->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    std::string plan_file;
    auto* check = app.add_subcommand("validate", "re-check a plan's schedule and recorded flows");
    check->add_option("plan", plan_file, "plan JSON file")->required();

    RadioFlags eval_flags;
    std::string eval_kind = "definite", areas, multipliers, counts, eval_out;
    int runs = 100;
    auto* eval = app.add_subcommand("eval", "run seeded experiments over a parameter grid");
    eval->add_option("--scenario", eval_kind, "aggregation, definite or unknown")->capture_default_str();
    add_radio_flags(eval, eval_flags);
    eval->add_option("--demands", eval_flags.m, "demand count when --demand-counts is not given")->capture_default_str();
    eval->add_option("--areas", areas, "comma-separated region sides");
    eval->add_option("--interference-multipliers", multipliers, "comma-separated R/r values");
    eval->add_option("--demand-counts", counts, "comma-separated demand counts");
    eval->add_option("--runs", runs, "seeds per grid point")->capture_default_str();
    eval->add_option("--out", eval_out, "directory for runs.csv and aggregate.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (plan->parsed()) return cmd_plan(scenario, flags, no_merge, best_effort, out_path, format, out, err);
        if (check->parsed()) return cmd_validate(plan_file, out, err);
        return cmd_eval(eval_kind, eval_flags, areas, multipliers, counts, runs, eval_out, out);
    } catch (const MalformedInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::logic_error& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace relayplan
