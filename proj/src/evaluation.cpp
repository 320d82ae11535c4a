#include "relayplan/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <tuple>

#include "relayplan/multi_demand.hpp"
#include "relayplan/single_demand.hpp"
#include "relayplan/validator.hpp"

namespace relayplan {

namespace {

constexpr int kMaxAttempts = 10000;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fixed(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

Point draw_point(UniformStream& rng, double lo, double hi) {
    const double x = rng.next(lo, hi);
    const double y = rng.next(lo, hi);
    return {x, y};
}

}  // namespace

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Aggregation: return "aggregation";
        case ScenarioKind::Definite: return "definite";
        case ScenarioKind::Unknown: return "unknown";
    }
    return "unknown";
}

ScenarioKind parse_kind(const std::string& name) {
    if (name == "aggregation" || name == "1") return ScenarioKind::Aggregation;
    if (name == "definite" || name == "2") return ScenarioKind::Definite;
    if (name == "unknown" || name == "3") return ScenarioKind::Unknown;
    throw std::invalid_argument("unknown scenario kind '" + name + "'");
}

int scenario_number(ScenarioKind kind) { return static_cast<int>(kind) + 1; }

std::pair<double, double> default_flow_range(ScenarioKind kind) {
    if (kind == ScenarioKind::Aggregation) return {0.01, 0.1};
    return {0.04, 0.4};
}

void ScenarioSpec::validate() const {
    config.validate();
    if (!(area > 0.0) || !std::isfinite(area)) throw std::invalid_argument("area must be positive");
    if (m < 1) throw std::invalid_argument("demand count must be >= 1");
    if (!(flow_low > 0.0) || !(flow_high >= flow_low) || !std::isfinite(flow_high))
        throw std::invalid_argument("flow range must satisfy 0 < low <= high");
}

UniformStream::UniformStream(std::uint64_t seed) : engine_(seed) {}

double UniformStream::next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::vector<Demand> gen_scenario(const ScenarioSpec& spec) {
    spec.validate();
    UniformStream rng(spec.seed);
    const double separation = 2.0 * spec.config.R;
    std::vector<Demand> out;
    auto fail = [&](int index) {
        return ScenarioInfeasible("no placement with 2R separation for demand " + std::to_string(index) + " after " +
                                  std::to_string(kMaxAttempts) + " attempts (area " + num(spec.area) + ")");
    };
    Point shared_dest;
    if (spec.kind == ScenarioKind::Aggregation) shared_dest = draw_point(rng, 0.25 * spec.area, 0.75 * spec.area);
    for (int i = 1; i <= spec.m; ++i) {
        Demand d;
        d.id = "d" + std::to_string(i);
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            if (spec.kind == ScenarioKind::Aggregation) {
                d.src = draw_point(rng, 0.0, spec.area);
                d.dest = shared_dest;
            } else {
                d.src = draw_point(rng, 0.0, spec.area);
                d.dest = draw_point(rng, 0.0, spec.area);
            }
            placed = dist(d.src, d.dest) >= separation;
        }
        if (!placed) throw fail(i);
        d.required_flow = rng.next(spec.flow_low, spec.flow_high);
        out.push_back(std::move(d));
    }
    return out;
}

double satisfied_rate(double required, double achieved) {
    if (!(required > 0.0)) throw std::invalid_argument("required flow must be positive");
    if (achieved < 0.0) throw std::invalid_argument("achieved flow must be non-negative");
    return achieved >= required ? 100.0 : 100.0 * achieved / required;
}

double average_satisfied_rate(std::span<const double> rates) {
    if (rates.empty()) throw std::invalid_argument("no rates to average");
    return std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
}

PipelineResult run_pipeline(std::span<const Demand> demands, const RadioConfig& config, const PipelineOptions& options) {
    PipelineResult result;
    result.plan = mpm(demands, config);
    result.baseline_relays = result.plan.relay_count();
    result.baseline_length = result.plan.total_length();
    if (!options.merge) return result;

    const std::vector<Demand> original = result.plan.demands;
    for (std::size_t d = 0; d < result.plan.demands.size(); ++d) {
        auto& req = result.plan.demands[d].required_flow;
        const double planned = planned_flow(result.plan, d);
        if (!req || *req <= planned) continue;
        if (!options.best_effort) throw RequirementInfeasible(result.plan.demands[d].id, *req, planned);
        req = planned;
    }
    result.plan = merge(result.plan, &result.merge);
    result.plan.demands = original;
    return result;
}

EvalRecord run_instance(const ScenarioSpec& spec) {
    EvalRecord rec;
    rec.spec = spec;
    try {
        auto demands = gen_scenario(spec);
        const auto required = [&] {
            std::vector<double> out;
            for (const auto& d : demands) out.push_back(*d.required_flow);
            return out;
        }();
        const bool hidden = spec.kind == ScenarioKind::Unknown;
        if (hidden) {
            for (auto& d : demands) d.required_flow.reset();
        }
        auto result = run_pipeline(demands, spec.config, {.merge = !hidden, .best_effort = true});
        rec.violations = validate(result.plan).size();
        if (rec.violations != 0) rec.status = "violations";
        for (std::size_t d = 0; d < demands.size(); ++d)
            rec.sr.push_back(satisfied_rate(required[d], result.plan.achieved[d]));
        rec.asr = average_satisfied_rate(rec.sr);
        rec.relays = result.plan.relay_count();
        rec.total_length = result.plan.total_length();
        rec.merge_savings =
            result.baseline_relays == 0
                ? 0.0
                : 100.0 * (static_cast<double>(result.baseline_relays) - static_cast<double>(rec.relays)) /
                      static_cast<double>(result.baseline_relays);
        if (hidden) {
            for (std::size_t d = 0; d < demands.size(); ++d) result.plan.demands[d].required_flow = required[d];
        }
        rec.plan = std::move(result.plan);
    } catch (const ScenarioInfeasible&) {
        rec.status = "scenario_infeasible";
    } catch (const DemandTooClose&) {
        rec.status = "demand_too_close";
    } catch (const ConstructionInfeasible&) {
        rec.status = "construction_infeasible";
    } catch (const std::exception&) {
        rec.status = "error";
    }
    return rec;
}

void GridSpec::validate() const {
    base.validate();
    if (areas.empty() || interference_multipliers.empty() || demand_counts.empty())
        throw std::invalid_argument("every grid dimension needs at least one value");
    for (double a : areas) {
        if (!(a > 0.0)) throw std::invalid_argument("areas must be positive");
    }
    for (double k : interference_multipliers) {
        if (!(k >= 1.0)) throw std::invalid_argument("interference multipliers must be >= 1");
    }
    for (int m : demand_counts) {
        if (m < 1) throw std::invalid_argument("demand counts must be >= 1");
    }
    if (runs < 1) throw std::invalid_argument("runs must be >= 1");
    if (flow_range && !(flow_range->first > 0.0 && flow_range->second >= flow_range->first))
        throw std::invalid_argument("flow range must satisfy 0 < low <= high");
}

std::vector<ScenarioSpec> expand_grid(const GridSpec& grid) {
    grid.validate();
    const auto flows = grid.flow_range.value_or(default_flow_range(grid.kind));
    std::vector<ScenarioSpec> out;
    for (double area : grid.areas) {
        for (double k : grid.interference_multipliers) {
            for (int m : grid.demand_counts) {
                for (int run = 0; run < grid.runs; ++run) {
                    ScenarioSpec s;
                    s.kind = grid.kind;
                    s.area = area;
                    s.m = m;
                    s.flow_low = flows.first;
                    s.flow_high = flows.second;
                    s.seed = grid.first_seed + static_cast<std::uint64_t>(run);
                    s.config = grid.base;
                    s.config.R = k * grid.base.r;
                    out.push_back(s);
                }
            }
        }
    }
    return out;
}

std::vector<EvalRecord> run_batch(const GridSpec& grid) {
    std::vector<EvalRecord> out;
    for (const auto& spec : expand_grid(grid)) {
        auto rec = run_instance(spec);
        rec.plan = PlacementPlan{};
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

std::string point_prefix(const ScenarioSpec& s) {
    return std::to_string(scenario_number(s.kind)) + "," + to_string(s.kind) + "," + num(s.area) + "," +
           num(s.config.r) + "," + num(s.config.R) + "," + std::to_string(s.m) + "," + num(s.flow_low) + "," +
           num(s.flow_high);
}

using PointKey = std::tuple<int, double, double, double, int, double, double>;

PointKey key_of(const ScenarioSpec& s) {
    return {scenario_number(s.kind), s.area, s.config.r, s.config.R, s.m, s.flow_low, s.flow_high};
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty()) return {NAN, NAN};
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace

std::string per_run_csv(std::span<const EvalRecord> records) {
    std::string out =
        "scenario,kind,area,r,R,m,flow_low,flow_high,seed,asr_percent,relays,total_length_m,merge_savings_percent,"
        "status\n";
    for (const auto& rec : records) {
        out += point_prefix(rec.spec) + "," + std::to_string(rec.spec.seed) + ",";
        if (rec.ok()) {
            out += fixed(rec.asr) + "," + std::to_string(rec.relays) + "," + fixed(rec.total_length) + "," +
                   fixed(rec.merge_savings);
        } else {
            out += ",,,";
        }
        out += "," + rec.status + "\n";
    }
    return out;
}

std::string aggregate_csv(std::span<const EvalRecord> records) {
    std::string out =
        "scenario,kind,area,r,R,m,flow_low,flow_high,runs,ok_runs,asr_mean,asr_std,relays_mean,relays_std,"
        "total_length_mean,total_length_std,merge_savings_mean,merge_savings_std\n";
    // First-appearance order keeps the rows in grid order.
    std::vector<PointKey> order;
    std::map<PointKey, std::vector<const EvalRecord*>> groups;
    for (const auto& rec : records) {
        const auto k = key_of(rec.spec);
        if (!groups.count(k)) order.push_back(k);
        groups[k].push_back(&rec);
    }
    auto cell = [](double v) { return std::isnan(v) ? std::string() : fixed(v); };
    for (const auto& k : order) {
        const auto& group = groups[k];
        std::vector<double> asr, relays, length, savings;
        for (const auto* rec : group) {
            if (!rec->ok()) continue;
            asr.push_back(rec->asr);
            relays.push_back(static_cast<double>(rec->relays));
            length.push_back(rec->total_length);
            savings.push_back(rec->merge_savings);
        }
        out += point_prefix(group.front()->spec) + "," + std::to_string(group.size()) + "," +
               std::to_string(asr.size());
        for (const auto* column : {&asr, &relays, &length, &savings}) {
            const auto [mean, sd] = mean_std(*column);
            out += "," + cell(mean) + "," + cell(sd);
        }
        out += "\n";
    }
    return out;
}

}  // namespace relayplan
