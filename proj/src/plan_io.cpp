#include "relayplan/plan_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace relayplan {

namespace {

using json = nlohmann::ordered_json;

json point_json(Point p) { return json::array({p.x, p.y}); }

Point read_point(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw MalformedInput(std::string(what) + " must be a [x, y] pair of numbers");
    return {j[0].get<double>(), j[1].get<double>()};
}

json config_json(const RadioConfig& c) { return {{"r", c.r}, {"R", c.R}, {"f", c.f}, {"C", c.C}}; }

RadioConfig read_config(const json& j, RadioConfig c) {
    if (!j.is_object()) throw MalformedInput("config must be an object");
    if (j.contains("r")) c.r = j.at("r").get<double>();
    if (j.contains("R")) c.R = j.at("R").get<double>();
    if (j.contains("f")) c.f = j.at("f").get<double>();
    if (j.contains("C")) c.C = j.at("C").get<int>();
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw MalformedInput(e.what());
    }
    return c;
}

Demand read_demand(const json& j, std::size_t index) {
    if (!j.is_object()) throw MalformedInput("each demand must be an object");
    Demand d;
    d.id = j.contains("id") ? j.at("id").get<std::string>() : "d" + std::to_string(index + 1);
    d.src = read_point(j.at("src"), "src");
    d.dest = read_point(j.at("dest"), "dest");
    if (j.contains("required_flow") && !j.at("required_flow").is_null())
        d.required_flow = j.at("required_flow").get<double>();
    try {
        d.validate();
    } catch (const std::invalid_argument& e) {
        throw MalformedInput(e.what());
    }
    return d;
}

template <typename F>
auto decode(F&& body) {
    try {
        return body();
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("invalid document: ") + e.what());
    }
}

}  // namespace

std::string plan_to_json(const PlacementPlan& plan, const std::vector<Violation>& violations) {
    json doc;
    doc["schema_version"] = kPlanSchemaVersion;
    doc["config"] = config_json(plan.config);
    json demands = json::array();
    for (std::size_t d = 0; d < plan.demands.size(); ++d) {
        const auto& dm = plan.demands[d];
        json j{{"id", dm.id}, {"src", point_json(dm.src)}, {"dest", point_json(dm.dest)}};
        j["required_flow"] = dm.required_flow ? json(*dm.required_flow) : json(nullptr);
        j["achieved_flow"] = d < plan.achieved.size() ? plan.achieved[d] : 0.0;
        j["estimated_flow"] = d < plan.estimated.size() ? plan.estimated[d] : 0.0;
        demands.push_back(std::move(j));
    }
    doc["demands"] = std::move(demands);
    json nodes = json::array();
    json relays = json::array();
    for (const auto& n : plan.nodes) {
        nodes.push_back({{"pos", point_json(n.pos)}, {"kind", n.kind == NodeKind::Relay ? "relay" : "terminal"}});
        if (n.kind == NodeKind::Relay) relays.push_back(point_json(n.pos));
    }
    doc["nodes"] = std::move(nodes);
    doc["relays"] = std::move(relays);
    json paths = json::array();
    for (const auto& p : plan.paths) {
        json links = json::array();
        for (std::size_t h = 0; h < p.hop_count(); ++h)
            links.push_back({{"tx", p.nodes[h]}, {"rx", p.nodes[h + 1]}, {"slot", h < p.slots.size() ? p.slots[h] : 0}});
        paths.push_back({{"demand", plan.demands.at(p.demand).id},
                         {"nodes", p.nodes},
                         {"links", std::move(links)},
                         {"achieved_flow", p.achieved_flow},
                         {"realized_flow", p.realized_flow},
                         {"merged", p.merged}});
    }
    doc["paths"] = std::move(paths);
    doc["period"] = schedule_period(plan);
    doc["relay_count"] = plan.relay_count();
    doc["total_length"] = plan.total_length();
    json vs = json::array();
    for (const auto& v : violations) {
        vs.push_back({{"slot", v.slot},
                      {"links", json::array({json::array({v.a.tx, v.a.rx}), json::array({v.b.tx, v.b.rx})})},
                      {"paths", json::array({v.path_a, v.path_b})},
                      {"hops", json::array({v.hop_a, v.hop_b})},
                      {"shared_node", v.shared_node},
                      {"distance", v.tx_distance}});
    }
    doc["violations"] = std::move(vs);
    return doc.dump(2) + "\n";
}

std::string plan_to_json(const PlacementPlan& plan) { return plan_to_json(plan, validate(plan)); }

PlacementPlan plan_from_json(const std::string& text) {
    return decode([&] {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw MalformedInput(std::string("not JSON: ") + e.what());
        }
        if (!doc.is_object()) throw MalformedInput("plan must be a JSON object");
        if (doc.value("schema_version", 0) != kPlanSchemaVersion)
            throw MalformedInput("unsupported plan schema_version");
        PlacementPlan plan;
        plan.config = read_config(doc.at("config"), RadioConfig{});
        const auto& demands = doc.at("demands");
        for (std::size_t i = 0; i < demands.size(); ++i) {
            plan.demands.push_back(read_demand(demands[i], i));
            plan.achieved.push_back(demands[i].value("achieved_flow", 0.0));
            plan.estimated.push_back(demands[i].value("estimated_flow", 0.0));
        }
        for (const auto& n : doc.at("nodes")) {
            const auto kind = n.at("kind").get<std::string>();
            if (kind != "relay" && kind != "terminal") throw MalformedInput("node kind must be relay or terminal");
            plan.nodes.push_back({read_point(n.at("pos"), "pos"), kind == "relay" ? NodeKind::Relay : NodeKind::Terminal});
        }
        for (const auto& pj : doc.at("paths")) {
            PlannedPath p;
            const auto idx = plan.demand_index(pj.at("demand").get<std::string>());
            if (!idx) throw MalformedInput("path refers to an unknown demand");
            p.demand = *idx;
            p.nodes = pj.at("nodes").get<std::vector<NodeId>>();
            if (p.nodes.size() < 2) throw MalformedInput("a path needs at least two nodes");
            for (auto id : p.nodes) {
                if (id >= plan.nodes.size()) throw MalformedInput("path refers to an unknown node");
            }
            const auto& links = pj.at("links");
            if (links.size() != p.hop_count()) throw MalformedInput("link count does not match the path's nodes");
            for (std::size_t h = 0; h < links.size(); ++h) {
                if (links[h].at("tx").get<NodeId>() != p.nodes[h] || links[h].at("rx").get<NodeId>() != p.nodes[h + 1])
                    throw MalformedInput("link endpoints do not match the path's nodes");
                p.slots.push_back(links[h].at("slot").get<int>());
            }
            p.achieved_flow = pj.value("achieved_flow", 0.0);
            p.realized_flow = pj.value("realized_flow", 0.0);
            p.merged = pj.value("merged", false);
            plan.paths.push_back(std::move(p));
        }
        return plan;
    });
}

ScenarioInput scenario_from_json(const std::string& text, const RadioConfig& defaults) {
    return decode([&] {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw MalformedInput(std::string("not JSON: ") + e.what());
        }
        if (!doc.is_object()) throw MalformedInput("scenario must be a JSON object");
        ScenarioInput in;
        in.config = read_config(doc, defaults);
        if (doc.contains("demands")) {
            std::vector<Demand> demands;
            const auto& list = doc.at("demands");
            if (!list.is_array() || list.empty()) throw MalformedInput("demands must be a non-empty array");
            for (std::size_t i = 0; i < list.size(); ++i) demands.push_back(read_demand(list[i], i));
            in.source = std::move(demands);
            return in;
        }
        ScenarioSpec spec;
        try {
            spec.kind = parse_kind(doc.at("kind").is_number() ? std::to_string(doc.at("kind").get<int>())
                                                              : doc.at("kind").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw MalformedInput(e.what());
        }
        const auto flows = default_flow_range(spec.kind);
        spec.area = doc.value("area", spec.area);
        spec.m = doc.value("m", spec.m);
        spec.flow_low = doc.value("flow_low", flows.first);
        spec.flow_high = doc.value("flow_high", flows.second);
        spec.seed = doc.value("seed", spec.seed);
        spec.config = in.config;
        try {
            spec.validate();
        } catch (const std::invalid_argument& e) {
            throw MalformedInput(e.what());
        }
        in.source = spec;
        return in;
    });
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace relayplan
