#include "offload/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace offload {

namespace {

using json = nlohmann::json;
using Errors = std::vector<std::string>;
using Apply = std::function<void(const std::string&, const json&, ExperimentConfig&, Errors&)>;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bounds {
    double lo = -kInf;
    double hi = kInf;
    bool lo_open = false;
    bool hi_open = false;

    bool contains(double x) const {
        if (lo_open ? x <= lo : x < lo) return false;
        if (hi_open ? x >= hi : x > hi) return false;
        return true;
    }

    std::string describe() const {
        const auto edge = [](double v) { return std::isinf(v) ? std::string(v < 0 ? "-inf" : "inf") : fmt::format("{:g}", v); };
        return fmt::format("{}{},{}{}", lo_open ? '(' : '[', edge(lo), edge(hi), hi_open ? ')' : ']');
    }
};

constexpr Bounds kUnit{0.0, 1.0};
constexpr Bounds kNonNegative{0.0, kInf, false, true};
constexpr Bounds kPositive{0.0, kInf, true, true};

std::optional<double> read_number(const std::string& key, const json& v, Bounds b, Errors& errors) {
    if (!v.is_number()) {
        errors.push_back(fmt::format("{}: expected a number", key));
        return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x) || !b.contains(x)) {
        errors.push_back(fmt::format("{} out of {}", key, b.describe()));
        return std::nullopt;
    }
    return x;
}

std::optional<std::uint64_t> read_count(const std::string& key, const json& v, std::uint64_t lo, std::uint64_t hi,
                                        Errors& errors) {
    if (!v.is_number_integer()) {
        errors.push_back(fmt::format("{}: expected an integer", key));
        return std::nullopt;
    }
    if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) {
        const auto x = v.get<std::uint64_t>();
        if (x >= lo && x <= hi) return x;
    }
    errors.push_back(fmt::format("{} out of [{},{}]", key, lo, hi));
    return std::nullopt;
}

template <class Get>
Apply real(Bounds b, Get get) {
    return [b, get](const std::string& key, const json& v, ExperimentConfig& c, Errors& e) {
        if (auto x = read_number(key, v, b, e)) get(c) = *x;
    };
}

/// Durations are written in milliseconds.
template <class Get>
Apply millis(Bounds b, Get get) {
    return [b, get](const std::string& key, const json& v, ExperimentConfig& c, Errors& e) {
        if (auto x = read_number(key, v, b, e)) get(c) = from_ms(*x);
    };
}

template <class Get>
Apply count(std::uint64_t lo, std::uint64_t hi, Get get) {
    return [lo, hi, get](const std::string& key, const json& v, ExperimentConfig& c, Errors& e) {
        if (auto x = read_count(key, v, lo, hi, e)) get(c) = static_cast<std::remove_reference_t<decltype(get(c))>>(*x);
    };
}

template <class Get>
Apply flag(Get get) {
    return [get](const std::string& key, const json& v, ExperimentConfig& c, Errors& e) {
        if (!v.is_boolean()) {
            e.push_back(fmt::format("{}: expected true or false", key));
            return;
        }
        get(c) = v.get<bool>();
    };
}

Apply scheduler_list() {
    return [](const std::string& key, const json& v, ExperimentConfig& c, Errors& e) {
        std::vector<SchedulerKind> out;
        const json list = v.is_string() ? json::array({v}) : v;
        if (!list.is_array() || list.empty()) {
            e.push_back(fmt::format("{}: expected a non-empty list of scheduler names", key));
            return;
        }
        for (const json& item : list) {
            const auto kind = item.is_string() ? parse_scheduler(item.get<std::string>()) : std::nullopt;
            if (!kind) {
                e.push_back(fmt::format("{}: unknown scheduler {}", key, item.dump()));
                return;
            }
            out.push_back(*kind);
        }
        c.schedulers = std::move(out);
    };
}

template <class T, class Get>
Apply count_list(std::uint64_t lo, Get get) {
    return [lo, get](const std::string& key, const json& v, ExperimentConfig& c, Errors& e) {
        if (!v.is_array() || v.empty()) {
            e.push_back(fmt::format("{}: expected a non-empty list of integers", key));
            return;
        }
        std::vector<T> out;
        for (const json& item : v) {
            const auto x = read_count(key, item, lo, std::numeric_limits<T>::max(), e);
            if (!x) return;
            out.push_back(static_cast<T>(*x));
        }
        get(c) = std::move(out);
    };
}

void add_template(std::map<std::string, Apply>& t, const std::string& prefix, HostTemplate ScenarioSpec::*member) {
    t[prefix + ".cores"] = count(1, 1024, [member](ExperimentConfig& c) -> auto& { return (c.scenario.*member).cores; });
    t[prefix + ".mips_per_core"] =
        real(kPositive, [member](ExperimentConfig& c) -> auto& { return (c.scenario.*member).mips_per_core; });
    t[prefix + ".connection_ms"] =
        millis(kNonNegative, [member](ExperimentConfig& c) -> auto& { return (c.scenario.*member).connection_time; });
    t[prefix + ".busy_power_w"] =
        real(kNonNegative, [member](ExperimentConfig& c) -> auto& { return (c.scenario.*member).busy_power_w; });
    t[prefix + ".idle_power_w"] =
        real(kNonNegative, [member](ExperimentConfig& c) -> auto& { return (c.scenario.*member).idle_power_w; });
}

const std::map<std::string, Apply>& table() {
    static const std::map<std::string, Apply> t = [] {
        std::map<std::string, Apply> t;
        t["workload.users"] = count(1, 100000, [](ExperimentConfig& c) -> auto& { return c.scenario.workload.users; });
        t["workload.frames"] = count(0, 10000000, [](ExperimentConfig& c) -> auto& { return c.scenario.workload.frames; });
        t["workload.frame_rate"] = real({0.0, 10000.0, true, false},
                                        [](ExperimentConfig& c) -> auto& { return c.scenario.workload.frame_rate; });
        t["workload.jitter"] = real({0.0, 1.0, false, true}, [](ExperimentConfig& c) -> auto& { return c.scenario.workload.jitter; });
        t["workload.component_task_budget"] = count(
            0, std::numeric_limits<std::uint32_t>::max(),
            [](ExperimentConfig& c) -> auto& { return c.scenario.workload.component_task_budget; });
        for (std::size_t k = 0; k < kComponentKinds; ++k) {
            const std::string base = fmt::format("workload.{}", to_string(static_cast<ComponentKind>(k)));
            t[base + ".length_mi"] =
                real(kNonNegative, [k](ExperimentConfig& c) -> auto& { return c.scenario.workload.components[k].length_mi; });
            t[base + ".input_bits"] =
                real(kNonNegative, [k](ExperimentConfig& c) -> auto& { return c.scenario.workload.components[k].input_bits; });
            t[base + ".output_bits"] =
                real(kNonNegative, [k](ExperimentConfig& c) -> auto& { return c.scenario.workload.components[k].output_bits; });
        }

        t["cluster.edge_hosts"] = count(0, 100000, [](ExperimentConfig& c) -> auto& { return c.scenario.edge_hosts; });
        t["cluster.cloud_hosts"] = count(0, 100000, [](ExperimentConfig& c) -> auto& { return c.scenario.cloud_hosts; });
        add_template(t, "cluster.edge", &ScenarioSpec::edge);
        add_template(t, "cluster.cloud", &ScenarioSpec::cloud);

        t["network.user_edge_mbps"] = [](const std::string& key, const json& v, ExperimentConfig& c, Errors& e) {
            if (auto x = read_number(key, v, kPositive, e)) c.scenario.network.user_edge_bps = *x * 1e6;
        };
        t["network.edge_cloud_mbps"] = [](const std::string& key, const json& v, ExperimentConfig& c, Errors& e) {
            if (auto x = read_number(key, v, kPositive, e)) c.scenario.network.edge_cloud_bps = *x * 1e6;
        };
        t["network.tx_power_edge_w"] =
            real(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.network.tx_power_edge_w; });
        t["network.tx_power_cloud_w"] =
            real(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.network.tx_power_cloud_w; });

        t["mobility.step_ms"] = millis(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.mobility.step; });
        t["mobility.min_ms"] = millis(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.mobility.min_latency; });
        t["mobility.max_ms"] = millis(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.mobility.max_latency; });
        t["mobility.initial_ms"] =
            millis(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.mobility.initial_latency; });
        t["mobility.handover_probability"] =
            real(kUnit, [](ExperimentConfig& c) -> auto& { return c.scenario.mobility.handover_probability; });
        t["mobility.handover_penalty_ms"] =
            millis(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.mobility.handover_penalty; });

        t["sim.drain_intervals"] = count(0, 1000000, [](ExperimentConfig& c) -> auto& { return c.scenario.drain_intervals; });
        t["sim.replace_queued"] = flag([](ExperimentConfig& c) -> auto& { return c.scenario.sim.replace_queued; });
        t["sim.migration_state_fraction"] =
            real(kUnit, [](ExperimentConfig& c) -> auto& { return c.scenario.sim.migration_state_fraction; });
        t["sim.renderer_time_ms"] =
            millis(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.sim.renderer_time; });

        t["objective.alpha"] = real(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.weights.alpha; });
        t["objective.beta"] = real(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.weights.beta; });
        t["objective.gamma"] = real(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.weights.gamma; });
        t["objective.delta"] = real(kNonNegative, [](ExperimentConfig& c) -> auto& { return c.scenario.weights.delta; });
        const auto range = [](std::optional<Range> ScenarioSpec::*member, double scale, bool upper) -> Apply {
            return [=](const std::string& key, const json& v, ExperimentConfig& c, Errors& e) {
                const auto x = read_number(key, v, kNonNegative, e);
                if (!x) return;
                auto& r = c.scenario.*member;
                if (!r) r = Range{0.0, 0.0};
                (upper ? r->max : r->min) = *x * scale;
            };
        };
        t["objective.ars_min_ms"] = range(&ScenarioSpec::ars_bounds_s, 1e-3, false);
        t["objective.ars_max_ms"] = range(&ScenarioSpec::ars_bounds_s, 1e-3, true);
        t["objective.aec_min_j"] = range(&ScenarioSpec::aec_bounds_j, 1.0, false);
        t["objective.aec_max_j"] = range(&ScenarioSpec::aec_bounds_j, 1.0, true);

        t["mmct.c"] = real(kUnit, [](ExperimentConfig& c) -> auto& { return c.scenario.mmct.c; });
        t["mmct.rollout_steps"] = count(0, 1000, [](ExperimentConfig& c) -> auto& { return c.scenario.mmct.rollout_steps; });
        t["mmct.iterations"] = count(1, 100000, [](ExperimentConfig& c) -> auto& { return c.scenario.mmct.iterations; });
        t["mmct.expansion_width"] =
            count(1, 1000, [](ExperimentConfig& c) -> auto& { return c.scenario.mmct.expansion_width; });
        t["mmct.lambda"] = real({0.0, 1.0, true, false}, [](ExperimentConfig& c) -> auto& { return c.scenario.mmct.lambda; });
        t["mmct.commit_random_root"] = flag([](ExperimentConfig& c) -> auto& { return c.scenario.mmct.commit_random_root; });

        t["genetic.population"] = count(1, 100000, [](ExperimentConfig& c) -> auto& { return c.scenario.ga.population; });
        t["genetic.generations"] = count(0, 100000, [](ExperimentConfig& c) -> auto& { return c.scenario.ga.generations; });
        t["genetic.tournament"] = count(1, 1000, [](ExperimentConfig& c) -> auto& { return c.scenario.ga.tournament; });
        t["genetic.crossover_rate"] = real(kUnit, [](ExperimentConfig& c) -> auto& { return c.scenario.ga.crossover_rate; });
        t["genetic.mutation_rate"] = real(kUnit, [](ExperimentConfig& c) -> auto& { return c.scenario.ga.mutation_rate; });

        t["experiment.schedulers"] = scheduler_list();
        t["experiment.seeds"] = count_list<std::uint64_t>(0, [](ExperimentConfig& c) -> auto& { return c.seeds; });
        t["experiment.users"] = count_list<std::uint32_t>(0, [](ExperimentConfig& c) -> auto& { return c.users_sweep; });
        t["experiment.output"] = [](const std::string& key, const json& v, ExperimentConfig& c, Errors& e) {
            if (!v.is_string() || v.get<std::string>().empty()) {
                e.push_back(fmt::format("{}: expected a non-empty path", key));
                return;
            }
            c.output = v.get<std::string>();
        };
        return t;
    }();
    return t;
}

void flatten(const json& node, const std::string& prefix, std::vector<std::pair<std::string, const json*>>& out) {
    if (node.is_object()) {
        for (const auto& [k, v] : node.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
        return;
    }
    out.emplace_back(prefix, &node);
}

void cross_checks(const ExperimentConfig& c, Errors& e) {
    const ScenarioSpec& s = c.scenario;
    if (s.edge_hosts + s.cloud_hosts == 0) e.push_back("cluster: at least one host required");
    const QosWeights& w = s.weights;
    if (w.alpha + w.beta + w.gamma + w.delta <= 0.0) e.push_back("objective: weights sum to zero");
    if (s.mobility.min_latency > s.mobility.max_latency) e.push_back("mobility.min_ms exceeds mobility.max_ms");
    if (s.mobility.initial_latency < s.mobility.min_latency || s.mobility.initial_latency > s.mobility.max_latency) {
        e.push_back("mobility.initial_ms out of [mobility.min_ms,mobility.max_ms]");
    }
    for (const auto& [name, t] : {std::pair{"cluster.edge", s.edge}, std::pair{"cluster.cloud", s.cloud}}) {
        if (t.idle_power_w > t.busy_power_w) e.push_back(fmt::format("{}.idle_power_w exceeds busy_power_w", name));
    }
    if (s.ars_bounds_s && s.ars_bounds_s->max <= s.ars_bounds_s->min) {
        e.push_back("objective.ars_max_ms must exceed objective.ars_min_ms");
    }
    if (s.aec_bounds_j && s.aec_bounds_j->max <= s.aec_bounds_j->min) {
        e.push_back("objective.aec_max_j must exceed objective.aec_min_j");
    }
}

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& entry : table()) keys.push_back(entry.first);
    return keys;
}

ConfigResult parse_config(std::string_view text, std::span<const std::string> overrides) {
    ConfigResult result;
    const bool blank = std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch) != 0; });
    json root = json::object();
    if (!blank) {
        try {
            root = json::parse(text, nullptr, true, true);
        } catch (const json::parse_error& e) {
            result.errors.push_back(fmt::format("parse error: {}", e.what()));
            return result;
        }
    }
    if (!root.is_object()) {
        result.errors.push_back("config root must be an object");
        return result;
    }

    std::vector<std::pair<std::string, const json*>> entries;
    flatten(root, "", entries);

    std::vector<json> values;
    values.reserve(overrides.size());
    std::vector<std::pair<std::string, const json*>> replaced;
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) {
            result.errors.push_back(fmt::format("override {}: expected key=value", o));
            continue;
        }
        const std::string key = o.substr(0, eq);
        const std::string raw = o.substr(eq + 1);
        json v = json::parse(raw, nullptr, false);
        if (v.is_discarded()) v = raw;
        values.push_back(std::move(v));
        std::erase_if(entries, [&](const auto& e) { return e.first == key; });
        std::erase_if(replaced, [&](const auto& e) { return e.first == key; });
        replaced.emplace_back(key, &values.back());
    }
    if (!result.errors.empty()) return result;
    entries.insert(entries.end(), replaced.begin(), replaced.end());

    ExperimentConfig config;
    std::map<std::string, int> seen;
    for (const auto& [key, value] : entries) {
        if (++seen[key] > 1) {
            result.errors.push_back(fmt::format("duplicate key {}", key));
            continue;
        }
        const auto it = table().find(key);
        if (it == table().end()) {
            result.errors.push_back(fmt::format("unknown key {}", key));
            continue;
        }
        it->second(key, *value, config, result.errors);
    }
    if (result.errors.empty()) cross_checks(config, result.errors);
    if (result.errors.empty()) {
        config.scenario.sim.interval = config.scenario.workload.frame_period();
        const QosWeights& w = config.scenario.weights;
        config.scenario.weights = QosWeights::normalized(w.alpha, w.beta, w.gamma, w.delta);
    }
    if (result.errors.empty()) result.config = std::move(config);
    return result;
}

ConfigResult validate_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {std::nullopt, {fmt::format("cannot read config {}", path.string())}};
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), overrides);
}

}  // namespace offload
