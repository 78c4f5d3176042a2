#include "wbft/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace wbft {
namespace {

using nlohmann::json;

ByzantineBehavior behavior_from_string(const std::string& s) {
    if (s == "none") return ByzantineBehavior::none;
    if (s == "bad-vote") return ByzantineBehavior::bad_vote;
    if (s == "invalid-proof") return ByzantineBehavior::invalid_proof;
    if (s == "fake-response") return ByzantineBehavior::fake_response;
    if (s == "silent") return ByzantineBehavior::silent;
    throw ValidationError("unknown byzantine behavior: " + s);
}

std::vector<ByzantineBehavior> behaviors_from_json(const json& j) {
    std::vector<ByzantineBehavior> out;
    if (j.is_string()) {
        auto b = behavior_from_string(j.get<std::string>());
        if (b != ByzantineBehavior::none) out.push_back(b);
        return out;
    }
    for (const auto& item : j) {
        auto b = behavior_from_string(item.get<std::string>());
        if (b != ByzantineBehavior::none) out.push_back(b);
    }
    return out;
}

class Defaults {
public:
    explicit Defaults(bool verbose) : verbose_(verbose) {}

    template <typename T>
    T get(const json& j, const char* key, T fallback) {
        if (j.contains(key)) return j.at(key).get<T>();
        if (verbose_) std::cerr << "config: default applied " << key << "\n";
        return fallback;
    }

    bool has(const json& j, const char* key) const { return j.contains(key); }

private:
    bool verbose_;
};

} // namespace

std::vector<NodeSpec> reference_nodes() {
    // The ten evaluated models with their published average capability scores.
    const std::pair<const char*, double> table[] = {
        {"Llama 3.3", 78.6},      {"WizardLM 2", 79.7},   {"GPT-4o", 84.7},
        {"Gemini 2 Flash", 78.6}, {"ERNIE Bot 4.0", 80.8}, {"SparkDesk V4.0", 77.6},
        {"Qwen 2.5", 88.7},       {"Doubao Pro 4k", 80.8}, {"Hunyuan-Large", 82.3},
        {"Kimi", 83.3},
    };
    std::vector<NodeSpec> out;
    for (const auto& [name, mean] : table) {
        NodeSpec spec;
        spec.name = name;
        spec.quality_mean = mean;
        spec.quality_stddev = 5.0;
        out.push_back(spec);
    }
    return out;
}

void ScenarioConfig::validate() const {
    if (nodes.size() < 4) throw ValidationError("nodes: need at least 4 nodes");
    if (std::fabs(consensus.alpha + consensus.beta - 1.0) > 1e-9)
        throw ValidationError("consensus.alpha+beta: alpha+beta != 1");
    if (consensus.alpha < 0.0 || consensus.beta < 0.0)
        throw ValidationError("consensus.alpha/beta: must be non-negative");
    std::uint32_t n = node_count();
    std::uint32_t explicit_byz = 0;
    for (const auto& spec : nodes) {
        if (spec.quality_mean < 0.0 || spec.quality_mean > 100.0)
            throw ValidationError("nodes.quality_mean: out of [0,100] for " + spec.name);
        if (spec.quality_stddev < 0.0)
            throw ValidationError("nodes.quality_stddev: negative for " + spec.name);
        if (spec.trust && (*spec.trust <= 0.0 || *spec.trust >= 1.0))
            throw ValidationError("nodes.trust: outside (0,1) for " + spec.name);
        if (!spec.behaviors.empty()) ++explicit_byz;
    }
    std::uint32_t byz = std::max(byzantine.count, explicit_byz);
    if (byz > (n - 1) / 3 && !byzantine.unsafe_allowed)
        throw ValidationError("byzantine.count: exceeds floor((n-1)/3); set unsafe=true "
                              "to override");
    if (byzantine.activation_prob < 0.0 || byzantine.activation_prob > 1.0)
        throw ValidationError("byzantine.activation: outside [0,1]");
    if (trust.variance < 0.0) throw ValidationError("trust.variance: negative");
    if (hsc.omega <= 0.0 || hsc.omega >= 1.0)
        throw ValidationError("hsc.omega: outside (0,1)");
    if (hsc.k_max == 0 || hsc.k_max > n)
        throw ValidationError("hsc.k_max: must be in [1, node count]");
    if (channel.bandwidth_hz <= 0.0 || channel.capacity_bps <= 0.0 || channel.rate_bps <= 0.0)
        throw ValidationError("channel: B, C, R must be positive");
    if (channel.capacity_bps <= channel.rate_bps)
        throw ValidationError("channel: requires C > R");
    int sources = int(channel.slot_seconds.has_value()) + int(channel.target_pl.has_value()) +
                  int(!channel.pl_grid.empty());
    if (sources == 0)
        throw ValidationError("channel: one of slot_seconds, target_pl or pl_grid required");
    if (sources > 1)
        throw ValidationError("channel: slot_seconds, target_pl and pl_grid are exclusive");
    for (double pl : channel.pl_grid)
        if (pl <= 0.0 || pl >= 1.0) throw ValidationError("channel.pl_grid: values in (0,1)");
    if (channel.target_pl && (*channel.target_pl <= 0.0 || *channel.target_pl >= 1.0))
        throw ValidationError("channel.target_pl: in (0,1)");
    if (channel.force_pl) {
        if (*channel.force_pl <= 0.0 || *channel.force_pl > 1.0)
            throw ValidationError("channel.force_pl: in (0,1]");
        if (!channel.slot_seconds)
            throw ValidationError("channel.force_pl: requires slot_seconds");
    }
    if (sim.tick_seconds <= 0.0) throw ValidationError("sim.tick_seconds: must be positive");
    if (workload.entry_policy == EntryPolicy::fixed && workload.fixed_entry.value >= n)
        throw ValidationError("workload.entry: fixed entry node out of range");
    if (consensus.retry_max > 60) throw ValidationError("consensus.retry_max: too large");
    if (seeds.empty()) throw ValidationError("seeds: at least one seed required");
}

ScenarioConfig parse_config(const std::string& text, bool verbose) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("parse error: ") + e.what());
    }
    Defaults def(verbose);
    ScenarioConfig cfg;
    cfg.name = def.get<std::string>(j, "name", "scenario");

    if (j.contains("nodes")) {
        const json& jn = j.at("nodes");
        if (jn.is_number_unsigned() || jn.is_number_integer()) {
            auto count = jn.get<std::uint32_t>();
            for (std::uint32_t i = 0; i < count; ++i) {
                NodeSpec spec;
                spec.name = "node" + std::to_string(i);
                cfg.nodes.push_back(spec);
            }
        } else if (jn.is_string() && jn.get<std::string>() == "reference") {
            cfg.nodes = reference_nodes();
        } else {
            for (const auto& item : jn) {
                NodeSpec spec;
                spec.name = item.value("name", "node" + std::to_string(cfg.nodes.size()));
                spec.quality_mean = item.value("quality_mean", 80.0);
                spec.quality_stddev = item.value("quality_stddev", 5.0);
                if (item.contains("trust")) spec.trust = item.at("trust").get<double>();
                if (item.contains("byzantine"))
                    spec.behaviors = behaviors_from_json(item.at("byzantine"));
                cfg.nodes.push_back(spec);
            }
        }
    } else {
        if (verbose) std::cerr << "config: default applied nodes (reference set)\n";
        cfg.nodes = reference_nodes();
    }

    if (j.contains("trust")) {
        const json& jt = j.at("trust");
        cfg.trust.mean = def.get<double>(jt, "mean", 0.1);
        cfg.trust.variance = def.get<double>(jt, "variance", 0.2);
    } else if (verbose) {
        std::cerr << "config: default applied trust (N(0.1, 0.2))\n";
    }

    if (j.contains("byzantine")) {
        const json& jb = j.at("byzantine");
        cfg.byzantine.count = def.get<std::uint32_t>(jb, "count", 0);
        std::string assign = def.get<std::string>(jb, "assignment", "random");
        if (assign == "random") cfg.byzantine.assignment = ByzantineAssignment::random;
        else if (assign == "lowest-trust") cfg.byzantine.assignment = ByzantineAssignment::lowest_trust;
        else if (assign == "highest-trust") cfg.byzantine.assignment = ByzantineAssignment::highest_trust;
        else if (assign == "fixed") cfg.byzantine.assignment = ByzantineAssignment::fixed;
        else throw ValidationError("byzantine.assignment: unknown value " + assign);
        if (jb.contains("behaviors")) cfg.byzantine.behaviors = behaviors_from_json(jb.at("behaviors"));
        cfg.byzantine.activation_prob = def.get<double>(jb, "activation", 1.0);
        cfg.byzantine.cycle = def.get<bool>(jb, "cycle", true);
        cfg.byzantine.unsafe_allowed = def.get<bool>(jb, "unsafe", false);
    }

    if (j.contains("consensus")) {
        const json& jc = j.at("consensus");
        if (jc.contains("mode")) {
            auto mode = mode_from_string(jc.at("mode").get<std::string>());
            if (!mode) throw ValidationError("consensus.mode: unknown mode");
            cfg.consensus.mode = *mode;
        }
        if (jc.contains("modes")) {
            for (const auto& m : jc.at("modes")) {
                auto mode = mode_from_string(m.get<std::string>());
                if (!mode) throw ValidationError("consensus.modes: unknown mode");
                cfg.modes.push_back(*mode);
            }
        }
        cfg.consensus.alpha = def.get<double>(jc, "alpha", 0.5);
        cfg.consensus.beta = def.get<double>(jc, "beta", 0.5);
        cfg.consensus.retry_base_ticks = def.get<Ticks>(jc, "retry_base_ticks", 0);
        cfg.consensus.retry_max = def.get<std::uint32_t>(jc, "retry_max", 16);
        cfg.consensus.pipeline = def.get<bool>(jc, "pipeline", true);
        std::string policy = def.get<std::string>(jc, "leader_policy", "next");
        if (policy == "same") cfg.consensus.leader_policy = RetryLeaderPolicy::same;
        else if (policy == "next") cfg.consensus.leader_policy = RetryLeaderPolicy::next;
        else if (policy == "random") cfg.consensus.leader_policy = RetryLeaderPolicy::random;
        else throw ValidationError("consensus.leader_policy: unknown value " + policy);
    } else if (verbose) {
        std::cerr << "config: default applied consensus (wbft, alpha=beta=0.5)\n";
    }

    bool k_max_given = false;
    if (j.contains("hsc")) {
        const json& jh = j.at("hsc");
        cfg.hsc.omega = def.get<double>(jh, "omega", 0.5);
        cfg.hsc.gamma = def.get<double>(jh, "gamma", 1.0);
        cfg.hsc.lambda_penalty = def.get<double>(jh, "lambda", -1.0);
        cfg.hsc.k_max = def.get<std::uint32_t>(jh, "k_max", 6);
        k_max_given = jh.contains("k_max");
        cfg.hsc.restarts = def.get<int>(jh, "restarts", 4);
    }
    if (!k_max_given)
        cfg.hsc.k_max = std::min<std::uint32_t>(cfg.hsc.k_max,
                                                std::uint32_t(cfg.nodes.size()));

    if (j.contains("recalibration")) {
        const json& jr = j.at("recalibration");
        cfg.recalibration.penalty = def.get<double>(jr, "penalty", 0.5);
        cfg.recalibration.silence_penalty = def.get<double>(jr, "silence_penalty", 0.9);
        cfg.recalibration.contradiction_penalty =
            def.get<double>(jr, "contradiction_penalty", 0.85);
        cfg.recalibration.reward = def.get<double>(jr, "reward", 1.02);
        cfg.recalibration.ema_smoothing = def.get<double>(jr, "ema_smoothing", 0.2);
    }

    if (j.contains("channel")) {
        const json& jc = j.at("channel");
        cfg.channel.bandwidth_hz = def.get<double>(jc, "bandwidth_hz", 15000.0);
        cfg.channel.capacity_bps = def.get<double>(jc, "capacity_bps", 15000.0);
        cfg.channel.rate_bps = def.get<double>(jc, "rate_bps", 10000.0);
        cfg.channel.subcarriers = def.get<double>(jc, "subcarriers", 1.0);
        if (jc.contains("slot_seconds")) cfg.channel.slot_seconds = jc.at("slot_seconds").get<double>();
        if (jc.contains("target_pl")) cfg.channel.target_pl = jc.at("target_pl").get<double>();
        if (jc.contains("force_pl")) cfg.channel.force_pl = jc.at("force_pl").get<double>();
        if (jc.contains("pl_grid")) {
            const json& jg = jc.at("pl_grid");
            if (jg.is_object()) {
                double lo = jg.at("lo").get<double>();
                double hi = jg.at("hi").get<double>();
                double step = jg.at("step").get<double>();
                if (step <= 0.0) throw ValidationError("channel.pl_grid.step: must be positive");
                for (double v = lo; v <= hi + 1e-12; v += step) cfg.channel.pl_grid.push_back(v);
            } else {
                for (const auto& v : jg) cfg.channel.pl_grid.push_back(v.get<double>());
            }
        }
    } else if (verbose) {
        std::cerr << "config: default applied channel (B=15kHz, C=15kbps, R=10kbps, N=1)\n";
    }
    if (!cfg.channel.slot_seconds && !cfg.channel.target_pl && cfg.channel.pl_grid.empty()) {
        if (verbose) std::cerr << "config: default applied channel.slot_seconds=0.005\n";
        cfg.channel.slot_seconds = 0.005;
    }

    if (j.contains("workload")) {
        const json& jw = j.at("workload");
        cfg.workload.requests = def.get<std::uint64_t>(jw, "requests", 100);
        std::string policy = def.get<std::string>(jw, "entry_policy", "round_robin");
        if (policy == "round_robin") cfg.workload.entry_policy = EntryPolicy::round_robin;
        else if (policy == "random") cfg.workload.entry_policy = EntryPolicy::random;
        else if (policy == "fixed") cfg.workload.entry_policy = EntryPolicy::fixed;
        else throw ValidationError("workload.entry_policy: unknown value " + policy);
        cfg.workload.fixed_entry = NodeId{def.get<std::uint32_t>(jw, "entry", 0)};
    } else if (verbose) {
        std::cerr << "config: default applied workload (100 requests, round robin)\n";
    }

    if (j.contains("sim")) {
        const json& js = j.at("sim");
        cfg.sim.tick_seconds = def.get<double>(js, "tick_seconds", 1e-4);
        cfg.sim.latency_jitter = def.get<double>(js, "latency_jitter", 0.2);
        cfg.sim.delivery_jitter_ticks = def.get<Ticks>(js, "delivery_jitter_ticks", 0);
        cfg.sim.retain_proofs = def.get<bool>(js, "retain_proofs", false);
        cfg.sim.persist_ledgers = def.get<bool>(js, "persist_ledgers", false);
    }

    if (j.contains("seeds")) {
        cfg.seeds.clear();
        for (const auto& s : j.at("seeds")) cfg.seeds.push_back(s.get<std::uint64_t>());
    } else if (j.contains("seed")) {
        cfg.seeds = {j.at("seed").get<std::uint64_t>()};
    } else if (verbose) {
        std::cerr << "config: default applied seeds ([1])\n";
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, bool verbose) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), verbose);
}

ScoreMatrix load_score_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open score file " + path.string());
    ScoreMatrix m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream row(line);
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (m.nodes.empty()) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                m.nodes.push_back(NodeId{std::uint32_t(c)});
                m.node_names.push_back(cells[c]);
            }
            continue; // header row holds node names
        }
        std::vector<double> values;
        for (const auto& c : cells) {
            try {
                values.push_back(std::stod(c));
            } catch (...) {
                throw ValidationError("score file line " + std::to_string(line_no) +
                                      ": not a number: " + c);
            }
            if (values.back() < 0.0 || values.back() > 100.0)
                throw ValidationError("score file line " + std::to_string(line_no) +
                                      ": score outside [0,100]");
        }
        if (values.size() != m.nodes.size())
            throw ValidationError("score file line " + std::to_string(line_no) +
                                  ": wrong column count");
        m.rows.push_back(std::move(values));
    }
    if (m.nodes.empty() || m.rows.empty())
        throw ValidationError("score file " + path.string() + ": empty");
    return m;
}

} // namespace wbft
