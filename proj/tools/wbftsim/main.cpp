#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "wbft/analysis.hpp"
#include "wbft/channel.hpp"
#include "wbft/csvio.hpp"
#include "wbft/scenario.hpp"
#include "wbft/simulation.hpp"

namespace {

using namespace wbft;

struct Grid {
    double lo = 0.0, hi = 0.0, step = 0.0;
    std::vector<double> points() const {
        std::vector<double> out;
        for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
        return out;
    }
};

Grid parse_grid(const std::string& text) {
    Grid g;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &g.lo, &g.hi, &g.step) != 3 || g.step <= 0.0)
        throw CLI::ValidationError("--grid", "expected lo:hi:step with step > 0");
    if (g.hi < g.lo) throw CLI::ValidationError("--grid", "hi must be >= lo");
    return g;
}

std::ostream& open_sink(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file " + path);
    return file;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::vector<std::uint64_t> seeds, const std::string& mode_override,
            bool want_ledgers, int threads) {
    ScenarioConfig cfg = load_config(config_path);
    if (!seeds.empty()) cfg.seeds = std::move(seeds);
    if (!mode_override.empty()) {
        auto mode = mode_from_string(mode_override);
        if (!mode) throw std::runtime_error("unknown mode " + mode_override);
        cfg.modes = {*mode};
    }
    if (want_ledgers) cfg.sim.persist_ledgers = true;

    std::vector<ScenarioInstance> instances = expand_config(cfg);
    std::vector<ScenarioResult> results(instances.size());

    int workers = threads > 0 ? threads : int(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    std::size_t next = 0;
    while (next < instances.size()) {
        std::size_t batch = std::min<std::size_t>(std::size_t(workers),
                                                  instances.size() - next);
        std::vector<std::future<ScenarioResult>> futures;
        for (std::size_t i = 0; i < batch; ++i)
            futures.push_back(std::async(std::launch::async, run_simulation,
                                         std::cref(instances[next + i])));
        for (std::size_t i = 0; i < batch; ++i) results[next + i] = futures[i].get();
        next += batch;
    }

    std::filesystem::create_directories(out_dir);
    std::ofstream rounds(std::filesystem::path(out_dir) / "rounds.csv");
    std::ofstream agg(std::filesystem::path(out_dir) / "aggregate.csv");
    write_round_header(rounds);
    write_aggregate_header(agg);

    std::printf("%-40s %8s %9s %11s %9s\n", "scenario", "commits", "success", "tps",
                "attempts");
    for (std::size_t i = 0; i < results.size(); ++i) {
        const ScenarioResult& res = results[i];
        write_round_records(rounds, res);
        MetricsRecord m = aggregate(res);
        write_aggregate_row(agg, m);
        std::printf("%-40s %8llu %9.4f %11.2f %9.2f\n", res.scenario_id.c_str(),
                    static_cast<unsigned long long>(m.commits), m.success_rate,
                    m.throughput_tps, m.mean_attempts);
        if (cfg.sim.persist_ledgers) {
            for (const auto& [node, ledgers] : res.replicas) {
                auto dir = std::filesystem::path(out_dir) / "ledgers" / res.scenario_id /
                           ("node_" + std::to_string(node.value));
                persist_ledgers(ledgers, dir);
            }
        }
    }
    std::printf("wrote %s/rounds.csv and %s/aggregate.csv\n", out_dir.c_str(),
                out_dir.c_str());
    return 0;
}

int cmd_security(std::uint32_t n, double sigma2, const Grid& grid, std::uint64_t trials,
                 std::uint64_t seed, const std::string& rule_name, const std::string& out_path,
                 int threads) {
    WeightSamplingRule rule = WeightSamplingRule::iid;
    if (rule_name == "truncated") rule = WeightSamplingRule::truncated_renormalized;
    else if (rule_name != "iid") throw std::runtime_error("unknown rule " + rule_name);

    std::ofstream file;
    std::ostream& out = open_sink(file, out_path);
    out << kSecurityCsvHeader << "\n";
    for (double p : grid.points()) {
        SecurityModelParams params{n, 1.0 / double(n), sigma2, p};
        double analytic = analytic_security(params);
        McEstimate mc = mc_security(params, rule, trials, seed, threads);
        out << format_double(p) << ',' << format_double(analytic) << ','
            << format_double(mc.estimate) << ',' << format_double(mc.stderr_) << '\n';
    }
    return 0;
}

int cmd_latency(const ChannelParams& base, const Grid& grid, std::uint32_t participants,
                double backoff_base_s, const std::string& out_path) {
    std::ofstream file;
    std::ostream& out = open_sink(file, out_path);
    out << kLatencyCsvHeader << "\n";
    for (double pl : grid.points()) {
        try {
            double t = solve_channel_latency(pl, base);
            ChannelParams check = base;
            check.slot_seconds = t;
            double forward_err = std::fabs(channel_success_prob(check) - pl);
            double t_c = phase_latency(participants, t);

            // Per-attempt success under equal weights and no faults: both
            // phases need enough follower round-trips (each up with P_l^2).
            double link = pl * pl;
            std::uint32_t m_min = (2 * participants) / 3;
            double phase_ok = 0.0;
            std::uint32_t followers = participants - 1;
            for (std::uint32_t m = m_min; m <= followers; ++m) {
                double c = 1.0;
                for (std::uint32_t i = 0; i < m; ++i)
                    c = c * double(followers - i) / double(i + 1);
                phase_ok += c * std::pow(link, double(m)) *
                            std::pow(1.0 - link, double(followers - m));
            }
            double q = phase_ok * phase_ok;
            double expected =
                q > 0.0 ? expected_latency(participants, t, q, backoff_base_s)
                        : std::numeric_limits<double>::infinity();
            out << format_double(pl) << ",ok," << format_double(t) << ','
                << format_double(t_c) << ',' << format_double(expected) << ','
                << format_double(forward_err) << '\n';
        } catch (const std::out_of_range&) {
            out << format_double(pl) << ",out-of-range,,,,\n";
        }
    }
    return 0;
}

int cmd_weights(const std::string& scores_path, const std::string& out_path) {
    ScoreMatrix m = load_score_matrix(scores_path);
    std::vector<double> means = m.column_means();
    auto standardized = standardize_scores(m);
    QualityWeights qw = quality_weights(standardized);

    std::ofstream file;
    std::ostream& out = open_sink(file, out_path);
    out << kWeightsCsvHeader << "\n";
    for (std::size_t c = 0; c < m.nodes.size(); ++c) {
        NodeId id = m.nodes[c];
        std::string name = c < m.node_names.size() ? m.node_names[c]
                                                   : "node" + std::to_string(id.value);
        out << name << ',' << format_double(means[c]) << ','
            << format_double(standardized.at(id)) << ',' << format_double(qw.a.at(id)) << '\n';
    }
    return 0;
}

int cmd_cluster(const std::string& config_path, std::uint64_t seed, std::uint32_t entry,
                const std::string& out_path) {
    ScenarioConfig cfg = load_config(config_path);
    cfg.seeds = {seed};
    std::vector<ScenarioInstance> instances = expand_config(cfg);
    if (instances.empty()) throw std::runtime_error("config expands to no scenarios");
    HscSnapshot snap = hsc_snapshot(instances.front(), NodeId{entry});

    std::ofstream file;
    std::ostream& out = open_sink(file, out_path);
    out << "{\n  \"k\": " << snap.k << ",\n  \"ccns\": [";
    for (std::size_t i = 0; i < snap.ccns.size(); ++i)
        out << (i ? ", " : "") << snap.ccns[i].value;
    out << "],\n  \"nodes\": [\n";
    bool first = true;
    for (const auto& [id, cluster] : snap.assignment) {
        if (!first) out << ",\n";
        first = false;
        out << "    {\"id\": " << id.value << ", \"cluster\": " << cluster
            << ", \"trust\": " << format_double(snap.trust.at(id))
            << ", \"latency_s\": " << format_double(snap.latency_seconds.at(id)) << "}";
    }
    out << "\n  ]\n}\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& csv_paths, const std::string& out_path) {
    struct Bucket {
        std::string mode;
        std::uint64_t seed = 0;
        std::uint64_t requests = 0, commits = 0;
        double latency_sum = 0.0, attempts_sum = 0.0, messages_sum = 0.0;
    };
    std::map<std::string, Bucket> buckets;
    for (const auto& path : csv_paths) {
        for (const ParsedRound& row : read_round_csv(path)) {
            Bucket& b = buckets[row.scenario_id];
            b.mode = row.mode;
            b.seed = row.seed;
            ++b.requests;
            b.attempts_sum += row.record.attempts;
            b.messages_sum += double(row.record.messages);
            if (row.record.success) {
                ++b.commits;
                b.latency_sum += double(row.record.latency_ticks);
            }
        }
    }
    std::ofstream file;
    std::ostream& out = open_sink(file, out_path);
    out << kReportCsvHeader << "\n";
    for (const auto& [id, b] : buckets) {
        out << id << ',' << b.mode << ',' << b.seed << ',' << b.requests << ',' << b.commits
            << ',' << format_double(double(b.commits) / double(b.requests)) << ','
            << (b.commits ? format_double(b.latency_sum / double(b.commits)) : std::string())
            << ',' << format_double(b.attempts_sum / double(b.requests)) << ','
            << format_double(b.messages_sum / double(b.requests)) << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"WBFT consensus simulator for mock multi-LLM networks"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run the scenarios described by a config file");
    std::string run_config, run_out = "out", run_mode;
    std::vector<std::uint64_t> run_seeds;
    bool run_ledgers = false;
    int run_threads = 0;
    run->add_option("--config", run_config, "Scenario config (JSON)")->required();
    run->add_option("--out", run_out, "Output directory");
    run->add_option("--seed", run_seeds, "Seed override (repeatable)");
    run->add_option("--mode", run_mode, "Mode override");
    run->add_flag("--persist-ledgers", run_ledgers, "Write per-node ledger files");
    run->add_option("--threads", run_threads, "Worker pool size (0 = hardware)");

    // security
    auto* sec = app.add_subcommand("security", "Analytic vs Monte-Carlo consensus security");
    std::uint32_t sec_n = 100;
    double sec_sigma2 = 1e-5;
    std::string sec_grid = "0.5:0.8:0.05", sec_rule = "iid", sec_out;
    std::uint64_t sec_trials = 100000, sec_seed = 1;
    int sec_threads = 0;
    sec->add_option("--n", sec_n, "Voter count");
    sec->add_option("--sigma2", sec_sigma2, "Weight variance");
    sec->add_option("--grid", sec_grid, "p grid lo:hi:step");
    sec->add_option("--trials", sec_trials, "Monte-Carlo trials");
    sec->add_option("--seed", sec_seed, "Master seed");
    sec->add_option("--rule", sec_rule, "Weight sampling rule: iid | truncated");
    sec->add_option("--out", sec_out, "Output CSV (default stdout)");
    sec->add_option("--threads", sec_threads, "Worker pool size");

    // latency
    auto* lat = app.add_subcommand("latency", "Channel inversion and consensus latency curve");
    double lat_b = 15000.0, lat_c = 15000.0, lat_r = 10000.0, lat_n = 1.0, lat_backoff = 0.0;
    std::uint32_t lat_participants = 5;
    std::string lat_grid = "0.5:0.95:0.05", lat_out;
    lat->add_option("--bandwidth", lat_b, "Bandwidth B in Hz");
    lat->add_option("--capacity", lat_c, "Capacity C in bits/s");
    lat->add_option("--rate", lat_r, "Transmission rate R in bits/s");
    lat->add_option("--subcarriers", lat_n, "Subcarrier count N");
    lat->add_option("--participants", lat_participants, "Voting participants");
    lat->add_option("--grid", lat_grid, "P_l grid lo:hi:step");
    lat->add_option("--backoff-base", lat_backoff, "Retry backoff base in seconds");
    lat->add_option("--out", lat_out, "Output CSV (default stdout)");

    // weights
    auto* wts = app.add_subcommand("weights", "Score standardization and quality weights");
    std::string wts_scores, wts_out;
    wts->add_option("--scores", wts_scores, "Score matrix CSV")->required();
    wts->add_option("--out", wts_out, "Output CSV (default stdout)");

    // cluster
    auto* clu = app.add_subcommand("cluster", "Dump the round-0 HSC clustering for a config");
    std::string clu_config, clu_out;
    std::uint64_t clu_seed = 1;
    std::uint32_t clu_entry = 0;
    clu->add_option("--config", clu_config, "Scenario config (JSON)")->required();
    clu->add_option("--seed", clu_seed, "Seed");
    clu->add_option("--entry", clu_entry, "Entry node whose view is clustered");
    clu->add_option("--out", clu_out, "Output JSON (default stdout)");

    // report
    auto* rep = app.add_subcommand("report", "Aggregate existing per-round CSVs");
    std::vector<std::string> rep_inputs;
    std::string rep_out;
    rep->add_option("csvs", rep_inputs, "Per-round CSV files")->required();
    rep->add_option("--out", rep_out, "Output CSV (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(run_config, run_out, run_seeds, run_mode, run_ledgers, run_threads);
        if (sec->parsed())
            return cmd_security(sec_n, sec_sigma2, parse_grid(sec_grid), sec_trials, sec_seed,
                                sec_rule, sec_out, sec_threads);
        if (lat->parsed()) {
            ChannelParams base{lat_b, lat_c, lat_r, lat_n, 0.005};
            return cmd_latency(base, parse_grid(lat_grid), lat_participants, lat_backoff,
                               lat_out);
        }
        if (wts->parsed()) return cmd_weights(wts_scores, wts_out);
        if (clu->parsed()) return cmd_cluster(clu_config, clu_seed, clu_entry, clu_out);
        if (rep->parsed()) return cmd_report(rep_inputs, rep_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
