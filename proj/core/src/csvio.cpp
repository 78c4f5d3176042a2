#include "wbft/csvio.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wbft {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

void write_round_header(std::ostream& out) { out << kRoundCsvHeader << "\n"; }

void write_round_records(std::ostream& out, const ScenarioResult& result) {
    for (const RoundRecord& rec : result.records) {
        out << result.scenario_id << ',' << to_string(result.mode) << ',' << result.seed << ','
            << rec.request_idx << ',' << rec.leader.value << ',' << rec.participants << ','
            << (rec.success ? 1 : 0) << ',' << rec.attempts << ',' << rec.latency_ticks << ','
            << rec.messages << ',' << (rec.success ? rec.committed_digest.hex() : std::string())
            << '\n';
    }
}

void write_aggregate_header(std::ostream& out) { out << kAggregateCsvHeader << "\n"; }

void write_aggregate_row(std::ostream& out, const MetricsRecord& m) {
    out << m.scenario_id << ',' << to_string(m.mode) << ',' << m.seed << ','
        << format_double(m.p_l) << ',' << m.requests << ',' << m.commits << ','
        << format_double(m.success_rate) << ','
        << (m.mean_latency_seconds ? format_double(*m.mean_latency_seconds) : std::string())
        << ',' << format_double(m.throughput_tps) << ',' << format_double(m.mean_attempts)
        << ',' << format_double(m.messages_per_round) << ',' << format_double(m.makespan_seconds)
        << '\n';
}

std::vector<ParsedRound> read_round_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<ParsedRound> out;
    std::string line;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        if (cells.size() != 11)
            throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                                     ": expected 11 columns");
        ParsedRound parsed;
        parsed.scenario_id = cells[0];
        parsed.mode = cells[1];
        parsed.seed = std::stoull(cells[2]);
        parsed.record.request_idx = std::stoull(cells[3]);
        parsed.record.leader = NodeId{std::uint32_t(std::stoul(cells[4]))};
        parsed.record.participants = std::uint32_t(std::stoul(cells[5]));
        parsed.record.success = cells[6] == "1";
        parsed.record.attempts = std::uint32_t(std::stoul(cells[7]));
        parsed.record.latency_ticks = std::stoll(cells[8]);
        parsed.record.messages = std::stoull(cells[9]);
        out.push_back(std::move(parsed));
    }
    return out;
}

} // namespace wbft
