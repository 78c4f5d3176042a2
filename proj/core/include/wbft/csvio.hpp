#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "wbft/analysis.hpp"
#include "wbft/simulation.hpp"

namespace wbft {

// All CSV headers are fixed; columns never reorder between releases.

inline constexpr const char* kRoundCsvHeader =
    "scenario_id,mode,seed,request_idx,leader,K,success,attempts,latency_ticks,messages,"
    "committed_digest";

inline constexpr const char* kAggregateCsvHeader =
    "scenario_id,mode,seed,p_l,requests,commits,success_rate,mean_latency_s,throughput_tps,"
    "mean_attempts,messages_per_round,makespan_s";

inline constexpr const char* kSecurityCsvHeader = "p,analytic,mc_estimate,mc_stderr";

inline constexpr const char* kLatencyCsvHeader =
    "p_l,status,solved_t_s,t_c_s,expected_latency_s,forward_check_error";

inline constexpr const char* kWeightsCsvHeader = "node,average,standardized,quality_weight";

// Reduced aggregate emitted by `report` from per-round CSVs alone (tick
// duration and makespan are not recoverable from that input).
inline constexpr const char* kReportCsvHeader =
    "scenario_id,mode,seed,requests,commits,success_rate,mean_latency_ticks,mean_attempts,"
    "messages_per_round";

void write_round_header(std::ostream& out);
void write_round_records(std::ostream& out, const ScenarioResult& result);

void write_aggregate_header(std::ostream& out);
void write_aggregate_row(std::ostream& out, const MetricsRecord& metrics);

// Parses a per-round CSV written by write_round_records; used by `report`.
struct ParsedRound {
    std::string scenario_id;
    std::string mode;
    std::uint64_t seed = 0;
    RoundRecord record;
};
std::vector<ParsedRound> read_round_csv(const std::filesystem::path& path);

std::string format_double(double value);

} // namespace wbft
