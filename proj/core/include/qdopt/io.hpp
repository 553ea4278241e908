#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qdopt/diagnostics.hpp"
#include "qdopt/harness.hpp"

namespace qdopt {

// Stable on-disk formats.
//
// Trials CSV, one row per trial:
//   algorithm,function,dim,seed,final_error,evals_used,succeeded
// final_error is printed with 17 significant digits ("inf" when nothing was
// evaluated); succeeded is 0 or 1.
//
// Summary JSON carries "schema_version" (kSummarySchemaVersion), the
// aggregate statistics per cell and the ranking tables per group.

inline constexpr int kSummarySchemaVersion = 1;
inline constexpr const char* kTrialsCsvHeader = "algorithm,function,dim,seed,final_error,evals_used,succeeded";

class CsvError : public std::runtime_error {
public:
    CsvError(std::size_t row, const std::string& what)
        : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

std::string format_real(double value);
double parse_real(const std::string& text);

void write_trials_csv(std::ostream& out, std::span<const TrialOutcome> outcomes);
/// One trial as JSON, including its down-sampled error trace.
std::string trial_json(const TrialOutcome& outcome);

/// Throws CsvError naming the 1-based line of the first malformed row.
std::vector<TrialOutcome> read_trials_csv(std::istream& in);

/// (algorithm, function, dim)
using StatsKey = std::tuple<std::string, std::string, std::size_t>;

/// Groups outcomes by cell and aggregates each one.
std::map<StatsKey, AggregateStats> aggregate_cells(std::span<const TrialOutcome> outcomes,
                                                   double success_threshold);

struct NamedRanking {
    std::string group;
    std::size_t dim = 0;
    RankingTable table;
};

struct FailedCell {
    std::string algorithm;
    std::string function;
    std::size_t dim = 0;
    std::string message;
};

std::string summary_json(const std::map<StatsKey, AggregateStats>& stats,
                         std::span<const NamedRanking> rankings, std::span<const FailedCell> failures,
                         const std::string& config_json = "{}");

std::string rankings_json(std::span<const NamedRanking> rankings);

/// Parses a function group: "multimodal" (F1-F6), "unimodal" (F7-F12), a
/// range such as "F1-F4", or a comma list "F1,F3,F7".
std::vector<std::string> parse_function_group(const std::string& spec);

/// Builds one ranking per (dim, group) from trial rows.
std::vector<NamedRanking> rank_from_outcomes(std::span<const TrialOutcome> outcomes,
                                             std::span<const std::pair<std::string, std::vector<std::string>>> groups,
                                             double success_threshold);

/// "<algorithm>_<function>_d<dim>_s<seed>"
std::string diagnostics_basename(const TrajectoryLog& log);

void write_events_csv(std::ostream& out, const TrajectoryLog& log);
std::string histogram_json(std::span<const WaveHistogram> histograms, bool joint);
std::string transmission_json(std::span<const TransmissionPoint> trace);

}  // namespace qdopt
