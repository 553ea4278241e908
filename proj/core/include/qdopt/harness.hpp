#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qdopt/baselines.hpp"
#include "qdopt/bip.hpp"
#include "qdopt/optimizer.hpp"

namespace qdopt {

/// Per-algorithm parameters used when the harness instantiates optimizers.
/// Seeds inside the configs are ignored; every trial gets its own.
struct AlgorithmSettings {
    BipConfig bip;
    BbpsoConfig bbpso;
    BbfwaConfig bbfwa;
    GbdeConfig gbde;
    double success_threshold = 1e-8;

    void validate() const;
};

const std::vector<std::string>& algorithm_ids();

/// Builds an optimizer for `algorithm` ("bip", "bbpso", "bbfwa", "gbde").
std::unique_ptr<Optimizer> make_optimizer(std::string_view algorithm, BudgetedObjective& objective,
                                          const AlgorithmSettings& settings, std::uint64_t seed,
                                          Observer observer = {});

TrialOutcome run_trial(std::string_view algorithm, std::string_view function, std::size_t dim,
                       std::uint64_t max_fes, std::uint64_t seed, const AlgorithmSettings& settings,
                       Observer observer = {});

struct ExperimentOptions {
    std::size_t n_trials = 51;
    std::uint64_t max_fes = 0;
    std::uint64_t base_seed = 0;
    std::size_t workers = 1;
    AlgorithmSettings settings;
};

/// n_trials outcomes with seeds base_seed .. base_seed + n_trials - 1,
/// returned in seed order regardless of worker scheduling.
std::vector<TrialOutcome> run_experiment(std::string_view algorithm, std::string_view function,
                                         std::size_t dim, const ExperimentOptions& options);

struct AggregateStats {
    double best = 0.0;
    double mean = 0.0;
    /// Sample standard deviation; 0 for a single trial.
    double std = 0.0;
    double sr = 0.0;
    std::size_t n_trials = 0;
    std::size_t n_succeeded = 0;
};

AggregateStats aggregate(std::span<const TrialOutcome> outcomes, double success_threshold);

using CellKey = std::pair<std::string, std::string>;  // (algorithm, function)

struct RankingTable {
    std::vector<std::string> algorithms;
    std::vector<std::string> functions;
    /// Rank of each (algorithm, function) by mean error; ties share the
    /// average of the tied positions.
    std::map<CellKey, double> ranks;
    std::map<std::string, double> average_rank;
};

/// Ranks every algorithm present in `stats` on each function of `group`.
/// Throws if some algorithm lacks a cell for some function in the group.
RankingTable rank_algorithms(const std::map<CellKey, AggregateStats>& stats,
                             std::span<const std::string> group);

/// Fractional ranks (1-based) of `values`, ties averaged.
std::vector<double> fractional_ranks(std::span<const double> values);

}  // namespace qdopt
