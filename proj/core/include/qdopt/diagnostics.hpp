#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdopt/bip.hpp"
#include "qdopt/harness.hpp"
#include "qdopt/optimizer.hpp"

namespace qdopt {

/// Every event of one run, in the order the optimizer fired them, plus the
/// box and optimum needed to interpret positions and errors.
struct TrajectoryLog {
    std::string algorithm;
    std::string function;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::vector<double> lower_bound;
    std::vector<double> upper_bound;
    double optimum_value = 0.0;
    std::vector<Event> events;
};

/// Observer that appends into a TrajectoryLog.
class TrajectoryRecorder {
public:
    TrajectoryRecorder(std::string algorithm, const ObjectiveSpec& spec, std::uint64_t seed);

    /// The returned observer writes into this recorder, which must outlive it.
    Observer observer();
    const TrajectoryLog& log() const { return log_; }
    TrajectoryLog take() && { return std::move(log_); }

private:
    TrajectoryLog log_;
};

struct RecordedRun {
    TrialOutcome outcome;
    TrajectoryLog log;
};

RecordedRun record_run(std::string_view algorithm, BudgetedObjective& objective,
                       const AlgorithmSettings& settings, std::uint64_t seed);

/// BIP with a fully specified config (initial position, tunneling switch...).
RecordedRun record_bip(BudgetedObjective& objective, const BipConfig& config);

/// Events that leave a particle at a new position: initialization, both
/// acceptance kinds and mean replacement. Rejected candidates are excluded.
bool is_accepted_position(const Event& e);

/// Empirical |psi(x)|^2: a normalized histogram of accepted positions over
/// the search box.
struct WaveHistogram {
    /// Bin edges per axis (bins + 1 entries each).
    std::vector<std::vector<double>> edges;
    /// Flattened counts, first axis slowest.
    std::vector<std::uint64_t> counts;
    /// Density per cell: counts / (total * cell_volume).
    std::vector<double> density;
    std::uint64_t total = 0;

    std::size_t bins(std::size_t axis) const { return edges[axis].size() - 1; }
    double cell_volume(std::size_t cell) const;
    /// Per-axis bin indices of a flattened cell.
    std::vector<std::size_t> unflatten(std::size_t cell) const;
    /// Cell with the highest count (lowest flat index on ties).
    std::size_t mode_cell() const;
    bool cell_contains(std::size_t cell, std::span<const double> point) const;
    /// Sum of density * cell_volume; 1 whenever total > 0.
    double integral() const;
};

/// Joint histogram over the box. Requires dim <= 2; use wave_marginals for
/// higher dimensions.
WaveHistogram wave_modulus(const TrajectoryLog& log, std::size_t bins_per_dim = 50);

/// One 1-D histogram per dimension.
std::vector<WaveHistogram> wave_marginals(const TrajectoryLog& log, std::size_t bins_per_dim = 50);

struct TransmissionPoint {
    std::uint64_t evaluation_index = 0;
    double probability = 0.0;
    std::uint64_t sweep = 0;
    std::uint64_t scale_index = 0;
};

/// Transmission probability of every tunneling decision, accepted or not.
std::vector<TransmissionPoint> transmission_trace(const TrajectoryLog& log);

/// Mean fitness of the population left at the end of the log.
double expected_solution_value(const TrajectoryLog& log);

/// Best error after each position-bearing event, rebuilt from the log alone.
std::vector<TracePoint> replay_best_errors(const TrajectoryLog& log);

}  // namespace qdopt
