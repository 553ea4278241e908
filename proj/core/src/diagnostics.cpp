#include "qdopt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qdopt {

TrajectoryRecorder::TrajectoryRecorder(std::string algorithm, const ObjectiveSpec& spec,
                                       std::uint64_t seed) {
    log_.algorithm = std::move(algorithm);
    log_.function = spec.name;
    log_.dim = spec.dim;
    log_.seed = seed;
    log_.lower_bound = spec.lower_bound;
    log_.upper_bound = spec.upper_bound;
    log_.optimum_value = spec.optimum_value;
}

Observer TrajectoryRecorder::observer() {
    return [this](const Event& e) { log_.events.push_back(e); };
}

RecordedRun record_run(std::string_view algorithm, BudgetedObjective& objective,
                       const AlgorithmSettings& settings, std::uint64_t seed) {
    TrajectoryRecorder recorder(std::string(algorithm), objective.spec(), seed);
    auto optimizer = make_optimizer(algorithm, objective, settings, seed, recorder.observer());
    RecordedRun run;
    run.outcome = optimizer->run();
    run.log = std::move(recorder).take();
    return run;
}

RecordedRun record_bip(BudgetedObjective& objective, const BipConfig& config) {
    TrajectoryRecorder recorder("bip", objective.spec(), config.seed);
    RecordedRun run;
    run.outcome = run_bip(objective, config, recorder.observer());
    run.log = std::move(recorder).take();
    return run;
}

bool is_accepted_position(const Event& e) {
    switch (e.kind) {
        case EventKind::initialize:
        case EventKind::accept_better:
        case EventKind::accept_tunnel:
        case EventKind::mean_replace: return true;
        case EventKind::reject:
        case EventKind::scale_halve: return false;
    }
    return false;
}

double WaveHistogram::cell_volume(std::size_t cell) const {
    const auto idx = unflatten(cell);
    double v = 1.0;
    for (std::size_t a = 0; a < edges.size(); ++a) v *= edges[a][idx[a] + 1] - edges[a][idx[a]];
    return v;
}

std::vector<std::size_t> WaveHistogram::unflatten(std::size_t cell) const {
    std::vector<std::size_t> idx(edges.size());
    for (std::size_t a = edges.size(); a-- > 0;) {
        idx[a] = cell % bins(a);
        cell /= bins(a);
    }
    return idx;
}

std::size_t WaveHistogram::mode_cell() const {
    return static_cast<std::size_t>(std::distance(counts.begin(), std::max_element(counts.begin(), counts.end())));
}

bool WaveHistogram::cell_contains(std::size_t cell, std::span<const double> point) const {
    const auto idx = unflatten(cell);
    for (std::size_t a = 0; a < edges.size(); ++a) {
        const double lo = edges[a][idx[a]];
        const double hi = edges[a][idx[a] + 1];
        const bool last = idx[a] + 1 == bins(a);
        if (point[a] < lo || point[a] > hi || (!last && point[a] == hi)) return false;
    }
    return true;
}

double WaveHistogram::integral() const {
    double sum = 0.0;
    for (std::size_t c = 0; c < density.size(); ++c) sum += density[c] * cell_volume(c);
    return sum;
}

namespace {

std::vector<double> make_edges(double lo, double hi, std::size_t bins) {
    std::vector<double> e(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    }
    e.back() = hi;
    return e;
}

std::size_t bin_of(double value, const std::vector<double>& edges) {
    const std::size_t bins = edges.size() - 1;
    const auto it = std::upper_bound(edges.begin(), edges.end(), value);
    if (it == edges.begin()) return 0;
    return std::min(static_cast<std::size_t>(std::distance(edges.begin(), it)) - 1, bins - 1);
}

WaveHistogram histogram_over(const TrajectoryLog& log, std::span<const std::size_t> axes,
                             std::size_t bins_per_dim) {
    if (bins_per_dim == 0) throw std::invalid_argument("wave histogram: bins must be positive");
    WaveHistogram h;
    std::size_t cells = 1;
    for (std::size_t axis : axes) {
        h.edges.push_back(make_edges(log.lower_bound[axis], log.upper_bound[axis], bins_per_dim));
        cells *= bins_per_dim;
    }
    h.counts.assign(cells, 0);
    for (const auto& e : log.events) {
        if (!is_accepted_position(e)) continue;
        std::size_t flat = 0;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            flat = flat * bins_per_dim + bin_of(e.position[axes[a]], h.edges[a]);
        }
        ++h.counts[flat];
        ++h.total;
    }
    if (h.total == 0) throw std::invalid_argument("wave histogram: log holds no accepted positions");
    h.density.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        h.density[c] = static_cast<double>(h.counts[c]) / (static_cast<double>(h.total) * h.cell_volume(c));
    }
    return h;
}

}  // namespace

WaveHistogram wave_modulus(const TrajectoryLog& log, std::size_t bins_per_dim) {
    if (log.events.empty()) throw std::invalid_argument("wave_modulus: empty log");
    if (log.dim == 0 || log.dim > 2) {
        throw std::invalid_argument("wave_modulus: joint grid needs dim <= 2; use wave_marginals");
    }
    std::vector<std::size_t> axes(log.dim);
    for (std::size_t a = 0; a < log.dim; ++a) axes[a] = a;
    return histogram_over(log, axes, bins_per_dim);
}

std::vector<WaveHistogram> wave_marginals(const TrajectoryLog& log, std::size_t bins_per_dim) {
    if (log.events.empty()) throw std::invalid_argument("wave_marginals: empty log");
    std::vector<WaveHistogram> out;
    out.reserve(log.dim);
    for (std::size_t a = 0; a < log.dim; ++a) {
        const std::size_t axis[] = {a};
        out.push_back(histogram_over(log, axis, bins_per_dim));
    }
    return out;
}

std::vector<TransmissionPoint> transmission_trace(const TrajectoryLog& log) {
    std::vector<TransmissionPoint> trace;
    for (const auto& e : log.events) {
        if (!e.tunneling) continue;
        trace.push_back({e.evaluation_index, e.probability, e.sweep, e.scale_index});
    }
    return trace;
}

double expected_solution_value(const TrajectoryLog& log) {
    std::map<std::size_t, double> population;
    for (const auto& e : log.events) {
        if (is_accepted_position(e)) population[e.particle_index] = e.fitness;
    }
    if (population.empty()) throw std::invalid_argument("expected_solution_value: empty log");
    double sum = 0.0;
    for (const auto& [_, f] : population) sum += f;
    return sum / static_cast<double>(population.size());
}

std::vector<TracePoint> replay_best_errors(const TrajectoryLog& log) {
    std::vector<TracePoint> out;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : log.events) {
        if (!e.has_position()) continue;
        best = std::min(best, e.fitness);
        out.push_back({e.evaluation_index, clamp_error(best - log.optimum_value)});
    }
    return out;
}

}  // namespace qdopt
