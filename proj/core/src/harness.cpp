#include "qdopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace qdopt {

void AlgorithmSettings::validate() const {
    bip.validate();
    bbpso.validate();
    bbfwa.validate();
    gbde.validate();
    if (!(success_threshold > 0.0)) throw std::invalid_argument("success threshold must be positive");
}

const std::vector<std::string>& algorithm_ids() {
    static const std::vector<std::string> ids = {"bip", "bbpso", "bbfwa", "gbde"};
    return ids;
}

std::unique_ptr<Optimizer> make_optimizer(std::string_view algorithm, BudgetedObjective& objective,
                                          const AlgorithmSettings& settings, std::uint64_t seed,
                                          Observer observer) {
    if (algorithm == "bip") {
        BipConfig c = settings.bip;
        c.seed = seed;
        c.success_threshold = settings.success_threshold;
        return std::make_unique<BipOptimizer>(objective, std::move(c), std::move(observer));
    }
    if (algorithm == "bbpso") {
        BbpsoConfig c = settings.bbpso;
        c.seed = seed;
        c.success_threshold = settings.success_threshold;
        return std::make_unique<BbpsoOptimizer>(objective, c, std::move(observer));
    }
    if (algorithm == "bbfwa") {
        BbfwaConfig c = settings.bbfwa;
        c.seed = seed;
        c.success_threshold = settings.success_threshold;
        return std::make_unique<BbfwaOptimizer>(objective, c, std::move(observer));
    }
    if (algorithm == "gbde") {
        GbdeConfig c = settings.gbde;
        c.seed = seed;
        c.success_threshold = settings.success_threshold;
        return std::make_unique<GbdeOptimizer>(objective, c, std::move(observer));
    }
    throw std::invalid_argument("unknown algorithm: " + std::string(algorithm));
}

TrialOutcome run_trial(std::string_view algorithm, std::string_view function, std::size_t dim,
                       std::uint64_t max_fes, std::uint64_t seed, const AlgorithmSettings& settings,
                       Observer observer) {
    BudgetedObjective objective(make_objective(function, dim), max_fes);
    auto optimizer = make_optimizer(algorithm, objective, settings, seed, std::move(observer));
    TrialOutcome out = optimizer->run();
    out.function = std::string(function);
    return out;
}

std::vector<TrialOutcome> run_experiment(std::string_view algorithm, std::string_view function,
                                         std::size_t dim, const ExperimentOptions& options) {
    if (options.n_trials == 0) throw std::invalid_argument("run_experiment: n_trials must be positive");
    // Surface unknown identifiers before any thread starts.
    {
        BudgetedObjective probe(make_objective(function, dim), 0);
        make_optimizer(algorithm, probe, options.settings, options.base_seed);
    }

    std::vector<TrialOutcome> outcomes(options.n_trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t t = next++; t < options.n_trials; t = next++) {
            try {
                outcomes[t] = run_trial(algorithm, function, dim, options.max_fes, options.base_seed + t,
                                        options.settings);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, options.n_trials);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return outcomes;
}

AggregateStats aggregate(std::span<const TrialOutcome> outcomes, double success_threshold) {
    if (outcomes.empty()) throw std::invalid_argument("aggregate: no outcomes");
    const auto& first = outcomes.front();
    for (const auto& o : outcomes) {
        if (o.algorithm != first.algorithm || o.function != first.function || o.dim != first.dim) {
            throw std::invalid_argument("aggregate: outcomes mix (algorithm, function, dim) cells");
        }
    }

    AggregateStats s;
    s.n_trials = outcomes.size();
    s.best = outcomes.front().final_error;
    double sum = 0.0;
    for (const auto& o : outcomes) {
        s.best = std::min(s.best, o.final_error);
        sum += o.final_error;
        if (o.final_error <= success_threshold) ++s.n_succeeded;
    }
    s.mean = sum / static_cast<double>(s.n_trials);
    if (s.n_trials > 1 && std::isfinite(s.mean)) {
        double ss = 0.0;
        for (const auto& o : outcomes) ss += (o.final_error - s.mean) * (o.final_error - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(s.n_trials - 1));
    }
    s.sr = static_cast<double>(s.n_succeeded) / static_cast<double>(s.n_trials);
    return s;
}

std::vector<double> fractional_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        // Positions i..j (0-based) share rank mean(i+1 .. j+1).
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
        i = j + 1;
    }
    return ranks;
}

RankingTable rank_algorithms(const std::map<CellKey, AggregateStats>& stats,
                             std::span<const std::string> group) {
    if (group.empty()) throw std::invalid_argument("rank_algorithms: empty function group");
    RankingTable table;
    for (const auto& [key, _] : stats) {
        if (std::find(table.algorithms.begin(), table.algorithms.end(), key.first) == table.algorithms.end()) {
            table.algorithms.push_back(key.first);
        }
    }
    if (table.algorithms.empty()) throw std::invalid_argument("rank_algorithms: no statistics");
    table.functions.assign(group.begin(), group.end());

    for (const auto& function : table.functions) {
        std::vector<double> means;
        means.reserve(table.algorithms.size());
        for (const auto& algorithm : table.algorithms) {
            const auto it = stats.find({algorithm, function});
            if (it == stats.end()) {
                throw std::invalid_argument("rank_algorithms: missing cell (" + algorithm + ", " + function + ")");
            }
            means.push_back(it->second.mean);
        }
        const auto ranks = fractional_ranks(means);
        for (std::size_t a = 0; a < table.algorithms.size(); ++a) {
            table.ranks[{table.algorithms[a], function}] = ranks[a];
            table.average_rank[table.algorithms[a]] += ranks[a];
        }
    }
    for (auto& [_, r] : table.average_rank) r /= static_cast<double>(table.functions.size());
    return table;
}

}  // namespace qdopt
