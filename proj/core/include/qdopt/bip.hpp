#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qdopt/objective.hpp"
#include "qdopt/optimizer.hpp"

namespace qdopt {

/// How per-dimension standard deviations combine into the population spread.
enum class SpreadAggregation { max, mean, rms };

std::string_view to_string(SpreadAggregation aggregation);
SpreadAggregation parse_spread_aggregation(std::string_view text);

/// Maps (gamma0, sweep counter Ac) to the current tunneling energy.
using GammaSchedule = std::function<double(double gamma0, std::uint64_t ac)>;

struct BipConfig {
    std::size_t k = 15;
    /// Proportionality constant A of the transmission probability. Zero
    /// disables tunneling entirely (greedy parallel descent).
    double amplitude_a = 1.0;
    double anneal_tau = 1.0;
    double scale_divisor = 2.0;
    double min_scale = 0.0;
    BoundsPolicy bounds_policy = BoundsPolicy::clamp;
    SpreadAggregation spread = SpreadAggregation::mean;
    double success_threshold = 1e-8;
    std::uint64_t seed = 0;
    /// Relocate the worst particle to the population mean at every scale
    /// transition.
    bool mean_replacement = true;
    /// Stop as soon as the best error reaches success_threshold instead of
    /// spending the whole budget.
    bool stop_on_success = false;
    /// Start every particle here instead of uniformly in the box.
    std::optional<std::vector<double>> init_position;
    /// Overrides the default gamma0 * exp(-Ac / tau).
    GammaSchedule gamma_schedule;

    /// Throws std::invalid_argument on a violated invariant.
    void validate() const;
};

struct BipState {
    std::vector<Particle> particles;
    double initial_span = 0.0;
    double sigma_s = 0.0;
    double gamma = 0.0;
    double gamma0 = 0.0;
    std::uint64_t ac = 0;
    std::uint64_t scale_index = 0;
    std::uint64_t sweeps = 0;
};

/// x + sigma * N(0, I), each coordinate then brought back into [lower, upper].
std::vector<double> gaussian_step(std::span<const double> x, double sigma,
                                  std::span<const double> lower, std::span<const double> upper,
                                  BoundsPolicy policy, Rng& rng);

/// min(1, A exp(-delta_x sqrt(delta_f) / gamma)) for a worse candidate.
double tunneling_probability(double delta_f, double delta_x, double gamma, double amplitude_a);

struct AcceptDecision {
    Particle particle;
    bool took_candidate = false;
    /// The candidate was worse and went through the tunneling test.
    bool tunneling_decision = false;
    /// 1 for improving moves, T for tunneling decisions, 0 otherwise.
    double probability = 0.0;
    double delta_f = 0.0;
    double delta_x = 0.0;
};

/// Barrier-penetration criterion: candidates no worse than the current
/// particle are taken outright; worse ones pass with the transmission
/// probability evaluated at the current gamma.
AcceptDecision accept_sample(const Particle& current, const Particle& candidate, double gamma,
                             const BipConfig& config, Rng& rng);

/// Per-dimension sample standard deviations of the particle positions
/// (n - 1 denominator), combined by `aggregation`.
double population_spread(std::span<const Particle> particles,
                         SpreadAggregation aggregation = SpreadAggregation::max);

/// True once the population has contracted below the sampling scale.
bool ground_state_reached(std::span<const Particle> particles, double sigma_s,
                          SpreadAggregation aggregation = SpreadAggregation::max);

struct MeanReplacement {
    std::size_t index = 0;
    double old_fitness = 0.0;
};

/// Moves the worst particle (lowest index on ties) to the mean of all
/// positions, computed before the move, and re-evaluates it. Returns nullopt
/// and leaves the population untouched when the budget is spent.
std::optional<MeanReplacement> mean_replace_worst(std::vector<Particle>& particles,
                                                  BudgetedObjective& objective);

/// gamma0 * exp(-ac / tau).
double annealed_gamma(double gamma0, std::uint64_t ac, double tau);

/// Counts one completed sweep and attenuates gamma. Returns the new gamma.
double anneal_gamma(BipState& state, const BipConfig& config);

/// Resets Ac and sets gamma0 = gamma = sigma_s for a fresh scale.
void begin_scale(BipState& state);

class BipOptimizer final : public Optimizer {
public:
    BipOptimizer(BudgetedObjective& objective, BipConfig config, Observer observer = {});

    std::string_view name() const override { return "bip"; }
    /// One full sweep over all particles, followed by the ground-state
    /// check and, if reached, mean replacement and the scale transition.
    bool step() override;
    bool finished() const override { return finished_; }
    TrialOutcome outcome() const override { return tracker_.outcome(); }
    std::span<const Particle> population() const override { return state_.particles; }

    const BipState& state() const { return state_; }
    const BipConfig& config() const { return config_; }

private:
    void initialize();
    void transition_scale();
    bool should_stop() const;

    BudgetedObjective* objective_;
    BipConfig config_;
    Rng rng_;
    RunTracker tracker_;
    BipState state_;
    bool finished_ = false;
};

TrialOutcome run_bip(BudgetedObjective& objective, const BipConfig& config, Observer observer = {});

}  // namespace qdopt
