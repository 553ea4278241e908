#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qdopt/objective.hpp"
#include "qdopt/optimizer.hpp"

namespace qdopt {

// Bare-bones comparators. Each shares the Optimizer interface and the
// diagnostics observer with BIP; positions are clamped to the search box.

struct BbpsoConfig {
    std::size_t np = 20;
    std::uint64_t seed = 0;
    double success_threshold = 1e-8;
    bool stop_on_success = false;

    void validate() const;
};

struct BbfwaConfig {
    std::size_t np = 300;
    /// Initial amplitude; <= 0 means "full box span per dimension".
    double amp_init = 0.0;
    double amp_grow = 1.2;
    double amp_shrink = 0.9;
    std::uint64_t seed = 0;
    double success_threshold = 1e-8;
    bool stop_on_success = false;

    void validate() const;
};

struct GbdeConfig {
    std::size_t np = 100;
    double cr_mean = 0.5;
    double cr_std = 0.1;
    std::uint64_t seed = 0;
    double success_threshold = 1e-8;
    bool stop_on_success = false;

    void validate() const;
};

/// Per-dimension draw from N((pbest + gbest) / 2, |pbest - gbest|).
std::vector<double> bbpso_sample(std::span<const double> pbest, std::span<const double> gbest,
                                 Rng& rng);

/// Per-dimension draw from N((best + x) / 2, |best - x|).
std::vector<double> gbde_mutant(std::span<const double> x, std::span<const double> best, Rng& rng);

/// Crossover rates are drawn from a normal and clipped to [0, 1].
double clamp_crossover_rate(double cr);

class BbpsoOptimizer final : public Optimizer {
public:
    BbpsoOptimizer(BudgetedObjective& objective, BbpsoConfig config, Observer observer = {});

    std::string_view name() const override { return "bbpso"; }
    bool step() override;
    bool finished() const override { return finished_; }
    TrialOutcome outcome() const override { return tracker_.outcome(); }
    std::span<const Particle> population() const override { return particles_; }

    std::span<const Particle> personal_bests() const { return pbest_; }
    std::size_t global_best_index() const { return gbest_; }

private:
    bool stop_now() const;

    BudgetedObjective* objective_;
    BbpsoConfig config_;
    Rng rng_;
    RunTracker tracker_;
    std::vector<Particle> particles_;
    std::vector<Particle> pbest_;
    std::size_t gbest_ = 0;
    bool finished_ = false;
};

/// Single-firework bare-bones fireworks search with a dynamic amplitude.
class BbfwaOptimizer final : public Optimizer {
public:
    BbfwaOptimizer(BudgetedObjective& objective, BbfwaConfig config, Observer observer = {});

    std::string_view name() const override { return "bbfwa"; }
    bool step() override;
    bool finished() const override { return finished_; }
    TrialOutcome outcome() const override { return tracker_.outcome(); }
    /// Sparks of the most recent generation.
    std::span<const Particle> population() const override { return sparks_; }

    const Particle& firework() const { return firework_; }
    std::span<const double> amplitude() const { return amplitude_; }
    double amplitude_floor() const;
    std::span<const double> amplitude_ceiling() const { return span_; }

private:
    bool stop_now() const;

    BudgetedObjective* objective_;
    BbfwaConfig config_;
    Rng rng_;
    RunTracker tracker_;
    Particle firework_;
    std::vector<double> amplitude_;
    std::vector<double> span_;
    std::vector<Particle> sparks_;
    bool finished_ = false;
};

class GbdeOptimizer final : public Optimizer {
public:
    GbdeOptimizer(BudgetedObjective& objective, GbdeConfig config, Observer observer = {});

    std::string_view name() const override { return "gbde"; }
    bool step() override;
    bool finished() const override { return finished_; }
    TrialOutcome outcome() const override { return tracker_.outcome(); }
    std::span<const Particle> population() const override { return population_; }

private:
    bool stop_now() const;

    BudgetedObjective* objective_;
    GbdeConfig config_;
    Rng rng_;
    RunTracker tracker_;
    std::vector<Particle> population_;
    bool finished_ = false;
};

TrialOutcome run_bbpso(BudgetedObjective& objective, const BbpsoConfig& config, Observer observer = {});
TrialOutcome run_bbfwa(BudgetedObjective& objective, const BbfwaConfig& config, Observer observer = {});
TrialOutcome run_gbde(BudgetedObjective& objective, const GbdeConfig& config, Observer observer = {});

}  // namespace qdopt
