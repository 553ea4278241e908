#include "qdopt/bip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qdopt {

void BipConfig::validate() const {
    if (k < 2) throw std::invalid_argument("bip: k must be at least 2");
    if (!(amplitude_a >= 0.0)) throw std::invalid_argument("bip: amplitude A must be >= 0");
    if (!(anneal_tau > 0.0)) throw std::invalid_argument("bip: tau must be positive");
    if (!(scale_divisor > 1.0)) throw std::invalid_argument("bip: scale divisor must exceed 1");
    if (!(min_scale >= 0.0)) throw std::invalid_argument("bip: min scale must be >= 0");
    if (!(success_threshold > 0.0)) throw std::invalid_argument("bip: success threshold must be positive");
}

std::vector<double> gaussian_step(std::span<const double> x, double sigma,
                                  std::span<const double> lower, std::span<const double> upper,
                                  BoundsPolicy policy, Rng& rng) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian_step: sigma must be >= 0");
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double proposal = x[d] + sigma * normal(rng);
        if (policy == BoundsPolicy::resample) {
            out[d] = apply_bounds(proposal, lower[d], upper[d], policy,
                                  [&] { return x[d] + sigma * normal(rng); });
        } else {
            out[d] = apply_bounds(proposal, lower[d], upper[d], policy);
        }
    }
    return out;
}

double tunneling_probability(double delta_f, double delta_x, double gamma, double amplitude_a) {
    if (!(gamma > 0.0)) throw std::invalid_argument("tunneling_probability: gamma must be positive");
    if (!(delta_x >= 0.0)) throw std::invalid_argument("tunneling_probability: delta_x must be >= 0");
    if (!(amplitude_a >= 0.0)) throw std::invalid_argument("tunneling_probability: A must be >= 0");
    if (delta_f <= 0.0) return std::min(1.0, amplitude_a);
    const double t = amplitude_a * std::exp(-delta_x * std::sqrt(delta_f) / gamma);
    return std::min(1.0, t);
}

AcceptDecision accept_sample(const Particle& current, const Particle& candidate, double gamma,
                             const BipConfig& config, Rng& rng) {
    AcceptDecision decision;
    decision.delta_f = candidate.fitness - current.fitness;
    decision.delta_x = distance(current.position, candidate.position);
    if (candidate.fitness <= current.fitness) {
        decision.particle = candidate;
        decision.took_candidate = true;
        decision.probability = 1.0;
        return decision;
    }
    decision.particle = current;
    if (config.amplitude_a == 0.0) return decision;

    decision.tunneling_decision = true;
    decision.probability = tunneling_probability(decision.delta_f, decision.delta_x, gamma,
                                                 config.amplitude_a);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < decision.probability) {
        decision.particle = candidate;
        decision.took_candidate = true;
    }
    return decision;
}

std::string_view to_string(SpreadAggregation aggregation) {
    switch (aggregation) {
        case SpreadAggregation::max: return "max";
        case SpreadAggregation::mean: return "mean";
        case SpreadAggregation::rms: return "rms";
    }
    return "max";
}

SpreadAggregation parse_spread_aggregation(std::string_view text) {
    if (text == "max") return SpreadAggregation::max;
    if (text == "mean") return SpreadAggregation::mean;
    if (text == "rms") return SpreadAggregation::rms;
    throw std::invalid_argument("unknown spread aggregation: " + std::string(text));
}

double population_spread(std::span<const Particle> particles, SpreadAggregation aggregation) {
    const std::size_t k = particles.size();
    if (k < 2) throw std::invalid_argument("population_spread: need at least 2 particles");
    const std::size_t dim = particles.front().position.size();
    double spread = 0.0;
    double sum_sd = 0.0;
    double sum_var = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        double mean = 0.0;
        for (const auto& p : particles) mean += p.position[d];
        mean /= static_cast<double>(k);
        double ss = 0.0;
        for (const auto& p : particles) {
            const double dev = p.position[d] - mean;
            ss += dev * dev;
        }
        const double var = ss / static_cast<double>(k - 1);
        spread = std::max(spread, std::sqrt(var));
        sum_sd += std::sqrt(var);
        sum_var += var;
    }
    switch (aggregation) {
        case SpreadAggregation::max: break;
        case SpreadAggregation::mean: spread = sum_sd / static_cast<double>(dim); break;
        case SpreadAggregation::rms: spread = std::sqrt(sum_var / static_cast<double>(dim)); break;
    }
    return spread;
}

bool ground_state_reached(std::span<const Particle> particles, double sigma_s,
                          SpreadAggregation aggregation) {
    return population_spread(particles, aggregation) < sigma_s;
}

std::optional<MeanReplacement> mean_replace_worst(std::vector<Particle>& particles,
                                                  BudgetedObjective& objective) {
    if (particles.size() < 2) throw std::invalid_argument("mean_replace_worst: need at least 2 particles");
    const std::size_t dim = particles.front().position.size();
    std::vector<double> mean(dim, 0.0);
    for (const auto& p : particles) {
        for (std::size_t d = 0; d < dim; ++d) mean[d] += p.position[d];
    }
    for (double& m : mean) m /= static_cast<double>(particles.size());

    std::size_t worst = 0;
    for (std::size_t i = 1; i < particles.size(); ++i) {
        if (particles[i].fitness > particles[worst].fitness) worst = i;
    }
    const auto fitness = objective.evaluate(mean);
    if (!fitness) return std::nullopt;

    MeanReplacement result{worst, particles[worst].fitness};
    particles[worst].position = std::move(mean);
    particles[worst].fitness = *fitness;
    return result;
}

double annealed_gamma(double gamma0, std::uint64_t ac, double tau) {
    const double g = gamma0 * std::exp(-static_cast<double>(ac) / tau);
    return std::max(g, std::numeric_limits<double>::denorm_min());
}

double anneal_gamma(BipState& state, const BipConfig& config) {
    ++state.ac;
    state.gamma = config.gamma_schedule ? config.gamma_schedule(state.gamma0, state.ac)
                                        : annealed_gamma(state.gamma0, state.ac, config.anneal_tau);
    return state.gamma;
}

void begin_scale(BipState& state) {
    state.ac = 0;
    state.gamma0 = state.sigma_s;
    state.gamma = state.gamma0;
}

BipOptimizer::BipOptimizer(BudgetedObjective& objective, BipConfig config, Observer observer)
    : objective_(&objective),
      config_(std::move(config)),
      rng_(config_.seed),
      tracker_("bip", objective, config_.seed, config_.success_threshold, std::move(observer)) {
    config_.validate();
    const auto& spec = objective.spec();
    if (config_.init_position) {
        const auto& init = *config_.init_position;
        if (init.size() != spec.dim) throw std::invalid_argument("bip: init position has wrong dimension");
        for (std::size_t d = 0; d < spec.dim; ++d) {
            if (init[d] < spec.lower_bound[d] || init[d] > spec.upper_bound[d]) {
                throw std::invalid_argument("bip: init position outside the search box");
            }
        }
    }
    initialize();
}

void BipOptimizer::initialize() {
    const auto& spec = objective_->spec();
    state_.particles.resize(config_.k);
    for (auto& p : state_.particles) {
        p.position = config_.init_position ? *config_.init_position : uniform_in_box(spec, rng_);
    }
    state_.initial_span = spec.max_span();
    state_.sigma_s = state_.initial_span;
    begin_scale(state_);

    for (std::size_t i = 0; i < state_.particles.size(); ++i) {
        auto& p = state_.particles[i];
        const auto f = objective_->evaluate(p.position);
        if (!f) {
            finished_ = true;
            return;
        }
        p.fitness = *f;
        tracker_.consider(p.position, p.fitness);
        if (tracker_.has_observer()) {
            Event e;
            e.evaluation_index = objective_->evals_used();
            e.particle_index = i;
            e.kind = EventKind::initialize;
            e.position = p.position;
            e.fitness = p.fitness;
            e.gamma = state_.gamma;
            e.sigma = state_.sigma_s;
            tracker_.emit(std::move(e));
        }
    }
    finished_ = should_stop();
}

bool BipOptimizer::should_stop() const {
    if (objective_->exhausted()) return true;
    if (state_.sigma_s < config_.min_scale) return true;
    return config_.stop_on_success && tracker_.reached(config_.success_threshold);
}

bool BipOptimizer::step() {
    if (finished_) return false;
    const auto& spec = objective_->spec();

    for (std::size_t i = 0; i < state_.particles.size(); ++i) {
        Particle& current = state_.particles[i];
        Particle candidate;
        candidate.position = gaussian_step(current.position, state_.sigma_s, spec.lower_bound,
                                           spec.upper_bound, config_.bounds_policy, rng_);
        const auto f = objective_->evaluate(candidate.position);
        if (!f) {
            finished_ = true;
            return false;
        }
        candidate.fitness = *f;
        tracker_.consider(candidate.position, candidate.fitness);

        AcceptDecision decision = accept_sample(current, candidate, state_.gamma, config_, rng_);
        if (tracker_.has_observer()) {
            Event e;
            e.evaluation_index = objective_->evals_used();
            e.particle_index = i;
            e.kind = !decision.took_candidate     ? EventKind::reject
                     : decision.tunneling_decision ? EventKind::accept_tunnel
                                                   : EventKind::accept_better;
            e.delta_f = decision.delta_f;
            e.delta_x = decision.delta_x;
            e.gamma = state_.gamma;
            e.probability = decision.probability;
            e.tunneling = decision.tunneling_decision;
            e.position = candidate.position;
            e.fitness = candidate.fitness;
            e.sigma = state_.sigma_s;
            e.sweep = state_.sweeps;
            e.scale_index = state_.scale_index;
            tracker_.emit(std::move(e));
        }
        current = std::move(decision.particle);

        if (config_.stop_on_success && tracker_.reached(config_.success_threshold)) {
            finished_ = true;
            return false;
        }
    }
    ++state_.sweeps;
    anneal_gamma(state_, config_);

    if (ground_state_reached(state_.particles, state_.sigma_s, config_.spread)) transition_scale();
    if (!finished_) finished_ = should_stop();
    return !finished_;
}

void BipOptimizer::transition_scale() {
    if (config_.mean_replacement) {
        const auto replaced = mean_replace_worst(state_.particles, *objective_);
        if (!replaced) {
            finished_ = true;
            return;
        }
        const Particle& moved = state_.particles[replaced->index];
        tracker_.consider(moved.position, moved.fitness);
        if (tracker_.has_observer()) {
            Event e;
            e.evaluation_index = objective_->evals_used();
            e.particle_index = replaced->index;
            e.kind = EventKind::mean_replace;
            e.delta_f = moved.fitness - replaced->old_fitness;
            e.gamma = state_.gamma;
            e.position = moved.position;
            e.fitness = moved.fitness;
            e.sigma = state_.sigma_s;
            e.sweep = state_.sweeps;
            e.scale_index = state_.scale_index;
            tracker_.emit(std::move(e));
        }
    }

    ++state_.scale_index;
    state_.sigma_s = state_.initial_span /
                     std::pow(config_.scale_divisor, static_cast<double>(state_.scale_index));
    begin_scale(state_);
    if (tracker_.has_observer()) {
        Event e;
        e.evaluation_index = objective_->evals_used();
        e.kind = EventKind::scale_halve;
        e.gamma = state_.gamma;
        e.sigma = state_.sigma_s;
        e.sweep = state_.sweeps;
        e.scale_index = state_.scale_index;
        tracker_.emit(std::move(e));
    }
}

TrialOutcome run_bip(BudgetedObjective& objective, const BipConfig& config, Observer observer) {
    BipOptimizer optimizer(objective, config, std::move(observer));
    return optimizer.run();
}

}  // namespace qdopt
