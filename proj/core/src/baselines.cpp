#include "qdopt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qdopt {

namespace {

// Evaluates n uniform points. Returns false if the budget ran out; the
// remaining particles keep infinite fitness.
bool initialize_population(BudgetedObjective& objective, RunTracker& tracker, Rng& rng,
                           std::vector<Particle>& particles, std::size_t n) {
    particles.resize(n);
    for (auto& p : particles) p.position = uniform_in_box(objective.spec(), rng);
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = particles[i];
        const auto f = objective.evaluate(p.position);
        if (!f) return false;
        p.fitness = *f;
        tracker.consider(p.position, p.fitness);
        if (tracker.has_observer()) {
            Event e;
            e.evaluation_index = objective.evals_used();
            e.particle_index = i;
            e.kind = EventKind::initialize;
            e.position = p.position;
            e.fitness = p.fitness;
            tracker.emit(std::move(e));
        }
    }
    return true;
}

void emit_move(const RunTracker& tracker, std::uint64_t evaluation_index, std::size_t index,
               bool accepted, const Particle& candidate, double delta_f, std::uint64_t generation) {
    if (!tracker.has_observer()) return;
    Event e;
    e.evaluation_index = evaluation_index;
    e.particle_index = index;
    e.kind = accepted ? EventKind::accept_better : EventKind::reject;
    e.delta_f = delta_f;
    e.probability = accepted ? 1.0 : 0.0;
    e.position = candidate.position;
    e.fitness = candidate.fitness;
    e.sweep = generation;
    tracker.emit(std::move(e));
}

void clamp_to_box(std::vector<double>& x, const ObjectiveSpec& spec) {
    for (std::size_t d = 0; d < x.size(); ++d) x[d] = std::clamp(x[d], spec.lower_bound[d], spec.upper_bound[d]);
}

}  // namespace

void BbpsoConfig::validate() const {
    if (np < 2) throw std::invalid_argument("bbpso: np must be at least 2");
    if (!(success_threshold > 0.0)) throw std::invalid_argument("bbpso: success threshold must be positive");
}

void BbfwaConfig::validate() const {
    if (np < 1) throw std::invalid_argument("bbfwa: np must be positive");
    if (!(amp_shrink > 0.0 && amp_shrink < 1.0 && amp_grow > 1.0)) {
        throw std::invalid_argument("bbfwa: need 0 < amp_shrink < 1 < amp_grow");
    }
    if (!(success_threshold > 0.0)) throw std::invalid_argument("bbfwa: success threshold must be positive");
}

void GbdeConfig::validate() const {
    if (np < 4) throw std::invalid_argument("gbde: np must be at least 4");
    if (!(cr_std >= 0.0)) throw std::invalid_argument("gbde: cr_std must be >= 0");
    if (!(success_threshold > 0.0)) throw std::invalid_argument("gbde: success threshold must be positive");
}

std::vector<double> bbpso_sample(std::span<const double> pbest, std::span<const double> gbest,
                                 Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(pbest.size());
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double mean = (pbest[d] + gbest[d]) / 2.0;
        const double sd = std::abs(pbest[d] - gbest[d]);
        x[d] = mean + sd * normal(rng);
    }
    return x;
}

std::vector<double> gbde_mutant(std::span<const double> x, std::span<const double> best, Rng& rng) {
    // Same bare-bones rule, guided by the population best.
    return bbpso_sample(x, best, rng);
}

double clamp_crossover_rate(double cr) { return std::clamp(cr, 0.0, 1.0); }

// ---------------------------------------------------------------- BBPSO --

BbpsoOptimizer::BbpsoOptimizer(BudgetedObjective& objective, BbpsoConfig config, Observer observer)
    : objective_(&objective),
      config_(config),
      rng_(config.seed),
      tracker_("bbpso", objective, config.seed, config.success_threshold, std::move(observer)) {
    config_.validate();
    const bool complete = initialize_population(objective, tracker_, rng_, particles_, config_.np);
    pbest_ = particles_;
    for (std::size_t i = 1; i < pbest_.size(); ++i) {
        if (pbest_[i].fitness < pbest_[gbest_].fitness) gbest_ = i;
    }
    finished_ = !complete || stop_now();
}

bool BbpsoOptimizer::stop_now() const {
    return objective_->exhausted() ||
           (config_.stop_on_success && tracker_.reached(config_.success_threshold));
}

bool BbpsoOptimizer::step() {
    if (finished_) return false;
    const auto& spec = objective_->spec();
    const auto generation = objective_->evals_used();
    for (std::size_t i = 0; i < particles_.size(); ++i) {
        Particle candidate;
        candidate.position = bbpso_sample(pbest_[i].position, pbest_[gbest_].position, rng_);
        clamp_to_box(candidate.position, spec);
        const auto f = objective_->evaluate(candidate.position);
        if (!f) {
            finished_ = true;
            return false;
        }
        candidate.fitness = *f;
        tracker_.consider(candidate.position, candidate.fitness);

        const bool improved = candidate.fitness < pbest_[i].fitness;
        emit_move(tracker_, objective_->evals_used(), i, improved, candidate,
                  candidate.fitness - pbest_[i].fitness, generation);
        particles_[i] = candidate;
        if (improved) {
            pbest_[i] = std::move(candidate);
            if (pbest_[i].fitness < pbest_[gbest_].fitness) gbest_ = i;
        }
        if (stop_now()) {
            finished_ = true;
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------- BBFWA --

BbfwaOptimizer::BbfwaOptimizer(BudgetedObjective& objective, BbfwaConfig config, Observer observer)
    : objective_(&objective),
      config_(config),
      rng_(config.seed),
      tracker_("bbfwa", objective, config.seed, config.success_threshold, std::move(observer)) {
    config_.validate();
    const auto& spec = objective.spec();
    span_.resize(spec.dim);
    amplitude_.resize(spec.dim);
    for (std::size_t d = 0; d < spec.dim; ++d) {
        span_[d] = spec.upper_bound[d] - spec.lower_bound[d];
        amplitude_[d] = config_.amp_init > 0.0 ? std::min(config_.amp_init, span_[d]) : span_[d];
    }
    std::vector<Particle> first;
    const bool complete = initialize_population(objective, tracker_, rng_, first, 1);
    firework_ = first.front();
    sparks_.assign(config_.np, firework_);
    finished_ = !complete || stop_now();
}

double BbfwaOptimizer::amplitude_floor() const { return std::numeric_limits<double>::epsilon(); }

bool BbfwaOptimizer::stop_now() const {
    return objective_->exhausted() ||
           (config_.stop_on_success && tracker_.reached(config_.success_threshold));
}

bool BbfwaOptimizer::step() {
    if (finished_) return false;
    const auto& spec = objective_->spec();
    const auto generation = objective_->evals_used();
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::vector<std::uint64_t> eval_index(sparks_.size(), 0);
    std::size_t evaluated = 0;
    for (std::size_t s = 0; s < sparks_.size(); ++s) {
        Particle spark;
        spark.position.resize(spec.dim);
        for (std::size_t d = 0; d < spec.dim; ++d) {
            spark.position[d] = firework_.position[d] + amplitude_[d] * unit(rng_);
        }
        clamp_to_box(spark.position, spec);
        const auto f = objective_->evaluate(spark.position);
        if (!f) break;
        spark.fitness = *f;
        tracker_.consider(spark.position, spark.fitness);
        eval_index[s] = objective_->evals_used();
        sparks_[s] = std::move(spark);
        ++evaluated;
        if (config_.stop_on_success && tracker_.reached(config_.success_threshold)) break;
    }
    if (evaluated == 0) {
        finished_ = true;
        return false;
    }

    std::size_t best = 0;
    for (std::size_t s = 1; s < evaluated; ++s) {
        if (sparks_[s].fitness < sparks_[best].fitness) best = s;
    }
    // A tie with the firework is not an improvement.
    const bool improved = sparks_[best].fitness < firework_.fitness;
    for (std::size_t s = 0; s < evaluated; ++s) {
        emit_move(tracker_, eval_index[s], s, improved && s == best, sparks_[s],
                  sparks_[s].fitness - firework_.fitness, generation);
    }
    const double factor = improved ? config_.amp_grow : config_.amp_shrink;
    if (improved) firework_ = sparks_[best];
    for (std::size_t d = 0; d < amplitude_.size(); ++d) {
        amplitude_[d] = std::clamp(amplitude_[d] * factor, amplitude_floor(), span_[d]);
    }

    if (evaluated < sparks_.size() || stop_now()) finished_ = true;
    return !finished_;
}

// ----------------------------------------------------------------- GBDE --

GbdeOptimizer::GbdeOptimizer(BudgetedObjective& objective, GbdeConfig config, Observer observer)
    : objective_(&objective),
      config_(config),
      rng_(config.seed),
      tracker_("gbde", objective, config.seed, config.success_threshold, std::move(observer)) {
    config_.validate();
    const bool complete = initialize_population(objective, tracker_, rng_, population_, config_.np);
    finished_ = !complete || stop_now();
}

bool GbdeOptimizer::stop_now() const {
    return objective_->exhausted() ||
           (config_.stop_on_success && tracker_.reached(config_.success_threshold));
}

bool GbdeOptimizer::step() {
    if (finished_) return false;
    const auto& spec = objective_->spec();
    const auto generation = objective_->evals_used();
    std::normal_distribution<double> cr_dist(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_dim(0, spec.dim - 1);

    std::size_t best_index = 0;
    for (std::size_t i = 1; i < population_.size(); ++i) {
        if (population_[i].fitness < population_[best_index].fitness) best_index = i;
    }
    const std::vector<double> best = population_[best_index].position;

    for (std::size_t i = 0; i < population_.size(); ++i) {
        Particle& parent = population_[i];
        const double cr = clamp_crossover_rate(config_.cr_mean + config_.cr_std * cr_dist(rng_));
        const std::size_t forced = pick_dim(rng_);
        const std::vector<double> mutant = gbde_mutant(parent.position, best, rng_);

        Particle trial;
        trial.position = parent.position;
        for (std::size_t d = 0; d < spec.dim; ++d) {
            if (d == forced || unit(rng_) < cr) trial.position[d] = mutant[d];
        }
        clamp_to_box(trial.position, spec);
        const auto f = objective_->evaluate(trial.position);
        if (!f) {
            finished_ = true;
            return false;
        }
        trial.fitness = *f;
        tracker_.consider(trial.position, trial.fitness);

        const bool replace = trial.fitness <= parent.fitness;
        emit_move(tracker_, objective_->evals_used(), i, replace, trial, trial.fitness - parent.fitness,
                  generation);
        if (replace) parent = std::move(trial);
        if (stop_now()) {
            finished_ = true;
            return false;
        }
    }
    return true;
}

TrialOutcome run_bbpso(BudgetedObjective& objective, const BbpsoConfig& config, Observer observer) {
    return BbpsoOptimizer(objective, config, std::move(observer)).run();
}

TrialOutcome run_bbfwa(BudgetedObjective& objective, const BbfwaConfig& config, Observer observer) {
    return BbfwaOptimizer(objective, config, std::move(observer)).run();
}

TrialOutcome run_gbde(BudgetedObjective& objective, const GbdeConfig& config, Observer observer) {
    return GbdeOptimizer(objective, config, std::move(observer)).run();
}

}  // namespace qdopt
