#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qdopt/objective.hpp"

namespace qdopt {

using Rng = std::mt19937_64;

struct Particle {
    std::vector<double> position;
    double fitness = std::numeric_limits<double>::infinity();
};

enum class BoundsPolicy { clamp, reflect, resample };

std::string_view to_string(BoundsPolicy policy);
BoundsPolicy parse_bounds_policy(std::string_view text);

/// Brings coordinate `value` back inside [lo, hi]. For `resample`, `redraw`
/// produces a fresh proposal for the same coordinate; after a bounded number
/// of failed redraws the value is clamped.
double apply_bounds(double value, double lo, double hi, BoundsPolicy policy,
                    const std::function<double()>& redraw = {});

enum class EventKind {
    initialize,
    accept_better,
    accept_tunnel,
    reject,
    mean_replace,
    scale_halve,
};

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

/// One optimizer event as seen by a diagnostics observer.
///
/// `evaluation_index` is the 1-based count of budget units consumed when the
/// event fired. Scale transitions consume nothing and repeat the index of the
/// preceding evaluation. `tunneling` marks decisions on a worse candidate
/// made with the transmission probability; only those carry a meaningful
/// `probability`.
struct Event {
    std::uint64_t evaluation_index = 0;
    std::size_t particle_index = 0;
    EventKind kind = EventKind::initialize;
    double delta_f = 0.0;
    double delta_x = 0.0;
    double gamma = 0.0;
    double probability = 0.0;
    bool tunneling = false;
    std::vector<double> position;
    double fitness = 0.0;
    double sigma = 0.0;
    std::uint64_t sweep = 0;
    std::uint64_t scale_index = 0;

    bool has_position() const { return kind != EventKind::scale_halve; }
};

using Observer = std::function<void(const Event&)>;

struct TracePoint {
    std::uint64_t evaluation_index = 0;
    double best_error = 0.0;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

/// Result of one seeded run.
struct TrialOutcome {
    std::string algorithm;
    std::string function;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    /// f(x_best) - f(x*), floored at zero. +inf when nothing was evaluated.
    double final_error = std::numeric_limits<double>::infinity();
    std::uint64_t evals_used = 0;
    std::vector<TracePoint> error_trace;
    bool succeeded = false;
    /// False only for runs whose budget allowed no evaluation at all.
    bool has_best = false;
    Particle best;
};

/// Records (evaluation_index, best_error) on every improvement and halves
/// the stored resolution whenever the buffer reaches its capacity.
class TraceRecorder {
public:
    static constexpr std::size_t kDefaultCapacity = 2000;

    explicit TraceRecorder(std::size_t capacity = kDefaultCapacity);

    void observe(std::uint64_t evaluation_index, double best_error);
    /// Appends the terminal point if it is not already the last entry.
    std::vector<TracePoint> finish(std::uint64_t evals_used, double best_error) &&;

private:
    void thin();

    std::size_t capacity_;
    std::vector<TracePoint> points_;
};

/// Interface shared by all optimizers. `step()` advances one generation
/// (one population sweep for BIP) and returns false once the run is over.
class Optimizer {
public:
    virtual ~Optimizer() = default;

    virtual std::string_view name() const = 0;
    virtual bool step() = 0;
    virtual bool finished() const = 0;
    virtual TrialOutcome outcome() const = 0;
    virtual std::span<const Particle> population() const = 0;

    TrialOutcome run() {
        while (step()) {
        }
        return outcome();
    }
};

/// Error floor at zero; Schwefel and the tilted well can land a hair below
/// their stored optimum value through rounding.
inline double clamp_error(double e) { return e > 0.0 ? e : 0.0; }

/// Euclidean distance.
double distance(std::span<const double> a, std::span<const double> b);

/// Uniform point in the objective's box.
std::vector<double> uniform_in_box(const ObjectiveSpec& spec, Rng& rng);

/// Bookkeeping common to every optimizer: best-so-far tracking, the error
/// trace, event numbering, and success detection.
class RunTracker {
public:
    RunTracker(std::string algorithm, const BudgetedObjective& objective, std::uint64_t seed,
               double success_threshold, Observer observer);

    /// Updates best-so-far with an evaluated point.
    void consider(std::span<const double> position, double fitness);
    void emit(Event event) const;
    bool has_observer() const { return static_cast<bool>(observer_); }

    bool has_best() const { return has_best_; }
    const Particle& best() const { return best_; }
    double best_error() const;
    bool reached(double threshold) const { return has_best_ && best_error() <= threshold; }
    std::uint64_t evals_used() const { return objective_->evals_used(); }

    TrialOutcome outcome() const;

private:
    std::string algorithm_;
    const BudgetedObjective* objective_;
    std::uint64_t seed_;
    double success_threshold_;
    Observer observer_;
    bool has_best_ = false;
    Particle best_;
    TraceRecorder trace_;
};

}  // namespace qdopt
