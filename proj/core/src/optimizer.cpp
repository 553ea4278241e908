#include "qdopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdopt {

std::string_view to_string(BoundsPolicy policy) {
    switch (policy) {
        case BoundsPolicy::clamp: return "clamp";
        case BoundsPolicy::reflect: return "reflect";
        case BoundsPolicy::resample: return "resample";
    }
    return "clamp";
}

BoundsPolicy parse_bounds_policy(std::string_view text) {
    if (text == "clamp") return BoundsPolicy::clamp;
    if (text == "reflect") return BoundsPolicy::reflect;
    if (text == "resample") return BoundsPolicy::resample;
    throw std::invalid_argument("unknown bounds policy: " + std::string(text));
}

double apply_bounds(double value, double lo, double hi, BoundsPolicy policy,
                    const std::function<double()>& redraw) {
    if (value >= lo && value <= hi) return value;
    switch (policy) {
        case BoundsPolicy::clamp: return std::clamp(value, lo, hi);
        case BoundsPolicy::reflect: {
            const double width = hi - lo;
            if (width <= 0.0 || !std::isfinite(value)) return std::clamp(value, lo, hi);
            // Fold onto [0, 2 width) and mirror the upper half.
            double t = std::fmod(value - lo, 2.0 * width);
            if (t < 0.0) t += 2.0 * width;
            if (t > width) t = 2.0 * width - t;
            return std::clamp(lo + t, lo, hi);
        }
        case BoundsPolicy::resample: {
            constexpr int kMaxRedraws = 100;
            if (redraw) {
                for (int i = 0; i < kMaxRedraws; ++i) {
                    const double v = redraw();
                    if (v >= lo && v <= hi) return v;
                }
            }
            return std::clamp(value, lo, hi);
        }
    }
    return std::clamp(value, lo, hi);
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::initialize: return "initialize";
        case EventKind::accept_better: return "accept-better";
        case EventKind::accept_tunnel: return "accept-tunnel";
        case EventKind::reject: return "reject";
        case EventKind::mean_replace: return "mean-replace";
        case EventKind::scale_halve: return "scale-halve";
    }
    return "initialize";
}

EventKind parse_event_kind(std::string_view text) {
    for (auto kind : {EventKind::initialize, EventKind::accept_better, EventKind::accept_tunnel,
                      EventKind::reject, EventKind::mean_replace, EventKind::scale_halve}) {
        if (to_string(kind) == text) return kind;
    }
    throw std::invalid_argument("unknown event kind: " + std::string(text));
}

TraceRecorder::TraceRecorder(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 4)) {
    points_.reserve(capacity_);
}

void TraceRecorder::observe(std::uint64_t evaluation_index, double best_error) {
    if (!points_.empty() && !(best_error < points_.back().best_error)) return;
    if (points_.size() + 1 >= capacity_) thin();
    points_.push_back({evaluation_index, best_error});
}

void TraceRecorder::thin() {
    // Keep even positions; the newest point is re-added by the caller.
    std::vector<TracePoint> kept;
    kept.reserve(capacity_);
    for (std::size_t i = 0; i < points_.size(); i += 2) kept.push_back(points_[i]);
    points_ = std::move(kept);
}

std::vector<TracePoint> TraceRecorder::finish(std::uint64_t evals_used, double best_error) && {
    if (points_.empty() || points_.back().evaluation_index != evals_used) {
        if (points_.empty() || best_error <= points_.back().best_error) {
            if (points_.size() + 1 > capacity_) thin();
            points_.push_back({evals_used, best_error});
        }
    }
    return std::move(points_);
}

double distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

std::vector<double> uniform_in_box(const ObjectiveSpec& spec, Rng& rng) {
    std::vector<double> x(spec.dim);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t d = 0; d < spec.dim; ++d) {
        x[d] = spec.lower_bound[d] + unit(rng) * (spec.upper_bound[d] - spec.lower_bound[d]);
    }
    return x;
}

RunTracker::RunTracker(std::string algorithm, const BudgetedObjective& objective,
                       std::uint64_t seed, double success_threshold, Observer observer)
    : algorithm_(std::move(algorithm)),
      objective_(&objective),
      seed_(seed),
      success_threshold_(success_threshold),
      observer_(std::move(observer)) {}

void RunTracker::consider(std::span<const double> position, double fitness) {
    if (!has_best_ || fitness < best_.fitness) {
        has_best_ = true;
        best_.position.assign(position.begin(), position.end());
        best_.fitness = fitness;
    }
    trace_.observe(objective_->evals_used(), best_error());
}

void RunTracker::emit(Event event) const {
    if (observer_) observer_(event);
}

double RunTracker::best_error() const {
    if (!has_best_) return std::numeric_limits<double>::infinity();
    return clamp_error(objective_->spec().error_of(best_.fitness));
}

TrialOutcome RunTracker::outcome() const {
    TrialOutcome out;
    out.algorithm = algorithm_;
    out.function = objective_->spec().name;
    out.dim = objective_->spec().dim;
    out.seed = seed_;
    out.evals_used = objective_->evals_used();
    out.has_best = has_best_;
    out.final_error = best_error();
    out.succeeded = has_best_ && out.final_error <= success_threshold_;
    out.best = best_;
    if (has_best_) out.error_trace = TraceRecorder(trace_).finish(out.evals_used, out.final_error);
    return out;
}

}  // namespace qdopt
