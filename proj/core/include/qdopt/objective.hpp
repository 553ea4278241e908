#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qdopt {

/// A boxed minimization problem with a known global optimum.
///
/// `evaluate` must be pure: the same input always yields the same value and
/// the callable may be shared across threads.
struct ObjectiveSpec {
    std::string name;
    std::size_t dim = 0;
    std::vector<double> lower_bound;
    std::vector<double> upper_bound;
    std::vector<double> optimum_position;
    double optimum_value = 0.0;
    std::function<double(std::span<const double>)> evaluate;

    /// Largest per-dimension span (UB - LB).
    double max_span() const;
    /// Error of a raw objective value relative to the known optimum.
    double error_of(double value) const { return value - optimum_value; }
};

/// Parameters of the tilted double-well potential
/// V(x) = sum_i V0 (x_i^2 - a^2)^2 / a^4 + delta x_i.
struct DoubleWellParams {
    double v0 = 1.0;
    double a = 2.0;
    double delta = 0.05;
    std::size_t dim = 2;
};

// Table of the twelve standard test functions, indexed 1..12:
//   F1 Griewank, F2 Rastrigin, F3 Ackley, F4 Levy, F5 Alpine, F6 Schwefel,
//   F7 Sphere, F8 Sum Squares, F9 Rotated Hyper-Ellipsoid, F10 Ellipsoidal,
//   F11 Sum of Different Powers, F12 Zakharov.
// F1-F6 are multimodal, F7-F12 unimodal.
ObjectiveSpec make_benchmark(int id, std::size_t dim);

/// Tilted double well over the box [-2a, 2a]^n. For delta > 0 the optimum
/// sits in the well near -a in every coordinate.
ObjectiveSpec double_well(const DoubleWellParams& params);

/// Sum of squares over the Sphere box [-5.12, 5.12]^n.
ObjectiveSpec paraboloid(std::size_t dim);

/// Looks up "F1".."F12", "double_well" or "paraboloid".
ObjectiveSpec make_objective(std::string_view id, std::size_t dim);

/// Identifiers accepted by make_objective.
const std::vector<std::string>& objective_ids();

bool is_multimodal(std::string_view id);

/// Objective wrapper that meters every evaluation against a fixed budget
/// (MaxFES). Single-owner; each concurrent trial holds its own instance.
class BudgetedObjective {
public:
    BudgetedObjective(ObjectiveSpec spec, std::uint64_t max_fes);

    /// Evaluates x and charges one unit, or returns nullopt without
    /// evaluating when the budget is already spent.
    std::optional<double> evaluate(std::span<const double> x);

    const ObjectiveSpec& spec() const { return spec_; }
    std::uint64_t evals_used() const { return evals_used_; }
    std::uint64_t max_fes() const { return max_fes_; }
    std::uint64_t remaining() const { return max_fes_ - evals_used_; }
    bool exhausted() const { return evals_used_ >= max_fes_; }

private:
    ObjectiveSpec spec_;
    std::uint64_t evals_used_ = 0;
    std::uint64_t max_fes_ = 0;
};

}  // namespace qdopt
