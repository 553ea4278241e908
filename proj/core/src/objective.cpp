#include "qdopt/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qdopt {

namespace {

constexpr double kPi = std::numbers::pi;

// Schwefel's optimum coordinate; the common "420.97" is truncated.
constexpr double kSchwefelOptimum = 420.968746;

ObjectiveSpec boxed(std::string name, std::size_t dim, double lo, double hi,
                    std::vector<double> optimum,
                    std::function<double(std::span<const double>)> f) {
    ObjectiveSpec spec;
    spec.name = std::move(name);
    spec.dim = dim;
    spec.lower_bound.assign(dim, lo);
    spec.upper_bound.assign(dim, hi);
    spec.optimum_position = std::move(optimum);
    spec.optimum_value = 0.0;
    spec.evaluate = std::move(f);
    return spec;
}

double griewank(std::span<const double> x) {
    double sum = 0.0;
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += x[i] * x[i];
        prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return sum / 4000.0 - prod + 1.0;
}

double rastrigin(std::span<const double> x) {
    double sum = 10.0 * static_cast<double>(x.size());
    for (double xi : x) sum += xi * xi - 10.0 * std::cos(2.0 * kPi * xi);
    return sum;
}

double ackley(std::span<const double> x) {
    const auto n = static_cast<double>(x.size());
    double sq = 0.0;
    double cs = 0.0;
    for (double xi : x) {
        sq += xi * xi;
        cs += std::cos(2.0 * kPi * xi);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 +
           std::numbers::e;
}

double levy(std::span<const double> x) {
    const std::size_t n = x.size();
    auto w = [&](std::size_t i) { return 1.0 + (x[i] - 1.0) / 4.0; };
    const double s1 = std::sin(kPi * w(0));
    double sum = s1 * s1;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double wi = w(i);
        const double s = std::sin(kPi * wi + 1.0);
        sum += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * s * s);
    }
    const double wn = w(n - 1);
    const double sn = std::sin(2.0 * kPi * wn);
    sum += (wn - 1.0) * (wn - 1.0) * (1.0 + sn * sn);
    return sum;
}

double alpine(std::span<const double> x) {
    double sum = 0.0;
    for (double xi : x) sum += std::abs(xi * std::sin(xi) + 0.1 * xi);
    return sum;
}

double schwefel(std::span<const double> x) {
    double sum = 418.9829 * static_cast<double>(x.size());
    for (double xi : x) sum -= xi * std::sin(std::sqrt(std::abs(xi)));
    return sum;
}

double sphere(std::span<const double> x) {
    double sum = 0.0;
    for (double xi : x) sum += xi * xi;
    return sum;
}

double sum_squares(std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += static_cast<double>(i + 1) * x[i] * x[i];
    return sum;
}

double rotated_hyper_ellipsoid(std::span<const double> x) {
    double sum = 0.0;
    double prefix = 0.0;
    for (double xi : x) {
        prefix += xi;
        sum += prefix * prefix;
    }
    return sum;
}

double ellipsoidal(std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - static_cast<double>(i + 1);
        sum += d * d;
    }
    return sum;
}

double sum_of_different_powers(std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += std::pow(std::abs(x[i]), static_cast<double>(i + 2));
    return sum;
}

double zakharov(std::span<const double> x) {
    double sq = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sq += x[i] * x[i];
        lin += 0.5 * static_cast<double>(i + 1) * x[i];
    }
    const double lin2 = lin * lin;
    return sq + lin2 + lin2 * lin2;
}

// Minimizer of the 1-D tilted well g(x) = v0 (x^2 - a^2)^2 / a^4 + delta x on
// [-2|a|, 2|a|]: coarse scan, then Newton polish.
double double_well_argmin(double v0, double a, double delta) {
    const double a2 = a * a;
    const double a4 = a2 * a2;
    auto g = [&](double x) { return v0 * (x * x - a2) * (x * x - a2) / a4 + delta * x; };
    auto dg = [&](double x) { return 4.0 * v0 * x * (x * x - a2) / a4 + delta; };
    auto d2g = [&](double x) { return 4.0 * v0 * (3.0 * x * x - a2) / a4; };

    const double lo = -2.0 * std::abs(a);
    const double hi = 2.0 * std::abs(a);
    constexpr int kScan = 4000;
    double best = -std::abs(a);
    for (int i = 0; i <= kScan; ++i) {
        const double x = lo + (hi - lo) * i / kScan;
        if (g(x) < g(best)) best = x;
    }
    for (int it = 0; it < 50; ++it) {
        const double curv = d2g(best);
        if (curv <= 0.0) break;
        const double next = std::clamp(best - dg(best) / curv, lo, hi);
        if (next == best) break;
        best = next;
    }
    return best;
}

}  // namespace

double ObjectiveSpec::max_span() const {
    double span = 0.0;
    for (std::size_t d = 0; d < dim; ++d) span = std::max(span, upper_bound[d] - lower_bound[d]);
    return span;
}

ObjectiveSpec make_benchmark(int id, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("make_benchmark: dim must be positive");
    const std::vector<double> origin(dim, 0.0);
    switch (id) {
        case 1: return boxed("F1", dim, -100.0, 100.0, origin, griewank);
        case 2: return boxed("F2", dim, -5.12, 5.12, origin, rastrigin);
        case 3: return boxed("F3", dim, -32.77, 32.77, origin, ackley);
        case 4: return boxed("F4", dim, -10.0, 10.0, std::vector<double>(dim, 1.0), levy);
        case 5: return boxed("F5", dim, 0.0, 10.0, origin, alpine);
        case 6:
            return boxed("F6", dim, -500.0, 500.0, std::vector<double>(dim, kSchwefelOptimum),
                         schwefel);
        case 7: return boxed("F7", dim, -5.12, 5.12, origin, sphere);
        case 8: return boxed("F8", dim, -10.0, 10.0, origin, sum_squares);
        case 9: return boxed("F9", dim, -65.54, 65.54, origin, rotated_hyper_ellipsoid);
        case 10: {
            std::vector<double> opt(dim);
            for (std::size_t i = 0; i < dim; ++i) opt[i] = static_cast<double>(i + 1);
            return boxed("F10", dim, -100.0, 100.0, std::move(opt), ellipsoidal);
        }
        case 11: return boxed("F11", dim, -1.0, 1.0, origin, sum_of_different_powers);
        case 12: return boxed("F12", dim, -5.0, 10.0, origin, zakharov);
        default: break;
    }
    throw std::invalid_argument("make_benchmark: unknown function id " + std::to_string(id));
}

ObjectiveSpec double_well(const DoubleWellParams& params) {
    if (params.a == 0.0) throw std::invalid_argument("double_well: a must be nonzero");
    if (params.delta < 0.0) throw std::invalid_argument("double_well: delta must be >= 0");
    if (params.v0 <= 0.0) throw std::invalid_argument("double_well: v0 must be positive");
    if (params.dim == 0) throw std::invalid_argument("double_well: dim must be positive");

    const double v0 = params.v0;
    const double a = params.a;
    const double delta = params.delta;
    const double a2 = a * a;
    const double a4 = a2 * a2;
    const double span = 2.0 * std::abs(a);

    const double xmin = double_well_argmin(v0, a, delta);
    const double gmin = v0 * (xmin * xmin - a2) * (xmin * xmin - a2) / a4 + delta * xmin;

    ObjectiveSpec spec;
    spec.name = "double_well";
    spec.dim = params.dim;
    spec.lower_bound.assign(params.dim, -span);
    spec.upper_bound.assign(params.dim, span);
    spec.optimum_position.assign(params.dim, xmin);
    spec.optimum_value = gmin * static_cast<double>(params.dim);
    spec.evaluate = [v0, a2, a4, delta](std::span<const double> x) {
        double sum = 0.0;
        for (double xi : x) {
            const double q = xi * xi - a2;
            sum += v0 * q * q / a4 + delta * xi;
        }
        return sum;
    };
    return spec;
}

ObjectiveSpec paraboloid(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("paraboloid: dim must be positive");
    auto spec = boxed("paraboloid", dim, -5.12, 5.12, std::vector<double>(dim, 0.0), sphere);
    return spec;
}

const std::vector<std::string>& objective_ids() {
    static const std::vector<std::string> ids = {
        "F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8", "F9", "F10", "F11", "F12",
        "double_well", "paraboloid"};
    return ids;
}

ObjectiveSpec make_objective(std::string_view id, std::size_t dim) {
    if (id == "double_well") {
        DoubleWellParams params;
        params.dim = dim;
        return double_well(params);
    }
    if (id == "paraboloid") return paraboloid(dim);
    if (id.size() >= 2 && id.size() <= 3 && id[0] == 'F') {
        int n = 0;
        for (char c : id.substr(1)) {
            if (c < '0' || c > '9') throw std::invalid_argument("unknown function: " + std::string(id));
            n = n * 10 + (c - '0');
        }
        if (n >= 1 && n <= 12 && std::to_string(n) == id.substr(1)) return make_benchmark(n, dim);
    }
    throw std::invalid_argument("unknown function: " + std::string(id));
}

bool is_multimodal(std::string_view id) {
    static const std::vector<std::string> multi = {"F1", "F2", "F3", "F4", "F5", "F6", "double_well"};
    return std::find(multi.begin(), multi.end(), id) != multi.end();
}

BudgetedObjective::BudgetedObjective(ObjectiveSpec spec, std::uint64_t max_fes)
    : spec_(std::move(spec)), max_fes_(max_fes) {}

std::optional<double> BudgetedObjective::evaluate(std::span<const double> x) {
    if (x.size() != spec_.dim) {
        throw std::invalid_argument("evaluate: expected dimension " + std::to_string(spec_.dim) +
                                    ", got " + std::to_string(x.size()));
    }
    if (exhausted()) return std::nullopt;
    ++evals_used_;
    return spec_.evaluate(x);
}

}  // namespace qdopt
