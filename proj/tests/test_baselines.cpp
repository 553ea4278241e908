#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qdopt/baselines.hpp"

using namespace qdopt;

namespace {

ObjectiveSpec constant_objective(std::size_t dim) {
    ObjectiveSpec spec = make_objective("F7", dim);
    spec.name = "constant";
    spec.evaluate = [](std::span<const double>) { return 1.0; };
    spec.optimum_value = 1.0;
    return spec;
}

template <class Opt>
void check_common_invariants(Opt& opt, const ObjectiveSpec& spec, std::size_t expected_size) {
    double last = opt.outcome().final_error;
    while (opt.step()) {
        CHECK(opt.population().size() == expected_size);
        for (const auto& p : opt.population()) {
            for (std::size_t d = 0; d < spec.dim; ++d) {
                CHECK(p.position[d] >= spec.lower_bound[d]);
                CHECK(p.position[d] <= spec.upper_bound[d]);
            }
        }
        const double now = opt.outcome().final_error;
        CHECK(now <= last);
        last = now;
    }
}

}  // namespace

TEST_CASE("bare-bones samplers") {
    Rng rng(1);
    const std::vector<double> p{1.0, -2.0, 3.5};
    CHECK(bbpso_sample(p, p, rng) == p);
    CHECK(gbde_mutant(p, p, rng) == p);

    // Mean (p+g)/2 and spread |p-g| per dimension.
    const std::vector<double> a{0.0}, b{2.0};
    const int n = 20000;
    double sum = 0, sum_sq = 0;
    for (int i = 0; i < n; ++i) {
        const double v = bbpso_sample(a, b, rng)[0];
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum_sq / n - mean * mean);
    CHECK(std::abs(mean - 1.0) < 0.05);
    CHECK(std::abs(sd - 2.0) < 0.05);

    CHECK(clamp_crossover_rate(1.3) == 1.0);
    CHECK(clamp_crossover_rate(-0.2) == 0.0);
    CHECK(clamp_crossover_rate(0.42) == 0.42);
}

TEST_CASE("baseline config validation") {
    BbpsoConfig pso;
    pso.np = 1;
    CHECK_THROWS_AS(pso.validate(), std::invalid_argument);
    BbfwaConfig fwa;
    fwa.amp_grow = 0.9;
    CHECK_THROWS_AS(fwa.validate(), std::invalid_argument);
    fwa = {};
    fwa.amp_shrink = 1.0;
    CHECK_THROWS_AS(fwa.validate(), std::invalid_argument);
    GbdeConfig de;
    de.np = 3;
    CHECK_THROWS_AS(de.validate(), std::invalid_argument);
    CHECK_NOTHROW(BbpsoConfig{}.validate());
    CHECK_NOTHROW(BbfwaConfig{}.validate());
    CHECK_NOTHROW(GbdeConfig{}.validate());
}

TEST_CASE("baselines solve the 10-D sphere") {
    {
        BudgetedObjective obj(make_objective("F7", 10), 50000);
        BbpsoConfig c;
        c.seed = 1;
        CHECK(run_bbpso(obj, c).final_error < 1e-10);
    }
    {
        BudgetedObjective obj(make_objective("F7", 10), 100000);
        BbfwaConfig c;
        c.seed = 1;
        CHECK(run_bbfwa(obj, c).final_error < 1e-6);
    }
    {
        BudgetedObjective obj(make_objective("F7", 10), 100000);
        GbdeConfig c;
        c.seed = 1;
        CHECK(run_gbde(obj, c).final_error < 1e-10);
    }
}

TEST_CASE("bbpso with coinciding bests is frozen") {
    BudgetedObjective obj(constant_objective(3), 2000);
    BbpsoConfig c;
    c.np = 4;
    BbpsoOptimizer opt(obj, c);
    // On a flat landscape the first particle stays global best and nothing
    // improves, so only the global best particle samples with zero spread.
    const auto g = opt.global_best_index();
    const auto gpos = opt.personal_bests()[g].position;
    opt.step();
    CHECK(opt.population()[g].position == gpos);
}

TEST_CASE("bbfwa amplitude schedule") {
    const auto spec = constant_objective(2);
    BudgetedObjective obj(spec, 1000000);
    BbfwaConfig c;
    c.np = 10;
    BbfwaOptimizer opt(obj, c);
    const double span = spec.max_span();
    CHECK(opt.amplitude()[0] == span);
    for (int g = 1; g <= 50; ++g) {
        opt.step();
        CHECK(opt.amplitude()[0] == doctest::Approx(span * std::pow(0.9, g)).epsilon(1e-12));
    }
    for (int g = 0; g < 2000; ++g) opt.step();
    CHECK(opt.amplitude()[0] == opt.amplitude_floor());
    CHECK(opt.amplitude_floor() == std::numeric_limits<double>::epsilon());
}

TEST_CASE("bbfwa amplitude grows on improvement and respects the ceiling") {
    const auto spec = make_objective("F7", 2);
    BudgetedObjective obj(spec, 100000);
    BbfwaConfig c;
    c.np = 50;
    c.seed = 4;
    BbfwaOptimizer opt(obj, c);
    double prev_amp = opt.amplitude()[0];
    double prev_fit = opt.firework().fitness;
    for (int g = 0; g < 200 && opt.step(); ++g) {
        const double amp = opt.amplitude()[0];
        if (opt.firework().fitness < prev_fit) {
            CHECK(amp == doctest::Approx(std::min(prev_amp * 1.2, spec.max_span())));
        } else {
            CHECK(amp == doctest::Approx(std::max(prev_amp * 0.9, opt.amplitude_floor())));
        }
        CHECK(amp <= opt.amplitude_ceiling()[0]);
        prev_amp = amp;
        prev_fit = opt.firework().fitness;
    }
}

TEST_CASE("gbde selection never worsens a parent") {
    BudgetedObjective obj(make_objective("F2", 5), 20000);
    GbdeConfig c;
    c.seed = 3;
    GbdeOptimizer opt(obj, c);
    std::vector<double> before;
    for (const auto& p : opt.population()) before.push_back(p.fitness);
    while (opt.step()) {
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(opt.population()[i].fitness <= before[i]);
            before[i] = opt.population()[i].fitness;
        }
    }
}

TEST_CASE("baseline invariants") {
    const auto spec = make_objective("F3", 4);
    {
        BudgetedObjective obj(spec, 5000);
        BbpsoOptimizer opt(obj, BbpsoConfig{});
        check_common_invariants(opt, spec, 20);
    }
    {
        BudgetedObjective obj(spec, 5000);
        BbfwaConfig c;
        c.np = 30;
        BbfwaOptimizer opt(obj, c);
        check_common_invariants(opt, spec, 30);
    }
    {
        BudgetedObjective obj(spec, 5000);
        GbdeOptimizer opt(obj, GbdeConfig{});
        check_common_invariants(opt, spec, 100);
    }
}

TEST_CASE("baselines are deterministic per seed") {
    auto traces = [](std::uint64_t seed) {
        std::vector<std::vector<TracePoint>> out;
        BbpsoConfig a;
        a.seed = seed;
        BbfwaConfig b;
        b.seed = seed;
        GbdeConfig c;
        c.seed = seed;
        BudgetedObjective o1(make_objective("F1", 5), 3000), o2(make_objective("F1", 5), 3000),
            o3(make_objective("F1", 5), 3000);
        out.push_back(run_bbpso(o1, a).error_trace);
        out.push_back(run_bbfwa(o2, b).error_trace);
        out.push_back(run_gbde(o3, c).error_trace);
        return out;
    };
    CHECK(traces(8) == traces(8));
    CHECK(traces(8) != traces(9));
}
