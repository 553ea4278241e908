#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qdopt/bip.hpp"

using namespace qdopt;

namespace {

std::vector<Particle> particles_1d(std::initializer_list<double> xs) {
    std::vector<Particle> out;
    for (double x : xs) out.push_back({{x}, x * x});
    return out;
}

}  // namespace

TEST_CASE("gaussian_step") {
    Rng rng(1);
    const std::vector<double> lo{-5.12}, hi{5.12};

    SUBCASE("zero sigma leaves the point unchanged") {
        const std::vector<double> x{1.5};
        CHECK(gaussian_step(x, 0.0, lo, hi, BoundsPolicy::clamp, rng) == x);
    }
    SUBCASE("moments of a unit step") {
        const std::vector<double> x{0.0};
        const std::vector<double> wide_lo{-1e9}, wide_hi{1e9};
        const int n = 10000;
        double sum = 0, sum_sq = 0;
        for (int i = 0; i < n; ++i) {
            const double v = gaussian_step(x, 1.0, wide_lo, wide_hi, BoundsPolicy::clamp, rng)[0];
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / n;
        const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1));
        CHECK(std::abs(mean) <= 0.05);
        CHECK(sd >= 0.97);
        CHECK(sd <= 1.03);
    }
    SUBCASE("clamp keeps points in the box") {
        const std::vector<double> x{5.12};
        for (int i = 0; i < 1000; ++i) CHECK(gaussian_step(x, 1.0, lo, hi, BoundsPolicy::clamp, rng)[0] <= 5.12);
    }
    SUBCASE("reflect and resample stay in the box") {
        const std::vector<double> x{5.0};
        for (int i = 0; i < 1000; ++i) {
            const double r = gaussian_step(x, 3.0, lo, hi, BoundsPolicy::reflect, rng)[0];
            const double s = gaussian_step(x, 3.0, lo, hi, BoundsPolicy::resample, rng)[0];
            CHECK(r >= -5.12);
            CHECK(r <= 5.12);
            CHECK(s >= -5.12);
            CHECK(s <= 5.12);
        }
    }
    SUBCASE("negative sigma is rejected") {
        CHECK_THROWS_AS(gaussian_step(std::vector<double>{0.0}, -1.0, lo, hi, BoundsPolicy::clamp, rng),
                        std::invalid_argument);
    }
}

TEST_CASE("tunneling_probability") {
    CHECK(tunneling_probability(1e-300, 1.0, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(tunneling_probability(123.0, 0.0, 1.0, 1.0) == 1.0);
    CHECK(tunneling_probability(4.0, 1.0, 2.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(tunneling_probability(4.0, 1.0, 2.0, 0.5) == doctest::Approx(0.5 * std::exp(-1.0)));
    CHECK(tunneling_probability(4.0, 1.0, 2.0, 5.0) == 1.0);
    CHECK(tunneling_probability(1e9, 1.0, 1e-6, 1.0) == 0.0);
    CHECK_THROWS_AS(tunneling_probability(1.0, 1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(tunneling_probability(1.0, 1.0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(tunneling_probability(1.0, -1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("accept_sample") {
    BipConfig cfg;
    Rng rng(3);
    const Particle current{{0.0}, 5.0};

    SUBCASE("better candidates are always taken") {
        const Particle better{{1.0}, 4.0};
        for (int i = 0; i < 100; ++i) {
            const auto d = accept_sample(current, better, 1e-12, cfg, rng);
            CHECK(d.took_candidate);
            CHECK_FALSE(d.tunneling_decision);
            CHECK(d.probability == 1.0);
        }
    }
    SUBCASE("equal fitness counts as no barrier") {
        const auto d = accept_sample(current, Particle{{3.0}, 5.0}, 1e-12, cfg, rng);
        CHECK(d.took_candidate);
    }
    SUBCASE("huge barrier underflows to rejection") {
        const Particle worse{{1.0}, 5.0 + 1e9};
        const auto d = accept_sample(current, worse, 1e-6, cfg, rng);
        CHECK_FALSE(d.took_candidate);
        CHECK(d.tunneling_decision);
        CHECK(d.probability == 0.0);
        CHECK(d.particle.fitness == 5.0);
    }
    SUBCASE("Monte Carlo frequency matches the closed form") {
        const Particle worse{{1.0}, 9.0};  // delta_f 4, delta_x 1
        const int n = 100000;
        int taken = 0;
        for (int i = 0; i < n; ++i) taken += accept_sample(current, worse, 2.0, cfg, rng).took_candidate;
        const double p = std::exp(-1.0);
        const double sd = std::sqrt(n * p * (1 - p));
        CHECK(std::abs(taken - n * p) <= 3 * sd);
    }
    SUBCASE("A = 0 never accepts a worse candidate") {
        cfg.amplitude_a = 0.0;
        const Particle worse{{0.001}, 5.0 + 1e-12};
        for (int i = 0; i < 1000; ++i) {
            const auto d = accept_sample(current, worse, 1e6, cfg, rng);
            CHECK_FALSE(d.took_candidate);
            CHECK_FALSE(d.tunneling_decision);
        }
    }
}

TEST_CASE("ground state detection") {
    CHECK(ground_state_reached(particles_1d({1, 1, 1}), 1e-300));
    CHECK(population_spread(particles_1d({0, 10})) == doctest::Approx(7.0710678).epsilon(1e-6));
    CHECK_FALSE(ground_state_reached(particles_1d({0, 10}), 1.0));
    CHECK(population_spread(particles_1d({0, 0.1})) == doctest::Approx(0.0707107).epsilon(1e-5));
    CHECK(ground_state_reached(particles_1d({0, 0.1}), 1.0));

    // Per-dimension deviations (0, 7.07): max, mean and rms aggregation.
    std::vector<Particle> two{{{1.0, 0.0}, 0.0}, {{1.0, 10.0}, 0.0}};
    const double s = std::sqrt(50.0);
    CHECK(population_spread(two, SpreadAggregation::max) == doctest::Approx(s));
    CHECK(population_spread(two, SpreadAggregation::mean) == doctest::Approx(s / 2));
    CHECK(population_spread(two, SpreadAggregation::rms) == doctest::Approx(s / std::sqrt(2.0)));

    CHECK_THROWS_AS(population_spread(particles_1d({1})), std::invalid_argument);
    CHECK(parse_spread_aggregation("rms") == SpreadAggregation::rms);
    CHECK_THROWS_AS(parse_spread_aggregation("median"), std::invalid_argument);
}

TEST_CASE("mean_replace_worst") {
    BudgetedObjective sphere(make_objective("F7", 1), 100);

    SUBCASE("two particles") {
        auto ps = particles_1d({0, 2});
        const auto r = mean_replace_worst(ps, sphere);
        REQUIRE(r);
        CHECK(r->index == 1);
        CHECK(r->old_fitness == 4.0);
        CHECK(ps[1].position[0] == 1.0);
        CHECK(ps[1].fitness == 1.0);
        CHECK(sphere.evals_used() == 1);
    }
    SUBCASE("identical particles") {
        auto ps = particles_1d({0.5, 0.5, 0.5});
        const auto r = mean_replace_worst(ps, sphere);
        REQUIRE(r);
        CHECK(r->index == 0);
        CHECK(ps[0].position[0] == 0.5);
        CHECK(ps[0].fitness == 0.25);
    }
    SUBCASE("mean includes the worst particle") {
        auto ps = particles_1d({0, 0, 3});
        mean_replace_worst(ps, sphere);
        CHECK(ps[2].position[0] == 1.0);
        CHECK(ps[2].fitness == 1.0);
    }
    SUBCASE("ties go to the lowest index") {
        auto ps = particles_1d({-2, 0, 2});
        CHECK(mean_replace_worst(ps, sphere)->index == 0);
    }
    SUBCASE("exhausted budget leaves the population alone") {
        BudgetedObjective empty(make_objective("F7", 1), 0);
        auto ps = particles_1d({0, 2});
        CHECK_FALSE(mean_replace_worst(ps, empty));
        CHECK(ps[1].position[0] == 2.0);
        CHECK(ps[1].fitness == 4.0);
    }
}

TEST_CASE("gamma annealing") {
    CHECK(annealed_gamma(10.0, 1, 1.0) == doctest::Approx(3.6787944).epsilon(1e-7));
    CHECK(annealed_gamma(10.0, 0, 1.0) == 10.0);
    CHECK(annealed_gamma(10.0, 100000, 1.0) > 0.0);

    BipState state;
    state.sigma_s = 8.0;
    begin_scale(state);
    BipConfig cfg;
    anneal_gamma(state, cfg);
    anneal_gamma(state, cfg);
    CHECK(state.ac == 2);
    CHECK(state.gamma == doctest::Approx(8.0 * std::exp(-2.0)));

    state.sigma_s = 4.0;
    begin_scale(state);
    CHECK(state.gamma0 == 4.0);
    CHECK(state.gamma == 4.0);
    CHECK(state.ac == 0);

    cfg.gamma_schedule = [](double g0, std::uint64_t ac) { return g0 / static_cast<double>(ac + 1); };
    anneal_gamma(state, cfg);
    CHECK(state.gamma == 2.0);
}

TEST_CASE("config validation") {
    BipConfig ok;
    CHECK_NOTHROW(ok.validate());
    auto bad = [](auto mutate) {
        BipConfig c;
        mutate(c);
        return c;
    };
    CHECK_THROWS_AS(bad([](BipConfig& c) { c.k = 1; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](BipConfig& c) { c.amplitude_a = -1; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](BipConfig& c) { c.anneal_tau = 0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](BipConfig& c) { c.scale_divisor = 1; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](BipConfig& c) { c.min_scale = -1; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](BipConfig& c) { c.success_threshold = 0; }).validate(), std::invalid_argument);

    BudgetedObjective obj(make_objective("F7", 2), 100);
    BipConfig outside;
    outside.init_position = std::vector<double>{9.0, 0.0};
    CHECK_THROWS_AS(BipOptimizer(obj, outside), std::invalid_argument);
    BipConfig wrong_dim;
    wrong_dim.init_position = std::vector<double>{0.0};
    CHECK_THROWS_AS(BipOptimizer(obj, wrong_dim), std::invalid_argument);
}

TEST_CASE("run_bip on the sphere") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        BudgetedObjective obj(make_objective("F7", 10), 50000);
        BipConfig cfg;
        cfg.seed = seed;
        const auto out = run_bip(obj, cfg);
        CHECK(out.final_error < 1e-10);
        CHECK(out.evals_used == 50000);
        CHECK(out.succeeded);
    }
}

TEST_CASE("run_bip with an empty budget") {
    BudgetedObjective obj(make_objective("F7", 3), 0);
    const auto out = run_bip(obj, BipConfig{});
    CHECK_FALSE(out.has_best);
    CHECK(out.evals_used == 0);
    CHECK(std::isinf(out.final_error));
    CHECK_FALSE(out.succeeded);
}

TEST_CASE("run_bip stops early on success when asked") {
    BudgetedObjective obj(make_objective("F7", 5), 100000);
    BipConfig cfg;
    cfg.stop_on_success = true;
    const auto out = run_bip(obj, cfg);
    CHECK(out.final_error <= 1e-8);
    CHECK(out.evals_used < 100000);
}

TEST_CASE("run_bip stops below min_scale") {
    BudgetedObjective obj(make_objective("F7", 2), 100000);
    BipConfig cfg;
    cfg.min_scale = 0.1;
    BipOptimizer opt(obj, cfg);
    opt.run();
    CHECK(opt.state().sigma_s < 0.1);
    CHECK(opt.state().sigma_s * 2 >= 0.1);
    CHECK(obj.evals_used() < 100000);
}

TEST_CASE("step-wise state invariants") {
    BudgetedObjective obj(make_objective("F3", 5), 20000);
    BipConfig cfg;
    cfg.seed = 9;
    BipOptimizer opt(obj, cfg);
    const auto& spec = obj.spec();
    double last_gamma = opt.state().gamma;
    std::uint64_t last_scale = 0;
    double last_best = opt.outcome().final_error;
    while (opt.step()) {
        const auto& st = opt.state();
        CHECK(st.particles.size() == cfg.k);
        CHECK(st.sigma_s == spec.max_span() / std::pow(2.0, static_cast<double>(st.scale_index)));
        CHECK(st.gamma <= st.gamma0);
        if (st.scale_index == last_scale) {
            CHECK((st.gamma < last_gamma || st.gamma == std::numeric_limits<double>::denorm_min()));
        }
        for (const auto& p : st.particles) {
            for (std::size_t d = 0; d < spec.dim; ++d) {
                CHECK(p.position[d] >= spec.lower_bound[d]);
                CHECK(p.position[d] <= spec.upper_bound[d]);
            }
        }
        const double best = opt.outcome().final_error;
        CHECK(best <= last_best);
        last_best = best;
        last_gamma = st.gamma;
        last_scale = st.scale_index;
    }
}

TEST_CASE("run_bip is deterministic per seed") {
    auto once = [](std::uint64_t seed) {
        BudgetedObjective obj(make_objective("F2", 4), 5000);
        BipConfig cfg;
        cfg.seed = seed;
        return run_bip(obj, cfg);
    };
    const auto a = once(5), b = once(5), c = once(6);
    CHECK(a.error_trace == b.error_trace);
    CHECK(a.best.position == b.best.position);
    CHECK(a.error_trace != c.error_trace);
}
