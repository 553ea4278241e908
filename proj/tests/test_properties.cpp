// Randomized property checks with small hand-rolled generators.
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "qdopt/diagnostics.hpp"

using namespace qdopt;

namespace {

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double log_uniform(double lo_exp, double hi_exp) {
        return std::pow(10.0, std::uniform_real_distribution<double>(lo_exp, hi_exp)(rng));
    }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
    std::uint64_t seed() { return rng(); }
};

std::string random_function(Gen& g) { return "F" + std::to_string(1 + g.index(12)); }

}  // namespace

TEST_CASE("tunneling probability is monotone in each argument") {
    Gen g(1);
    for (int i = 0; i < 10000; ++i) {
        const double df = g.log_uniform(-6, 3), dx = g.log_uniform(-6, 2), gamma = g.log_uniform(-4, 2);
        const double a = g.log_uniform(-1, 0.5);
        const double t = tunneling_probability(df, dx, gamma, a);
        const double k = 1.0 + g.log_uniform(-3, 1);
        CHECK(t >= 0.0);
        CHECK(t <= 1.0);
        CHECK(tunneling_probability(df * k, dx, gamma, a) <= t);
        CHECK(tunneling_probability(df, dx * k, gamma, a) <= t);
        CHECK(tunneling_probability(df, dx, gamma * k, a) >= t);
    }
}

TEST_CASE("best-so-far never increases on logged runs") {
    Gen g(2);
    for (int i = 0; i < 24; ++i) {
        const auto& alg = algorithm_ids()[g.index(algorithm_ids().size())];
        const auto func = random_function(g);
        const std::size_t dim = 2 + g.index(6);
        BudgetedObjective obj(make_objective(func, dim), 500 + g.index(2000));
        const auto run = record_run(alg, obj, AlgorithmSettings{}, g.seed());
        const auto replay = replay_best_errors(run.log);
        CAPTURE(alg);
        CAPTURE(func);
        for (std::size_t j = 1; j < replay.size(); ++j) CHECK(replay[j].best_error <= replay[j - 1].best_error);
        for (std::size_t j = 1; j < run.outcome.error_trace.size(); ++j) {
            CHECK(run.outcome.error_trace[j].best_error <= run.outcome.error_trace[j - 1].best_error);
        }
        CHECK(obj.evals_used() == run.outcome.evals_used);
    }
}

TEST_CASE("scale schedule is exact and the population size constant") {
    Gen g(3);
    for (int i = 0; i < 12; ++i) {
        const auto func = random_function(g);
        const std::size_t dim = 1 + g.index(8);
        BudgetedObjective obj(make_objective(func, dim), 3000);
        BipConfig cfg;
        cfg.seed = g.seed();
        cfg.k = 2 + g.index(20);
        cfg.scale_divisor = 1.5 + static_cast<double>(g.index(3));
        cfg.bounds_policy = static_cast<BoundsPolicy>(g.index(3));
        BipOptimizer opt(obj, cfg);
        const double span = obj.spec().max_span();
        while (opt.step()) {
            const auto& st = opt.state();
            CHECK(st.particles.size() == cfg.k);
            CHECK(st.sigma_s == span / std::pow(cfg.scale_divisor, static_cast<double>(st.scale_index)));
            CHECK(st.gamma <= st.gamma0);
        }
    }
}

TEST_CASE("identical seeds give bitwise identical traces") {
    Gen g(4);
    for (int i = 0; i < 12; ++i) {
        const auto& alg = algorithm_ids()[g.index(algorithm_ids().size())];
        const auto func = random_function(g);
        const std::size_t dim = 2 + g.index(5);
        const auto seed = g.seed();
        const auto a = run_trial(alg, func, dim, 2000, seed, AlgorithmSettings{});
        const auto b = run_trial(alg, func, dim, 2000, seed, AlgorithmSettings{});
        CHECK(a.error_trace == b.error_trace);
        CHECK(a.best.position == b.best.position);
    }
}

TEST_CASE("histograms of random logs integrate to one") {
    Gen g(5);
    for (int i = 0; i < 20; ++i) {
        const auto func = i % 2 ? std::string("double_well") : std::string("paraboloid");
        BudgetedObjective obj(make_objective(func, 1 + g.index(2)), 200 + g.index(800));
        BipConfig cfg;
        cfg.seed = g.seed();
        cfg.k = 2 + g.index(10);
        const auto run = record_bip(obj, cfg);
        const auto h = wave_modulus(run.log, 1 + g.index(60));
        CHECK(std::abs(h.integral() - 1.0) <= 1e-12);
        std::uint64_t sum = 0;
        for (auto c : h.counts) sum += c;
        CHECK(sum == h.total);
    }
}

TEST_CASE("mean replacement on random 1-D populations") {
    Gen g(6);
    for (int i = 0; i < 500; ++i) {
        const std::size_t k = 2 + g.index(8);
        std::vector<Particle> ps;
        double sum = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const double x = std::uniform_real_distribution<double>(-5, 5)(g.rng);
            ps.push_back({{x}, x * x});
            sum += x;
        }
        std::size_t worst = 0;
        for (std::size_t j = 1; j < k; ++j) {
            if (ps[j].fitness > ps[worst].fitness) worst = j;
        }
        BudgetedObjective obj(make_objective("F7", 1), 1);
        const auto r = mean_replace_worst(ps, obj);
        REQUIRE(r);
        CHECK(r->index == worst);
        CHECK(ps[worst].position[0] == doctest::Approx(sum / static_cast<double>(k)).epsilon(1e-12));
        CHECK(ps[worst].fitness == ps[worst].position[0] * ps[worst].position[0]);
        CHECK(ps.size() == k);
    }
}
