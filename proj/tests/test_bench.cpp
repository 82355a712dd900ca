#include <doctest.h>

#include <cmath>

#include "nearcorr/bench.hpp"
#include "nearcorr/error.hpp"

using namespace nearcorr;

TEST_CASE("random_correlation produces valid correlation matrices") {
    std::mt19937_64 rng(5);
    for (std::size_t n = 1; n <= 30; ++n) {
        const SymmetricMatrix c = random_correlation(n, rng);
        const CheckReport r = check_correlation(c);
        CHECK(r.is_correlation);
        CHECK(r.min_eigenvalue > 0.0);
    }
}

TEST_CASE("perturb keeps unit diagonal and symmetry") {
    std::mt19937_64 rng(6);
    const SymmetricMatrix c = random_correlation(8, rng);
    const SymmetricMatrix p = perturb(c, 0.2, rng);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(p(i, i) == 1.0);
        for (std::size_t j = 0; j < 8; ++j) {
            CHECK(std::abs(p(i, j) - c(i, j)) <= 0.2);
        }
    }
    CHECK(perturb(c, 0.0, rng) == c);
}

TEST_CASE("bench with zero noise returns the inputs") {
    BenchConfig config;
    config.size = 6;
    config.trials = 5;
    config.noise = 0.0;
    const BenchSummary s = run_bench(config);
    CHECK(s.clip.frobenius_vs_perturbed.max <= 1e-10);
    CHECK(s.apd.frobenius_vs_perturbed.max <= 1e-8);
    CHECK(s.clip.frobenius_vs_original.max <= 1e-10);
    CHECK(s.apd.max_vs_original.max <= 1e-8);
    for (const BenchTrial& t : s.trials) {
        CHECK(t.attempts == 1);
    }
}

TEST_CASE("bench inputs are indefinite and apd dominates") {
    BenchConfig config;
    config.size = 8;
    config.trials = 20;
    config.seed = 3;
    const BenchSummary s = run_bench(config);
    REQUIRE(s.trials.size() == 20);
    for (const BenchTrial& t : s.trials) {
        CHECK(t.input_min_eigenvalue < 0.0);
        CHECK(t.apd_vs_perturbed.frobenius <= t.clip_vs_perturbed.frobenius + 1e-6);
    }
    CHECK(s.apd_dominates == 20);
    CHECK(s.apd.frobenius_vs_perturbed.mean <= s.clip.frobenius_vs_perturbed.mean + 1e-6);
    CHECK(s.frobenius_ratio >= 1.0 - 1e-6);
}

TEST_CASE("bench is deterministic per seed") {
    BenchConfig config;
    config.size = 10;
    config.trials = 50;
    config.seed = 42;
    const BenchSummary a = run_bench(config);
    const BenchSummary b = run_bench(config);
    CHECK(a.clip.frobenius_vs_perturbed.mean == b.clip.frobenius_vs_perturbed.mean);
    CHECK(a.apd.max_vs_original.max == b.apd.max_vs_original.max);
    CHECK(a.frobenius_ratio == b.frobenius_ratio);

    config.seed = 43;
    const BenchSummary c = run_bench(config);
    CHECK(c.clip.frobenius_vs_perturbed.mean != a.clip.frobenius_vs_perturbed.mean);
    // Trial t of seed 42 is trial t - 1 of seed 43.
    CHECK(c.trials[0].clip_vs_perturbed.frobenius == a.trials[1].clip_vs_perturbed.frobenius);
}

TEST_CASE("bench argument checks") {
    BenchConfig config;
    config.size = 1;
    CHECK_THROWS_AS(run_bench(config), InvalidArgument);
    config.size = 4;
    config.trials = 0;
    CHECK_THROWS_AS(run_bench(config), InvalidArgument);
    config.trials = 1;
    config.noise = -1.0;
    CHECK_THROWS_AS(run_bench(config), InvalidArgument);
}

TEST_CASE("bench gives up when no indefinite perturbation exists") {
    BenchConfig config;
    config.size = 2;
    config.trials = 1;
    config.noise = 1e-12;
    CHECK_THROWS_AS(run_bench(config), GenerationError);
}
