#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "nearcorr/linalg.hpp"
#include "nearcorr/repair.hpp"

namespace nearcorr {

struct BenchConfig {
    std::size_t size = 10;
    std::size_t trials = 50;
    std::uint64_t seed = 42;
    double noise = 0.1;
    double epsilon = kDefaultEpsilon;
    ApdOptions apd{};
};

/// Distances of one trial. "perturbed" is the indefinite input handed to the
/// repair methods, "original" the correlation matrix it was derived from.
struct BenchTrial {
    std::size_t attempts = 0;
    double input_min_eigenvalue = 0.0;
    NormReport clip_vs_perturbed;
    NormReport apd_vs_perturbed;
    NormReport clip_vs_original;
    NormReport apd_vs_original;
    std::size_t apd_iterations = 0;
};

struct DistanceStats {
    double mean = 0.0;
    double max = 0.0;
};

struct MethodSummary {
    DistanceStats frobenius_vs_perturbed;
    DistanceStats max_vs_perturbed;
    DistanceStats frobenius_vs_original;
    DistanceStats max_vs_original;
};

struct BenchSummary {
    BenchConfig config;
    std::vector<BenchTrial> trials;
    MethodSummary clip;
    MethodSummary apd;
    /// mean clip Frobenius distance / mean apd Frobenius distance (to the
    /// perturbed input); 1 when both are zero.
    double frobenius_ratio = 1.0;
    /// Trials with apd Frobenius <= clip Frobenius + 1e-6.
    std::size_t apd_dominates = 0;
    /// Trials with clip max-norm distance <= 3x apd max-norm distance.
    std::size_t clip_max_within_3x = 0;
};

/// Random correlation matrix: normalized Q diag(l) Q^T with Haar-ish random
/// orthogonal Q and exponentially distributed, strictly positive l.
SymmetricMatrix random_correlation(std::size_t n, std::mt19937_64& rng);

/// Adds symmetric uniform noise in [-noise, noise] off the diagonal and resets
/// the diagonal to 1.
SymmetricMatrix perturb(const SymmetricMatrix& c, double noise, std::mt19937_64& rng);

/// Trial t uses a generator seeded with seed + t, so results are reproducible
/// per trial. With noise > 0 each trial redraws until the perturbation is
/// indefinite (at most 100 attempts, then GenerationError).
BenchSummary run_bench(const BenchConfig& config);

}  // namespace nearcorr
