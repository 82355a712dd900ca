#include "nearcorr/bench.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "nearcorr/error.hpp"

namespace nearcorr {

namespace {

constexpr std::size_t kMaxAttempts = 100;

// Modified Gram-Schmidt on a Gaussian matrix, columns orthonormalized twice.
DenseMatrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    DenseMatrix q(n);
    for (double& x : q.data()) {
        x = gauss(rng);
    }
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t prev = 0; prev < k; ++prev) {
                double dot = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    dot += q(r, k) * q(r, prev);
                }
                for (std::size_t r = 0; r < n; ++r) {
                    q(r, k) -= dot * q(r, prev);
                }
            }
            double norm = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                norm += q(r, k) * q(r, k);
            }
            norm = std::sqrt(norm);
            for (std::size_t r = 0; r < n; ++r) {
                q(r, k) /= norm;
            }
        }
    }
    return q;
}

void accumulate(DistanceStats& stats, double value) {
    stats.mean += value;
    stats.max = std::max(stats.max, value);
}

void finish(DistanceStats& stats, std::size_t count) { stats.mean /= static_cast<double>(count); }

}  // namespace

SymmetricMatrix random_correlation(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> spread(1.0);
    SpectralDecomposition d{random_orthogonal(n, rng), std::vector<double>(n)};
    for (double& v : d.values) {
        v = 1e-3 + spread(rng);
    }
    return normalize_to_correlation(reconstruct(d)).matrix();
}

SymmetricMatrix perturb(const SymmetricMatrix& c, double noise, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    DenseMatrix m = c.dense();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        m(i, i) = 1.0;
        for (std::size_t j = i + 1; j < m.dim(); ++j) {
            const double v = m(i, j) + noise * uniform(rng);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return SymmetricMatrix(m);
}

BenchSummary run_bench(const BenchConfig& config) {
    if (config.size < 2) {
        throw InvalidArgument("bench size must be at least 2");
    }
    if (config.trials < 1) {
        throw InvalidArgument("bench needs at least one trial");
    }
    if (!(config.noise >= 0.0) || !std::isfinite(config.noise)) {
        throw InvalidArgument("noise must be a non-negative finite number");
    }

    BenchSummary summary;
    summary.config = config;
    for (std::size_t t = 0; t < config.trials; ++t) {
        std::mt19937_64 rng(config.seed + t);
        BenchTrial trial;
        std::optional<SymmetricMatrix> original;
        std::optional<SymmetricMatrix> perturbed;
        for (trial.attempts = 1; trial.attempts <= kMaxAttempts; ++trial.attempts) {
            original = random_correlation(config.size, rng);
            perturbed = perturb(*original, config.noise, rng);
            trial.input_min_eigenvalue = sym_eigen(*perturbed).values.back();
            if (config.noise == 0.0 || trial.input_min_eigenvalue < 0.0) {
                break;
            }
        }
        if (trial.attempts > kMaxAttempts) {
            throw GenerationError("trial " + std::to_string(t) + ": no indefinite perturbation after " +
                                  std::to_string(kMaxAttempts) + " attempts (noise " + std::to_string(config.noise) +
                                  ")");
        }

        const RepairResult clip = shrink_repair(*perturbed, config.epsilon);
        const RepairResult apd = apd_nearest(*perturbed, config.apd);
        trial.clip_vs_perturbed = clip.distance;
        trial.apd_vs_perturbed = apd.distance;
        trial.clip_vs_original = diff_norms(clip.repaired.matrix(), *original);
        trial.apd_vs_original = diff_norms(apd.repaired.matrix(), *original);
        trial.apd_iterations = apd.iterations;

        accumulate(summary.clip.frobenius_vs_perturbed, trial.clip_vs_perturbed.frobenius);
        accumulate(summary.clip.max_vs_perturbed, trial.clip_vs_perturbed.max);
        accumulate(summary.clip.frobenius_vs_original, trial.clip_vs_original.frobenius);
        accumulate(summary.clip.max_vs_original, trial.clip_vs_original.max);
        accumulate(summary.apd.frobenius_vs_perturbed, trial.apd_vs_perturbed.frobenius);
        accumulate(summary.apd.max_vs_perturbed, trial.apd_vs_perturbed.max);
        accumulate(summary.apd.frobenius_vs_original, trial.apd_vs_original.frobenius);
        accumulate(summary.apd.max_vs_original, trial.apd_vs_original.max);
        if (trial.apd_vs_perturbed.frobenius <= trial.clip_vs_perturbed.frobenius + 1e-6) {
            ++summary.apd_dominates;
        }
        if (trial.clip_vs_perturbed.max <= 3.0 * trial.apd_vs_perturbed.max) {
            ++summary.clip_max_within_3x;
        }
        summary.trials.push_back(trial);
    }

    for (MethodSummary* m : {&summary.clip, &summary.apd}) {
        finish(m->frobenius_vs_perturbed, config.trials);
        finish(m->max_vs_perturbed, config.trials);
        finish(m->frobenius_vs_original, config.trials);
        finish(m->max_vs_original, config.trials);
    }
    const double clip_mean = summary.clip.frobenius_vs_perturbed.mean;
    const double apd_mean = summary.apd.frobenius_vs_perturbed.mean;
    summary.frobenius_ratio = apd_mean > 0.0 ? clip_mean / apd_mean : 1.0;
    return summary;
}

}  // namespace nearcorr
