#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nearcorr/error.hpp"
#include "nearcorr/linalg.hpp"

namespace nearcorr {

inline constexpr double kDefaultEpsilon = 1e-8;

/// A symmetric matrix with exact unit diagonal and off-diagonal entries in
/// [-1, 1]. Instances come out of normalize_to_correlation (whose input must
/// be positive semidefinite) or out of certify(), which checks everything.
class CorrelationMatrix {
public:
    static CorrelationMatrix certify(const SymmetricMatrix& m, double tol_psd = 1e-10);

    [[nodiscard]] const SymmetricMatrix& matrix() const noexcept { return inner_; }
    [[nodiscard]] std::size_t dim() const noexcept { return inner_.dim(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return inner_(i, j); }

private:
    explicit CorrelationMatrix(SymmetricMatrix m) : inner_(std::move(m)) {}
    friend CorrelationMatrix normalize_to_correlation(const SymmetricMatrix& covariance);

    SymmetricMatrix inner_;
};

enum class RepairMethod { clip, apd };

struct RepairResult {
    CorrelationMatrix repaired;
    /// Clipping floor for clip; convergence tolerance for apd.
    double epsilon;
    /// Repaired minus input eigenvalue, index-aligned with input_eigenvalues.
    /// For apd this is the difference of the two sorted spectra.
    std::vector<double> shifts;
    std::size_t clipped_count;
    std::vector<double> input_eigenvalues;
    NormReport distance;
    RepairMethod method;
    std::size_t iterations = 0;
};

struct CheckReport {
    bool is_symmetric = false;
    double max_asymmetry = 0.0;
    bool unit_diagonal = false;
    double max_diagonal_deviation = 0.0;
    double min_eigenvalue = 0.0;
    bool is_psd = false;
    bool is_correlation = false;
    bool offdiag_in_range = false;
};

struct ClippedSpectrum {
    SpectralDecomposition decomposition;
    std::vector<double> shifts;
};

/// Replaces every eigenvalue below epsilon by epsilon; eigenvectors are kept.
ClippedSpectrum clip_eigenvalues(const SpectralDecomposition& d, double epsilon);

/// a_ij / sqrt(a_ii a_jj) with the diagonal written as exactly 1.0. Rounding
/// overshoot of at most 1e-12 past +-1 is clamped.
CorrelationMatrix normalize_to_correlation(const SymmetricMatrix& covariance);

/// Eigendecompose, clip at epsilon, rebuild and renormalize.
RepairResult shrink_repair(const SymmetricMatrix& a, double epsilon = kDefaultEpsilon);

CheckReport check_correlation(const DenseMatrix& a, double tol_diag = 1e-8, double tol_psd = 1e-10);
CheckReport check_correlation(const SymmetricMatrix& a, double tol_diag = 1e-8, double tol_psd = 1e-10);

/// max_i |(B∘B · λ)_i - target_i|: how far the spectrum is from producing the
/// requested diagonal.
double diagonal_consistency(const SpectralDecomposition& d, std::span<const double> target_diagonal);

/// Thrown by apd_nearest when the iteration cap is hit.
class ApdConvergenceError : public ConvergenceError {
public:
    ApdConvergenceError(const std::string& message, double residual, SymmetricMatrix last_iterate)
        : ConvergenceError(message, residual), last_iterate_(std::move(last_iterate)) {}
    [[nodiscard]] const SymmetricMatrix& last_iterate() const noexcept { return last_iterate_; }

private:
    SymmetricMatrix last_iterate_;
};

struct ApdOptions {
    std::size_t max_iter = 1000;
    double tol = 1e-8;
};

/// Frobenius-nearest correlation matrix by Dykstra-corrected alternating
/// projections between the PSD cone and the unit-diagonal matrices.
RepairResult apd_nearest(const SymmetricMatrix& a, const ApdOptions& options = {});

}  // namespace nearcorr
