#include "nearcorr/repair.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace nearcorr {

namespace {

constexpr double kRangeSlack = 1e-12;

void require_positive_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw InvalidArgument("epsilon must be a positive finite number, got " + std::to_string(epsilon));
    }
}

double min_value(const std::vector<double>& values) { return *std::min_element(values.begin(), values.end()); }

}  // namespace

CorrelationMatrix CorrelationMatrix::certify(const SymmetricMatrix& m, double tol_psd) {
    const CheckReport report = check_correlation(m, 0.0, tol_psd);
    if (!report.unit_diagonal) {
        throw InvalidArgument("diagonal deviates from 1 by " + std::to_string(report.max_diagonal_deviation));
    }
    if (!report.offdiag_in_range) {
        throw InvalidArgument("off-diagonal entry outside [-1, 1]");
    }
    if (!report.is_psd) {
        throw InvalidArgument("matrix is not positive semidefinite (min eigenvalue " +
                              std::to_string(report.min_eigenvalue) + ")");
    }
    return CorrelationMatrix(m);
}

ClippedSpectrum clip_eigenvalues(const SpectralDecomposition& d, double epsilon) {
    require_positive_epsilon(epsilon);
    ClippedSpectrum out{d, std::vector<double>(d.dim(), 0.0)};
    for (std::size_t i = 0; i < d.dim(); ++i) {
        if (d.values[i] < epsilon) {
            out.decomposition.values[i] = epsilon;
            // Round the shift up so that value + shift >= epsilon holds in floating point too.
            double shift = epsilon - d.values[i];
            while (d.values[i] + shift < epsilon) {
                shift = std::nextafter(shift, INFINITY);
            }
            out.shifts[i] = shift;
        }
    }
    return out;
}

CorrelationMatrix normalize_to_correlation(const SymmetricMatrix& covariance) {
    const std::size_t n = covariance.dim();
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = covariance(i, i);
        if (!(d > 0.0)) {
            throw NonPositiveDiagonal("diagonal entry " + std::to_string(i + 1) + " is " + std::to_string(d) +
                                          "; not a covariance matrix",
                                      i);
        }
        scale[i] = std::sqrt(d);
    }
    DenseMatrix r(n);
    for (std::size_t i = 0; i < n; ++i) {
        r(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = covariance(i, j) / (scale[i] * scale[j]);
            if (std::abs(v) > 1.0 && std::abs(v) <= 1.0 + kRangeSlack) {
                v = std::copysign(1.0, v);
            }
            r(i, j) = v;
            r(j, i) = v;
        }
    }
    return CorrelationMatrix(SymmetricMatrix::symmetrized(r));
}

RepairResult shrink_repair(const SymmetricMatrix& a, double epsilon) {
    require_positive_epsilon(epsilon);
    const SpectralDecomposition spectrum = sym_eigen(a);
    ClippedSpectrum clipped = clip_eigenvalues(spectrum, epsilon);
    const auto clipped_count = static_cast<std::size_t>(
        std::count_if(clipped.shifts.begin(), clipped.shifts.end(), [](double s) { return s > 0.0; }));

    // Nothing clipped: renormalize the input itself so valid inputs are exact fixed points.
    std::optional<CorrelationMatrix> repaired;
    if (clipped_count == 0) {
        repaired.emplace(normalize_to_correlation(a));
    } else {
        const SymmetricMatrix covariance = reconstruct(clipped.decomposition);
        for (std::size_t i = 0; i < covariance.dim(); ++i) {
            if (!(covariance(i, i) > 0.0)) {
                throw Error(ErrorCode::non_positive_diagonal,
                            "clipped matrix has non-positive diagonal entry " + std::to_string(i + 1));
            }
        }
        repaired.emplace(normalize_to_correlation(covariance));
    }

    NormReport distance = diff_norms(a, repaired->matrix());
    return RepairResult{std::move(*repaired),
                        epsilon,
                        std::move(clipped.shifts),
                        clipped_count,
                        spectrum.values,
                        distance,
                        RepairMethod::clip};
}

CheckReport check_correlation(const DenseMatrix& a, double tol_diag, double tol_psd) {
    CheckReport r;
    const std::size_t n = a.dim();
    r.max_asymmetry = max_asymmetry(a);
    r.is_symmetric = r.max_asymmetry <= SymmetricMatrix::kSymmetryTolerance * max_norm(a);

    for (std::size_t i = 0; i < n; ++i) {
        r.max_diagonal_deviation = std::max(r.max_diagonal_deviation, std::abs(a(i, i) - 1.0));
    }
    r.unit_diagonal = r.max_diagonal_deviation <= tol_diag;

    r.offdiag_in_range = true;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && std::abs(a(i, j)) > 1.0 + kRangeSlack) {
                r.offdiag_in_range = false;
            }
        }
    }

    r.min_eigenvalue = min_value(sym_eigen(SymmetricMatrix::symmetrized(a)).values);
    r.is_psd = r.min_eigenvalue >= -tol_psd;
    r.is_correlation = r.is_symmetric && r.unit_diagonal && r.is_psd && r.offdiag_in_range;
    return r;
}

CheckReport check_correlation(const SymmetricMatrix& a, double tol_diag, double tol_psd) {
    return check_correlation(a.dense(), tol_diag, tol_psd);
}

double diagonal_consistency(const SpectralDecomposition& d, std::span<const double> target_diagonal) {
    const std::size_t n = d.dim();
    if (target_diagonal.size() != n) {
        throw DimensionMismatch("target diagonal has " + std::to_string(target_diagonal.size()) +
                                " entries, expected " + std::to_string(n));
    }
    const DenseMatrix weights = hadamard_square(d.vectors);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double diag = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            diag += weights(i, k) * d.values[k];
        }
        residual = std::max(residual, std::abs(diag - target_diagonal[i]));
    }
    return residual;
}

namespace {

DenseMatrix project_psd(const DenseMatrix& m) {
    SpectralDecomposition d = sym_eigen(SymmetricMatrix::symmetrized(m));
    for (double& v : d.values) {
        v = std::max(v, 0.0);
    }
    return reconstruct(d).dense();
}

}  // namespace

RepairResult apd_nearest(const SymmetricMatrix& a, const ApdOptions& options) {
    if (options.max_iter == 0) {
        throw InvalidArgument("max_iter must be positive");
    }
    if (!(options.tol > 0.0)) {
        throw InvalidArgument("tol must be positive");
    }
    const std::size_t n = a.dim();
    DenseMatrix y = a.dense();
    DenseMatrix x = y;
    DenseMatrix correction(n);
    double change = 0.0;

    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        const DenseMatrix r = y - correction;
        DenseMatrix x_next = project_psd(r);
        correction = x_next - r;
        DenseMatrix y_next = x_next;
        for (std::size_t i = 0; i < n; ++i) {
            y_next(i, i) = 1.0;
        }
        change = std::max({frobenius_norm(x_next - x), frobenius_norm(y_next - y), frobenius_norm(y_next - x_next)});
        x = std::move(x_next);
        y = std::move(y_next);

        if (change <= options.tol) {
            // x is PSD and within tol of the unit-diagonal iterate; rescaling
            // it gives exact unit diagonal without leaving the cone.
            CorrelationMatrix repaired = normalize_to_correlation(SymmetricMatrix::symmetrized(x));
            const std::vector<double> input_values = sym_eigen(a).values;
            const std::vector<double> output_values = sym_eigen(repaired.matrix()).values;
            std::vector<double> shifts(n);
            for (std::size_t i = 0; i < n; ++i) {
                shifts[i] = output_values[i] - input_values[i];
            }
            const auto positive = static_cast<std::size_t>(
                std::count_if(shifts.begin(), shifts.end(), [](double s) { return s > 0.0; }));
            NormReport distance = diff_norms(a, repaired.matrix());
            return RepairResult{std::move(repaired), options.tol,     std::move(shifts),
                                positive,            input_values,    distance,
                                RepairMethod::apd,   iter};
        }
    }
    throw ApdConvergenceError("alternating projections did not converge after " + std::to_string(options.max_iter) +
                                  " iterations (last change " + std::to_string(change) + ")",
                              change, SymmetricMatrix::symmetrized(y));
}

}  // namespace nearcorr
