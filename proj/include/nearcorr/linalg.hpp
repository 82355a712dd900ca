#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nearcorr {

/// Dense row-major square matrix. No structural invariants beyond being square.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(data_).subspan(i * n_, n_);
    }

    [[nodiscard]] DenseMatrix transposed() const;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);

/// Real symmetric matrix with finite entries. Construction accepts an
/// asymmetry up to `kSymmetryTolerance * max|a_ij|` and stores (A + A^T) / 2,
/// so entry (i, j) and (j, i) are always bitwise equal.
class SymmetricMatrix {
public:
    static constexpr double kSymmetryTolerance = 1e-9;

    explicit SymmetricMatrix(const DenseMatrix& m);
    SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SymmetricMatrix identity(std::size_t n);
    static SymmetricMatrix zero(std::size_t n);
    static SymmetricMatrix diagonal(std::span<const double> d);
    /// Symmetrizes unconditionally; for internally produced products whose
    /// asymmetry is pure rounding.
    static SymmetricMatrix symmetrized(const DenseMatrix& m);

    [[nodiscard]] std::size_t dim() const noexcept { return m_.dim(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    [[nodiscard]] const DenseMatrix& dense() const noexcept { return m_; }
    [[nodiscard]] double trace() const noexcept;

    friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

private:
    struct Unchecked {};
    SymmetricMatrix(DenseMatrix m, Unchecked) : m_(std::move(m)) {}

    DenseMatrix m_;
};

/// Largest |a_ij - a_ji|.
double max_asymmetry(const DenseMatrix& m);

/// Eigenvectors are the columns of `vectors`; `values` is sorted descending.
/// In every eigenvector the first component with |x| > 1e-12 is positive.
struct SpectralDecomposition {
    DenseMatrix vectors;
    std::vector<double> values;

    [[nodiscard]] std::size_t dim() const noexcept { return values.size(); }
};

struct NormReport {
    double frobenius = 0.0;
    double max = 0.0;
    double scaled_max = 0.0;  // dim * max
};

struct JacobiOptions {
    double relative_tolerance = 1e-14;
    int max_sweeps = 100;
};

/// Cyclic Jacobi eigendecomposition. Iterates until the off-diagonal
/// Frobenius norm drops to `relative_tolerance * ||A||_F`; throws
/// ConvergenceError carrying that norm once `max_sweeps` is exhausted.
SpectralDecomposition sym_eigen(const SymmetricMatrix& a, const JacobiOptions& options = {});

/// vectors * diag(values) * vectors^T, symmetrized.
SymmetricMatrix reconstruct(const SpectralDecomposition& d);

double frobenius_norm(const DenseMatrix& m);
double max_norm(const DenseMatrix& m);
NormReport norms_of(const DenseMatrix& m);
NormReport norms_of(const SymmetricMatrix& a);
NormReport diff_norms(const SymmetricMatrix& a, const SymmetricMatrix& b);

DenseMatrix hadamard_square(const DenseMatrix& m);

}  // namespace nearcorr
