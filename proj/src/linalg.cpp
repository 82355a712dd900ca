#include "nearcorr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nearcorr/error.hpp"

namespace nearcorr {

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
    data_.reserve(n_ * n_);
    for (const auto& row : rows) {
        if (row.size() != n_) {
            throw DimensionMismatch("matrix rows must all have length " + std::to_string(n_));
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    DenseMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) {
            throw DimensionMismatch("row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                                    " entries, expected " + std::to_string(rows.size()));
        }
        std::copy(rows[i].begin(), rows[i].end(), m.data().begin() + static_cast<std::ptrdiff_t>(i * rows.size()));
    }
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("cannot multiply " + std::to_string(a.dim()) + "x" + std::to_string(a.dim()) +
                                " by " + std::to_string(b.dim()) + "x" + std::to_string(b.dim()));
    }
    const std::size_t n = a.dim();
    DenseMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("cannot subtract matrices of dimension " + std::to_string(a.dim()) + " and " +
                                std::to_string(b.dim()));
    }
    DenseMatrix c(a.dim());
    std::transform(a.data().begin(), a.data().end(), b.data().begin(), c.data().begin(), std::minus<>());
    return c;
}

double max_asymmetry(const DenseMatrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = i + 1; j < m.dim(); ++j) {
            worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
        }
    }
    return worst;
}

SymmetricMatrix::SymmetricMatrix(const DenseMatrix& m) {
    if (m.dim() == 0) {
        throw InvalidArgument("symmetric matrix must have dimension >= 1");
    }
    for (std::size_t k = 0; k < m.data().size(); ++k) {
        if (!std::isfinite(m.data()[k])) {
            throw InvalidArgument("non-finite entry at (" + std::to_string(k / m.dim() + 1) + ", " +
                                  std::to_string(k % m.dim() + 1) + ")");
        }
    }
    const double asym = max_asymmetry(m);
    const double allowed = kSymmetryTolerance * max_norm(m);
    if (asym > allowed) {
        throw AsymmetryError("matrix asymmetry " + std::to_string(asym) + " exceeds tolerance " +
                                 std::to_string(allowed),
                             asym);
    }
    *this = symmetrized(m);
}

SymmetricMatrix::SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymmetricMatrix(DenseMatrix(rows)) {}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n) { return SymmetricMatrix(DenseMatrix::identity(n)); }

SymmetricMatrix SymmetricMatrix::zero(std::size_t n) { return SymmetricMatrix(DenseMatrix(n)); }

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> d) {
    DenseMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        m(i, i) = d[i];
    }
    return SymmetricMatrix(m);
}

SymmetricMatrix SymmetricMatrix::symmetrized(const DenseMatrix& m) {
    DenseMatrix s = m;
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = i + 1; j < m.dim(); ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return SymmetricMatrix(std::move(s), Unchecked{});
}

double SymmetricMatrix::trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        t += m_(i, i);
    }
    return t;
}

namespace {

double off_diagonal_norm(const DenseMatrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            if (i != j) {
                sum += a(i, j) * a(i, j);
            }
        }
    }
    return std::sqrt(sum);
}

// Zeroes a(p, q) with a plane rotation and accumulates it into v.
void jacobi_rotate(DenseMatrix& a, DenseMatrix& v, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    double t;
    if (std::abs(theta) > 1e150) {
        t = 0.5 / theta;
    } else {
        t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
    }
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const std::size_t n = a.dim();

    a(p, p) -= t * apq;
    a(q, q) += t * apq;
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        if (r == p || r == q) {
            continue;
        }
        const double arp = a(r, p);
        const double arq = a(r, q);
        const double new_rp = c * arp - s * arq;
        const double new_rq = s * arp + c * arq;
        a(r, p) = new_rp;
        a(p, r) = new_rp;
        a(r, q) = new_rq;
        a(q, r) = new_rq;
    }
    for (std::size_t r = 0; r < n; ++r) {
        const double vrp = v(r, p);
        const double vrq = v(r, q);
        v(r, p) = c * vrp - s * vrq;
        v(r, q) = s * vrp + c * vrq;
    }
}

constexpr double kSignThreshold = 1e-12;

void fix_sign(std::vector<double>& column) {
    for (double x : column) {
        if (std::abs(x) > kSignThreshold) {
            if (x < 0.0) {
                for (double& y : column) {
                    y = -y;
                }
            }
            return;
        }
    }
}

}  // namespace

SpectralDecomposition sym_eigen(const SymmetricMatrix& input, const JacobiOptions& options) {
    const std::size_t n = input.dim();
    DenseMatrix a = input.dense();
    DenseMatrix v = DenseMatrix::identity(n);

    const double threshold = options.relative_tolerance * frobenius_norm(a);
    double off = off_diagonal_norm(a);
    int sweeps = 0;
    while (off > threshold) {
        if (sweeps == options.max_sweeps) {
            throw ConvergenceError("Jacobi eigensolver did not converge after " + std::to_string(sweeps) +
                                       " sweeps (off-diagonal norm " + std::to_string(off) + ")",
                                   off);
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) != 0.0) {
                    jacobi_rotate(a, v, p, q);
                }
            }
        }
        ++sweeps;
        off = off_diagonal_norm(a);
    }

    struct Pair {
        double value;
        std::vector<double> vector;
    };
    std::vector<Pair> pairs(n);
    for (std::size_t k = 0; k < n; ++k) {
        pairs[k].value = a(k, k);
        pairs[k].vector.resize(n);
        for (std::size_t r = 0; r < n; ++r) {
            pairs[k].vector[r] = v(r, k);
        }
        fix_sign(pairs[k].vector);
    }
    // Equal eigenvalues are ordered by their sign-fixed vectors, lexicographically
    // descending, so an identity input keeps the standard basis.
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        if (x.value != y.value) {
            return x.value > y.value;
        }
        return x.vector > y.vector;
    });

    SpectralDecomposition d{DenseMatrix(n), std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) {
        d.values[k] = pairs[k].value;
        for (std::size_t r = 0; r < n; ++r) {
            d.vectors(r, k) = pairs[k].vector[r];
        }
    }
    return d;
}

SymmetricMatrix reconstruct(const SpectralDecomposition& d) {
    const std::size_t n = d.dim();
    if (d.vectors.dim() != n) {
        throw DimensionMismatch("eigenvector matrix is " + std::to_string(d.vectors.dim()) + "x" +
                                std::to_string(d.vectors.dim()) + " but there are " + std::to_string(n) +
                                " eigenvalues");
    }
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                sum += d.vectors(i, k) * d.values[k] * d.vectors(j, k);
            }
            m(i, j) = sum;
            m(j, i) = sum;
        }
    }
    return SymmetricMatrix::symmetrized(m);
}

double frobenius_norm(const DenseMatrix& m) {
    double sum = 0.0;
    for (double x : m.data()) {
        sum += x * x;
    }
    return std::sqrt(sum);
}

double max_norm(const DenseMatrix& m) {
    double worst = 0.0;
    for (double x : m.data()) {
        worst = std::max(worst, std::abs(x));
    }
    return worst;
}

NormReport norms_of(const DenseMatrix& m) {
    NormReport r;
    r.frobenius = frobenius_norm(m);
    r.max = max_norm(m);
    r.scaled_max = static_cast<double>(m.dim()) * r.max;
    return r;
}

NormReport norms_of(const SymmetricMatrix& a) { return norms_of(a.dense()); }

NormReport diff_norms(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("cannot compare a " + std::to_string(a.dim()) + "x" + std::to_string(a.dim()) +
                                " matrix with a " + std::to_string(b.dim()) + "x" + std::to_string(b.dim()) +
                                " matrix");
    }
    return norms_of(a.dense() - b.dense());
}

DenseMatrix hadamard_square(const DenseMatrix& m) {
    DenseMatrix h = m;
    for (double& x : h.data()) {
        x *= x;
    }
    return h;
}

}  // namespace nearcorr
