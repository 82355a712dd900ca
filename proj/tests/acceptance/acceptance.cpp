// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aex_example.hpp"
#include "cli_runner.hpp"
#include "nearcorr/bench.hpp"
#include "nearcorr/linalg.hpp"
#include "nearcorr/repair.hpp"
#include "oracles.hpp"

using namespace nearcorr;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double max_entry_gap(const DenseMatrix& a, const DenseMatrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
        }
    }
    return worst;
}

double orthogonality_residual(const DenseMatrix& b) { return max_norm(b.transposed() * b - DenseMatrix::identity(b.dim())); }

/// Leading CSV block of the CLI text report, up to the first blank line.
DenseMatrix parse_matrix_block(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line) && !line.empty()) {
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        rows.push_back(row);
    }
    return DenseMatrix::from_rows(rows);
}

/// Symmetric, unit-diagonal, indefinite matrix of size n.
SymmetricMatrix random_indefinite(std::size_t n, std::mt19937_64& rng) {
    for (double noise = 0.2;; noise *= 1.25) {
        for (int attempt = 0; attempt < 20; ++attempt) {
            const SymmetricMatrix a(oracle::noisy_correlation(n, rng, noise));
            if (sym_eigen(a).values.back() < 0.0) {
                return a;
            }
        }
    }
}

Outcome ac1_distorted_reproduction() {
    const auto dir = cli::scratch_dir();
    const auto panel = dir / "panel.csv";
    {
        std::ofstream(panel) << aex::kPanelCsv;
    }
    const auto r = cli::run("corr " + cli::quote(panel.string()) +
                            " --precision 10 --override 'Wolters Kluwer,Euro/US dollar,1:5'");
    std::filesystem::remove_all(dir);
    if (r.status != 2) {
        return {false, fmt::format("corr exited {} ({})", r.status, r.err)};
    }
    const DenseMatrix got = parse_matrix_block(r.out);
    const DenseMatrix want = aex::distorted().dense();
    if (got.dim() != want.dim()) {
        return {false, fmt::format("got a {}x{} matrix", got.dim(), got.dim())};
    }
    const double gap = max_entry_gap(got, want);
    return {gap <= 0.0005 && std::abs(got(3, 4) - -0.767) <= 0.0005,
            fmt::format("max entry gap {:.6f}, (4,5) = {:.6f}", gap, got(3, 4))};
}

Outcome ac2_indefiniteness() {
    const CheckReport report = check_correlation(aex::distorted());
    const bool ok = std::abs(report.min_eigenvalue - aex::kSmallestEigenvalue) <= 0.001 && !report.is_correlation;
    return {ok, fmt::format("min eigenvalue {:.6f}, is_correlation {}", report.min_eigenvalue, report.is_correlation)};
}

Outcome ac3_repair_reproduction() {
    const RepairResult r = shrink_repair(aex::distorted(), 0.001);
    const double gap = max_entry_gap(r.repaired.matrix().dense(), aex::corrected().dense());
    const bool valid = check_correlation(r.repaired.matrix()).is_correlation;
    return {gap <= 0.002 && valid, fmt::format("max entry gap {:.6f}, output valid {}", gap, valid)};
}

Outcome ac4_max_norm_nearness() {
    const RepairResult r = shrink_repair(aex::distorted(), 0.001);
    const double d = diff_norms(aex::distorted(), r.repaired.matrix()).max;
    return {d <= 0.06, fmt::format("max-norm distance {:.6f}", d)};
}

Outcome ac5_validity() {
    std::mt19937_64 rng(5005);
    std::size_t failures = 0;
    double worst_min_eig = INFINITY;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial) % 39;
        const SymmetricMatrix a = random_indefinite(n, rng);
        const RepairResult r = shrink_repair(a);
        const SymmetricMatrix& c = r.repaired.matrix();
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i) {
            ok = ok && c(i, i) == 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                ok = ok && c(i, j) == c(j, i) && c(i, j) >= -1.0 && c(i, j) <= 1.0;
            }
        }
        const double min_eig = sym_eigen(c).values.back();
        worst_min_eig = std::min(worst_min_eig, min_eig);
        ok = ok && min_eig > 0.0 && oracle::cholesky_succeeds(c.dense());
        failures += ok ? 0 : 1;
    }
    return {failures == 0, fmt::format("{} of 500 invalid, smallest output eigenvalue {:.3g}", failures, worst_min_eig)};
}

Outcome ac6_fixed_points_and_idempotence() {
    std::mt19937_64 rng(6006);
    double fixed_gap = 0.0;
    double idem_gap = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial) % 30;
        const SymmetricMatrix c(oracle::random_correlation(n, rng));
        fixed_gap = std::max(fixed_gap, max_entry_gap(shrink_repair(c).repaired.matrix().dense(), c.dense()));

        const SymmetricMatrix a = n >= 2 ? random_indefinite(n, rng) : c;
        const SymmetricMatrix once = shrink_repair(a).repaired.matrix();
        const SymmetricMatrix twice = shrink_repair(once).repaired.matrix();
        idem_gap = std::max(idem_gap, max_entry_gap(once.dense(), twice.dense()));
    }
    return {fixed_gap <= 1e-10 && idem_gap <= 1e-9,
            fmt::format("fixed-point gap {:.3g}, idempotence gap {:.3g}", fixed_gap, idem_gap)};
}

Outcome ac7_eigensolver() {
    std::mt19937_64 rng(7007);
    std::size_t failures = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial) % 50;
        const double scale = std::pow(10.0, static_cast<double>(trial % 5) - 2.0);
        const SymmetricMatrix a(oracle::random_symmetric(n, rng, scale));
        const SpectralDecomposition d = sym_eigen(a);
        const double nd = static_cast<double>(n);
        double sum = 0.0;
        for (double v : d.values) {
            sum += v;
        }
        const bool ok =
            frobenius_norm(reconstruct(d).dense() - a.dense()) <= 1e-12 * nd * frobenius_norm(a.dense()) &&
            orthogonality_residual(d.vectors) <= 1e-12 * nd &&
            std::abs(sum - a.trace()) <= 1e-10 * nd * max_norm(a.dense());
        failures += ok ? 0 : 1;
    }
    return {failures == 0, fmt::format("{} of 500 failed", failures)};
}

Outcome ac8_diagonal_structure() {
    std::mt19937_64 rng(8008);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial) % 30;
        const SymmetricMatrix c(oracle::random_correlation(n, rng, 0.01));
        const std::vector<double> ones(n, 1.0);
        worst = std::max(worst, diagonal_consistency(sym_eigen(c), ones));
    }
    return {worst <= 1e-10, fmt::format("worst residual {:.3g}", worst)};
}

Outcome ac9_submultiplicativity() {
    std::mt19937_64 rng(9009);
    std::size_t failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial) % 20;
        const double nd = static_cast<double>(n);
        const DenseMatrix a = oracle::random_general(n, rng, 1.0 + trial % 4);
        const DenseMatrix b = oracle::random_general(n, rng, 1.0 / (1.0 + trial % 3));
        failures += nd * max_norm(a * b) <= (nd * max_norm(a)) * (nd * max_norm(b)) + 1e-12 ? 0 : 1;
    }
    return {failures == 0, fmt::format("{} of 1000 violated", failures)};
}

Outcome ac10_baseline_dominance() {
    BenchConfig config;
    config.size = 10;
    config.trials = 100;
    config.noise = 0.1;
    const BenchSummary s = run_bench(config);
    std::size_t dominated = 0;
    std::size_t within = 0;
    for (const BenchTrial& t : s.trials) {
        dominated += t.apd_vs_perturbed.frobenius <= t.clip_vs_perturbed.frobenius + 1e-6 ? 1 : 0;
        within += t.clip_vs_perturbed.max <= 3.0 * t.apd_vs_perturbed.max ? 1 : 0;
    }
    return {s.trials.size() == 100 && dominated == 100 && within >= 90,
            fmt::format("apd <= clip in {}/100, clip max <= 3x apd max in {}/100", dominated, within)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"AC-1 distorted matrix reproduced from the panel", ac1_distorted_reproduction},
        {"AC-2 indefiniteness detected", ac2_indefiniteness},
        {"AC-3 corrected matrix reproduced", ac3_repair_reproduction},
        {"AC-4 repair is near in max norm", ac4_max_norm_nearness},
        {"AC-5 repair output is always valid", ac5_validity},
        {"AC-6 fixed points and idempotence", ac6_fixed_points_and_idempotence},
        {"AC-7 eigensolver contract", ac7_eigensolver},
        {"AC-8 unit diagonal from spectral data", ac8_diagonal_structure},
        {"AC-9 scaled max norm is submultiplicative", ac9_submultiplicativity},
        {"AC-10 alternating projections dominate in Frobenius norm", ac10_baseline_dominance},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o{false, ""};
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        fmt::print("{} {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
