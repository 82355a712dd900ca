#include "nearcorr/nearcorr.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "nearcorr/bench.hpp"
#include "nearcorr/error.hpp"
#include "nearcorr/ingest.hpp"
#include "nearcorr/linalg.hpp"
#include "nearcorr/repair.hpp"

struct nc_matrix {
    nearcorr::SymmetricMatrix matrix;
    std::vector<std::string> labels;
};

struct nc_panel {
    nearcorr::TimeSeriesPanel panel;
};

struct nc_repair {
    nearcorr::RepairResult result;
    std::vector<std::string> labels;
};

namespace {

thread_local std::string last_error;
thread_local double last_residual = 0.0;

nc_status to_status(nearcorr::ErrorCode code) {
    using nearcorr::ErrorCode;
    switch (code) {
        case ErrorCode::invalid_argument: return NC_ERR_INVALID_ARGUMENT;
        case ErrorCode::dimension_mismatch: return NC_ERR_DIMENSION;
        case ErrorCode::parse: return NC_ERR_PARSE;
        case ErrorCode::asymmetric: return NC_ERR_ASYMMETRIC;
        case ErrorCode::convergence: return NC_ERR_CONVERGENCE;
        case ErrorCode::degenerate_series: return NC_ERR_DEGENERATE;
        case ErrorCode::missing_data: return NC_ERR_MISSING_DATA;
        case ErrorCode::insufficient_observations: return NC_ERR_INSUFFICIENT_OBSERVATIONS;
        case ErrorCode::non_positive_diagonal: return NC_ERR_NON_POSITIVE_DIAGONAL;
        case ErrorCode::generation: return NC_ERR_GENERATION;
    }
    return NC_ERR_INTERNAL;
}

nc_status fail(nc_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

template <typename Fn>
nc_status guarded(Fn&& fn) {
    try {
        last_error.clear();
        fn();
        return NC_OK;
    } catch (const nearcorr::ParseError& e) {
        std::string where;
        if (e.row() > 0) {
            where = " (line " + std::to_string(e.row());
            where += e.column() > 0 ? ", column " + std::to_string(e.column()) + ")" : ")";
        }
        return fail(NC_ERR_PARSE, e.what() + where);
    } catch (const nearcorr::ConvergenceError& e) {
        last_residual = e.residual();
        return fail(NC_ERR_CONVERGENCE, e.what());
    } catch (const nearcorr::Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(NC_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(NC_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(NC_ERR_INTERNAL, "unknown error");
    }
}

nc_status null_argument(const char* name) { return fail(NC_ERR_INVALID_ARGUMENT, std::string(name) + " is NULL"); }

nc_status copy_out(const std::vector<double>& values, double* out, std::size_t capacity) {
    if (out == nullptr) {
        return null_argument("output buffer");
    }
    if (capacity < values.size()) {
        return fail(NC_ERR_DIMENSION, "output buffer holds " + std::to_string(capacity) + " values, need " +
                                          std::to_string(values.size()));
    }
    std::copy(values.begin(), values.end(), out);
    return NC_OK;
}

nc_norm_report to_c(const nearcorr::NormReport& r) { return {r.frobenius, r.max, r.scaled_max}; }

nc_distance_stats to_c(const nearcorr::DistanceStats& s) { return {s.mean, s.max}; }

nc_method_summary to_c(const nearcorr::MethodSummary& m) {
    return {to_c(m.frobenius_vs_perturbed), to_c(m.max_vs_perturbed), to_c(m.frobenius_vs_original),
            to_c(m.max_vs_original)};
}

char* duplicate(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* nc_last_error(void) { return last_error.c_str(); }

double nc_last_residual(void) { return last_residual; }

const char* nc_status_name(nc_status status) {
    switch (status) {
        case NC_OK: return "ok";
        case NC_ERR_INVALID_ARGUMENT: return "invalid argument";
        case NC_ERR_DIMENSION: return "dimension mismatch";
        case NC_ERR_PARSE: return "parse error";
        case NC_ERR_ASYMMETRIC: return "asymmetric matrix";
        case NC_ERR_CONVERGENCE: return "no convergence";
        case NC_ERR_DEGENERATE: return "degenerate series";
        case NC_ERR_MISSING_DATA: return "missing data";
        case NC_ERR_INSUFFICIENT_OBSERVATIONS: return "insufficient observations";
        case NC_ERR_NON_POSITIVE_DIAGONAL: return "non-positive diagonal";
        case NC_ERR_GENERATION: return "generation failure";
        case NC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void nc_string_free(char* text) { delete[] text; }

nc_status nc_matrix_from_array(size_t n, const double* row_major, nc_matrix** out) {
    if (row_major == nullptr) return null_argument("row_major");
    if (out == nullptr) return null_argument("out");
    return guarded([&] {
        nearcorr::DenseMatrix m(n);
        std::copy(row_major, row_major + n * n, m.data().begin());
        *out = new nc_matrix{nearcorr::SymmetricMatrix(m), {}};
    });
}

nc_status nc_matrix_read_csv(const char* text, nc_matrix** out) {
    if (text == nullptr) return null_argument("text");
    if (out == nullptr) return null_argument("out");
    return guarded([&] {
        nearcorr::LabeledMatrix lm = nearcorr::read_labeled_matrix(text);
        *out = new nc_matrix{std::move(lm.matrix), std::move(lm.labels)};
    });
}

nc_status nc_matrix_write_csv(const nc_matrix* m, int precision, int with_header, char** out_text) {
    if (m == nullptr) return null_argument("matrix");
    if (out_text == nullptr) return null_argument("out_text");
    return guarded([&] {
        std::vector<std::string> labels;
        if (with_header) {
            labels = m->labels;
            if (labels.empty()) {
                for (std::size_t i = 0; i < m->matrix.dim(); ++i) {
                    labels.push_back("V" + std::to_string(i + 1));
                }
            }
        }
        *out_text = duplicate(nearcorr::write_matrix(m->matrix, precision, labels));
    });
}

size_t nc_matrix_dim(const nc_matrix* m) { return m ? m->matrix.dim() : 0; }

nc_status nc_matrix_copy_to(const nc_matrix* m, double* row_major, size_t capacity) {
    if (m == nullptr) return null_argument("matrix");
    const auto data = m->matrix.dense().data();
    return copy_out(std::vector<double>(data.begin(), data.end()), row_major, capacity);
}

size_t nc_matrix_label_count(const nc_matrix* m) { return m ? m->labels.size() : 0; }

const char* nc_matrix_label(const nc_matrix* m, size_t index) {
    if (m == nullptr || index >= m->labels.size()) return nullptr;
    return m->labels[index].c_str();
}

void nc_matrix_free(nc_matrix* m) { delete m; }

nc_status nc_norms(const nc_matrix* m, nc_norm_report* out) {
    if (m == nullptr) return null_argument("matrix");
    if (out == nullptr) return null_argument("out");
    return guarded([&] { *out = to_c(nearcorr::norms_of(m->matrix)); });
}

nc_status nc_diff_norms(const nc_matrix* a, const nc_matrix* b, nc_norm_report* out) {
    if (a == nullptr || b == nullptr) return null_argument("matrix");
    if (out == nullptr) return null_argument("out");
    return guarded([&] { *out = to_c(nearcorr::diff_norms(a->matrix, b->matrix)); });
}

nc_status nc_eigenvalues(const nc_matrix* m, double* values, size_t capacity) {
    if (m == nullptr) return null_argument("matrix");
    nc_status status = NC_OK;
    const nc_status guard = guarded([&] { status = copy_out(nearcorr::sym_eigen(m->matrix).values, values, capacity); });
    return guard != NC_OK ? guard : status;
}

nc_status nc_check_correlation(const nc_matrix* m, double tol_diag, double tol_psd, nc_check_report* out) {
    if (m == nullptr) return null_argument("matrix");
    if (out == nullptr) return null_argument("out");
    return guarded([&] {
        const nearcorr::CheckReport r = nearcorr::check_correlation(m->matrix, tol_diag, tol_psd);
        *out = {r.is_symmetric,  r.max_asymmetry, r.unit_diagonal,  r.max_diagonal_deviation,
                r.min_eigenvalue, r.is_psd,        r.is_correlation, r.offdiag_in_range};
    });
}

nc_status nc_shrink_repair(const nc_matrix* m, double epsilon, nc_repair** out) {
    if (m == nullptr) return null_argument("matrix");
    if (out == nullptr) return null_argument("out");
    return guarded([&] { *out = new nc_repair{nearcorr::shrink_repair(m->matrix, epsilon), m->labels}; });
}

nc_status nc_apd_nearest(const nc_matrix* m, size_t max_iter, double tol, nc_repair** out) {
    if (m == nullptr) return null_argument("matrix");
    if (out == nullptr) return null_argument("out");
    return guarded([&] {
        *out = new nc_repair{nearcorr::apd_nearest(m->matrix, nearcorr::ApdOptions{max_iter, tol}), m->labels};
    });
}

nc_status nc_diagonal_consistency(const nc_matrix* m, double epsilon, const double* target, size_t n,
                                  double* residual) {
    if (m == nullptr) return null_argument("matrix");
    if (target == nullptr) return null_argument("target");
    if (residual == nullptr) return null_argument("residual");
    return guarded([&] {
        nearcorr::SpectralDecomposition d = nearcorr::sym_eigen(m->matrix);
        if (epsilon > 0.0) {
            d = nearcorr::clip_eigenvalues(d, epsilon).decomposition;
        }
        *residual = nearcorr::diagonal_consistency(d, std::span<const double>(target, n));
    });
}

nc_status nc_repair_matrix(const nc_repair* r, nc_matrix** out) {
    if (r == nullptr) return null_argument("repair");
    if (out == nullptr) return null_argument("out");
    return guarded([&] { *out = new nc_matrix{r->result.repaired.matrix(), r->labels}; });
}

nc_method nc_repair_method(const nc_repair* r) {
    return r && r->result.method == nearcorr::RepairMethod::apd ? NC_METHOD_APD : NC_METHOD_CLIP;
}

double nc_repair_epsilon(const nc_repair* r) { return r ? r->result.epsilon : 0.0; }

size_t nc_repair_dim(const nc_repair* r) { return r ? r->result.repaired.dim() : 0; }

size_t nc_repair_clipped_count(const nc_repair* r) { return r ? r->result.clipped_count : 0; }

size_t nc_repair_iterations(const nc_repair* r) { return r ? r->result.iterations : 0; }

nc_status nc_repair_shifts(const nc_repair* r, double* shifts, size_t capacity) {
    if (r == nullptr) return null_argument("repair");
    return copy_out(r->result.shifts, shifts, capacity);
}

nc_status nc_repair_input_eigenvalues(const nc_repair* r, double* values, size_t capacity) {
    if (r == nullptr) return null_argument("repair");
    return copy_out(r->result.input_eigenvalues, values, capacity);
}

nc_norm_report nc_repair_distance(const nc_repair* r) { return r ? to_c(r->result.distance) : nc_norm_report{}; }

void nc_repair_free(nc_repair* r) { delete r; }

nc_status nc_panel_parse_csv(const char* text, nc_panel** out) {
    if (text == nullptr) return null_argument("text");
    if (out == nullptr) return null_argument("out");
    return guarded([&] { *out = new nc_panel{nearcorr::parse_panel(text)}; });
}

size_t nc_panel_instrument_count(const nc_panel* p) { return p ? p->panel.instrument_count() : 0; }

size_t nc_panel_date_count(const nc_panel* p) { return p ? p->panel.date_count() : 0; }

const char* nc_panel_instrument(const nc_panel* p, size_t index) {
    if (p == nullptr || index >= p->panel.instrument_count()) return nullptr;
    return p->panel.instruments()[index].c_str();
}

nc_status nc_sample_correlation(const nc_panel* p, nc_missing_policy policy, const nc_pair_override* overrides,
                                size_t override_count, nc_matrix** out) {
    if (p == nullptr) return null_argument("panel");
    if (out == nullptr) return null_argument("out");
    if (override_count > 0 && overrides == nullptr) return null_argument("overrides");
    return guarded([&] {
        nearcorr::MissingPolicy cpp_policy;
        switch (policy) {
            case NC_POLICY_FAIL: cpp_policy = nearcorr::MissingPolicy::fail; break;
            case NC_POLICY_DROP_INCOMPLETE: cpp_policy = nearcorr::MissingPolicy::drop_incomplete_dates; break;
            case NC_POLICY_PAIRWISE: cpp_policy = nearcorr::MissingPolicy::pairwise_complete; break;
            default: throw nearcorr::InvalidArgument("unknown missing-data policy");
        }
        std::vector<nearcorr::PairOverride> cpp_overrides;
        for (size_t k = 0; k < override_count; ++k) {
            const nc_pair_override& o = overrides[k];
            if (o.instrument_a == nullptr || o.instrument_b == nullptr) {
                throw nearcorr::InvalidArgument("override " + std::to_string(k) + " has a NULL instrument");
            }
            cpp_overrides.push_back({o.instrument_a, o.instrument_b, o.first, o.last});
        }
        *out = new nc_matrix{nearcorr::sample_correlation(p->panel, cpp_policy, cpp_overrides),
                             p->panel.instruments()};
    });
}

void nc_panel_free(nc_panel* p) { delete p; }

nc_bench_config nc_bench_default_config(void) {
    const nearcorr::BenchConfig c;
    return {c.size, c.trials, c.seed, c.noise, c.epsilon, c.apd.max_iter, c.apd.tol};
}

nc_status nc_bench_run(const nc_bench_config* config, nc_bench_summary* out) {
    if (config == nullptr) return null_argument("config");
    if (out == nullptr) return null_argument("out");
    return guarded([&] {
        nearcorr::BenchConfig c;
        c.size = config->size;
        c.trials = config->trials;
        c.seed = config->seed;
        c.noise = config->noise;
        c.epsilon = config->epsilon;
        c.apd = nearcorr::ApdOptions{config->apd_max_iter, config->apd_tol};
        const nearcorr::BenchSummary s = nearcorr::run_bench(c);
        *out = {s.trials.size(), to_c(s.clip), to_c(s.apd), s.frobenius_ratio, s.apd_dominates,
                s.clip_max_within_3x};
    });
}

}  // extern "C"
