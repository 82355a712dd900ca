// nearcorr command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nearcorr/nearcorr.h"

namespace {

using json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kError = 1, kNotCorrelation = 2, kNoConvergence = 3 };

struct MatrixDeleter {
    void operator()(nc_matrix* m) const { nc_matrix_free(m); }
};
struct PanelDeleter {
    void operator()(nc_panel* p) const { nc_panel_free(p); }
};
struct RepairDeleter {
    void operator()(nc_repair* r) const { nc_repair_free(r); }
};
struct StringDeleter {
    void operator()(char* s) const { nc_string_free(s); }
};
using MatrixPtr = std::unique_ptr<nc_matrix, MatrixDeleter>;
using PanelPtr = std::unique_ptr<nc_panel, PanelDeleter>;
using RepairPtr = std::unique_ptr<nc_repair, RepairDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

/// Carries the exit code a failure maps to.
struct CliFailure {
    int exit_code;
    std::string message;
};

void check(nc_status status, int exit_code = kError) {
    if (status != NC_OK) {
        throw CliFailure{exit_code, fmt::format("{}: {}", nc_status_name(status), nc_last_error())};
    }
}

struct Options {
    std::vector<std::string> inputs;
    double epsilon = 1e-8;
    std::string method = "clip";
    int precision = 6;
    std::string policy = "fail";
    std::vector<std::string> overrides;
    std::string output;
    std::string format = "text";
    bool header = false;
    std::uint64_t seed = 42;
    std::size_t trials = 50;
    std::size_t size = 10;
    double noise = 0.1;
    std::size_t max_iter = 1000;
    double tol = 1e-8;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CliFailure{kError, fmt::format("cannot open '{}'", path)};
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Writes to a sibling temporary file and renames it into place, so a failed
// run never leaves a partial output behind.
void write_file_atomically(const std::string& path, const std::string& contents) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += fmt::format(".tmp.{}", static_cast<long>(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw CliFailure{kError, fmt::format("cannot write '{}'", tmp.string())};
        }
        out << contents;
        if (!out.flush()) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw CliFailure{kError, fmt::format("cannot write '{}'", tmp.string())};
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw CliFailure{kError, fmt::format("cannot move output into '{}'", path)};
    }
}

MatrixPtr load_matrix(const std::string& path) {
    const std::string text = read_file(path);
    nc_matrix* m = nullptr;
    const nc_status status = nc_matrix_read_csv(text.c_str(), &m);
    if (status != NC_OK) {
        throw CliFailure{kError, fmt::format("{}: {}: {}", path, nc_status_name(status), nc_last_error())};
    }
    return MatrixPtr(m);
}

std::vector<double> matrix_values(const nc_matrix* m) {
    const std::size_t n = nc_matrix_dim(m);
    std::vector<double> values(n * n);
    check(nc_matrix_copy_to(m, values.data(), values.size()));
    return values;
}

json matrix_json(const nc_matrix* m) {
    const std::size_t n = nc_matrix_dim(m);
    const std::vector<double> values = matrix_values(m);
    json rows = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        rows.push_back(std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(i * n),
                                           values.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)));
    }
    return rows;
}

std::string number(double v, int precision) { return fmt::format("{:.{}g}", v, precision); }

std::string list(const std::vector<double>& values, int precision) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? " " : "") + number(values[i], precision);
    }
    return out;
}

/// Emits the matrix either into --output or as the head of stdout, followed
/// by the report. In json mode a matrix bound for stdout is embedded instead.
void emit(const Options& opt, const nc_matrix* matrix, json report,
          const std::vector<std::pair<std::string, std::string>>& lines) {
    std::string csv;
    if (matrix != nullptr) {
        char* text = nullptr;
        check(nc_matrix_write_csv(matrix, opt.precision, opt.header ? 1 : 0, &text));
        csv = StringPtr(text).get();
        if (!opt.output.empty()) {
            write_file_atomically(opt.output, csv);
        }
    }
    if (opt.format == "json") {
        if (matrix != nullptr && opt.output.empty()) {
            report["matrix"] = matrix_json(matrix);
        }
        std::cout << report.dump(2) << '\n';
        return;
    }
    if (matrix != nullptr && opt.output.empty()) {
        std::cout << csv << '\n';
    }
    for (const auto& [key, value] : lines) {
        std::cout << key << ": " << value << '\n';
    }
}

nc_missing_policy parse_policy(const std::string& name) {
    if (name == "fail") return NC_POLICY_FAIL;
    if (name == "drop") return NC_POLICY_DROP_INCOMPLETE;
    return NC_POLICY_PAIRWISE;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

struct ResolvedOverride {
    std::string a;
    std::string b;
    std::size_t first;
    std::size_t last;
};

// "A,B,start:end" with 1-based inclusive indices. Labels may themselves hold
// commas; the split that names two known instruments wins.
ResolvedOverride parse_override(const std::string& spec, const nc_panel* panel) {
    const auto fail = [&](const std::string& why) {
        return CliFailure{kError, fmt::format("bad --override '{}': {}", spec, why)};
    };
    const auto range_at = spec.rfind(',');
    if (range_at == std::string::npos) throw fail("expected \"A,B,start:end\"");
    const std::string range = trim(spec.substr(range_at + 1));
    const std::string pair = spec.substr(0, range_at);

    const auto colon = range.find(':');
    if (colon == std::string::npos) throw fail("range must look like start:end");
    std::size_t first = 0;
    std::size_t last = 0;
    try {
        std::size_t used = 0;
        first = std::stoul(range.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("start");
        const std::string tail = range.substr(colon + 1);
        last = std::stoul(tail, &used);
        if (used != tail.size()) throw std::invalid_argument("end");
    } catch (const std::logic_error&) {
        throw fail("range must look like start:end");
    }
    if (first < 1 || last < 1) throw fail("date indices are 1-based");

    std::vector<std::string> labels;
    for (std::size_t i = 0; i < nc_panel_instrument_count(panel); ++i) {
        labels.emplace_back(nc_panel_instrument(panel, i));
    }
    const auto known = [&](const std::string& s) { return std::find(labels.begin(), labels.end(), s) != labels.end(); };
    std::optional<ResolvedOverride> match;
    for (auto pos = pair.find(','); pos != std::string::npos; pos = pair.find(',', pos + 1)) {
        std::string a = trim(pair.substr(0, pos));
        std::string b = trim(pair.substr(pos + 1));
        if (known(a) && known(b)) {
            if (match) throw fail("ambiguous instrument split");
            match = ResolvedOverride{std::move(a), std::move(b), first - 1, last - 1};
        }
    }
    if (!match) throw fail("does not name two instruments of the panel");
    return *match;
}

int cmd_corr(const Options& opt) {
    const std::string text = read_file(opt.inputs.at(0));
    nc_panel* raw_panel = nullptr;
    const nc_status parsed = nc_panel_parse_csv(text.c_str(), &raw_panel);
    if (parsed != NC_OK) {
        throw CliFailure{kError,
                         fmt::format("{}: {}: {}", opt.inputs.at(0), nc_status_name(parsed), nc_last_error())};
    }
    const PanelPtr panel(raw_panel);

    std::vector<ResolvedOverride> resolved;
    for (const auto& spec : opt.overrides) {
        resolved.push_back(parse_override(spec, panel.get()));
    }
    std::vector<nc_pair_override> overrides;
    for (const auto& r : resolved) {
        overrides.push_back({r.a.c_str(), r.b.c_str(), r.first, r.last});
    }

    nc_matrix* raw = nullptr;
    check(nc_sample_correlation(panel.get(), parse_policy(opt.policy), overrides.data(), overrides.size(), &raw));
    const MatrixPtr corr(raw);

    nc_check_report report{};
    check(nc_check_correlation(corr.get(), 1e-8, 1e-10, &report));
    const bool psd = report.is_psd != 0;

    json j;
    j["command"] = "corr";
    j["instruments"] = nc_panel_instrument_count(panel.get());
    j["dates"] = nc_panel_date_count(panel.get());
    j["min_eigenvalue"] = report.min_eigenvalue;
    j["is_psd"] = psd;
    emit(opt, corr.get(), j,
         {{"instruments", std::to_string(nc_panel_instrument_count(panel.get()))},
          {"dates", std::to_string(nc_panel_date_count(panel.get()))},
          {"min_eigenvalue", number(report.min_eigenvalue, opt.precision)},
          {"is_psd", psd ? "true" : "false"}});
    return psd ? kOk : kNotCorrelation;
}

int cmd_check(const Options& opt) {
    const MatrixPtr m = load_matrix(opt.inputs.at(0));
    nc_check_report r{};
    check(nc_check_correlation(m.get(), 1e-8, 1e-10, &r));
    const auto flag = [](int v) { return std::string(v ? "true" : "false"); };

    json j;
    j["command"] = "check";
    j["is_symmetric"] = r.is_symmetric != 0;
    j["max_asymmetry"] = r.max_asymmetry;
    j["unit_diagonal"] = r.unit_diagonal != 0;
    j["max_diagonal_deviation"] = r.max_diagonal_deviation;
    j["min_eigenvalue"] = r.min_eigenvalue;
    j["is_psd"] = r.is_psd != 0;
    j["offdiag_in_range"] = r.offdiag_in_range != 0;
    j["is_correlation"] = r.is_correlation != 0;
    emit(opt, nullptr, j,
         {{"is_symmetric", flag(r.is_symmetric)},
          {"max_asymmetry", number(r.max_asymmetry, opt.precision)},
          {"unit_diagonal", flag(r.unit_diagonal)},
          {"max_diagonal_deviation", number(r.max_diagonal_deviation, opt.precision)},
          {"min_eigenvalue", number(r.min_eigenvalue, opt.precision)},
          {"is_psd", flag(r.is_psd)},
          {"offdiag_in_range", flag(r.offdiag_in_range)},
          {"is_correlation", flag(r.is_correlation)}});
    return r.is_correlation ? kOk : kNotCorrelation;
}

int cmd_repair(const Options& opt) {
    const MatrixPtr input = load_matrix(opt.inputs.at(0));
    nc_repair* raw = nullptr;
    const nc_status status = opt.method == "apd" ? nc_apd_nearest(input.get(), opt.max_iter, opt.tol, &raw)
                                                 : nc_shrink_repair(input.get(), opt.epsilon, &raw);
    if (status == NC_ERR_CONVERGENCE) {
        throw CliFailure{kNoConvergence, fmt::format("{} (residual {})", nc_last_error(), nc_last_residual())};
    }
    check(status);
    const RepairPtr result(raw);

    nc_matrix* raw_matrix = nullptr;
    check(nc_repair_matrix(result.get(), &raw_matrix));
    const MatrixPtr repaired(raw_matrix);

    const std::size_t n = nc_repair_dim(result.get());
    std::vector<double> shifts(n);
    std::vector<double> eigenvalues(n);
    check(nc_repair_shifts(result.get(), shifts.data(), n));
    check(nc_repair_input_eigenvalues(result.get(), eigenvalues.data(), n));
    const nc_norm_report d = nc_repair_distance(result.get());
    const std::string method = nc_repair_method(result.get()) == NC_METHOD_APD ? "apd" : "clip";

    json j;
    j["command"] = "repair";
    j["method"] = method;
    j["epsilon"] = nc_repair_epsilon(result.get());
    j["clipped_count"] = nc_repair_clipped_count(result.get());
    j["iterations"] = nc_repair_iterations(result.get());
    j["input_eigenvalues"] = eigenvalues;
    j["shifts"] = shifts;
    j["distance"] = {{"frobenius", d.frobenius}, {"max", d.max}, {"scaled_max", d.scaled_max}};
    emit(opt, repaired.get(), j,
         {{"method", method},
          {"epsilon", number(nc_repair_epsilon(result.get()), opt.precision)},
          {"clipped_count", std::to_string(nc_repair_clipped_count(result.get()))},
          {"iterations", std::to_string(nc_repair_iterations(result.get()))},
          {"input_eigenvalues", list(eigenvalues, opt.precision)},
          {"shifts", list(shifts, opt.precision)},
          {"frobenius", number(d.frobenius, opt.precision)},
          {"max", number(d.max, opt.precision)},
          {"scaled_max", number(d.scaled_max, opt.precision)}});
    return kOk;
}

int cmd_compare(const Options& opt) {
    const MatrixPtr a = load_matrix(opt.inputs.at(0));
    const MatrixPtr b = load_matrix(opt.inputs.at(1));
    nc_norm_report d{};
    check(nc_diff_norms(a.get(), b.get(), &d));
    json j;
    j["command"] = "compare";
    j["frobenius"] = d.frobenius;
    j["max"] = d.max;
    j["scaled_max"] = d.scaled_max;
    emit(opt, nullptr, j,
         {{"frobenius", number(d.frobenius, opt.precision)},
          {"max", number(d.max, opt.precision)},
          {"scaled_max", number(d.scaled_max, opt.precision)}});
    return kOk;
}

int cmd_bench(const Options& opt) {
    nc_bench_config config = nc_bench_default_config();
    config.size = opt.size;
    config.trials = opt.trials;
    config.seed = opt.seed;
    config.noise = opt.noise;
    config.epsilon = opt.epsilon;
    config.apd_max_iter = opt.max_iter;
    config.apd_tol = opt.tol;
    nc_bench_summary s{};
    const nc_status status = nc_bench_run(&config, &s);
    if (status == NC_ERR_GENERATION || status == NC_ERR_CONVERGENCE) {
        throw CliFailure{kNoConvergence, fmt::format("{}: {}", nc_status_name(status), nc_last_error())};
    }
    check(status);

    const auto stats_json = [](const nc_distance_stats& st) { return json{{"mean", st.mean}, {"max", st.max}}; };
    const auto method_json = [&](const nc_method_summary& m) {
        return json{{"frobenius_vs_perturbed", stats_json(m.frobenius_vs_perturbed)},
                    {"max_vs_perturbed", stats_json(m.max_vs_perturbed)},
                    {"frobenius_vs_original", stats_json(m.frobenius_vs_original)},
                    {"max_vs_original", stats_json(m.max_vs_original)}};
    };
    json j;
    j["command"] = "bench";
    j["size"] = config.size;
    j["trials"] = s.trials;
    j["seed"] = config.seed;
    j["noise"] = config.noise;
    j["epsilon"] = config.epsilon;
    j["clip"] = method_json(s.clip);
    j["apd"] = method_json(s.apd);
    j["frobenius_ratio"] = s.frobenius_ratio;
    j["apd_dominates"] = s.apd_dominates;
    j["clip_max_within_3x"] = s.clip_max_within_3x;

    if (opt.format == "json") {
        std::cout << j.dump(2) << '\n';
        return kOk;
    }
    const int p = opt.precision;
    std::cout << fmt::format("size {}  trials {}  seed {}  noise {}  epsilon {}\n", config.size, s.trials, config.seed,
                             number(config.noise, p), number(config.epsilon, p));
    std::cout << fmt::format("{:<24}{:>14}{:>14}{:>14}{:>14}\n", "distance", "clip mean", "clip max", "apd mean",
                             "apd max");
    const auto row = [&](const char* name, const nc_distance_stats& c, const nc_distance_stats& a) {
        std::cout << fmt::format("{:<24}{:>14}{:>14}{:>14}{:>14}\n", name, number(c.mean, p), number(c.max, p),
                                 number(a.mean, p), number(a.max, p));
    };
    row("frobenius_vs_perturbed", s.clip.frobenius_vs_perturbed, s.apd.frobenius_vs_perturbed);
    row("max_vs_perturbed", s.clip.max_vs_perturbed, s.apd.max_vs_perturbed);
    row("frobenius_vs_original", s.clip.frobenius_vs_original, s.apd.frobenius_vs_original);
    row("max_vs_original", s.clip.max_vs_original, s.apd.max_vs_original);
    std::cout << "frobenius_ratio: " << number(s.frobenius_ratio, p) << '\n';
    std::cout << "apd_dominates: " << s.apd_dominates << '\n';
    std::cout << "clip_max_within_3x: " << s.clip_max_within_3x << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Repair, validate and compute correlation matrices"};
    app.require_subcommand(1);
    Options opt;

    const auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"text", "json"}));
        cmd->add_option("--precision", opt.precision, "Digits after the decimal point")->check(CLI::Range(1, 17));
    };
    const auto add_output = [&](CLI::App* cmd) {
        cmd->add_option("--output", opt.output, "Write the matrix here instead of standard output");
        cmd->add_flag("--header", opt.header, "Write instrument labels as header row and column");
    };

    auto* corr = app.add_subcommand("corr", "Sample correlation matrix of a time-series panel");
    corr->add_option("panel", opt.inputs, "Panel CSV")->required()->expected(1);
    corr->add_option("--policy", opt.policy, "Missing-data policy")->check(CLI::IsMember({"fail", "drop", "pairwise"}));
    corr->add_option("--override", opt.overrides, "Restrict a pair to dates start..end: \"A,B,start:end\"");
    add_format(corr);
    add_output(corr);

    auto* chk = app.add_subcommand("check", "Validate a correlation matrix");
    chk->add_option("matrix", opt.inputs, "Matrix CSV")->required()->expected(1);
    add_format(chk);

    auto* rep = app.add_subcommand("repair", "Repair a matrix into a correlation matrix");
    rep->add_option("matrix", opt.inputs, "Matrix CSV")->required()->expected(1);
    rep->add_option("--epsilon", opt.epsilon, "Eigenvalue floor for clipping")->check(CLI::PositiveNumber);
    rep->add_option("--method", opt.method, "Repair method")->check(CLI::IsMember({"clip", "apd"}));
    rep->add_option("--max-iter", opt.max_iter, "Iteration cap for apd")->check(CLI::PositiveNumber);
    rep->add_option("--tol", opt.tol, "Convergence tolerance for apd")->check(CLI::PositiveNumber);
    add_format(rep);
    add_output(rep);

    auto* cmp = app.add_subcommand("compare", "Distance between two matrices");
    cmp->add_option("matrices", opt.inputs, "Two matrix CSV files")->required()->expected(2);
    add_format(cmp);

    auto* bench = app.add_subcommand("bench", "Compare clipping with alternating projections on random inputs");
    bench->add_option("--size", opt.size, "Matrix dimension")->check(CLI::Range(2, 1000));
    bench->add_option("--trials", opt.trials, "Number of trials")->check(CLI::PositiveNumber);
    bench->add_option("--seed", opt.seed, "Base seed");
    bench->add_option("--noise", opt.noise, "Perturbation magnitude")->check(CLI::NonNegativeNumber);
    bench->add_option("--epsilon", opt.epsilon, "Eigenvalue floor for clipping")->check(CLI::PositiveNumber);
    bench->add_option("--max-iter", opt.max_iter, "Iteration cap for apd")->check(CLI::PositiveNumber);
    bench->add_option("--tol", opt.tol, "Convergence tolerance for apd")->check(CLI::PositiveNumber);
    add_format(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kError;
    }

    try {
        if (corr->parsed()) return cmd_corr(opt);
        if (chk->parsed()) return cmd_check(opt);
        if (rep->parsed()) return cmd_repair(opt);
        if (cmp->parsed()) return cmd_compare(opt);
        if (bench->parsed()) return cmd_bench(opt);
    } catch (const CliFailure& f) {
        std::cerr << "nearcorr: " << f.message << '\n';
        return f.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "nearcorr: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
