#include "nearcorr/ingest.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "nearcorr/error.hpp"

namespace nearcorr {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    if (cell.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

struct Record {
    std::size_t line;  // 1-based
    std::vector<std::string> cells;
};

std::vector<Record> split_records(std::string_view text) {
    std::vector<Record> records;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t end = text.find('\n');
        std::string_view line = text.substr(0, end);
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) {
            line.remove_prefix(3);
        }
        if (trim(line).empty()) {
            continue;
        }
        records.push_back({line_no, split_csv_record(line)});
    }
    return records;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string format_fixed(double v, int precision) {
    std::string s = fmt::format("{:.{}f}", v, precision);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
        s.erase(0, 1);
    }
    return s;
}

}  // namespace

std::vector<std::string> split_csv_record(std::string_view line) {
    std::vector<std::string> cells;
    std::string current;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            cells.push_back(was_quoted ? current : std::string(trim(current)));
            current.clear();
            was_quoted = false;
        } else {
            current += c;
        }
    }
    cells.push_back(was_quoted ? current : std::string(trim(current)));
    return cells;
}

TimeSeriesPanel::TimeSeriesPanel(std::vector<std::string> instruments, std::vector<std::string> dates,
                                 std::vector<std::vector<std::optional<double>>> values)
    : instruments_(std::move(instruments)), dates_(std::move(dates)), values_(std::move(values)) {
    if (instruments_.empty()) {
        throw InvalidArgument("panel needs at least one instrument");
    }
    if (dates_.size() < 2) {
        throw InvalidArgument("panel needs at least two dates, got " + std::to_string(dates_.size()));
    }
    std::set<std::string_view> seen;
    for (const auto& label : instruments_) {
        if (label.empty()) {
            throw InvalidArgument("instrument labels must be non-empty");
        }
        if (!seen.insert(label).second) {
            throw InvalidArgument("duplicate instrument label '" + label + "'");
        }
    }
    seen.clear();
    for (const auto& date : dates_) {
        if (!seen.insert(date).second) {
            throw InvalidArgument("duplicate date '" + date + "'");
        }
    }
    if (values_.size() != instruments_.size()) {
        throw DimensionMismatch("values grid has " + std::to_string(values_.size()) + " rows for " +
                                std::to_string(instruments_.size()) + " instruments");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i].size() != dates_.size()) {
            throw DimensionMismatch("instrument '" + instruments_[i] + "' has " + std::to_string(values_[i].size()) +
                                    " observations for " + std::to_string(dates_.size()) + " dates");
        }
        for (const auto& v : values_[i]) {
            if (v && !std::isfinite(*v)) {
                throw InvalidArgument("non-finite observation for '" + instruments_[i] + "'");
            }
        }
    }
}

std::optional<std::size_t> TimeSeriesPanel::index_of(std::string_view label) const {
    const auto it = std::find(instruments_.begin(), instruments_.end(), label);
    if (it == instruments_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - instruments_.begin());
}

std::size_t TimeSeriesPanel::missing_count() const noexcept {
    std::size_t count = 0;
    for (const auto& row : values_) {
        count += static_cast<std::size_t>(std::count(row.begin(), row.end(), std::nullopt));
    }
    return count;
}

TimeSeriesPanel parse_panel(std::string_view text) {
    const std::vector<Record> records = split_records(text);
    if (records.empty()) {
        throw ParseError("empty panel document", 0, 0);
    }
    const Record& header = records.front();
    if (header.cells.size() < 2) {
        throw ParseError("header needs a date column and at least one instrument", header.line, 1);
    }
    std::vector<std::string> instruments(header.cells.begin() + 1, header.cells.end());
    std::set<std::string_view> seen;
    for (std::size_t k = 0; k < instruments.size(); ++k) {
        if (instruments[k].empty()) {
            throw ParseError("empty instrument label", header.line, k + 2);
        }
        if (!seen.insert(instruments[k]).second) {
            throw ParseError("duplicate instrument label '" + instruments[k] + "'", header.line, k + 2);
        }
    }
    if (records.size() < 3) {
        throw ParseError("panel needs at least 2 data rows, got " + std::to_string(records.size() - 1),
                         header.line, 0);
    }

    std::vector<std::string> dates;
    std::vector<std::vector<std::optional<double>>> values(instruments.size());
    std::set<std::string> seen_dates;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const Record& rec = records[r];
        if (rec.cells.size() > header.cells.size()) {
            throw ParseError("row has " + std::to_string(rec.cells.size()) + " cells, header has " +
                                 std::to_string(header.cells.size()),
                             rec.line, header.cells.size() + 1);
        }
        const std::string& date = rec.cells.front();
        if (date.empty()) {
            throw ParseError("empty date", rec.line, 1);
        }
        if (!seen_dates.insert(date).second) {
            throw ParseError("duplicate date '" + date + "'", rec.line, 1);
        }
        dates.push_back(date);
        for (std::size_t k = 0; k < instruments.size(); ++k) {
            const std::size_t col = k + 1;
            if (col >= rec.cells.size() || trim(rec.cells[col]).empty()) {
                values[k].emplace_back(std::nullopt);
                continue;
            }
            const auto v = parse_number(rec.cells[col]);
            if (!v) {
                throw ParseError("cannot parse '" + rec.cells[col] + "' as a number", rec.line, col + 1);
            }
            values[k].emplace_back(*v);
        }
    }
    return TimeSeriesPanel(std::move(instruments), std::move(dates), std::move(values));
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionMismatch("series lengths differ: " + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
    }
    if (x.size() < kMinObservations) {
        throw InsufficientObservations("correlation needs at least " + std::to_string(kMinObservations) +
                                       " observations, got " + std::to_string(x.size()));
    }
    const auto constant = [](std::span<const double> s) {
        return std::all_of(s.begin(), s.end(), [&](double v) { return v == s.front(); });
    };
    if (constant(x) || constant(y)) {
        throw DegenerateSeries("constant series has zero variance");
    }
    const auto n = static_cast<double>(x.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DegenerateSeries("series has zero variance");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SymmetricMatrix sample_correlation(const TimeSeriesPanel& panel, MissingPolicy policy,
                                   std::span<const PairOverride> overrides) {
    const std::size_t n = panel.instrument_count();
    const std::size_t t = panel.date_count();

    if (policy == MissingPolicy::fail) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < t; ++d) {
                if (!panel.value(i, d)) {
                    throw MissingData("missing observation for '" + panel.instruments()[i] + "' on '" +
                                      panel.dates()[d] + "' (policy fail)");
                }
            }
        }
    }

    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> windows;
    for (const PairOverride& o : overrides) {
        const auto a = panel.index_of(o.instrument_a);
        const auto b = panel.index_of(o.instrument_b);
        if (!a || !b) {
            throw InvalidArgument("override names unknown instrument '" + (a ? o.instrument_b : o.instrument_a) +
                                  "'");
        }
        if (*a == *b) {
            throw InvalidArgument("override pairs '" + o.instrument_a + "' with itself");
        }
        if (o.first > o.last || o.last >= t) {
            throw InvalidArgument("override range " + std::to_string(o.first + 1) + ":" + std::to_string(o.last + 1) +
                                  " is outside 1:" + std::to_string(t));
        }
        if (o.last - o.first + 1 < kMinObservations) {
            throw InvalidArgument("override range for '" + o.instrument_a + "'/'" + o.instrument_b +
                                  "' spans fewer than " + std::to_string(kMinObservations) + " dates");
        }
        const auto key = std::minmax(*a, *b);
        if (!windows.emplace(key, std::make_pair(o.first, o.last)).second) {
            throw InvalidArgument("duplicate override for '" + o.instrument_a + "'/'" + o.instrument_b + "'");
        }
    }

    std::vector<bool> usable(t, true);
    if (policy == MissingPolicy::drop_incomplete_dates) {
        for (std::size_t d = 0; d < t; ++d) {
            for (std::size_t i = 0; i < n; ++i) {
                usable[d] = usable[d] && panel.value(i, d).has_value();
            }
        }
    }

    DenseMatrix corr = DenseMatrix::identity(n);
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            std::size_t first = 0;
            std::size_t last = t - 1;
            if (const auto it = windows.find({i, j}); it != windows.end()) {
                std::tie(first, last) = it->second;
            }
            x.clear();
            y.clear();
            for (std::size_t d = first; d <= last; ++d) {
                const auto& xi = panel.value(i, d);
                const auto& yj = panel.value(j, d);
                if (usable[d] && xi && yj) {
                    x.push_back(*xi);
                    y.push_back(*yj);
                }
            }
            const std::string pair = "'" + panel.instruments()[i] + "'/'" + panel.instruments()[j] + "'";
            if (x.size() < kMinObservations) {
                throw InsufficientObservations("pair " + pair + " has only " + std::to_string(x.size()) +
                                               " common observations");
            }
            double r = 0.0;
            try {
                r = pearson(x, y);
            } catch (const DegenerateSeries&) {
                throw DegenerateSeries("pair " + pair + ": a series is constant over the window");
            }
            corr(i, j) = r;
            corr(j, i) = r;
        }
    }
    return SymmetricMatrix(corr);
}

LabeledMatrix read_labeled_matrix(std::string_view text) {
    std::vector<Record> records = split_records(text);
    if (records.empty()) {
        throw ParseError("empty matrix document", 0, 0);
    }
    const auto is_numeric = [](const std::string& cell) { return parse_number(cell).has_value(); };

    std::vector<std::string> header_row;
    // A leading label with numbers after it starts a data row, not a header.
    const std::vector<std::string>& first = records.front().cells;
    const bool has_header_row =
        trim(first.front()).empty() || (first.size() == 1 && !is_numeric(first.front())) ||
        std::any_of(first.begin() + 1, first.end(), [&](const std::string& c) { return !trim(c).empty() && !is_numeric(c); });
    if (has_header_row) {
        header_row = records.front().cells;
        records.erase(records.begin());
        if (records.empty()) {
            throw ParseError("matrix has a header but no data rows", 1, 0);
        }
    }
    const auto is_label = [&](const std::string& cell) { return !trim(cell).empty() && !is_numeric(cell); };
    const bool has_header_col = is_label(records.front().cells.front());
    const std::size_t n = records.size();
    const std::size_t offset = has_header_col ? 1 : 0;

    std::vector<std::string> labels;
    if (has_header_col) {
        for (const Record& rec : records) {
            labels.push_back(rec.cells.front());
        }
    } else if (has_header_row) {
        labels = header_row;
    }
    if (has_header_row && has_header_col) {
        if (header_row.size() != n + 1) {
            throw ParseError("header row has " + std::to_string(header_row.size()) + " cells, expected " +
                                 std::to_string(n + 1),
                             1, 0);
        }
    } else if (has_header_row && header_row.size() != n) {
        throw ParseError("header row has " + std::to_string(header_row.size()) + " labels for " + std::to_string(n) +
                             " data rows",
                         1, 0);
    }

    std::vector<std::vector<std::optional<double>>> grid(n, std::vector<std::optional<double>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Record& rec = records[i];
        if (rec.cells.size() > n + offset) {
            throw ParseError("matrix is not square: row has " + std::to_string(rec.cells.size() - offset) +
                                 " entries but there are " + std::to_string(n) + " rows",
                             rec.line, n + offset + 1);
        }
        if (has_header_col != is_label(rec.cells.front())) {
            throw ParseError("inconsistent header column", rec.line, 1);
        }
        for (std::size_t j = 0; j + offset < rec.cells.size(); ++j) {
            const std::string& cell = rec.cells[j + offset];
            if (trim(cell).empty()) {
                continue;
            }
            const auto v = parse_number(cell);
            if (!v) {
                throw ParseError("cannot parse '" + cell + "' as a number", rec.line, j + offset + 1);
            }
            grid[i][j] = *v;
        }
    }

    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (grid[i][j]) {
                m(i, j) = *grid[i][j];
            } else if (i != j && grid[j][i]) {
                m(i, j) = *grid[j][i];
            } else {
                throw ParseError("missing matrix entry (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")",
                                 records[i].line, j + offset + 1);
            }
        }
    }
    return LabeledMatrix{SymmetricMatrix(m), std::move(labels)};
}

SymmetricMatrix read_matrix(std::string_view text) { return read_labeled_matrix(text).matrix; }

std::string write_matrix(const SymmetricMatrix& a, int precision, std::span<const std::string> labels) {
    if (precision < 1 || precision > 17) {
        throw InvalidArgument("precision must be in [1, 17], got " + std::to_string(precision));
    }
    const std::size_t n = a.dim();
    if (!labels.empty() && labels.size() != n) {
        throw DimensionMismatch("got " + std::to_string(labels.size()) + " labels for a " + std::to_string(n) + "x" +
                                std::to_string(n) + " matrix");
    }
    std::string out;
    if (!labels.empty()) {
        for (const auto& label : labels) {
            out += ',';
            out += quote_if_needed(label);
        }
        out += '\n';
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!labels.empty()) {
            out += quote_if_needed(labels[i]);
            out += ',';
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0) {
                out += ',';
            }
            out += format_fixed(a(i, j), precision);
        }
        out += '\n';
    }
    return out;
}

}  // namespace nearcorr
