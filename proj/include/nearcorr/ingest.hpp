#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nearcorr/linalg.hpp"

namespace nearcorr {

/// Instruments x dates grid of observations; empty optionals are missing cells.
class TimeSeriesPanel {
public:
    TimeSeriesPanel(std::vector<std::string> instruments, std::vector<std::string> dates,
                    std::vector<std::vector<std::optional<double>>> values);

    [[nodiscard]] const std::vector<std::string>& instruments() const noexcept { return instruments_; }
    [[nodiscard]] const std::vector<std::string>& dates() const noexcept { return dates_; }
    [[nodiscard]] std::size_t instrument_count() const noexcept { return instruments_.size(); }
    [[nodiscard]] std::size_t date_count() const noexcept { return dates_.size(); }
    [[nodiscard]] const std::optional<double>& value(std::size_t instrument, std::size_t date) const {
        return values_[instrument][date];
    }
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view label) const;
    [[nodiscard]] std::size_t missing_count() const noexcept;

private:
    std::vector<std::string> instruments_;
    std::vector<std::string> dates_;
    std::vector<std::vector<std::optional<double>>> values_;
};

/// Restricts the correlation of one pair to the inclusive date-index range
/// [first, last] (0-based).
struct PairOverride {
    std::string instrument_a;
    std::string instrument_b;
    std::size_t first = 0;
    std::size_t last = 0;
};

enum class MissingPolicy { fail, drop_incomplete_dates, pairwise_complete };

inline constexpr std::size_t kMinObservations = 3;

/// First header cell names the date column; remaining headers are instrument
/// labels. Empty cells are missing observations.
TimeSeriesPanel parse_panel(std::string_view text);

/// Sample Pearson correlation, clamped to [-1, 1].
double pearson(std::span<const double> x, std::span<const double> y);

SymmetricMatrix sample_correlation(const TimeSeriesPanel& panel, MissingPolicy policy,
                                   std::span<const PairOverride> overrides = {});

struct LabeledMatrix {
    SymmetricMatrix matrix;
    std::vector<std::string> labels;  // empty when the file had no header
};

/// Square numeric grid with an optional header row and/or column. Cells of
/// one triangle may be left empty and are mirrored from the other.
LabeledMatrix read_labeled_matrix(std::string_view text);
SymmetricMatrix read_matrix(std::string_view text);

/// Fixed-point, comma-separated, row-major. A header row and column are
/// written when labels are given.
std::string write_matrix(const SymmetricMatrix& a, int precision, std::span<const std::string> labels = {});

/// Splits one CSV record, honouring double quotes. Exposed for the CLI.
std::vector<std::string> split_csv_record(std::string_view line);

}  // namespace nearcorr
