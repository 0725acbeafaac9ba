#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eitlab/fitting.hpp"
#include "eitlab/lineshape.hpp"
#include "eitlab/propagation.hpp"
#include "eitlab/series.hpp"

namespace eit::io {

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// In-memory CSV document. On disk:
///   # eitlab-csv v1 <schema>
///   # key: value        (zero or more)
///   col_a,col_b,...
///   rows
struct CsvTable {
    static constexpr int kVersion = 1;

    std::string schema;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(std::string_view name) const;
    /// Numeric column; throws DataError if absent or a cell does not parse.
    std::vector<double> numbers(std::string_view name) const;
    std::optional<std::string> meta(std::string_view key) const;

    void add_row(const std::vector<double>& values);
};

std::string render_csv(const CsvTable& table);
/// Throws DataError (with source:line) on a missing or unknown version
/// line, ragged rows or an empty header.
CsvTable parse_csv(const std::string& text, const std::string& source_name = "<csv>");
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// scan: delta2_hz, absorption_per_m, transmission.
CsvTable scan_table(const ResonanceScan& scan);
/// Accepts either value column; `kind` is the absorption column when present.
ResonanceScan scan_from_table(const CsvTable& table);

/// series: power_w, omega_c_hz, fwhm_hz[, fwhm_sigma_hz].
CsvTable series_table(const LinewidthSeries& series);
LinewidthSeries series_from_table(const CsvTable& table);

/// slopes: temperature_k, slope_hz_per_w, intercept_hz, number_density_per_m3,
/// pump_absorption_per_m.
CsvTable slopes_table(const std::vector<TemperatureSlope>& slopes);

/// fit: one row per parameter (name, value, sigma, unit, role) with fit
/// statistics as metadata. `units` maps parameter names to their unit labels;
/// parameters whose unit ends in "hz" are converted from rad/s.
CsvTable fit_table(const FitResult& fit,
                   const std::vector<std::pair<std::string, std::string>>& units);

}  // namespace eit::io
