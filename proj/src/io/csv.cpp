#include "eitlab/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eitlab/constants.hpp"
#include "eitlab/errors.hpp"

namespace eit::io {

namespace {

constexpr std::string_view kMagic = "# eitlab-csv v";

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_number(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

}  // namespace

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_number: to_chars failed");
    return std::string(buf, ptr);
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    return std::nullopt;
}

std::vector<double> CsvTable::numbers(std::string_view name) const {
    const auto idx = column(name);
    if (!idx) throw DataError("csv (" + schema + "): missing column '" + std::string(name) + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto v = parse_number(rows[r][*idx]);
        if (!v) {
            std::ostringstream os;
            os << "csv (" << schema << "): row " << r + 1 << ", column '" << name << "': '" << rows[r][*idx]
               << "' is not a number";
            throw DataError(os.str());
        }
        out.push_back(*v);
    }
    return out;
}

std::optional<std::string> CsvTable::meta(std::string_view key) const {
    for (const auto& [k, v] : metadata)
        if (k == key) return v;
    return std::nullopt;
}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_number(v));
    rows.push_back(std::move(row));
}

std::string render_csv(const CsvTable& t) {
    std::string out;
    out += std::string(kMagic) + std::to_string(CsvTable::kVersion) + " " + t.schema + "\n";
    for (const auto& [k, v] : t.metadata) out += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
        out += "\n";
    }
    return out;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) -> DataError {
        return DataError(source + ":" + std::to_string(lineno) + ": " + what);
    };

    CsvTable t;
    ++lineno;
    if (!std::getline(in, line)) throw fail("empty file");
    line = trim(line);
    if (line.rfind(kMagic, 0) != 0) throw fail("missing '# eitlab-csv v<N> <schema>' version line");
    {
        std::istringstream head(line.substr(kMagic.size()));
        int version = 0;
        std::string schema;
        if (!(head >> version >> schema)) throw fail("malformed version line");
        if (version != CsvTable::kVersion)
            throw fail("unsupported CSV version " + std::to_string(version) + " (this build reads v" +
                       std::to_string(CsvTable::kVersion) + ")");
        t.schema = schema;
    }

    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty()) continue;
        if (s[0] == '#') {
            if (have_header) continue;
            const auto colon = s.find(':');
            if (colon != std::string::npos)
                t.metadata.emplace_back(trim(std::string_view(s).substr(1, colon - 1)),
                                        trim(std::string_view(s).substr(colon + 1)));
            continue;
        }
        auto cells = split(s);
        if (!have_header) {
            for (const auto& c : cells)
                if (c.empty()) throw fail("empty column name in header");
            t.columns = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.columns.size()) {
            std::ostringstream os;
            os << "expected " << t.columns.size() << " fields, got " << cells.size();
            throw fail(os.str());
        }
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw fail("missing header row");
    return t;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    if (!out) throw DataError("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    return parse_csv(read_text_file(path), path.string());
}

CsvTable scan_table(const ResonanceScan& scan) {
    CsvTable t;
    t.schema = "scan";
    if (scan.meta.pump_power_w) t.metadata.emplace_back("pump_power_w", format_number(*scan.meta.pump_power_w));
    if (scan.meta.temperature_k) t.metadata.emplace_back("temperature_k", format_number(*scan.meta.temperature_k));
    const bool has_a = scan.absorption.size() == scan.size();
    const bool has_t = scan.transmission.size() == scan.size();
    t.columns.push_back("delta2_hz");
    if (has_a) t.columns.push_back("absorption_per_m");
    if (has_t) t.columns.push_back("transmission");
    for (std::size_t i = 0; i < scan.size(); ++i) {
        std::vector<double> row{rad_to_hz(scan.delta2[i])};
        if (has_a) row.push_back(scan.absorption[i]);
        if (has_t) row.push_back(scan.transmission[i]);
        t.add_row(row);
    }
    return t;
}

ResonanceScan scan_from_table(const CsvTable& t) {
    if (t.schema != "scan") throw DataError("expected a 'scan' CSV, got '" + t.schema + "'");
    ResonanceScan scan;
    for (double f : t.numbers("delta2_hz")) scan.delta2.push_back(hz_to_rad(f));
    if (t.column("absorption_per_m")) scan.absorption = t.numbers("absorption_per_m");
    if (t.column("transmission")) scan.transmission = t.numbers("transmission");
    if (scan.absorption.empty() && scan.transmission.empty())
        throw DataError("scan CSV has neither absorption_per_m nor transmission");
    scan.kind = scan.absorption.empty() ? ScanKind::Transmission : ScanKind::Absorption;
    if (auto v = t.meta("pump_power_w")) scan.meta.pump_power_w = parse_number(*v);
    if (auto v = t.meta("temperature_k")) scan.meta.temperature_k = parse_number(*v);
    scan.validate();
    return scan;
}

CsvTable series_table(const LinewidthSeries& series) {
    CsvTable t;
    t.schema = "series";
    if (series.temperature) t.metadata.emplace_back("temperature_k", format_number(*series.temperature));
    t.metadata.emplace_back("configuration", series.configuration);
    if (!series.cell_label.empty()) t.metadata.emplace_back("cell_label", series.cell_label);
    const bool sig = series.has_sigmas();
    t.columns = {"power_w", "omega_c_hz", "fwhm_hz"};
    if (sig) t.columns.push_back("fwhm_sigma_hz");
    for (const auto& s : series.samples) {
        std::vector<double> row{s.power_w, rad_to_hz(s.omega_c), rad_to_hz(s.fwhm)};
        if (sig) row.push_back(rad_to_hz(*s.fwhm_sigma));
        t.add_row(row);
    }
    return t;
}

LinewidthSeries series_from_table(const CsvTable& t) {
    if (t.schema != "series") throw DataError("expected a 'series' CSV, got '" + t.schema + "'");
    LinewidthSeries series;
    const auto p = t.numbers("power_w");
    const auto w = t.numbers("fwhm_hz");
    std::vector<double> om(p.size(), 0.0);
    if (t.column("omega_c_hz")) om = t.numbers("omega_c_hz");
    std::vector<double> sig;
    if (t.column("fwhm_sigma_hz")) sig = t.numbers("fwhm_sigma_hz");
    for (std::size_t i = 0; i < p.size(); ++i) {
        LinewidthSample s;
        s.power_w = p[i];
        s.omega_c = hz_to_rad(om[i]);
        s.fwhm = hz_to_rad(w[i]);
        if (!sig.empty()) s.fwhm_sigma = hz_to_rad(sig[i]);
        series.samples.push_back(s);
    }
    if (auto v = t.meta("temperature_k")) series.temperature = parse_number(*v);
    if (auto v = t.meta("configuration")) series.configuration = *v;
    if (auto v = t.meta("cell_label")) series.cell_label = *v;
    series.validate(1);
    return series;
}

CsvTable slopes_table(const std::vector<TemperatureSlope>& slopes) {
    CsvTable t;
    t.schema = "slopes";
    t.columns = {"temperature_k", "slope_hz_per_w", "intercept_hz", "number_density_per_m3",
                 "pump_absorption_per_m"};
    for (const auto& s : slopes)
        t.add_row({s.temperature, rad_to_hz(s.slope), rad_to_hz(s.intercept), s.number_density,
                   s.pump_absorption});
    return t;
}

CsvTable fit_table(const FitResult& fit, const std::vector<std::pair<std::string, std::string>>& units) {
    CsvTable t;
    t.schema = "fit";
    t.metadata = {{"model", fit.model},
                  {"rss", format_number(fit.rss)},
                  {"dof", std::to_string(fit.dof)},
                  {"converged", fit.converged ? "true" : "false"},
                  {"iterations", std::to_string(fit.iterations)}};
    t.columns = {"name", "value", "sigma", "unit", "role"};
    auto emit = [&](const FitParameter& p, const char* role) {
        std::string unit = "1";
        for (const auto& [n, u] : units)
            if (n == p.name) unit = u;
        const bool hz = unit.size() >= 2 && unit.compare(0, 2, "hz") == 0;
        const double k = hz ? 1.0 / constants::two_pi : 1.0;
        t.rows.push_back({p.name, format_number(p.value * k), format_number(p.sigma * k), unit, role});
    };
    for (const auto& p : fit.parameters) emit(p, "parameter");
    for (const auto& p : fit.derived) emit(p, "derived");
    return t;
}

}  // namespace eit::io
