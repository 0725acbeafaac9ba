#include "eitlab/io/commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eitlab/errors.hpp"
#include "eitlab/fitting.hpp"
#include "eitlab/io/csv.hpp"
#include "eitlab/lineshape.hpp"
#include "eitlab/propagation.hpp"
#include "eitlab/rng.hpp"
#include "eitlab/synth.hpp"

namespace eit::io {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
    if (dynamic_cast<const DataError*>(&e)) return kExitData;
    if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
    return 1;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"simulate-scan", "sweep-power", "sweep-temperature",
                                                "fit-scan",      "fit-series",  "synth"};
    return names;
}

namespace {

struct Run {
    RunConfig cfg;
    std::string model;
    double noise_pct = 0.0;
    std::optional<fs::path> input;
    fs::path out_dir;
    RunManifest manifest;
    CommandResult result;

    void emit(const std::string& name, const std::string& content) {
        const fs::path path = out_dir / name;
        write_text_file(path, content);
        manifest.outputs.push_back({name, sha256_hex(content)});
        result.outputs.push_back(path);
    }
};

void require_model(const std::string& model, std::initializer_list<const char*> allowed,
                   const std::string& command) {
    for (const char* a : allowed)
        if (model == a) return;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw ConfigError(command + ": unknown model '" + model + "' (expected one of: " + list + ")");
}

const char* default_model(const std::string& command) {
    if (command == "fit-series") return "both";
    if (command == "fit-scan") return "lorentzian";
    return "dephasing";
}

PopExchangeForward make_forward(const RunConfig& cfg) {
    LambdaSystem base = cfg.lambda_system();
    return PopExchangeForward(base, cfg.cell_model().resolved_medium(), cfg.profile(), cfg.optics(),
                              cfg.exchange_grid(), cfg.numerics.quad);
}

ResonanceScan simulate_scan(const RunConfig& cfg, const std::string& model) {
    const LambdaSystem sys = cfg.lambda_system();
    const double w_d = cfg.w_d();
    ResonanceScan scan;
    if (model == "dephasing") {
        const auto grid = cfg.scan_grid().make(fwhm_dephasing(sys.gamma_bc, sys.omega_c, w_d, sys.gamma()));
        scan = thick_cell_scan(cfg.cell_model(), sys, w_d, grid);
    } else {
        const MediumConfig medium = cfg.cell_model().resolved_medium();
        const double estimate = std::max(fwhm_popexchange_asymptote(sys.gamma_pe, sys.omega_c, w_d, sys.gamma()),
                                         2.0 * (sys.gamma_pe + sys.gamma_bc));
        const auto grid = cfg.scan_grid().make(estimate);
        scan = popexchange_scan_numeric(sys, medium, cfg.profile(), grid, cfg.numerics.quad);
        scan.transmission.resize(scan.size());
        for (std::size_t i = 0; i < scan.size(); ++i)
            scan.transmission[i] = std::exp(-scan.absorption[i] * medium.cell_length);
        scan.meta.temperature_k = cfg.cell.temperature;
    }
    if (!cfg.system.omega_c_hz) scan.meta.pump_power_w = cfg.system.pump_power;
    return scan;
}

LinewidthSeries simulate_series(const RunConfig& cfg, const std::string& model) {
    LinewidthSeries series;
    const PowerSweep sweep = cfg.power_sweep();
    if (model == "dephasing") {
        series = thick_cell_series(cfg.cell_model(), cfg.lambda_system(), cfg.w_d(), sweep, cfg.scan_grid());
    } else {
        const auto forward = make_forward(cfg);
        const double gamma_pe = hz_to_rad(cfg.system.gamma_pe_hz);
        const auto widths = forward.curve(sweep.powers, gamma_pe);
        for (std::size_t i = 0; i < sweep.powers.size(); ++i)
            series.samples.push_back({sweep.powers[i], sweep.rabi(sweep.powers[i]), widths[i], std::nullopt});
        series.temperature = cfg.cell.temperature;
    }
    series.configuration = cfg.cell.configuration;
    series.cell_label = cfg.cell.label;
    return series;
}

std::string hz(double rad) { return format_number(rad_to_hz(rad)); }

std::string describe(const FitResult& fit, const std::vector<std::pair<std::string, std::string>>& units) {
    const CsvTable t = fit_table(fit, units);
    std::ostringstream os;
    os << fit.model << " fit: " << (fit.converged ? "converged" : "NOT converged") << " after "
       << fit.iterations << " iterations, rss = " << format_number(fit.rss) << ", dof = " << fit.dof << "\n";
    for (const auto& row : t.rows)
        os << "  " << row[0] << " = " << row[1] << " +/- " << row[2] << " " << row[3]
           << (row[4] == "derived" ? " (derived)" : "") << "\n";
    return os.str();
}

const std::vector<std::pair<std::string, std::string>> kLorentzUnitsAbs{
    {"center", "hz"}, {"fwhm", "hz"}, {"depth", "per_m"}, {"baseline", "per_m"}};
const std::vector<std::pair<std::string, std::string>> kLorentzUnitsTrans{
    {"center", "hz"}, {"fwhm", "hz"}, {"depth", "1"}, {"baseline", "1"}};
const std::vector<std::pair<std::string, std::string>> kLinearUnits{
    {"slope", "hz_per_w"}, {"intercept", "hz"}, {"gamma_bc", "hz"}};
const std::vector<std::pair<std::string, std::string>> kExchangeUnits{
    {"gamma_pe", "hz"}, {"rabi_scale", "1"}, {"intercept", "hz"}};

void cmd_simulate_scan(Run& run) {
    require_model(run.model, {"dephasing", "exchange"}, "simulate-scan");
    const ResonanceScan scan = simulate_scan(run.cfg, run.model);
    run.emit("scan.csv", render_csv(scan_table(scan)));
    std::ostringstream os;
    os << "scan: " << scan.size() << " points, FWHM = " << hz(fwhm_numeric(scan)) << " Hz\n";
    run.result.report = os.str();
}

void cmd_sweep_power(Run& run) {
    require_model(run.model, {"dephasing", "exchange"}, "sweep-power");
    const LinewidthSeries series = simulate_series(run.cfg, run.model);
    run.emit("series.csv", render_csv(series_table(series)));
    std::ostringstream os;
    os << "series: " << series.size() << " powers, FWHM " << hz(series.samples.front().fwhm) << " .. "
       << hz(series.samples.back().fwhm) << " Hz\n";
    run.result.report = os.str();
}

void cmd_sweep_temperature(Run& run) {
    require_model(run.model, {"dephasing"}, "sweep-temperature");
    const auto& cfg = run.cfg;
    if (cfg.sweep.temperatures.empty()) throw ConfigError("sweep.temperatures_k: empty");
    const auto slopes = slope_vs_temperature(cfg.cell_model(), cfg.lambda_system(), cfg.w_d(),
                                             cfg.sweep.temperatures, cfg.power_sweep(), cfg.scan_grid());
    run.emit("slopes.csv", render_csv(slopes_table(slopes)));
    std::ostringstream os;
    for (const auto& s : slopes)
        os << "T = " << format_number(s.temperature) << " K: slope = " << hz(s.slope) << " Hz/W, intercept = "
           << hz(s.intercept) << " Hz\n";
    run.result.report = os.str();
}

fs::path need_input(const Run& run, const char* command) {
    if (!run.input) throw ConfigError(std::string(command) + ": an input CSV is required");
    return *run.input;
}

void cmd_fit_scan(Run& run) {
    require_model(run.model, {"lorentzian"}, "fit-scan");
    const ResonanceScan scan = scan_from_table(read_csv(need_input(run, "fit-scan")));
    const FitResult fit = fit_lorentzian(scan, std::nullopt, run.cfg.numerics.lm);
    const auto& units = scan.kind == ScanKind::Absorption ? kLorentzUnitsAbs : kLorentzUnitsTrans;
    const std::string text = describe(fit, units);
    run.emit("fit_scan.csv", render_csv(fit_table(fit, units)));
    run.emit("fit_scan.txt", text);
    run.result.report = text;
}

void cmd_fit_series(Run& run) {
    require_model(run.model, {"linear", "exchange", "exchange-2p", "both"}, "fit-series");
    const LinewidthSeries series = series_from_table(read_csv(need_input(run, "fit-series")));
    const auto& cfg = run.cfg;
    std::string text;
    std::optional<FitResult> linear, exchange;
    if (run.model == "linear" || run.model == "both") {
        linear = fit_linear(series);
        run.emit("fit_linear.csv", render_csv(fit_table(*linear, kLinearUnits)));
        text += describe(*linear, kLinearUnits);
    }
    if (run.model != "linear") {
        const auto forward = make_forward(cfg);
        PopExchangeFitOptions opts;
        opts.fit_rabi_scale = run.model == "exchange-2p";
        opts.lm = cfg.numerics.lm;
        exchange = fit_popexchange(series, forward, opts);
        run.emit("fit_exchange.csv", render_csv(fit_table(*exchange, kExchangeUnits)));
        text += describe(*exchange, kExchangeUnits);
    }
    if (linear && exchange) text += compare_models(series, *linear, *exchange, cfg.w_d(), cfg.gamma()).text();
    run.emit("fit_series.txt", text);
    run.result.report = text;
}

void cmd_synth(Run& run) {
    require_model(run.model, {"dephasing", "exchange"}, "synth");
    if (!(run.noise_pct >= 0) || !std::isfinite(run.noise_pct))
        throw ConfigError("synth: --noise must be a finite percentage >= 0");
    const double fraction = run.noise_pct / 100.0;
    NoiseSource rng(run.cfg.seed);
    const ResonanceScan scan =
        add_scan_noise(simulate_scan(run.cfg, run.model), fraction, run.cfg.cell.length, rng);
    const LinewidthSeries series = add_series_noise(simulate_series(run.cfg, run.model), fraction, rng);
    run.emit("synth_scan.csv", render_csv(scan_table(scan)));
    run.emit("synth_series.csv", render_csv(series_table(series)));
    std::ostringstream os;
    os << "synth: seed " << run.cfg.seed << ", noise " << format_number(run.noise_pct) << "%, "
       << scan.size() << " scan points, " << series.size() << " series points\n";
    run.result.report = os.str();
}

}  // namespace

CommandResult run_command(const CommandOptions& options) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), options.command) == names.end())
        throw ConfigError("unknown command '" + options.command + "'");

    Run run;
    ManifestOptions from_manifest;
    if (options.config) {
        run.cfg = load_config(*options.config);
        from_manifest = manifest_options(*options.config);
    }
    if (options.seed) run.cfg.seed = *options.seed;
    run.model = options.model ? *options.model : from_manifest.model.value_or(default_model(options.command));
    run.noise_pct = options.noise_pct ? *options.noise_pct : from_manifest.noise_pct.value_or(0.0);
    if (options.input) run.input = *options.input;
    else if (from_manifest.input) run.input = fs::path(*from_manifest.input);
    run.out_dir = options.out_dir;

    run.manifest.command = options.command;
    run.manifest.seed = run.cfg.seed;
    run.manifest.model = run.model;
    run.manifest.noise_pct = run.noise_pct;
    run.manifest.config_yaml = run.cfg.to_yaml();
    if (run.input) {
        run.manifest.input = run.input->string();
        run.manifest.input_sha256 = sha256_hex(read_text_file(*run.input));
    }

    const std::string& c = options.command;
    if (c == "simulate-scan") cmd_simulate_scan(run);
    else if (c == "sweep-power") cmd_sweep_power(run);
    else if (c == "sweep-temperature") cmd_sweep_temperature(run);
    else if (c == "fit-scan") cmd_fit_scan(run);
    else if (c == "fit-series") cmd_fit_series(run);
    else cmd_synth(run);

    run.manifest.wall_clock = utc_timestamp();
    run.result.manifest = run.out_dir / (c + ".manifest.yaml");
    write_text_file(run.result.manifest, run.manifest.to_yaml());
    return run.result;
}

}  // namespace eit::io
