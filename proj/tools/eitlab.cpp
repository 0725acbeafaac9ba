// eitlab: simulate, sweep, fit and synthesize EIT linewidth data.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eitlab/io/commands.hpp"

namespace {

std::string describe(const std::string& name) {
    if (name == "simulate-scan") return "probe absorption and transmission vs two-photon detuning (scan.csv)";
    if (name == "sweep-power") return "EIT FWHM vs pump power through the thick cell (series.csv)";
    if (name == "sweep-temperature") return "linewidth slope vs cell temperature (slopes.csv)";
    if (name == "fit-scan") return "Lorentzian fit of a scan CSV (fit_scan.csv)";
    if (name == "fit-series") return "linear and exchange fits of a series CSV, with model comparison";
    if (name == "synth") return "noisy synthetic scan and series from a fixed seed";
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EIT linewidth toolkit"};
    app.set_version_flag("--version", std::string(eit::io::kToolVersion));
    app.require_subcommand(1);

    eit::io::CommandOptions opts;
    std::string config, out = ".", input, model;
    std::optional<std::uint64_t> seed;
    std::optional<double> noise;

    for (const auto& name : eit::io::command_names()) {
        auto* sub = app.add_subcommand(name, describe(name));
        sub->add_option("--config", config, "config file or run manifest");
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "64-bit RNG seed (overrides the config)");
        sub->add_option("--model", model, "model name");
        if (name == "synth") sub->add_option("--noise", noise, "relative Gaussian noise, percent");
        if (name == "fit-scan" || name == "fit-series") sub->add_option("input", input, "input CSV");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : eit::io::kExitConfig;
    }

    opts.command = app.get_subcommands().front()->get_name();
    if (!config.empty()) opts.config = config;
    if (!input.empty()) opts.input = input;
    if (!model.empty()) opts.model = model;
    opts.out_dir = out;
    opts.seed = seed;
    opts.noise_pct = noise;

    try {
        const auto result = eit::io::run_command(opts);
        std::cout << result.report;
        for (const auto& p : result.outputs) std::cout << "wrote " << p.string() << "\n";
        std::cout << "wrote " << result.manifest.string() << "\n";
        return eit::io::kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "eitlab " << opts.command << ": " << e.what() << "\n";
        return eit::io::exit_code_for(e);
    }
}
