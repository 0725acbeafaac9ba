#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "eitlab/errors.hpp"
#include "eitlab/fitting.hpp"
#include "eitlab/io/commands.hpp"
#include "eitlab/io/config.hpp"
#include "eitlab/io/csv.hpp"
#include "eitlab/io/manifest.hpp"

using namespace eit;
using namespace eit::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    static const auto stamp = std::random_device{}();
    const fs::path p = fs::temp_directory_path() / ("eitlab_test_" + std::to_string(stamp)) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text, "cfg.yaml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("empty config gives the defaults") {
    const RunConfig c = parse_config("", "x");
    CHECK(c.sweep.powers.size() == 12);
    CHECK(c.sweep.powers.front() == doctest::Approx(1e-4));
    CHECK(c.sweep.powers.back() == doctest::Approx(1.2e-3));
    CHECK(c.sweep.temperatures.size() == 5);
    CHECK(c.cell.temperature == 353.15);
    CHECK(c.system.gamma_bc_hz == 1.5e3);
    CHECK(c.seed == 0);
}

TEST_CASE("canonical YAML round-trips exactly") {
    RunConfig c;
    c.system.gamma_bc_hz = 1234.5678901234567;
    c.system.omega_c_hz = 1e5 / 3;
    c.cell.label = "cell \"A\"";
    c.cell.pump_cross_section = 4e-18;
    c.seed = 18446744073709551ull;
    const std::string y = c.to_yaml();
    const RunConfig back = parse_config(y, "echo");
    CHECK(back.to_yaml() == y);
    CHECK(back.system.gamma_bc_hz == c.system.gamma_bc_hz);
    CHECK(*back.system.omega_c_hz == *c.system.omega_c_hz);
    CHECK(back.cell.label == c.cell.label);
}

TEST_CASE("config errors name the file, line and key") {
    const auto e1 = config_error("cell:\n  length_m: 0.05\n  lenght_m: 2\n");
    CHECK(contains(e1, "cfg.yaml:3:3"));
    CHECK(contains(e1, "cell.lenght_m"));
    CHECK(contains(e1, "unknown key"));

    const auto e2 = config_error("system:\n  gamma_bc: 1500\n");
    CHECK(contains(e2, "gamma_bc_hz"));
    CHECK(contains(e2, "unit suffix"));

    CHECK(contains(config_error("system:\n  gamma_bc_hz: fast\n"), "expected a number"));
    CHECK(contains(config_error("numerics:\n  n_slices: 4\n"), "n_slices"));
    CHECK(contains(config_error("constants:\n  hbar_j_s: 1.0e-34\n"), "CODATA"));
    CHECK(contains(config_error("sweep:\n  powers_w: [1e-3, 5e-4]\n"), "ascending"));
    CHECK(contains(config_error("cell: [1, 2]\n"), "expected a mapping"));
    CHECK(contains(config_error("cell:\n  temperature_k: 500\n"), "cell.temperature_k"));
    CHECK(contains(config_error("a: [1,\n"), "cfg.yaml:"));
}

TEST_CASE("restating fixed constants is allowed") {
    CHECK_NOTHROW(parse_config("constants:\n  hbar_j_s: 1.054571817e-34\n  boltzmann_j_per_k: 1.380649e-23\n"));
}

TEST_CASE("power grid from start, stop and count") {
    const auto c = parse_config("sweep:\n  power_start_w: 1e-4\n  power_stop_w: 1e-3\n  power_count: 10\n");
    REQUIRE(c.sweep.powers.size() == 10);
    CHECK(c.sweep.powers[9] == doctest::Approx(1e-3));
    CHECK_THROWS_AS(parse_config("sweep:\n  power_start_w: 1e-4\n"), ConfigError);
}

TEST_CASE("builders convert to angular units") {
    const auto c = parse_config("system:\n  gamma_bc_hz: 1000\n  omega_c_hz: 2000\n");
    const auto s = c.lambda_system();
    CHECK(s.gamma_bc == doctest::Approx(hz_to_rad(1000)));
    CHECK(s.omega_c == doctest::Approx(hz_to_rad(2000)));
    CHECK(s.gamma() == doctest::Approx(hz_to_rad(5.75e6)));
    CHECK(s.omega_b == 0.0);
    const auto p = parse_config("").lambda_system();
    CHECK(p.omega_c == doctest::Approx(rabi_from_power(1e-3, 0.010)));
}

TEST_CASE("number formatting is shortest round-trip") {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 123456789.0}) {
        const auto s = format_number(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-0.0) == "0");
}

TEST_CASE("csv round trip for scans and series") {
    ResonanceScan s;
    s.delta2 = {-hz_to_rad(1000), 0.0, hz_to_rad(1000)};
    s.absorption = {2.0, 1.0, 2.0};
    s.transmission = {std::exp(-0.1), std::exp(-0.05), std::exp(-0.1)};
    s.meta.temperature_k = 353.15;
    const auto text = render_csv(scan_table(s));
    CHECK(text.rfind("# eitlab-csv v1 scan\n", 0) == 0);
    CHECK(contains(text, "delta2_hz,absorption_per_m,transmission\n"));
    const auto back = scan_from_table(parse_csv(text));
    CHECK(back.absorption == s.absorption);
    CHECK(back.transmission == s.transmission);
    CHECK(back.delta2[2] == doctest::Approx(s.delta2[2]).epsilon(1e-15));
    CHECK(*back.meta.temperature_k == 353.15);

    LinewidthSeries ser;
    ser.samples = {{1e-4, 1e5, 2e4, 100.0}, {2e-4, 1.4e5, 3e4, 150.0}};
    ser.temperature = 333.15;
    ser.configuration = "hyperfine";
    const auto st = render_csv(series_table(ser));
    CHECK(contains(st, "power_w,omega_c_hz,fwhm_hz,fwhm_sigma_hz\n"));
    const auto sb = series_from_table(parse_csv(st));
    CHECK(sb.configuration == "hyperfine");
    CHECK(sb.samples[1].fwhm == doctest::Approx(3e4).epsilon(1e-15));
    CHECK(*sb.samples[1].fwhm_sigma == doctest::Approx(150.0).epsilon(1e-15));
}

TEST_CASE("csv readers reject unknown versions and malformed rows") {
    CHECK_THROWS_AS(parse_csv("# eitlab-csv v2 scan\ndelta2_hz,transmission\n0,1\n"), DataError);
    CHECK_THROWS_AS(parse_csv("delta2_hz,transmission\n0,1\n"), DataError);
    CHECK_THROWS_AS(parse_csv("# eitlab-csv v1 scan\ndelta2_hz,transmission\n0,1,2\n"), DataError);
    const auto t = parse_csv("# eitlab-csv v1 scan\ndelta2_hz,transmission\n0,abc\n");
    CHECK_THROWS_AS(t.numbers("transmission"), DataError);
    CHECK_THROWS_AS(t.numbers("absorption_per_m"), DataError);
    CHECK_THROWS_AS(series_from_table(t), DataError);
}

TEST_CASE("sha256 of a known message") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("exit codes follow the error hierarchy") {
    CHECK(exit_code_for(ConfigError("x")) == 2);
    CHECK(exit_code_for(RangeError("x")) == 2);
    CHECK(exit_code_for(DataError("x")) == 3);
    CHECK(exit_code_for(NoDip("x")) == 3);
    CHECK(exit_code_for(NoConvergence("x")) == 4);
    CHECK(exit_code_for(QuadratureFailure("x")) == 4);
}

TEST_CASE("simulate-scan: 401 rows with transparency maximal at line center") {
    const auto dir = scratch_dir("scan");
    const auto r = run_command({"simulate-scan", std::nullopt, std::nullopt, dir});
    const auto t = read_csv(dir / "scan.csv");
    CHECK(t.rows.size() == 401);
    const auto d = t.numbers("delta2_hz");
    const auto tr = t.numbers("transmission");
    const auto at = std::max_element(tr.begin(), tr.end()) - tr.begin();
    CHECK(d[static_cast<std::size_t>(at)] == 0.0);
    CHECK(fs::exists(dir / "simulate-scan.manifest.yaml"));
}

TEST_CASE("simulate-scan: no dephasing gives unit transmission at center") {
    const auto dir = scratch_dir("perfect");
    const auto cfg = dir / "c.yaml";
    write_text_file(cfg, "system:\n  gamma_bc_hz: 0\n");
    run_command({"simulate-scan", cfg, std::nullopt, dir});
    const auto t = read_csv(dir / "scan.csv");
    const auto d = t.numbers("delta2_hz");
    const auto tr = t.numbers("transmission");
    const auto mid = static_cast<std::size_t>(std::find(d.begin(), d.end(), 0.0) - d.begin());
    CHECK(std::abs(tr[mid] - 1.0) < 1e-9);
}

TEST_CASE("simulate-scan: numeric width matches the dephasing law") {
    const auto dir = scratch_dir("fig1");
    const auto r = run_command({"simulate-scan", std::nullopt, std::nullopt, dir});
    const auto scan = scan_from_table(read_csv(dir / "scan.csv"));
    const RunConfig c;
    const auto s = c.lambda_system();
    const double law = fwhm_dephasing(s.gamma_bc, s.omega_c, c.w_d(), s.gamma());
    CHECK(fwhm_numeric(scan) == doctest::Approx(law).epsilon(1e-3));
}

TEST_CASE("runs are reproducible from their manifest") {
    const auto a = scratch_dir("rep_a");
    const auto b = scratch_dir("rep_b");
    const auto cfg = a / "c.yaml";
    write_text_file(cfg, "system:\n  gamma_bc_hz: 900\nseed: 42\n");
    run_command({"synth", cfg, std::nullopt, a, std::nullopt, std::nullopt, 2.0});
    run_command({"synth", a / "synth.manifest.yaml", std::nullopt, b});
    for (const char* f : {"synth_scan.csv", "synth_series.csv"})
        CHECK(read_text_file(a / f) == read_text_file(b / f));
    CHECK(contains(read_text_file(b / "synth.manifest.yaml"), "noise_pct: 2"));
    CHECK(contains(read_text_file(b / "synth.manifest.yaml"), "seed: 42"));
}

TEST_CASE("synth: fixed seed is deterministic, zero noise equals the simulation") {
    const auto a = scratch_dir("syn_a");
    const auto b = scratch_dir("syn_b");
    run_command({"synth", std::nullopt, std::nullopt, a, 7, std::nullopt, 1.0});
    run_command({"synth", std::nullopt, std::nullopt, b, 7, std::nullopt, 1.0});
    CHECK(read_text_file(a / "synth_series.csv") == read_text_file(b / "synth_series.csv"));
    const auto c = scratch_dir("syn_c");
    run_command({"synth", std::nullopt, std::nullopt, c, 8, std::nullopt, 1.0});
    CHECK(read_text_file(a / "synth_series.csv") != read_text_file(c / "synth_series.csv"));

    const auto z = scratch_dir("syn_z");
    run_command({"synth", std::nullopt, std::nullopt, z, 7, std::nullopt, 0.0});
    run_command({"simulate-scan", std::nullopt, std::nullopt, z});
    CHECK(read_text_file(z / "synth_scan.csv") == read_text_file(z / "scan.csv"));
}

TEST_CASE("fit-series on a simulated sweep recovers gamma_bc") {
    const auto dir = scratch_dir("fit");
    run_command({"sweep-power", std::nullopt, std::nullopt, dir});
    const auto r = run_command({"fit-series", std::nullopt, dir / "series.csv", dir, std::nullopt, "linear"});
    const auto t = read_csv(dir / "fit_linear.csv");
    CHECK(t.meta("model") == "linear");
    const auto names = t.rows;
    bool found = false;
    for (const auto& row : t.rows)
        if (row[0] == "gamma_bc") {
            found = true;
            CHECK(std::stod(row[1]) == doctest::Approx(1500.0).epsilon(1e-6));
            CHECK(row[3] == "hz");
        }
    CHECK(found);
    CHECK(contains(r.report, "gamma_bc"));
}

TEST_CASE("commands reject bad models and missing inputs") {
    const auto dir = scratch_dir("bad");
    CHECK_THROWS_AS(run_command({"simulate-scan", std::nullopt, std::nullopt, dir, std::nullopt, "quantum"}),
                    ConfigError);
    CHECK_THROWS_AS(run_command({"fit-scan", std::nullopt, std::nullopt, dir}), ConfigError);
    CHECK_THROWS_AS(run_command({"frobnicate", std::nullopt, std::nullopt, dir}), ConfigError);
    CHECK_THROWS_AS(run_command({"synth", std::nullopt, std::nullopt, dir, std::nullopt, std::nullopt, -1.0}),
                    ConfigError);
}

TEST_CASE("frozen fixtures: shipped configs load and the stored series still fits") {
    const fs::path root = EITLAB_SOURCE_DIR;
    const auto z = load_config(root / "configs" / "zeeman.yaml");
    const auto h = load_config(root / "configs" / "hyperfine.yaml");
    CHECK(z.cell.configuration == "zeeman");
    CHECK(h.cell.pump_cross_section == 4e-18);

    const auto s = series_from_table(read_csv(root / "tests" / "fixtures" / "zeeman_series.csv"));
    REQUIRE(s.size() == 12);
    const auto f = fit_linear(s);
    CHECK(rad_to_hz(f.value("gamma_bc")) == doctest::Approx(1500.0).epsilon(1e-9));

    const auto dir = scratch_dir("fixture");
    run_command({"sweep-power", root / "configs" / "zeeman.yaml", std::nullopt, dir});
    CHECK(read_text_file(dir / "series.csv") == read_text_file(root / "tests" / "fixtures" / "zeeman_series.csv"));
}
