#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nvgrad/config.hpp"
#include "nvgrad/errors.hpp"
#include "nvgrad/runner.hpp"

namespace {

int dispatch(const std::string& subcommand, const std::string& config_path,
             const std::string& out_dir, const nvgrad::cli::RunOverrides& overrides) {
    using namespace nvgrad;

    if (subcommand == "plot") {
        cli::emit_plot_data(out_dir, out_dir + "/plot.csv");
        std::cout << "wrote " << out_dir << "/plot.csv\n";
        return 0;
    }

    cli::AppConfig config =
        config_path.empty() ? cli::default_config() : cli::load_config(config_path);
    const auto manifest = cli::run_experiment(subcommand, config, out_dir, overrides);
    std::cout << subcommand << ": " << manifest.outputs.size() << " outputs in " << out_dir
              << " (digest " << manifest.config_digest << ", seed " << manifest.seed << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic simulator and analysis toolkit for frequency-encoded NV arrays"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int points = 0;
    bool points_set = false;
    bool noiseless = false;

    app.add_option("--config", config_path, "JSON configuration file (empty: calibrated preset)");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "override the RNG seed")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--points", points, "override the sweep point count")
        ->each([&](const std::string&) { points_set = true; });
    app.add_flag("--noiseless", noiseless, "disable photon shot noise");

    const char* subs[] = {"esr",      "rabi",      "echo", "fourier",
                          "select2d", "calibrate", "plan", "plot"};
    const char* descs[] = {"swept-frequency CW ESR spectrum + multi-Lorentzian fit",
                           "per-site Rabi traces + sinusoid fits",
                           "Hahn echo / NMR trace + modulation fit",
                           "k-space phase encoding + real-space reconstruction",
                           "2D selection protocol on a lattice",
                           "gradient-per-current calibration sweep",
                           "dynamic-range / bandwidth feasibility report",
                           "merge a finished run into plot-ready CSV"};
    for (std::size_t i = 0; i < std::size(subs); ++i) app.add_subcommand(subs[i], descs[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    nvgrad::cli::RunOverrides overrides;
    if (seed_set) overrides.seed = seed;
    if (points_set) overrides.points = points;
    overrides.noiseless = noiseless;

    const std::string subcommand = app.get_subcommands().front()->get_name();
    try {
        return dispatch(subcommand, config_path, out_dir, overrides);
    } catch (const nvgrad::ConfigError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const nvgrad::RangeError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 3;
    } catch (const nvgrad::MissingInputError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 4;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 5;
    }
}
