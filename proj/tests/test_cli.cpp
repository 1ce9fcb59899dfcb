#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <doctest.h>
#include <json.hpp>

#include "nvgrad/config.hpp"
#include "nvgrad/errors.hpp"
#include "nvgrad/runner.hpp"

using namespace nvgrad;
using namespace nvgrad::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nvgrad_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_text(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path path = dir / name;
    std::ofstream(path) << text;
    return path;
}

int run_binary(const std::string& args) {
    const char* exe = std::getenv("NVGRAD_CLI");
    REQUIRE(exe != nullptr);
    const std::string cmd = std::string("\"") + exe + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("an empty document yields the calibrated preset") {
    const AppConfig config = config_from_json(json::object());
    CHECK(config.experiment.bias_field_g == 128.0);
    CHECK(config.experiment.coil_current_ma == 250.0);
    CHECK(config.array.site_count == 4);
    CHECK(config.array.site_pitch_nm == 100.0);
    CHECK(config.limits.max_current_ma == 700.0);
    CHECK(config.esr.points == 512);
    CHECK(config.fourier.tau_us == 2.0);

    // and matches default_config() exactly
    CHECK(config_digest(config) == config_digest(default_config()));
}

TEST_CASE("range violations raise RangeError naming the field") {
    json doc{{"experiment", {{"coil_current_ma", -1.0}}}};
    CHECK_THROWS_WITH_AS(config_from_json(doc),
                         doctest::Contains("experiment.coil_current_ma"), RangeError);

    // over the air-cooled limit: the message cites the limit itself
    doc = json{{"experiment", {{"coil_current_ma", 2000.0}}}};
    CHECK_THROWS_WITH_AS(config_from_json(doc), doctest::Contains("700"), RangeError);

    // the same current is fine once water cooling raises the limit
    doc["limits"] = {{"cooling", "water"}, {"max_current_ma", 2500.0}};
    CHECK(config_from_json(doc).experiment.coil_current_ma == 2000.0);

    doc = json{{"experiment", {{"esr", {{"points", 1}}}}}};
    CHECK_THROWS_AS(config_from_json(doc), RangeError);
}

TEST_CASE("shape problems raise ConfigError") {
    CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"no_such_section", 1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"experiment", {{"bias_field_g", "high"}}}}),
                    ConfigError);

    const auto dir = fresh_dir("badcfg");
    const auto bad = write_text(dir, "bad.json", "{ definitely not json");
    CHECK_THROWS_AS(load_config(bad.string()), ConfigError);
    CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
}

TEST_CASE("the config digest is stable and field-sensitive") {
    AppConfig a = default_config();
    AppConfig b = default_config();
    CHECK(config_digest(a) == config_digest(b));
    b.experiment.coil_current_ma = 251.0;
    CHECK(config_digest(a) != config_digest(b));
    b = default_config();
    b.fourier.site = "B";
    CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("fourier run writes the full output set and a truthful manifest") {
    const auto dir = fresh_dir("fourier");
    AppConfig config = default_config();
    config.experiment.noiseless = true;
    const RunManifest manifest = run_experiment("fourier", config, dir.string());

    CHECK(manifest.subcommand == "fourier");
    CHECK(manifest.config_digest == config_digest(config));
    for (const auto& name : manifest.outputs) {
        CAPTURE(name);
        CHECK(fs::exists(dir / name));
        CHECK(fs::file_size(dir / name) > 0);
    }
    const CsvTable kspace = read_csv((dir / "kspace.csv").string());
    REQUIRE(kspace.columns.size() == 3);
    CHECK(kspace.columns[0].size() == 512);
    CHECK(fs::exists(dir / "image.csv"));
    CHECK(fs::exists(dir / "sites.json"));
    CHECK(fs::exists(dir / "array.json"));

    const json sites = json::parse(slurp(dir / "sites.json"));
    CHECK(sites["peaks"].size() == 4);

    // round trip through read_manifest
    const RunManifest back = read_manifest(dir.string());
    CHECK(back.config_digest == manifest.config_digest);
    CHECK(back.seed == manifest.seed);
    CHECK(back.outputs == manifest.outputs);
}

TEST_CASE("identical (config, seed) reruns are byte-identical") {
    const auto dir_a = fresh_dir("rerun_a");
    const auto dir_b = fresh_dir("rerun_b");
    AppConfig config = default_config();
    config.esr.points = 96;
    RunOverrides overrides;
    overrides.seed = 77;
    run_experiment("esr", config, dir_a.string(), overrides);
    run_experiment("esr", config, dir_b.string(), overrides);
    for (const auto* name : {"esr_spectrum.csv", "esr_residuals.csv", "esr_fit.json"})
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));

    // a different seed changes the data
    overrides.seed = 78;
    const auto dir_c = fresh_dir("rerun_c");
    run_experiment("esr", config, dir_c.string(), overrides);
    CHECK(slurp(dir_a / "esr_spectrum.csv") != slurp(dir_c / "esr_spectrum.csv"));
}

TEST_CASE("plan run reports the demonstrated operating point") {
    const auto dir = fresh_dir("plan");
    run_experiment("plan", default_config(), dir.string());
    const json report = json::parse(slurp(dir / "plan.json"));
    CHECK(report["dynamic_range"].get<double>() == doctest::Approx(10.0));
    CHECK(report["feasible"].get<bool>());
    const CsvTable sweep = read_csv((dir / "plan_sweep.csv").string());
    CHECK(sweep.columns[0].size() >= 2);
}

TEST_CASE("emit_plot_data merges outputs and overlays the fitted peaks") {
    const auto dir = fresh_dir("plot");
    AppConfig config = default_config();
    config.experiment.noiseless = true;
    config.esr.points = 256;
    run_experiment("esr", config, dir.string());
    const fs::path dest = dir / "plot.csv";
    emit_plot_data(dir.string(), dest.string());

    const std::string text = slurp(dest);
    CHECK(text.find("esr_spectrum") != std::string::npos);
    CHECK(text.find("esr_peak_0") != std::string::npos);
    CHECK(text.find("esr_peak_3") != std::string::npos);

    const auto empty = fresh_dir("plot_empty");
    CHECK_THROWS_AS(emit_plot_data(empty.string(), (empty / "p.csv").string()),
                    MissingInputError);
}

TEST_CASE("a failed run leaves no partial outputs behind") {
    const auto dir = fresh_dir("cleanup");
    AppConfig config = default_config();
    config.fourier.site = "Z";  // no such site
    CHECK_THROWS(run_experiment("fourier", config, dir.string()));
    CHECK_FALSE(fs::exists(dir / "manifest.json"));
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        (void)entry;
        ++files;
    }
    CHECK(files == 0);

    CHECK_THROWS_AS(run_experiment("warp", default_config(), dir.string()), ConfigError);
}

TEST_CASE("the binary maps error classes to exit codes") {
    const auto dir = fresh_dir("exitcodes");

    // clean run
    CHECK(run_binary("plan --out \"" + (dir / "ok").string() + "\"") == 0);

    // unknown flag / unknown subcommand: CLI parse error
    CHECK(run_binary("frobnicate") == 2);
    CHECK(run_binary("plan --no-such-flag") == 2);

    // malformed config document
    const auto garbage = write_text(dir, "garbage.json", "not json at all");
    CHECK(run_binary("esr --config \"" + garbage.string() + "\"") == 2);

    // well-formed but out of physical range
    const auto hot = write_text(dir, "hot.json",
                                R"({"experiment": {"coil_current_ma": 2000}})");
    CHECK(run_binary("esr --config \"" + hot.string() + "\"") == 3);

    // plot with nothing to plot
    CHECK(run_binary("plot --out \"" + (dir / "nothing").string() + "\"") == 4);
}

TEST_CASE("the binary honors seed and noiseless overrides") {
    const auto dir = fresh_dir("binary_rerun");
    const std::string cfg =
        write_text(dir, "cfg.json",
                   R"({"experiment": {"esr": {"points": 64}}})")
            .string();
    const std::string a = (dir / "a").string();
    const std::string b = (dir / "b").string();
    CHECK(run_binary("esr --config \"" + cfg + "\" --seed 5 --out \"" + a + "\"") == 0);
    CHECK(run_binary("esr --config \"" + cfg + "\" --seed 5 --out \"" + b + "\"") == 0);
    CHECK(slurp(fs::path(a) / "esr_spectrum.csv") == slurp(fs::path(b) / "esr_spectrum.csv"));

    const std::string c = (dir / "c").string();
    CHECK(run_binary("esr --config \"" + cfg + "\" --noiseless --seed 5 --out \"" + c +
                     "\"") == 0);
    // noiseless: sigma column all zero, and the data differ from the noisy run
    const CsvTable quiet = read_csv((fs::path(c) / "esr_spectrum.csv").string());
    for (const double s : quiet.columns[2]) CHECK(s == 0.0);
    CHECK(slurp(fs::path(a) / "esr_spectrum.csv") != slurp(fs::path(c) / "esr_spectrum.csv"));
}
