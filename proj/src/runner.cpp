#include "nvgrad/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nvgrad/analysis.hpp"
#include "nvgrad/errors.hpp"
#include "nvgrad/imaging.hpp"

namespace nvgrad::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_full(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return out;
}

json fit_to_json(const analysis::FitResult& fit) {
    json j;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["residual_norm"] = fit.residual_norm;
    json params = json::object();
    for (std::size_t i = 0; i < fit.names.size(); ++i)
        params[fit.names[i]] = {{"value", fit.parameters[i]},
                                {"confidence_67", std::isfinite(fit.confidence[i])
                                                      ? json(fit.confidence[i])
                                                      : json("unreliable")}};
    j["parameters"] = std::move(params);
    return j;
}

// Everything a run creates is tracked so a failure leaves no partial output.
class OutputSet {
  public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    fs::path path(const std::string& name) {
        names_.push_back(name);
        return dir_ / name;
    }

    void write_json(const std::string& name, const json& doc) {
        std::ofstream out(path(name));
        out << doc.dump(2) << '\n';
        if (!out) throw NumericError("failed writing " + name);
    }

    const std::vector<std::string>& names() const { return names_; }

    void discard() {
        for (const auto& name : names_) {
            std::error_code ec;
            fs::remove(dir_ / name, ec);
        }
    }

  private:
    fs::path dir_;
    std::vector<std::string> names_;
};

double site_resonance_mhz(const AppConfig& config, const array_model::NVArray& array,
                          const Vec3& site_center) {
    const auto& e = config.experiment;
    Vec3 b = array.nv_axis * e.bias_field_g;
    if (e.coil_current_ma != 0.0)
        b += coil::coil_field_at(e.geometry, e.coil_current_ma, site_center, array.nv_axis).b_vec;
    return spin::esr_frequencies(b, 0, array.nv_axis, e.nv).f_plus_mhz;
}

double site_larmor_mhz(const AppConfig& config, const Vec3& site_center, const Vec3& nv_axis) {
    const auto& e = config.experiment;
    if (e.coil_current_ma == 0.0) return 0.0;
    const auto fs = coil::coil_field_at(e.geometry, e.coil_current_ma, site_center, nv_axis);
    return spin::nmr_larmor(fs.b_perp, e.nv);
}

void run_esr(const AppConfig& config, const array_model::NVArray& array, OutputSet& out) {
    const auto spectrum = sequence::run_cw_esr(array, config.experiment, config.esr.f_lo_mhz,
                                               config.esr.f_hi_mhz, config.esr.points);
    write_csv(out.path("esr_spectrum.csv"),
              {"frequency_mhz", "contrast", "noise_sigma"},
              {spectrum.frequency_mhz, spectrum.contrast, spectrum.noise_sigma});
    const auto fit = analysis::fit_multi_lorentzian(spectrum, config.array.site_count);
    out.write_json("esr_fit.json", fit_to_json(fit));
    write_csv(out.path("esr_residuals.csv"), {"frequency_mhz", "residual"},
              {spectrum.frequency_mhz, fit.residuals});
}

void run_rabi_all(const AppConfig& config, const array_model::NVArray& array, OutputSet& out) {
    const auto tau = linspace(0.0, config.rabi.tau_max_us, config.rabi.points);
    json fits = json::object();
    for (std::size_t s = 0; s < array.sites.size(); ++s) {
        const auto& site = array.sites[s];
        sequence::ExperimentConfig e = config.experiment;
        e.mw_frequency_mhz = site_resonance_mhz(config, array, site.center);
        e.seed = config.experiment.seed + 0x9e3779b97f4a7c15ULL * (s + 1);
        const auto trace = sequence::run_rabi(array, e, tau);
        write_csv(out.path("rabi_" + site.label + ".csv"),
                  {"tau_us", "contrast", "noise_sigma"},
                  {trace.time_us, trace.signal, trace.noise_sigma});
        const auto fit = analysis::fit_damped_sinusoid(trace);
        json jf = fit_to_json(fit);
        jf["mw_frequency_mhz"] = e.mw_frequency_mhz;
        fits[site.label] = std::move(jf);
    }
    out.write_json("rabi_fit.json", fits);
}

void run_echo(const AppConfig& config, const array_model::NVArray& array, OutputSet& out) {
    const auto tau =
        linspace(config.echo.tau_min_us, config.echo.tau_max_us, config.echo.points);
    const std::optional<std::string> site =
        config.echo.site.empty() ? std::nullopt : std::optional<std::string>(config.echo.site);
    const auto trace = sequence::run_hahn_echo(array, config.experiment, tau, site);
    write_csv(out.path("echo_trace.csv"), {"tau_us", "echo_signal", "noise_sigma"},
              {trace.time_us, trace.signal, trace.noise_sigma});

    // The echo modulation rides on a known-hyperfine carrier, so fit the
    // full physical model rather than a bare sinusoid.
    const auto& e = config.experiment;
    double f0 = 0.1, t20 = 4.5;
    for (const auto& st : array.sites) {
        if (site && st.label != *site) continue;
        f0 = site_larmor_mhz(config, st.center, array.nv_axis);
        if (!st.nvs.empty()) t20 = st.nvs.front().t2_us;
        if (site) break;
    }
    const double f_hyper = e.nv.hyperfine_mhz;
    const double stretch = e.echo_stretch;
    analysis::ModelFn model = [f_hyper, stretch](const std::vector<double>& p, double t) {
        return spin::echo_signal_model(t, std::abs(p[2]), stretch, f_hyper, std::abs(p[0]),
                                       p[1]);
    };
    auto fit = analysis::fit_least_squares(model, trace.time_us, trace.signal,
                                           {std::max(f0, 1e-3), e.modulation_depth, t20},
                                           {"modulation_mhz", "depth", "t2_us"});
    fit.parameters[0] = std::abs(fit.parameters[0]);
    fit.parameters[2] = std::abs(fit.parameters[2]);
    json jf = fit_to_json(fit);
    jf["b_perp_g"] =
        fit.parameters[0] / (e.nv.enhancement_factor * e.nv.gamma_n_khz_per_g * 1e-3);
    if (site) jf["site"] = *site;
    out.write_json("echo_fit.json", jf);
    write_csv(out.path("echo_residuals.csv"), {"tau_us", "residual"},
              {trace.time_us, fit.residuals});
}

void run_fourier(const AppConfig& config, const array_model::NVArray& array, OutputSet& out) {
    const auto amplitudes = linspace(0.0, config.fourier.g_max_g_per_nm, config.fourier.points);
    const std::optional<std::string> site = config.fourier.site.empty()
                                                ? std::nullopt
                                                : std::optional<std::string>(config.fourier.site);
    const auto record = sequence::run_fourier_kspace(array, config.experiment,
                                                     config.fourier.tau_us, amplitudes, site);
    write_csv(out.path("kspace.csv"), {"k_per_nm", "signal", "noise_sigma"},
              {record.k_per_nm, record.signal, record.noise_sigma});

    const auto image = imaging::reconstruct_real_space(record);
    write_csv(out.path("image.csv"), {"position_nm", "magnitude"},
              {image.position_nm, image.magnitude});

    json meta;
    meta["tau_us"] = record.tau_us;
    meta["resolution_nm"] = image.resolution_nm;
    meta["decoherence_warning"] = record.decoherence_warning;
    if (site) meta["site"] = *site;
    const int expected = site ? 1 : config.array.site_count;
    const auto peaks = imaging::locate_sites(image, expected);
    json jp = json::array();
    for (const auto& peak : peaks)
        jp.push_back({{"center_nm", peak.center_nm},
                      {"fwhm_nm", peak.fwhm_nm},
                      {"amplitude", peak.amplitude}});
    meta["peaks"] = std::move(jp);
    out.write_json("sites.json", meta);
}

void run_select2d(const AppConfig& config, OutputSet& out) {
    sequence::Lattice2DSpec lattice;
    lattice.rows = config.select2d.rows;
    lattice.cols = config.select2d.cols;
    lattice.pitch_nm = config.select2d.pitch_nm;
    lattice.t2_star_us = config.array.t2_star_us;
    const auto result = sequence::run_2d_selection(
        lattice, config.experiment, config.select2d.target_row, config.select2d.target_col,
        config.select2d.gradient_x_g_per_nm, config.select2d.gradient_y_g_per_nm);

    std::vector<double> rows, cols, pol;
    for (int r = 0; r < result.rows; ++r)
        for (int c = 0; c < result.cols; ++c) {
            rows.push_back(r);
            cols.push_back(c);
            pol.push_back(result.at(r, c));
        }
    write_csv(out.path("selection.csv"), {"row", "col", "polarization"}, {rows, cols, pol});
    out.write_json("selection.json", {{"success", result.success},
                                      {"target_row", config.select2d.target_row},
                                      {"target_col", config.select2d.target_col},
                                      {"rows", result.rows},
                                      {"cols", result.cols}});
}

void run_calibrate(const AppConfig& config, const array_model::NVArray& array, OutputSet& out) {
    const auto currents =
        linspace(config.calibrate.i_min_ma, config.calibrate.i_max_ma, config.calibrate.points);
    const Vec3 center = config.array.origin + config.array.gradient_axis *
                                                  (config.array.site_pitch_nm *
                                                   (config.array.site_count - 1) / 2.0);
    const Vec3 axis = normalized(config.array.gradient_axis);
    std::vector<double> gradients;
    for (const double i_ma : currents) {
        const auto hi = coil::coil_field_at(config.experiment.geometry, i_ma,
                                            center + axis * 0.5, array.nv_axis);
        const auto lo = coil::coil_field_at(config.experiment.geometry, i_ma,
                                            center - axis * 0.5, array.nv_axis);
        gradients.push_back(hi.b_axial - lo.b_axial);
    }
    write_csv(out.path("calibration.csv"), {"current_ma", "gradient_g_per_nm"},
              {currents, gradients});

    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < currents.size(); ++i) points.emplace_back(currents[i], gradients[i]);
    const auto fit = analysis::calibrate_gradient_per_current(points);
    out.write_json("calibration.json", {{"slope_g_per_nm_per_a", fit.slope},
                                        {"confidence_67", fit.confidence}});
}

void run_plan(const AppConfig& config, OutputSet& out) {
    const auto& p = config.plan;
    const auto cooling = config.limits.cooling_mode;
    const auto report = analysis::plan_feasibility(p.length_nm, p.separation_nm, p.omega_mhz,
                                                   cooling, config.limits, config.planner,
                                                   config.experiment.nv);
    out.write_json("plan.json", {{"dynamic_range", report.dynamic_range},
                                 {"required_detuning_mhz", report.required_detuning_mhz},
                                 {"required_gradient_g_per_nm", report.required_gradient_g_per_nm},
                                 {"required_current_ma", report.required_current_ma},
                                 {"bandwidth_mhz", report.bandwidth_mhz},
                                 {"thermal_rise_k", report.thermal_rise_k},
                                 {"fidelity", report.fidelity},
                                 {"feasible", report.feasible}});

    std::vector<double> drs, bws, currents, thermals, feas;
    const double dr_lo = 2.0, dr_hi = 50.0;
    for (int i = 0; i < p.sweep_points; ++i) {
        const double t = static_cast<double>(i) / (p.sweep_points - 1);
        const double dr = dr_lo * std::pow(dr_hi / dr_lo, t);
        const auto rep =
            analysis::plan_feasibility(dr * p.separation_nm, p.separation_nm, p.omega_mhz,
                                       cooling, config.limits, config.planner,
                                       config.experiment.nv);
        drs.push_back(dr);
        bws.push_back(rep.bandwidth_mhz);
        currents.push_back(rep.required_current_ma);
        thermals.push_back(rep.thermal_rise_k);
        feas.push_back(rep.feasible ? 1.0 : 0.0);
    }
    write_csv(out.path("plan_sweep.csv"),
              {"dynamic_range", "bandwidth_mhz", "required_current_ma", "thermal_rise_k",
               "feasible"},
              {drs, bws, currents, thermals, feas});
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& headers,
               const std::vector<std::vector<double>>& columns) {
    if (headers.size() != columns.size())
        throw std::invalid_argument("write_csv: header/column count mismatch");
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns)
        if (col.size() != n) throw std::invalid_argument("write_csv: ragged columns");

    std::ofstream out(path);
    if (!out) throw NumericError("write_csv: cannot open " + path);
    for (std::size_t j = 0; j < headers.size(); ++j)
        out << headers[j] << (j + 1 < headers.size() ? ',' : '\n');
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < columns.size(); ++j)
            out << format_full(columns[j][i]) << (j + 1 < columns.size() ? ',' : '\n');
    if (!out) throw NumericError("write_csv: write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingInputError("read_csv: cannot open " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw MissingInputError("read_csv: empty file " + path);
    std::stringstream head(line);
    std::string cell;
    while (std::getline(head, cell, ',')) table.headers.push_back(cell);
    table.columns.resize(table.headers.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        for (auto& col : table.columns) {
            if (!std::getline(row, cell, ','))
                throw MissingInputError("read_csv: short row in " + path);
            col.push_back(std::stod(cell));
        }
    }
    return table;
}

RunManifest run_experiment(const std::string& subcommand, AppConfig config,
                           const std::string& out_dir, const RunOverrides& overrides) {
    if (overrides.seed) config.experiment.seed = *overrides.seed;
    if (overrides.noiseless) config.experiment.noiseless = true;
    if (overrides.points) {
        const int n = *overrides.points;
        if (n < 2) throw RangeError("--points must be >= 2");
        config.esr.points = n;
        config.rabi.points = n;
        config.echo.points = n;
        config.fourier.points = std::max(n, 8);
        config.calibrate.points = n;
        config.plan.sweep_points = n;
    }

    fs::create_directories(out_dir);
    OutputSet out{fs::path(out_dir)};
    const auto start = std::chrono::steady_clock::now();

    try {
        if (subcommand == "plan") {
            run_plan(config, out);
        } else if (subcommand == "select2d") {
            run_select2d(config, out);
        } else {
            const auto array = array_model::generate_array(config.array, config.experiment.seed);
            out.write_json("array.json", array_model::to_json(array));
            if (subcommand == "esr")
                run_esr(config, array, out);
            else if (subcommand == "rabi")
                run_rabi_all(config, array, out);
            else if (subcommand == "echo")
                run_echo(config, array, out);
            else if (subcommand == "fourier")
                run_fourier(config, array, out);
            else if (subcommand == "calibrate")
                run_calibrate(config, array, out);
            else
                throw ConfigError("unknown subcommand: " + subcommand);
        }
    } catch (...) {
        out.discard();
        throw;
    }

    RunManifest manifest;
    manifest.config_digest = config_digest(config);
    manifest.seed = config.experiment.seed;
    manifest.subcommand = subcommand;
    manifest.outputs = out.names();
    manifest.duration_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();

    json doc = {{"config_digest", manifest.config_digest},
                {"seed", manifest.seed},
                {"tool_version", manifest.tool_version},
                {"subcommand", manifest.subcommand},
                {"outputs", manifest.outputs},
                {"duration_ms", manifest.duration_ms}};
    std::ofstream mf(fs::path(out_dir) / "manifest.json");
    mf << doc.dump(2) << '\n';
    if (!mf) {
        out.discard();
        throw NumericError("failed writing manifest.json");
    }
    return manifest;
}

RunManifest read_manifest(const std::string& out_dir) {
    const fs::path path = fs::path(out_dir) / "manifest.json";
    std::ifstream in(path);
    if (!in) throw MissingInputError("missing manifest: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw MissingInputError("unreadable manifest: " + std::string(err.what()));
    }
    RunManifest manifest;
    manifest.config_digest = doc.at("config_digest").get<std::string>();
    manifest.seed = doc.at("seed").get<std::uint64_t>();
    manifest.tool_version = doc.at("tool_version").get<std::string>();
    manifest.subcommand = doc.at("subcommand").get<std::string>();
    manifest.outputs = doc.at("outputs").get<std::vector<std::string>>();
    manifest.duration_ms = doc.at("duration_ms").get<double>();
    return manifest;
}

void emit_plot_data(const std::string& out_dir, const std::string& dest_path) {
    const RunManifest manifest = read_manifest(out_dir);
    if (manifest.outputs.empty()) throw MissingInputError("manifest lists no outputs");

    std::ofstream out(dest_path);
    if (!out) throw NumericError("emit_plot_data: cannot open " + dest_path);
    out << "series,x,y,sigma\n";

    CsvTable esr_axis;  // kept for fitted-peak overlays
    for (const auto& name : manifest.outputs) {
        const fs::path path = fs::path(out_dir) / name;
        if (!fs::exists(path)) throw MissingInputError("missing result file: " + path.string());
        if (path.extension() != ".csv") continue;
        const CsvTable table = read_csv(path.string());
        if (table.headers.size() < 2) continue;
        if (name == "esr_spectrum.csv") esr_axis = table;

        const std::string stem = path.stem().string();
        for (std::size_t j = 1; j < table.headers.size(); ++j) {
            if (table.headers[j].find("sigma") != std::string::npos) continue;
            const bool has_sigma = j + 1 < table.headers.size() &&
                                   table.headers[j + 1].find("sigma") != std::string::npos;
            const std::string series =
                table.headers.size() > 2 ? stem + ":" + table.headers[j] : stem;
            for (std::size_t i = 0; i < table.columns[0].size(); ++i) {
                out << series << ',' << format_full(table.columns[0][i]) << ','
                    << format_full(table.columns[j][i]) << ',';
                if (has_sigma) out << format_full(table.columns[j + 1][i]);
                out << '\n';
            }
        }
    }

    // Per-peak overlays for an ESR run.
    const fs::path fit_path = fs::path(out_dir) / "esr_fit.json";
    if (fs::exists(fit_path) && !esr_axis.columns.empty()) {
        std::ifstream in(fit_path);
        json fit = json::parse(in);
        const json& params = fit.at("parameters");
        const double baseline = params.at("baseline").at("value").get<double>();
        for (int k = 0;; ++k) {
            const std::string tag = std::to_string(k);
            if (!params.contains("center" + tag)) break;
            const double c = params.at("center" + tag).at("value").get<double>();
            const double w = params.at("fwhm" + tag).at("value").get<double>();
            const double a = params.at("amplitude" + tag).at("value").get<double>();
            for (const double f : esr_axis.columns[0]) {
                const double u = 2.0 * (f - c) / w;
                out << "esr_peak_" << tag << ',' << format_full(f) << ','
                    << format_full(baseline + a / (1.0 + u * u)) << ",\n";
            }
        }
    }
    if (!out) throw NumericError("emit_plot_data: write failed");
}

}  // namespace nvgrad::cli
