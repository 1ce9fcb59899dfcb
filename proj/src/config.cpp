#include "nvgrad/config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "nvgrad/errors.hpp"

namespace nvgrad::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad_shape(const std::string& field, const std::string& why) {
    throw ConfigError("config field \"" + field + "\": " + why);
}

[[noreturn]] void bad_range(const std::string& field, const std::string& why) {
    throw RangeError("config field \"" + field + "\": " + why);
}

const json* section(const json& doc, const char* name) {
    if (!doc.contains(name)) return nullptr;
    const json& sec = doc.at(name);
    if (!sec.is_object()) bad_shape(name, "must be an object");
    return &sec;
}

double num(const json& sec, const std::string& prefix, const char* key, double fallback) {
    if (!sec.contains(key)) return fallback;
    const json& v = sec.at(key);
    if (!v.is_number()) bad_shape(prefix + "." + key, "must be a number");
    return v.get<double>();
}

std::int64_t integer(const json& sec, const std::string& prefix, const char* key,
                     std::int64_t fallback) {
    if (!sec.contains(key)) return fallback;
    const json& v = sec.at(key);
    if (!v.is_number_integer()) bad_shape(prefix + "." + key, "must be an integer");
    return v.get<std::int64_t>();
}

bool boolean(const json& sec, const std::string& prefix, const char* key, bool fallback) {
    if (!sec.contains(key)) return fallback;
    const json& v = sec.at(key);
    if (!v.is_boolean()) bad_shape(prefix + "." + key, "must be a boolean");
    return v.get<bool>();
}

std::string text(const json& sec, const std::string& prefix, const char* key,
                 const std::string& fallback) {
    if (!sec.contains(key)) return fallback;
    const json& v = sec.at(key);
    if (!v.is_string()) bad_shape(prefix + "." + key, "must be a string");
    return v.get<std::string>();
}

void require_positive(double value, const std::string& field) {
    if (!(value > 0.0)) bad_range(field, "must be > 0");
}

void require_nonnegative(double value, const std::string& field) {
    if (!(value >= 0.0)) bad_range(field, "must be >= 0");
}

Vec3 vec3_of(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number())
        bad_shape(field, "must be an array of 3 numbers");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

}  // namespace

AppConfig default_config() { return AppConfig{}; }

AppConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    static const char* known[] = {"coil", "array", "nv_params", "experiment", "limits"};
    for (const auto& [key, value] : doc.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) bad_shape(key, "unknown section");
    }

    AppConfig config;

    if (const json* lim = section(doc, "limits")) {
        const std::string cooling = text(*lim, "limits", "cooling", "air");
        if (cooling == "air")
            config.limits = coil::default_limits(coil::CoolingMode::air);
        else if (cooling == "water")
            config.limits = coil::default_limits(coil::CoolingMode::water);
        else
            bad_range("limits.cooling", "must be \"air\" or \"water\"");
        config.limits.max_current_ma =
            num(*lim, "limits", "max_current_ma", config.limits.max_current_ma);
        require_positive(config.limits.max_current_ma, "limits.max_current_ma");
        config.limits.heat_coefficient =
            num(*lim, "limits", "heat_coefficient_k_per_a2", config.limits.heat_coefficient);
        require_positive(config.limits.heat_coefficient, "limits.heat_coefficient_k_per_a2");
        config.limits.rise_time_ns =
            num(*lim, "limits", "rise_time_ns", config.limits.rise_time_ns);
        require_positive(config.limits.rise_time_ns, "limits.rise_time_ns");
        config.planner.max_thermal_rise_k =
            num(*lim, "limits", "max_thermal_rise_k", config.planner.max_thermal_rise_k);
        require_positive(config.planner.max_thermal_rise_k, "limits.max_thermal_rise_k");
        config.planner.fidelity_floor =
            num(*lim, "limits", "fidelity_floor", config.planner.fidelity_floor);
        if (config.planner.fidelity_floor <= 0.0 || config.planner.fidelity_floor >= 1.0)
            bad_range("limits.fidelity_floor", "must be in (0, 1)");
    }

    if (const json* cl = section(doc, "coil")) {
        auto& geom = config.experiment.geometry;
        geom.nominal_wire_spacing_nm =
            num(*cl, "coil", "wire_spacing_nm", geom.nominal_wire_spacing_nm);
        require_positive(geom.nominal_wire_spacing_nm, "coil.wire_spacing_nm");
        if (cl->contains("segments")) {
            const json& segs = cl->at("segments");
            if (!segs.is_array() || segs.empty())
                bad_shape("coil.segments", "must be a non-empty array");
            geom.segments.clear();
            for (std::size_t i = 0; i < segs.size(); ++i) {
                const json& s = segs[i];
                const std::string field = "coil.segments[" + std::to_string(i) + "]";
                if (!s.is_object() || !s.contains("start") || !s.contains("end"))
                    bad_shape(field, "must be an object with start/end");
                coil::Segment seg;
                seg.start = vec3_of(s.at("start"), field + ".start");
                seg.end = vec3_of(s.at("end"), field + ".end");
                seg.share = num(s, field, "share", 1.0);
                geom.segments.push_back(seg);
            }
        }
    }

    if (const json* np = section(doc, "nv_params")) {
        auto& nv = config.experiment.nv;
        nv.zero_field_splitting_mhz =
            num(*np, "nv_params", "zero_field_splitting_mhz", nv.zero_field_splitting_mhz);
        require_positive(nv.zero_field_splitting_mhz, "nv_params.zero_field_splitting_mhz");
        nv.gamma_e_mhz_per_g = num(*np, "nv_params", "gamma_e_mhz_per_g", nv.gamma_e_mhz_per_g);
        require_positive(nv.gamma_e_mhz_per_g, "nv_params.gamma_e_mhz_per_g");
        nv.gamma_n_khz_per_g = num(*np, "nv_params", "gamma_n_khz_per_g", nv.gamma_n_khz_per_g);
        require_positive(nv.gamma_n_khz_per_g, "nv_params.gamma_n_khz_per_g");
        nv.hyperfine_mhz = num(*np, "nv_params", "hyperfine_mhz", nv.hyperfine_mhz);
        require_nonnegative(nv.hyperfine_mhz, "nv_params.hyperfine_mhz");
        nv.enhancement_factor =
            num(*np, "nv_params", "enhancement_factor", nv.enhancement_factor);
        require_positive(nv.enhancement_factor, "nv_params.enhancement_factor");
    }

    if (const json* ar = section(doc, "array")) {
        auto& spec = config.array;
        spec.site_count = static_cast<int>(integer(*ar, "array", "site_count", spec.site_count));
        if (spec.site_count < 1) bad_range("array.site_count", "must be >= 1");
        spec.site_pitch_nm = num(*ar, "array", "site_pitch_nm", spec.site_pitch_nm);
        require_positive(spec.site_pitch_nm, "array.site_pitch_nm");
        spec.aperture_diameter_nm =
            num(*ar, "array", "aperture_diameter_nm", spec.aperture_diameter_nm);
        require_positive(spec.aperture_diameter_nm, "array.aperture_diameter_nm");
        spec.mean_nvs_per_site = num(*ar, "array", "mean_nvs_per_site", spec.mean_nvs_per_site);
        require_nonnegative(spec.mean_nvs_per_site, "array.mean_nvs_per_site");
        const std::string placement = text(*ar, "array", "placement", "line");
        if (placement == "line")
            spec.placement = array_model::Placement::line;
        else if (placement == "disc")
            spec.placement = array_model::Placement::disc;
        else
            bad_range("array.placement", "must be \"line\" or \"disc\"");
        spec.t2_star_us = num(*ar, "array", "t2_star_us", spec.t2_star_us);
        require_positive(spec.t2_star_us, "array.t2_star_us");
        spec.t1_ms = num(*ar, "array", "t1_ms", spec.t1_ms);
        require_positive(spec.t1_ms, "array.t1_ms");
        spec.contrast = num(*ar, "array", "contrast", spec.contrast);
        if (spec.contrast < 0.0 || spec.contrast > 0.05)
            bad_range("array.contrast", "must be in [0, 0.05]");
        if (ar->contains("t2_us_per_site")) {
            const json& t2s = ar->at("t2_us_per_site");
            if (!t2s.is_array() || t2s.empty())
                bad_shape("array.t2_us_per_site", "must be a non-empty array");
            spec.t2_us_per_site.clear();
            for (const auto& v : t2s) {
                if (!v.is_number() || v.get<double>() <= 0.0)
                    bad_range("array.t2_us_per_site", "entries must be > 0");
                spec.t2_us_per_site.push_back(v.get<double>());
            }
        }
        if (ar->contains("origin"))
            spec.origin = vec3_of(ar->at("origin"), "array.origin");
        if (ar->contains("gradient_axis"))
            spec.gradient_axis = vec3_of(ar->at("gradient_axis"), "array.gradient_axis");
        if (ar->contains("nv_axis")) spec.nv_axis = vec3_of(ar->at("nv_axis"), "array.nv_axis");
    }

    if (const json* ex = section(doc, "experiment")) {
        auto& e = config.experiment;
        e.bias_field_g = num(*ex, "experiment", "bias_field_g", e.bias_field_g);
        require_nonnegative(e.bias_field_g, "experiment.bias_field_g");
        e.coil_current_ma = num(*ex, "experiment", "coil_current_ma", e.coil_current_ma);
        require_nonnegative(e.coil_current_ma, "experiment.coil_current_ma");
        e.mw_frequency_mhz = num(*ex, "experiment", "mw_frequency_mhz", e.mw_frequency_mhz);
        e.photons_per_point = integer(*ex, "experiment", "photons_per_point", e.photons_per_point);
        if (e.photons_per_point < 1) bad_range("experiment.photons_per_point", "must be >= 1");
        e.seed = static_cast<std::uint64_t>(
            integer(*ex, "experiment", "seed", static_cast<std::int64_t>(e.seed)));
        e.noiseless = boolean(*ex, "experiment", "noiseless", e.noiseless);
        e.esr_power_broadening_mhz =
            num(*ex, "experiment", "esr_power_broadening_mhz", e.esr_power_broadening_mhz);
        require_nonnegative(e.esr_power_broadening_mhz, "experiment.esr_power_broadening_mhz");
        e.background_contrast =
            num(*ex, "experiment", "background_contrast", e.background_contrast);
        require_nonnegative(e.background_contrast, "experiment.background_contrast");
        e.modulation_depth = num(*ex, "experiment", "modulation_depth", e.modulation_depth);
        if (e.modulation_depth < 0.0 || e.modulation_depth > 1.0)
            bad_range("experiment.modulation_depth", "must be in [0, 1]");
        e.echo_stretch = num(*ex, "experiment", "echo_stretch", e.echo_stretch);
        require_positive(e.echo_stretch, "experiment.echo_stretch");
        e.selection_pulse_omega_mhz =
            num(*ex, "experiment", "selection_pulse_omega_mhz", e.selection_pulse_omega_mhz);
        require_nonnegative(e.selection_pulse_omega_mhz,
                            "experiment.selection_pulse_omega_mhz");
        e.dephasing_wait_t2star_multiple = num(*ex, "experiment", "dephasing_wait_t2star_multiple",
                                               e.dephasing_wait_t2star_multiple);
        require_nonnegative(e.dephasing_wait_t2star_multiple,
                            "experiment.dephasing_wait_t2star_multiple");
        e.paper_nominal_k_axis =
            boolean(*ex, "experiment", "nominal_k_axis", e.paper_nominal_k_axis);
        if (ex->contains("rabi_profile")) {
            const json& prof = ex->at("rabi_profile");
            if (!prof.is_object()) bad_shape("experiment.rabi_profile", "must be an object");
            e.rabi_profile.clear();
            for (const auto& [label, v] : prof.items()) {
                if (!v.is_number() || v.get<double>() <= 0.0)
                    bad_range("experiment.rabi_profile." + label, "must be > 0");
                e.rabi_profile[label] = v.get<double>();
            }
        }

        if (ex->contains("esr")) {
            const json& r = ex->at("esr");
            config.esr.f_lo_mhz = num(r, "experiment.esr", "f_lo_mhz", config.esr.f_lo_mhz);
            config.esr.f_hi_mhz = num(r, "experiment.esr", "f_hi_mhz", config.esr.f_hi_mhz);
            config.esr.points =
                static_cast<int>(integer(r, "experiment.esr", "points", config.esr.points));
            if (config.esr.f_hi_mhz <= config.esr.f_lo_mhz)
                bad_range("experiment.esr.f_hi_mhz", "must exceed f_lo_mhz");
            if (config.esr.points < 2) bad_range("experiment.esr.points", "must be >= 2");
        }
        if (ex->contains("rabi")) {
            const json& r = ex->at("rabi");
            config.rabi.tau_max_us =
                num(r, "experiment.rabi", "tau_max_us", config.rabi.tau_max_us);
            require_positive(config.rabi.tau_max_us, "experiment.rabi.tau_max_us");
            config.rabi.points =
                static_cast<int>(integer(r, "experiment.rabi", "points", config.rabi.points));
            if (config.rabi.points < 2) bad_range("experiment.rabi.points", "must be >= 2");
        }
        if (ex->contains("echo")) {
            const json& r = ex->at("echo");
            config.echo.tau_min_us =
                num(r, "experiment.echo", "tau_min_us", config.echo.tau_min_us);
            config.echo.tau_max_us =
                num(r, "experiment.echo", "tau_max_us", config.echo.tau_max_us);
            require_positive(config.echo.tau_min_us, "experiment.echo.tau_min_us");
            if (config.echo.tau_max_us <= config.echo.tau_min_us)
                bad_range("experiment.echo.tau_max_us", "must exceed tau_min_us");
            config.echo.points =
                static_cast<int>(integer(r, "experiment.echo", "points", config.echo.points));
            if (config.echo.points < 2) bad_range("experiment.echo.points", "must be >= 2");
            config.echo.site = text(r, "experiment.echo", "site", config.echo.site);
        }
        if (ex->contains("fourier")) {
            const json& r = ex->at("fourier");
            config.fourier.tau_us = num(r, "experiment.fourier", "tau_us", config.fourier.tau_us);
            require_positive(config.fourier.tau_us, "experiment.fourier.tau_us");
            config.fourier.points =
                static_cast<int>(integer(r, "experiment.fourier", "points", config.fourier.points));
            if (config.fourier.points < 8) bad_range("experiment.fourier.points", "must be >= 8");
            config.fourier.g_max_g_per_nm =
                num(r, "experiment.fourier", "g_max_g_per_nm", config.fourier.g_max_g_per_nm);
            require_positive(config.fourier.g_max_g_per_nm,
                             "experiment.fourier.g_max_g_per_nm");
            config.fourier.site = text(r, "experiment.fourier", "site", config.fourier.site);
        }
        if (ex->contains("select2d")) {
            const json& r = ex->at("select2d");
            config.select2d.rows =
                static_cast<int>(integer(r, "experiment.select2d", "rows", config.select2d.rows));
            config.select2d.cols =
                static_cast<int>(integer(r, "experiment.select2d", "cols", config.select2d.cols));
            if (config.select2d.rows < 1) bad_range("experiment.select2d.rows", "must be >= 1");
            if (config.select2d.cols < 1) bad_range("experiment.select2d.cols", "must be >= 1");
            config.select2d.pitch_nm =
                num(r, "experiment.select2d", "pitch_nm", config.select2d.pitch_nm);
            require_positive(config.select2d.pitch_nm, "experiment.select2d.pitch_nm");
            config.select2d.target_row = static_cast<int>(
                integer(r, "experiment.select2d", "target_row", config.select2d.target_row));
            config.select2d.target_col = static_cast<int>(
                integer(r, "experiment.select2d", "target_col", config.select2d.target_col));
            if (config.select2d.target_row < 0 || config.select2d.target_row >= config.select2d.rows)
                bad_range("experiment.select2d.target_row", "must index a lattice row");
            if (config.select2d.target_col < 0 || config.select2d.target_col >= config.select2d.cols)
                bad_range("experiment.select2d.target_col", "must index a lattice column");
            config.select2d.gradient_x_g_per_nm = num(r, "experiment.select2d",
                                                      "gradient_x_g_per_nm",
                                                      config.select2d.gradient_x_g_per_nm);
            config.select2d.gradient_y_g_per_nm = num(r, "experiment.select2d",
                                                      "gradient_y_g_per_nm",
                                                      config.select2d.gradient_y_g_per_nm);
            require_nonnegative(config.select2d.gradient_x_g_per_nm,
                                "experiment.select2d.gradient_x_g_per_nm");
            require_nonnegative(config.select2d.gradient_y_g_per_nm,
                                "experiment.select2d.gradient_y_g_per_nm");
        }
        if (ex->contains("calibrate")) {
            const json& r = ex->at("calibrate");
            config.calibrate.i_min_ma =
                num(r, "experiment.calibrate", "i_min_ma", config.calibrate.i_min_ma);
            config.calibrate.i_max_ma =
                num(r, "experiment.calibrate", "i_max_ma", config.calibrate.i_max_ma);
            require_nonnegative(config.calibrate.i_min_ma, "experiment.calibrate.i_min_ma");
            if (config.calibrate.i_max_ma <= config.calibrate.i_min_ma)
                bad_range("experiment.calibrate.i_max_ma", "must exceed i_min_ma");
            config.calibrate.points = static_cast<int>(
                integer(r, "experiment.calibrate", "points", config.calibrate.points));
            if (config.calibrate.points < 2)
                bad_range("experiment.calibrate.points", "must be >= 2");
        }
        if (ex->contains("plan")) {
            const json& r = ex->at("plan");
            config.plan.length_nm = num(r, "experiment.plan", "length_nm", config.plan.length_nm);
            config.plan.separation_nm =
                num(r, "experiment.plan", "separation_nm", config.plan.separation_nm);
            require_positive(config.plan.separation_nm, "experiment.plan.separation_nm");
            if (config.plan.length_nm < config.plan.separation_nm)
                bad_range("experiment.plan.length_nm", "must be >= separation_nm");
            config.plan.omega_mhz = num(r, "experiment.plan", "omega_mhz", config.plan.omega_mhz);
            require_positive(config.plan.omega_mhz, "experiment.plan.omega_mhz");
            config.plan.sweep_points = static_cast<int>(
                integer(r, "experiment.plan", "sweep_points", config.plan.sweep_points));
            if (config.plan.sweep_points < 2)
                bad_range("experiment.plan.sweep_points", "must be >= 2");
        }
    }

    // Cross-section constraints.
    if (config.experiment.coil_current_ma > config.limits.max_current_ma) {
        const char* mode =
            config.limits.cooling_mode == coil::CoolingMode::air ? "air" : "water";
        bad_range("experiment.coil_current_ma",
                  std::to_string(config.experiment.coil_current_ma) + " mA exceeds the " +
                      std::to_string(config.limits.max_current_ma) + " mA " + mode +
                      "-cooling limit");
    }
    if (config.calibrate.i_max_ma > config.limits.max_current_ma)
        bad_range("experiment.calibrate.i_max_ma", "exceeds limits.max_current_ma");

    return config;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigError("config parse error in " + path + ": " + err.what());
    }
    return config_from_json(doc);
}

nlohmann::json to_json(const AppConfig& config) {
    json doc;
    const auto& e = config.experiment;

    json coil_sec;
    coil_sec["wire_spacing_nm"] = e.geometry.nominal_wire_spacing_nm;
    coil_sec["segments"] = json::array();
    for (const auto& seg : e.geometry.segments)
        coil_sec["segments"].push_back({{"start", {seg.start.x, seg.start.y, seg.start.z}},
                                        {"end", {seg.end.x, seg.end.y, seg.end.z}},
                                        {"share", seg.share}});
    doc["coil"] = std::move(coil_sec);

    const auto& a = config.array;
    doc["array"] = {{"site_count", a.site_count},
                    {"site_pitch_nm", a.site_pitch_nm},
                    {"aperture_diameter_nm", a.aperture_diameter_nm},
                    {"mean_nvs_per_site", a.mean_nvs_per_site},
                    {"placement", a.placement == array_model::Placement::line ? "line" : "disc"},
                    {"t2_star_us", a.t2_star_us},
                    {"t1_ms", a.t1_ms},
                    {"contrast", a.contrast},
                    {"t2_us_per_site", a.t2_us_per_site},
                    {"origin", {a.origin.x, a.origin.y, a.origin.z}},
                    {"gradient_axis", {a.gradient_axis.x, a.gradient_axis.y, a.gradient_axis.z}},
                    {"nv_axis", {a.nv_axis.x, a.nv_axis.y, a.nv_axis.z}}};

    doc["nv_params"] = {{"zero_field_splitting_mhz", e.nv.zero_field_splitting_mhz},
                        {"gamma_e_mhz_per_g", e.nv.gamma_e_mhz_per_g},
                        {"gamma_n_khz_per_g", e.nv.gamma_n_khz_per_g},
                        {"hyperfine_mhz", e.nv.hyperfine_mhz},
                        {"enhancement_factor", e.nv.enhancement_factor}};

    json ex;
    ex["bias_field_g"] = e.bias_field_g;
    ex["coil_current_ma"] = e.coil_current_ma;
    ex["mw_frequency_mhz"] = e.mw_frequency_mhz;
    ex["photons_per_point"] = e.photons_per_point;
    ex["seed"] = e.seed;
    ex["noiseless"] = e.noiseless;
    ex["esr_power_broadening_mhz"] = e.esr_power_broadening_mhz;
    ex["background_contrast"] = e.background_contrast;
    ex["modulation_depth"] = e.modulation_depth;
    ex["echo_stretch"] = e.echo_stretch;
    ex["selection_pulse_omega_mhz"] = e.selection_pulse_omega_mhz;
    ex["dephasing_wait_t2star_multiple"] = e.dephasing_wait_t2star_multiple;
    ex["nominal_k_axis"] = e.paper_nominal_k_axis;
    ex["rabi_profile"] = e.rabi_profile;
    ex["esr"] = {{"f_lo_mhz", config.esr.f_lo_mhz},
                 {"f_hi_mhz", config.esr.f_hi_mhz},
                 {"points", config.esr.points}};
    ex["rabi"] = {{"tau_max_us", config.rabi.tau_max_us}, {"points", config.rabi.points}};
    ex["echo"] = {{"tau_min_us", config.echo.tau_min_us},
                  {"tau_max_us", config.echo.tau_max_us},
                  {"points", config.echo.points},
                  {"site", config.echo.site}};
    ex["fourier"] = {{"tau_us", config.fourier.tau_us},
                     {"points", config.fourier.points},
                     {"g_max_g_per_nm", config.fourier.g_max_g_per_nm},
                     {"site", config.fourier.site}};
    ex["select2d"] = {{"rows", config.select2d.rows},
                      {"cols", config.select2d.cols},
                      {"pitch_nm", config.select2d.pitch_nm},
                      {"target_row", config.select2d.target_row},
                      {"target_col", config.select2d.target_col},
                      {"gradient_x_g_per_nm", config.select2d.gradient_x_g_per_nm},
                      {"gradient_y_g_per_nm", config.select2d.gradient_y_g_per_nm}};
    ex["calibrate"] = {{"i_min_ma", config.calibrate.i_min_ma},
                       {"i_max_ma", config.calibrate.i_max_ma},
                       {"points", config.calibrate.points}};
    ex["plan"] = {{"length_nm", config.plan.length_nm},
                  {"separation_nm", config.plan.separation_nm},
                  {"omega_mhz", config.plan.omega_mhz},
                  {"sweep_points", config.plan.sweep_points}};
    doc["experiment"] = std::move(ex);

    doc["limits"] = {{"cooling",
                      config.limits.cooling_mode == coil::CoolingMode::air ? "air" : "water"},
                     {"max_current_ma", config.limits.max_current_ma},
                     {"heat_coefficient_k_per_a2", config.limits.heat_coefficient},
                     {"rise_time_ns", config.limits.rise_time_ns},
                     {"max_thermal_rise_k", config.planner.max_thermal_rise_k},
                     {"fidelity_floor", config.planner.fidelity_floor}};
    return doc;
}

std::string config_digest(const AppConfig& config) {
    const std::string dump = to_json(config).dump();
    std::uint64_t hash = 14695981039346656037ULL;
    for (const unsigned char c : dump) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << hash;
    return out.str();
}

}  // namespace nvgrad::cli
