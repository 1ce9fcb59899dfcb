#pragma once

#include <string>

#include <json.hpp>

#include "nvgrad/analysis.hpp"
#include "nvgrad/array_model.hpp"
#include "nvgrad/coil.hpp"
#include "nvgrad/sequence.hpp"

// Single-JSON-document run configuration with sections
// {coil, array, nv_params, experiment, limits}. All defaults together form
// the calibrated preset, so an empty document is a valid full configuration.

namespace nvgrad::cli {

struct EsrRun {
    double f_lo_mhz = 3400.0;
    double f_hi_mhz = 3600.0;
    int points = 512;
};

struct RabiRun {
    double tau_max_us = 1.0;
    int points = 128;
};

struct EchoRun {
    double tau_min_us = 0.2;
    double tau_max_us = 8.0;
    int points = 256;
    std::string site = "C";  // empty: whole-array echo, gradient off
};

struct FourierRun {
    double tau_us = 2.0;
    int points = 512;
    double g_max_g_per_nm = 0.0059;  // AC amplitude sweep top; k_max ~ 0.021 /nm at tau 2 us
    std::string site;             // empty: all sites participate
};

struct Select2dRun {
    int rows = 3;
    int cols = 3;
    double pitch_nm = 100.0;
    int target_row = 1;
    int target_col = 1;
    double gradient_x_g_per_nm = 0.11;
    double gradient_y_g_per_nm = 0.11;
};

struct CalibrateRun {
    double i_min_ma = 50.0;
    double i_max_ma = 300.0;
    int points = 6;
};

struct PlanRun {
    double length_nm = 1000.0;
    double separation_nm = 100.0;
    double omega_mhz = 5.0;
    int sweep_points = 9;  // DR sweep written alongside the report
};

struct AppConfig {
    sequence::ExperimentConfig experiment;  // carries geometry + nv params
    array_model::ArraySpec array = array_model::paper_array_spec();
    coil::CoilLimits limits = coil::default_limits(coil::CoolingMode::air);
    analysis::PlannerSettings planner;

    EsrRun esr;
    RabiRun rabi;
    EchoRun echo;
    FourierRun fourier;
    Select2dRun select2d;
    CalibrateRun calibrate;
    PlanRun plan;
};

// The calibrated preset (what an empty config document yields).
AppConfig default_config();

// Parse + validate a JSON document. Throws ConfigError on parse/shape
// problems (exit code 2) and RangeError on physical-range violations
// (exit code 3), always naming the offending field.
AppConfig config_from_json(const nlohmann::json& doc);

// Reads the file; missing file throws ConfigError.
AppConfig load_config(const std::string& path);

// Canonical JSON echo of a configuration (used for the run digest).
nlohmann::json to_json(const AppConfig& config);

// FNV-1a digest of the canonical JSON dump, hex string.
std::string config_digest(const AppConfig& config);

}  // namespace nvgrad::cli
