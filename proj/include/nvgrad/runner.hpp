#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nvgrad/config.hpp"

// Config-driven experiment runner behind the CLI: dispatches subcommands,
// writes CSV data + JSON sidecars + a manifest, and merges results into
// plot-ready CSV. Identical (config, seed) runs produce byte-identical data.

namespace nvgrad::cli {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunManifest {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    std::string subcommand;
    std::vector<std::string> outputs;  // file names relative to the out dir
    double duration_ms = 0.0;
};

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> points;
    bool noiseless = false;
};

// Runs one of esr | rabi | echo | fourier | select2d | calibrate | plan in
// out_dir and writes manifest.json last. On failure every file created by
// this run is removed before the error propagates.
RunManifest run_experiment(const std::string& subcommand, AppConfig config,
                           const std::string& out_dir, const RunOverrides& overrides = {});

RunManifest read_manifest(const std::string& out_dir);

// Merges the manifest's CSV outputs (plus fitted-peak overlays where a fit
// sidecar exists) into one long-format CSV (series, x, y, sigma). Throws
// MissingInputError when the manifest or a listed output is absent or empty.
void emit_plot_data(const std::string& out_dir, const std::string& dest_path);

// Full round-trip precision CSV with unit-bearing headers; all columns must
// have equal length.
void write_csv(const std::string& path, const std::vector<std::string>& headers,
               const std::vector<std::vector<double>>& columns);

struct CsvTable {
    std::vector<std::string> headers;
    std::vector<std::vector<double>> columns;
};

CsvTable read_csv(const std::string& path);

}  // namespace nvgrad::cli
