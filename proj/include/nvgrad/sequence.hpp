#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nvgrad/array_model.hpp"
#include "nvgrad/coil.hpp"
#include "nvgrad/rng.hpp"
#include "nvgrad/spin.hpp"

// Measurement protocol simulation: CW ESR, site-selective Rabi, Hahn
// echo / NMR, Fourier phase encoding, and the 2D selection protocol.
//
// Every output is a pure function of (array, config, seed); each sweep
// point draws from its own index-derived random stream, so serial and
// parallel evaluation produce identical records.

namespace nvgrad::sequence {

struct ExperimentConfig {
    double bias_field_g = 128.0;       // B0 along the NV axis
    double coil_current_ma = 250.0;
    double mw_frequency_mhz = 0.0;
    std::map<std::string, double> rabi_profile{
        {"A", 4.4}, {"B", 4.2}, {"C", 3.3}, {"D", 2.7}};  // MHz
    std::int64_t photons_per_point = 2000000;
    std::uint64_t seed = 1;
    bool noiseless = false;

    double esr_power_broadening_mhz = 8.0;
    double background_contrast = 0.0;
    double modulation_depth = 0.85;    // hyperfine/NMR echo modulation depth
    double echo_stretch = 1.0;
    double selection_pulse_omega_mhz = 0.0;  // 0 = auto (synchronized)
    double dephasing_wait_t2star_multiple = 5.0;
    bool paper_nominal_k_axis = false;

    spin::NVParams nv;
    coil::CoilGeometry geometry = coil::paper_coil();
};

struct Spectrum {
    std::vector<double> frequency_mhz;
    std::vector<double> contrast;
    std::vector<double> noise_sigma;
};

struct ExperimentTrace {
    std::vector<double> time_us;
    std::vector<double> signal;
    std::vector<double> noise_sigma;
};

struct KSpaceRecord {
    std::vector<double> k_per_nm;  // cycles/nm
    std::vector<double> signal;
    std::vector<double> noise_sigma;
    double tau_us = 0.0;
    std::optional<std::string> selected_site;
    bool decoherence_warning = false;
};

// Poisson photon-ratio readout; returns a noisy contrast. Deterministic per
// (seed, stream index); the noiseless switch bypasses sampling entirely.
double sample_readout(double expected_contrast, std::int64_t photons_per_point, RngStream& rng);

// Swept-frequency CW ESR under the DC gradient at config.coil_current_ma.
Spectrum run_cw_esr(const array_model::NVArray& array, const ExperimentConfig& config,
                    double f_lo_mhz, double f_hi_mhz, int n_points);

// Rabi oscillations versus microwave pulse duration at config.mw_frequency.
ExperimentTrace run_rabi(const array_model::NVArray& array, const ExperimentConfig& config,
                         const std::vector<double>& tau_mw_us);

// Hahn echo trace; when `site` is set the DC gradient must be on and only
// that site participates (with its local 15N Larmor modulation).
ExperimentTrace run_hahn_echo(const array_model::NVArray& array, const ExperimentConfig& config,
                              const std::vector<double>& tau_us,
                              const std::optional<std::string>& site = std::nullopt);

// Phase-encoded k-space record over a sweep of AC gradient amplitudes.
KSpaceRecord run_fourier_kspace(const array_model::NVArray& array,
                                const ExperimentConfig& config, double tau_us,
                                const std::vector<double>& g_amplitudes,
                                const std::optional<std::string>& site = std::nullopt);

struct Lattice2DSpec {
    int rows = 3;
    int cols = 3;
    double pitch_nm = 100.0;
    double t2_star_us = 0.58;
};

struct SelectionResult {
    int rows = 0;
    int cols = 0;
    std::vector<double> polarization;  // |0> population, row-major
    bool success = false;
    double at(int r, int c) const { return polarization[static_cast<std::size_t>(r) * cols + c]; }
};

// Bloch-vector simulation of the four-step 2D selection protocol.
SelectionResult run_2d_selection(const Lattice2DSpec& lattice, const ExperimentConfig& config,
                                 int target_row, int target_col, double gradient_x_g_per_nm,
                                 double gradient_y_g_per_nm);

}  // namespace nvgrad::sequence
