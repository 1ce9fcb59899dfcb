#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nvgrad/coil.hpp"
#include "nvgrad/sequence.hpp"
#include "nvgrad/spin.hpp"

// Nonlinear least-squares fitting of spectra and traces, physical-parameter
// extraction, and the feasibility planner.

namespace nvgrad::analysis {

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> parameters;
    std::vector<double> confidence;  // 67% half-widths, same order
    std::vector<double> residuals;
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;

    double param(const std::string& name) const;
    double conf(const std::string& name) const;
};

using ModelFn = std::function<double(const std::vector<double>&, double)>;

// Damped Gauss-Newton with numeric Jacobian and step halving; accepted steps
// never increase the residual norm. Confidence half-widths come from the
// linearized covariance at the optimum (67% level).
FitResult fit_least_squares(const ModelFn& model, const std::vector<double>& x,
                            const std::vector<double>& y, std::vector<double> init,
                            const std::vector<std::string>& names, int max_iterations = 200);

// Sum of peak-normalized Lorentzians plus a flat baseline. Initialization by
// moving-average smoothing and local-maxima picking (ties broken by lower
// frequency); throws DetectionError when fewer than n_peaks candidates stand
// out. Centers are returned sorted ascending as c0, w0, a0, c1, ... after a
// leading "baseline".
FitResult fit_multi_lorentzian(const sequence::Spectrum& spectrum, int n_peaks);

// y = offset + amplitude * exp(-t/decay) * cos(2 pi f t + phase); frequency
// initialized from the dominant discrete-spectrum bin. A constant trace comes
// back with zero amplitude and the convergence flag cleared.
FitResult fit_damped_sinusoid(const sequence::ExperimentTrace& trace);

// dB/dx = delta_f / (gamma * delta_x), Gauss/nm.
double gradient_from_splitting(double delta_f_mhz, double delta_x_nm,
                               const spin::NVParams& params = {});

struct SlopeFit {
    double slope = 0.0;
    double confidence = 0.0;  // 67% half-width
};

// Through-origin least squares on (current mA, gradient G/nm) points;
// slope in Gauss nm^-1 A^-1. Throws NumericError when all currents coincide.
SlopeFit calibrate_gradient_per_current(const std::vector<std::pair<double, double>>& points);

// Linear fit of (B_perp Gauss, f_NMR MHz) points; returns the bare nuclear
// gyromagnetic ratio in kHz/G, i.e. the fitted slope divided by the
// enhancement factor. Throws NumericError on rank deficiency.
SlopeFit fit_gyromagnetic_ratio(const std::vector<std::pair<double, double>>& points,
                                double enhancement = 14.0);

struct PlannerSettings {
    double fidelity_floor = 0.97;
    double max_thermal_rise_k = 40.0;
    // Calibrated reference geometry: slope at the working point and the
    // demonstrated bandwidth/current pair the BW ~ 1/I scaling hangs off.
    double reference_length_nm = 1000.0;
    double reference_slope_g_per_nm_per_a = 0.44;
    double reference_bandwidth_mhz = 1.0;
    double reference_current_ma = 250.0;
};

struct PlannerReport {
    double dynamic_range = 0.0;           // DR = L/D
    double required_detuning_mhz = 0.0;   // from the fidelity floor
    double required_gradient_g_per_nm = 0.0;
    double required_current_ma = 0.0;
    double bandwidth_mhz = 0.0;
    double thermal_rise_k = 0.0;
    double fidelity = 0.0;
    bool feasible = false;
};

// Feasibility of addressing a span L at site separation D with Rabi
// frequency omega. The gradient-per-current slope of a coil scaled to span L
// falls as (L_ref/L)^2, so required current grows as DR^2 and bandwidth
// falls as DR^-2. Infeasible inputs yield feasible = false, not a throw.
PlannerReport plan_feasibility(double length_nm, double separation_nm, double omega_mhz,
                               coil::CoolingMode cooling, const coil::CoilLimits& limits,
                               const PlannerSettings& settings = {},
                               const spin::NVParams& params = {});

}  // namespace nvgrad::analysis
