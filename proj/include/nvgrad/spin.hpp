#pragma once

#include <Eigen/Dense>

#include "nvgrad/vec3.hpp"

// NV ground-state spin physics: Hamiltonian, ESR frequencies, Rabi and echo
// dynamics, 15N NMR modulation, and the driving-error budget.
//
// All frequencies are cyclic (MHz); gamma is stored as gamma/2pi.

namespace nvgrad::spin {

struct NVParams {
    double zero_field_splitting_mhz = 2870.0;  // D
    double gamma_e_mhz_per_g = 2.8;            // electron gamma/2pi
    double gamma_n_khz_per_g = 0.43;           // bare 15N gamma/2pi
    double hyperfine_mhz = 3.0;                // NV-15N coupling, cycles
    double enhancement_factor = 14.0;          // effective 15N gamma boost
};

struct SpinOperators {
    Eigen::Matrix3cd sx, sy, sz;
};

// Spin-1 operators in the {|+1>, |0>, |-1>} basis.
SpinOperators spin1_operators();

struct EsrPair {
    double f_minus_mhz = 0.0;
    double f_plus_mhz = 0.0;
};

// H = D Sz^2 + gamma (B . S), MHz, with B given in the NV frame (Gauss).
Eigen::Matrix3cd nv_hamiltonian(const Vec3& b_nv_frame, const NVParams& params);

// Unit axes of the four NV orientation classes in the lab frame, given the
// lab direction of class 0 ([111]). The remaining tetrahedral axes follow a
// fixed crystal orientation convention.
std::array<Vec3, 4> orientation_axes(const Vec3& class0_axis);

// |0> -> |+-1> transition frequencies for a lab-frame field, via exact
// diagonalization in the frame of the requested orientation class.
EsrPair esr_frequencies(const Vec3& b_lab, int orientation_class, const Vec3& class0_axis,
                        const NVParams& params);

// Convenience overload: field already decomposed in the NV frame.
EsrPair esr_frequencies_nv_frame(double b_axial, double b_perp, const NVParams& params);

// P(|1>) after driving for tau at Rabi frequency omega and detuning delta.
double rabi_population(double omega_mhz, double delta_mhz, double tau_us);

// Stretched-exponential Hahn echo envelope exp[-(tau/T2)^p].
double echo_envelope(double tau_us, double t2_us, double stretch);

// Effective 15N Larmor frequency, f = enhancement * gamma_n * B_perp, MHz.
double nmr_larmor(double b_perp_g, const NVParams& params);

// Echo envelope with the hyperfine x Larmor modulation:
// exp[-(tau/T2)^p] * (1 - a sin^2(pi fA tau) sin^2(pi fB tau)).
double echo_signal_model(double tau_us, double t2_us, double stretch, double f_hyperfine_mhz,
                         double f_larmor_mhz, double depth);

struct ErrorBudget {
    double p_dip = 0.0;
    double p_t1 = 0.0;
    double p_t2 = 0.0;
    double p_off = 0.0;
    double p_err = 0.0;
};

// Driving-error budget. When tau_us < 0 the crosstalk term is maximized
// over pulse duration, otherwise evaluated at tau_us.
ErrorBudget error_budget(double omega_mhz, double delta_mhz, double kappa_khz, double t1_ms,
                         double t2_us, double tau_us = -1.0);

// Site-selectivity figure delta^2/(delta^2 + omega^2) with
// delta = gamma * gradient * separation.
double addressing_fidelity(double omega_mhz, double gradient_g_per_nm, double separation_nm,
                           const NVParams& params);

// Per-NV CW ESR lineshape width: natural 1/(pi T2*) with a quadrature-added
// power broadening term, MHz.
double esr_fwhm(double t2_star_us, double power_broadening_mhz);

// Peak-normalized Lorentzian.
double lorentzian(double f_mhz, double center_mhz, double fwhm_mhz);

}  // namespace nvgrad::spin
