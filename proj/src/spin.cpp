#include "nvgrad/spin.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "nvgrad/errors.hpp"

namespace nvgrad::spin {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;
}  // namespace

SpinOperators spin1_operators() {
    const double r = 1.0 / std::numbers::sqrt2;
    SpinOperators ops;
    ops.sx << 0, r, 0, r, 0, r, 0, r, 0;
    ops.sy << 0, -kI * r, 0, kI * r, 0, -kI * r, 0, kI * r, 0;
    ops.sz << 1, 0, 0, 0, 0, 0, 0, 0, -1;
    return ops;
}

Eigen::Matrix3cd nv_hamiltonian(const Vec3& b_nv_frame, const NVParams& params) {
    static const SpinOperators ops = spin1_operators();
    const double g = params.gamma_e_mhz_per_g;
    Eigen::Matrix3cd h = params.zero_field_splitting_mhz * (ops.sz * ops.sz);
    h += g * (b_nv_frame.x * ops.sx + b_nv_frame.y * ops.sy + b_nv_frame.z * ops.sz);
    return h;
}

std::array<Vec3, 4> orientation_axes(const Vec3& class0_axis) {
    // Tetrahedral axes of a [100]-cut crystal, then rotated so that the
    // crystal [111] direction maps onto the requested lab axis.
    const std::array<Vec3, 4> crystal = {{
        normalized({1, 1, 1}),
        normalized({1, -1, -1}),
        normalized({-1, 1, -1}),
        normalized({-1, -1, 1}),
    }};
    const Vec3 from = crystal[0];
    const Vec3 to = normalized(class0_axis);
    const Vec3 axis = cross(from, to);
    const double s = norm(axis);
    const double c = dot(from, to);
    std::array<Vec3, 4> out;
    if (s < 1e-14) {
        // parallel or antiparallel
        for (int i = 0; i < 4; ++i) out[i] = c > 0 ? crystal[i] : -crystal[i];
        return out;
    }
    const Vec3 k = axis / s;
    for (int i = 0; i < 4; ++i) {
        const Vec3& v = crystal[i];
        // Rodrigues rotation
        out[i] = v * c + cross(k, v) * s + k * (dot(k, v) * (1.0 - c));
    }
    return out;
}

EsrPair esr_frequencies_nv_frame(double b_axial, double b_perp, const NVParams& params) {
    const Eigen::Matrix3cd h = nv_hamiltonian({b_perp, 0.0, b_axial}, params);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericError("esr_frequencies: eigensolver failed");
    const auto& ev = solver.eigenvalues();  // ascending
    return {ev[1] - ev[0], ev[2] - ev[0]};
}

EsrPair esr_frequencies(const Vec3& b_lab, int orientation_class, const Vec3& class0_axis,
                        const NVParams& params) {
    const auto axes = orientation_axes(class0_axis);
    const Vec3& n = axes.at(static_cast<std::size_t>(orientation_class));
    const double b_ax = dot(b_lab, n);
    const double b_perp = norm(b_lab - n * b_ax);
    return esr_frequencies_nv_frame(b_ax, b_perp, params);
}

double rabi_population(double omega_mhz, double delta_mhz, double tau_us) {
    if (omega_mhz < 0.0) throw std::invalid_argument("rabi_population: omega must be >= 0");
    if (omega_mhz == 0.0) return 0.0;
    const double omega_r = std::hypot(omega_mhz, delta_mhz);
    const double s = std::sin(kPi * omega_r * tau_us);
    const double frac = (omega_mhz * omega_mhz) / (omega_r * omega_r);
    return frac * s * s;
}

double echo_envelope(double tau_us, double t2_us, double stretch) {
    if (t2_us <= 0.0 || stretch <= 0.0)
        throw std::invalid_argument("echo_envelope: T2 and stretch must be > 0");
    if (tau_us == 0.0) return 1.0;
    return std::exp(-std::pow(tau_us / t2_us, stretch));
}

double nmr_larmor(double b_perp_g, const NVParams& params) {
    if (b_perp_g < 0.0) throw std::invalid_argument("nmr_larmor: field must be >= 0");
    return params.enhancement_factor * params.gamma_n_khz_per_g * 1e-3 * b_perp_g;
}

double echo_signal_model(double tau_us, double t2_us, double stretch, double f_hyperfine_mhz,
                         double f_larmor_mhz, double depth) {
    if (depth < 0.0 || depth > 1.0)
        throw std::invalid_argument("echo_signal_model: depth must be in [0,1]");
    const double sa = std::sin(kPi * f_hyperfine_mhz * tau_us);
    const double sb = std::sin(kPi * f_larmor_mhz * tau_us);
    return echo_envelope(tau_us, t2_us, stretch) * (1.0 - depth * sa * sa * sb * sb);
}

ErrorBudget error_budget(double omega_mhz, double delta_mhz, double kappa_khz, double t1_ms,
                         double t2_us, double tau_us) {
    if (omega_mhz <= 0.0) throw std::invalid_argument("error_budget: omega must be > 0");
    if (t1_ms <= 0.0 || t2_us <= 0.0)
        throw std::invalid_argument("error_budget: time constants must be > 0");
    ErrorBudget b;
    const double kappa_mhz = kappa_khz * 1e-3;
    b.p_dip = (kappa_mhz / omega_mhz) * (kappa_mhz / omega_mhz);
    b.p_t1 = 1e-3 / (omega_mhz * t1_ms);  // 1/(Omega T1), unit-consistent
    const double ot2 = omega_mhz * t2_us;
    b.p_t2 = 1.0 / (ot2 * ot2 * ot2);
    if (tau_us < 0.0) {
        const double omega_r2 = omega_mhz * omega_mhz + delta_mhz * delta_mhz;
        b.p_off = omega_mhz * omega_mhz / omega_r2;
    } else {
        b.p_off = rabi_population(omega_mhz, delta_mhz, tau_us);
    }
    b.p_err = b.p_dip + b.p_t1 + b.p_t2 + b.p_off;
    return b;
}

double addressing_fidelity(double omega_mhz, double gradient_g_per_nm, double separation_nm,
                           const NVParams& params) {
    const double delta = params.gamma_e_mhz_per_g * gradient_g_per_nm * separation_nm;
    const double d2 = delta * delta;
    const double o2 = omega_mhz * omega_mhz;
    if (d2 + o2 == 0.0) return 1.0;
    return d2 / (d2 + o2);
}

double esr_fwhm(double t2_star_us, double power_broadening_mhz) {
    if (t2_star_us <= 0.0) throw std::invalid_argument("esr_fwhm: T2* must be > 0");
    const double natural = 1.0 / (kPi * t2_star_us);
    return std::hypot(natural, power_broadening_mhz);
}

double lorentzian(double f_mhz, double center_mhz, double fwhm_mhz) {
    const double hw = fwhm_mhz / 2.0;
    const double d = f_mhz - center_mhz;
    return hw * hw / (d * d + hw * hw);
}

}  // namespace nvgrad::spin
