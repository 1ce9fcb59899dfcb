#include "nvgrad/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <execution>
#include <numbers>
#include <numeric>

#include "nvgrad/errors.hpp"

namespace nvgrad::sequence {

namespace {

constexpr double kPi = std::numbers::pi;

template <typename Fn>
void sweep(std::size_t n, Fn&& fn) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::for_each(std::execution::par, idx.begin(), idx.end(), fn);
}

struct ParticipatingNv {
    const array_model::NVCenter* nv;
    std::size_t site_index;
};

std::vector<ParticipatingNv> selected_nvs(const array_model::NVArray& array,
                                          const std::optional<std::string>& site) {
    std::vector<ParticipatingNv> out;
    for (std::size_t s = 0; s < array.sites.size(); ++s) {
        if (site && array.sites[s].label != *site) continue;
        for (const auto& nv : array.sites[s].nvs)
            if (nv.orientation_class == 0) out.push_back({&nv, s});
    }
    if (site && out.empty() && std::none_of(array.sites.begin(), array.sites.end(),
                                            [&](const auto& s) { return s.label == *site; }))
        throw ConfigError("unknown site label: " + *site);
    return out;
}

Vec3 lab_field_at(const ExperimentConfig& cfg, const array_model::NVArray& array,
                  const Vec3& pos, double current_ma) {
    Vec3 b = array.nv_axis * cfg.bias_field_g;
    if (current_ma != 0.0)
        b += coil_field_at(cfg.geometry, current_ma, pos, array.nv_axis).b_vec;
    return b;
}

Vec3 gradient_axis_of(const array_model::NVArray& array) {
    if (array.sites.size() >= 2)
        return normalized(array.sites.back().center - array.sites.front().center);
    return {1.0, 0.0, 0.0};
}

double readout_sigma(const ExperimentConfig& cfg) {
    return cfg.noiseless ? 0.0 : std::sqrt(2.0 / static_cast<double>(cfg.photons_per_point));
}

}  // namespace

double sample_readout(double expected_contrast, std::int64_t photons_per_point, RngStream& rng) {
    if (expected_contrast < 0.0 || expected_contrast > 0.05)
        throw std::invalid_argument("sample_readout: contrast outside [0, 0.05]");
    if (photons_per_point < 1)
        throw std::invalid_argument("sample_readout: photons_per_point must be >= 1");
    const double n = static_cast<double>(photons_per_point);
    const double signal = static_cast<double>(rng.poisson(n * (1.0 - expected_contrast)));
    const double reference = static_cast<double>(rng.poisson(n));
    if (reference == 0.0) return 0.0;
    return 1.0 - signal / reference;
}

Spectrum run_cw_esr(const array_model::NVArray& array, const ExperimentConfig& config,
                    double f_lo_mhz, double f_hi_mhz, int n_points) {
    if (n_points < 2 || f_hi_mhz <= f_lo_mhz)
        throw std::invalid_argument("run_cw_esr: bad frequency range");
    if (array.sites.empty()) throw std::invalid_argument("run_cw_esr: empty array");

    const auto nvs = selected_nvs(array, std::nullopt);
    struct Line {
        double f_minus, f_plus, fwhm, contrast;
    };
    std::vector<Line> lines;
    lines.reserve(nvs.size());
    for (const auto& p : nvs) {
        const Vec3 b = lab_field_at(config, array, p.nv->position, config.coil_current_ma);
        const auto esr = spin::esr_frequencies(b, 0, array.nv_axis, config.nv);
        const double fwhm = spin::esr_fwhm(p.nv->t2_star_us, config.esr_power_broadening_mhz);
        lines.push_back({esr.f_minus_mhz, esr.f_plus_mhz, fwhm, p.nv->contrast});
    }

    Spectrum spec;
    spec.frequency_mhz.resize(static_cast<std::size_t>(n_points));
    spec.contrast.resize(spec.frequency_mhz.size());
    spec.noise_sigma.assign(spec.frequency_mhz.size(), readout_sigma(config));
    const double df = (f_hi_mhz - f_lo_mhz) / (n_points - 1);

    sweep(spec.frequency_mhz.size(), [&](std::size_t i) {
        const double f = f_lo_mhz + df * static_cast<double>(i);
        double expected = config.background_contrast;
        for (const auto& line : lines)
            expected += line.contrast * (spin::lorentzian(f, line.f_minus, line.fwhm) +
                                         spin::lorentzian(f, line.f_plus, line.fwhm));
        spec.frequency_mhz[i] = f;
        if (config.noiseless) {
            spec.contrast[i] = expected - config.background_contrast;
        } else {
            RngStream rng(config.seed, i);
            spec.contrast[i] = sample_readout(expected, config.photons_per_point, rng) -
                               config.background_contrast;
        }
    });
    return spec;
}

ExperimentTrace run_rabi(const array_model::NVArray& array, const ExperimentConfig& config,
                         const std::vector<double>& tau_mw_us) {
    if (config.mw_frequency_mhz <= 0.0)
        throw ConfigError("run_rabi: mw_frequency must be set");
    for (const auto& site : array.sites)
        if (!config.rabi_profile.count(site.label))
            throw ConfigError("run_rabi: rabi_profile missing site " + site.label);

    const auto nvs = selected_nvs(array, std::nullopt);
    struct Drive {
        double omega, delta, contrast;
    };
    std::vector<Drive> drives;
    drives.reserve(nvs.size());
    for (const auto& p : nvs) {
        const Vec3 b = lab_field_at(config, array, p.nv->position, config.coil_current_ma);
        const auto esr = spin::esr_frequencies(b, 0, array.nv_axis, config.nv);
        const double f = std::abs(esr.f_plus_mhz - config.mw_frequency_mhz) <
                                 std::abs(esr.f_minus_mhz - config.mw_frequency_mhz)
                             ? esr.f_plus_mhz
                             : esr.f_minus_mhz;
        drives.push_back({config.rabi_profile.at(array.sites[p.site_index].label),
                          f - config.mw_frequency_mhz, p.nv->contrast});
    }

    ExperimentTrace trace;
    trace.time_us = tau_mw_us;
    trace.signal.resize(tau_mw_us.size());
    trace.noise_sigma.assign(tau_mw_us.size(), readout_sigma(config));

    sweep(tau_mw_us.size(), [&](std::size_t i) {
        double expected = config.background_contrast;
        for (const auto& d : drives)
            expected += d.contrast * spin::rabi_population(d.omega, d.delta, tau_mw_us[i]);
        if (config.noiseless) {
            trace.signal[i] = expected - config.background_contrast;
        } else {
            RngStream rng(config.seed, i);
            trace.signal[i] = sample_readout(expected, config.photons_per_point, rng) -
                              config.background_contrast;
        }
    });
    return trace;
}

ExperimentTrace run_hahn_echo(const array_model::NVArray& array, const ExperimentConfig& config,
                              const std::vector<double>& tau_us,
                              const std::optional<std::string>& site) {
    if (site && config.coil_current_ma == 0.0)
        throw ProtocolError("run_hahn_echo: site selection needs the DC gradient on");

    const auto nvs = selected_nvs(array, site);
    struct EchoNv {
        double t2, f_larmor, contrast;
    };
    std::vector<EchoNv> echo;
    echo.reserve(nvs.size());
    double total_contrast = 0.0;
    for (const auto& p : nvs) {
        double f_b = 0.0;
        if (site) {
            const auto fs =
                coil_field_at(config.geometry, config.coil_current_ma, p.nv->position,
                              array.nv_axis);
            f_b = spin::nmr_larmor(fs.b_perp, config.nv);
        }
        echo.push_back({p.nv->t2_us, f_b, p.nv->contrast});
        total_contrast += p.nv->contrast;
    }
    if (echo.empty()) throw ConfigError("run_hahn_echo: no participating NVs");
    const double mean_contrast = total_contrast / static_cast<double>(echo.size());

    ExperimentTrace trace;
    trace.time_us = tau_us;
    trace.signal.resize(tau_us.size());
    trace.noise_sigma.assign(tau_us.size(), readout_sigma(config) / mean_contrast);

    sweep(tau_us.size(), [&](std::size_t i) {
        double acc = 0.0;
        for (const auto& e : echo)
            acc += e.contrast * spin::echo_signal_model(tau_us[i], e.t2, config.echo_stretch,
                                                        config.nv.hyperfine_mhz, e.f_larmor,
                                                        config.modulation_depth);
        const double s = acc / total_contrast;
        if (config.noiseless) {
            trace.signal[i] = s;
        } else {
            RngStream rng(config.seed, i);
            trace.signal[i] =
                sample_readout(mean_contrast * s, config.photons_per_point, rng) / mean_contrast;
        }
    });
    return trace;
}

KSpaceRecord run_fourier_kspace(const array_model::NVArray& array,
                                const ExperimentConfig& config, double tau_us,
                                const std::vector<double>& g_amplitudes,
                                const std::optional<std::string>& site) {
    if (tau_us <= 0.0) throw std::invalid_argument("run_fourier_kspace: tau must be > 0");
    if (!std::is_sorted(g_amplitudes.begin(), g_amplitudes.end()) ||
        (!g_amplitudes.empty() && g_amplitudes.front() < 0.0))
        throw std::invalid_argument("run_fourier_kspace: amplitudes must be nonnegative increasing");

    const auto nvs = selected_nvs(array, site);
    if (nvs.empty()) throw ConfigError("run_fourier_kspace: no participating NVs");
    const Vec3 axis = gradient_axis_of(array);
    const Vec3 origin = array.sites.front().center;

    std::vector<double> x(nvs.size()), c(nvs.size());
    double total_contrast = 0.0;
    double min_t2 = nvs.front().nv->t2_us;
    for (std::size_t i = 0; i < nvs.size(); ++i) {
        x[i] = dot(nvs[i].nv->position - origin, axis);
        c[i] = nvs[i].nv->contrast;
        total_contrast += c[i];
        min_t2 = std::min(min_t2, nvs[i].nv->t2_us);
    }
    const double mean_contrast = total_contrast / static_cast<double>(nvs.size());
    const double gamma = config.nv.gamma_e_mhz_per_g;

    KSpaceRecord rec;
    rec.tau_us = tau_us;
    rec.selected_site = site;
    rec.decoherence_warning = tau_us > 3.0 * min_t2;
    rec.k_per_nm.resize(g_amplitudes.size());
    rec.signal.resize(g_amplitudes.size());
    rec.noise_sigma.assign(g_amplitudes.size(), readout_sigma(config) / (2.0 * mean_contrast));

    sweep(g_amplitudes.size(), [&](std::size_t j) {
        coil::GradientWaveform waveform;
        waveform.kind = coil::WaveformKind::sinusoidal;
        waveform.amplitude = g_amplitudes[j];
        waveform.period_us = tau_us;
        const double g_eff = coil::effective_gradient(waveform, tau_us);
        const double k_exact = gamma * tau_us * g_eff;  // cycles/nm
        rec.k_per_nm[j] =
            config.paper_nominal_k_axis ? gamma * tau_us * g_amplitudes[j] : k_exact;

        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            acc += c[i] * std::cos(2.0 * kPi * k_exact * x[i]);
        const double s = acc / total_contrast;  // in [-1, 1]
        if (config.noiseless) {
            rec.signal[j] = s;
        } else {
            // map [-1,1] onto a contrast in [0, 2 c̄] for the photon model
            RngStream rng(config.seed, j);
            const double noisy =
                sample_readout(mean_contrast * (1.0 + s) / 2.0, config.photons_per_point, rng);
            rec.signal[j] = 2.0 * noisy / mean_contrast - 1.0;
        }
    });
    return rec;
}

SelectionResult run_2d_selection(const Lattice2DSpec& lattice, const ExperimentConfig& config,
                                 int target_row, int target_col, double gradient_x_g_per_nm,
                                 double gradient_y_g_per_nm) {
    if (lattice.rows < 1 || lattice.cols < 1)
        throw ProtocolError("run_2d_selection: degenerate lattice");
    if (target_row < 0 || target_row >= lattice.rows || target_col < 0 ||
        target_col >= lattice.cols)
        throw ProtocolError("run_2d_selection: target outside lattice");

    SelectionResult result;
    result.rows = lattice.rows;
    result.cols = lattice.cols;
    result.polarization.assign(static_cast<std::size_t>(lattice.rows) * lattice.cols, 0.0);

    const double gamma = config.nv.gamma_e_mhz_per_g;
    const double delta_row = gamma * gradient_x_g_per_nm * lattice.pitch_nm;
    const double delta_col = gamma * gradient_y_g_per_nm * lattice.pitch_nm;

    // Zero gradient on a multi-row (or multi-column) axis distinguishes
    // nothing: report failure rather than a fake selection.
    if ((lattice.rows > 1 && delta_row == 0.0) || (lattice.cols > 1 && delta_col == 0.0)) {
        result.success = false;
        return result;
    }

    // Pulse amplitude synchronized so a site detuned by one pitch completes
    // whole Bloch rotations during the 3pi/2 pulse: Omega_R * t = 3 full
    // turns while Omega * t = 3/4 turn.
    auto sync_omega = [](double delta) {
        return delta / std::sqrt(16.0 - 1.0);
    };

    struct Bloch {
        double x = 0.0, y = 0.0, z = 1.0;
    };
    std::vector<Bloch> b(result.polarization.size());

    auto rotate = [](Bloch& v, double ux, double uz, double angle) {
        // Rodrigues rotation about the unit axis (ux, 0, uz).
        const double c = std::cos(angle), s = std::sin(angle);
        const double d = ux * v.x + uz * v.z;
        const Bloch r{v.x * c + (-uz * v.y) * s + ux * d * (1 - c),
                      v.y * c + (uz * v.x - ux * v.z) * s,
                      v.z * c + (ux * v.y) * s + uz * d * (1 - c)};
        v = r;
    };

    auto pulse = [&](Bloch& v, double omega, double delta, double cycles_on_resonance) {
        // duration t such that omega * t = cycles_on_resonance (in turns)
        if (omega <= 0.0) throw ProtocolError("run_2d_selection: pulse amplitude must be > 0");
        const double t = cycles_on_resonance / omega;
        const double omega_r = std::hypot(omega, delta);
        const double angle = 2.0 * kPi * omega_r * t;
        rotate(v, omega / omega_r, delta / omega_r, angle);
    };

    auto dephase = [&](Bloch& v) {
        const double decay = std::exp(-config.dephasing_wait_t2star_multiple);
        v.x *= decay;
        v.y *= decay;
    };

    auto encode_axis = [&](bool along_rows, int target, double delta_pitch) {
        const double omega = config.selection_pulse_omega_mhz > 0.0
                                 ? config.selection_pulse_omega_mhz
                                 : sync_omega(std::abs(delta_pitch));
        for (int r = 0; r < lattice.rows; ++r) {
            for (int col = 0; col < lattice.cols; ++col) {
                Bloch& v = b[static_cast<std::size_t>(r) * lattice.cols + col];
                pulse(v, omega, 0.0, 0.25);  // uniform pi/2, no gradient
                const int index = along_rows ? r : col;
                const double delta = delta_pitch * (index - target);
                pulse(v, omega, delta, 0.75);  // frequency-encoded 3pi/2
                dephase(v);
            }
        }
    };

    if (lattice.rows > 1) encode_axis(true, target_row, delta_row);
    if (lattice.cols > 1) encode_axis(false, target_col, delta_col);

    for (std::size_t i = 0; i < b.size(); ++i)
        result.polarization[i] = (1.0 + b[i].z) / 2.0;
    result.success = true;
    return result;
}

}  // namespace nvgrad::sequence
