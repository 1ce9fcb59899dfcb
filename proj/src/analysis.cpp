#include "nvgrad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "nvgrad/errors.hpp"

namespace nvgrad::analysis {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZ67 = 0.9742;  // two-sided 67% normal quantile

double norm2(const Eigen::VectorXd& v) { return v.norm(); }

Eigen::VectorXd residual_vector(const ModelFn& model, const std::vector<double>& x,
                                const std::vector<double>& y, const std::vector<double>& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) r[static_cast<Eigen::Index>(i)] = y[i] - model(p, x[i]);
    return r;
}

Eigen::MatrixXd numeric_jacobian(const ModelFn& model, const std::vector<double>& x,
                                 const std::vector<double>& p) {
    const auto m = static_cast<Eigen::Index>(x.size());
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd jac(m, n);
    std::vector<double> plus = p, minus = p;
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        const double h = std::max(1e-7 * std::abs(p[sj]), 1e-9);
        plus[sj] = p[sj] + h;
        minus[sj] = p[sj] - h;
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto si = static_cast<std::size_t>(i);
            jac(i, j) = (model(plus, x[si]) - model(minus, x[si])) / (2.0 * h);
        }
        plus[sj] = p[sj];
        minus[sj] = p[sj];
    }
    return jac;
}

std::vector<double> smoothed(const std::vector<double>& y, int half_width) {
    const auto n = static_cast<int>(y.size());
    std::vector<double> out(y.size());
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        int count = 0;
        for (int j = std::max(0, i - half_width); j <= std::min(n - 1, i + half_width); ++j) {
            sum += y[static_cast<std::size_t>(j)];
            ++count;
        }
        out[static_cast<std::size_t>(i)] = sum / count;
    }
    return out;
}

}  // namespace

double FitResult::param(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return parameters[i];
    throw std::out_of_range("FitResult: no parameter named " + name);
}

double FitResult::conf(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return confidence[i];
    throw std::out_of_range("FitResult: no parameter named " + name);
}

FitResult fit_least_squares(const ModelFn& model, const std::vector<double>& x,
                            const std::vector<double>& y, std::vector<double> init,
                            const std::vector<std::string>& names, int max_iterations) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_least_squares: size mismatch");
    if (x.size() < init.size()) throw std::invalid_argument("fit_least_squares: underdetermined");
    if (names.size() != init.size())
        throw std::invalid_argument("fit_least_squares: names/init size mismatch");

    std::vector<double> p = std::move(init);
    Eigen::VectorXd r = residual_vector(model, x, y, p);
    double norm = norm2(r);
    if (!std::isfinite(norm)) throw NumericError("fit_least_squares: non-finite initial residual");

    bool converged = false;
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        const Eigen::MatrixXd jac = numeric_jacobian(model, x, p);
        const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(r);
        if (!step.allFinite()) break;

        // Step halving keeps the residual norm non-increasing.
        double alpha = 1.0;
        std::vector<double> trial(p.size());
        bool accepted = false;
        for (int halvings = 0; halvings < 40; ++halvings, alpha *= 0.5) {
            for (std::size_t j = 0; j < p.size(); ++j)
                trial[j] = p[j] + alpha * step[static_cast<Eigen::Index>(j)];
            const Eigen::VectorXd rt = residual_vector(model, x, y, trial);
            const double nt = norm2(rt);
            if (std::isfinite(nt) && nt <= norm) {
                const double drop = norm - nt;
                p = trial;
                r = rt;
                norm = nt;
                accepted = true;
                if (drop <= 1e-14 * (1.0 + norm)) converged = true;
                break;
            }
        }
        if (!accepted) converged = true;  // stationary: no descent direction left
        if (converged) {
            ++iter;
            break;
        }
    }

    FitResult result;
    result.names = names;
    result.parameters = p;
    result.residual_norm = norm;
    result.converged = converged;
    result.iterations = iter;
    result.residuals.assign(r.data(), r.data() + r.size());

    // 67% half-widths from the linearized covariance at the optimum.
    const Eigen::MatrixXd jac = numeric_jacobian(model, x, p);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const auto dof = static_cast<double>(x.size()) - static_cast<double>(p.size());
    const double s2 = dof > 0.0 ? norm * norm / dof : 0.0;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jtj);
    const Eigen::MatrixXd cov = s2 * cod.pseudoInverse();
    result.confidence.resize(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double v = cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
        result.confidence[j] = kZ67 * std::sqrt(std::max(0.0, v));
    }
    return result;
}

FitResult fit_multi_lorentzian(const sequence::Spectrum& spectrum, int n_peaks) {
    const auto& f = spectrum.frequency_mhz;
    const auto& y = spectrum.contrast;
    if (n_peaks < 1) throw std::invalid_argument("fit_multi_lorentzian: n_peaks must be >= 1");
    if (f.size() != y.size() || f.size() < static_cast<std::size_t>(4 * n_peaks + 2))
        throw std::invalid_argument("fit_multi_lorentzian: need >= 4*n_peaks + 2 points");

    const auto n = static_cast<int>(f.size());
    const int half_width = std::max(1, n / 64);
    const std::vector<double> ys = smoothed(y, half_width);

    const double lo = *std::min_element(ys.begin(), ys.end());
    const double hi = *std::max_element(ys.begin(), ys.end());
    if (hi - lo <= 0.0) throw DetectionError("fit_multi_lorentzian: flat spectrum");
    const double prominence = lo + 0.05 * (hi - lo);

    struct Candidate {
        int index;
        double value;
    };
    std::vector<Candidate> maxima;
    for (int i = 1; i + 1 < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        if (ys[si] > ys[si - 1] && ys[si] >= ys[si + 1] && ys[si] > prominence)
            maxima.push_back({i, ys[si]});
    }
    std::stable_sort(maxima.begin(), maxima.end(),
                     [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    // Greedy selection with a minimum spacing so one broad peak does not
    // swallow all the slots.
    const int min_spacing = 2 * half_width + 1;
    std::vector<int> picked;
    for (const auto& cand : maxima) {
        bool clear = true;
        for (int idx : picked)
            if (std::abs(idx - cand.index) < min_spacing) clear = false;
        if (clear) picked.push_back(cand.index);
        if (static_cast<int>(picked.size()) == n_peaks) break;
    }
    if (static_cast<int>(picked.size()) < n_peaks)
        throw DetectionError("fit_multi_lorentzian: found " + std::to_string(picked.size()) +
                             " candidate peaks, need " + std::to_string(n_peaks));
    std::sort(picked.begin(), picked.end());

    const double span = f.back() - f.front();
    std::vector<double> init{lo};
    std::vector<std::string> names{"baseline"};
    for (int k = 0; k < n_peaks; ++k) {
        const int idx = picked[static_cast<std::size_t>(k)];
        const double amp = ys[static_cast<std::size_t>(idx)] - lo;
        const double half_max = lo + amp / 2.0;
        int left = idx, right = idx;
        while (left > 0 && ys[static_cast<std::size_t>(left)] > half_max) --left;
        while (right + 1 < n && ys[static_cast<std::size_t>(right)] > half_max) ++right;
        double width = f[static_cast<std::size_t>(right)] - f[static_cast<std::size_t>(left)];
        if (width <= 0.0) width = span / (8.0 * n_peaks);
        init.push_back(f[static_cast<std::size_t>(idx)]);
        init.push_back(width);
        init.push_back(amp);
        const std::string tag = std::to_string(k);
        names.push_back("center" + tag);
        names.push_back("fwhm" + tag);
        names.push_back("amplitude" + tag);
    }

    const int np = n_peaks;
    ModelFn model = [np](const std::vector<double>& p, double freq) {
        double value = p[0];
        for (int k = 0; k < np; ++k) {
            const auto base = static_cast<std::size_t>(1 + 3 * k);
            const double u = 2.0 * (freq - p[base]) / std::abs(p[base + 1]);
            value += p[base + 2] / (1.0 + u * u);
        }
        return value;
    };

    FitResult result = fit_least_squares(model, f, y, init, names);

    // Normalize widths to positive and order the triples by center.
    struct Triple {
        double c, w, a, cc, cw, ca;
    };
    std::vector<Triple> triples;
    for (int k = 0; k < np; ++k) {
        const auto base = static_cast<std::size_t>(1 + 3 * k);
        triples.push_back({result.parameters[base], std::abs(result.parameters[base + 1]),
                           result.parameters[base + 2], result.confidence[base],
                           result.confidence[base + 1], result.confidence[base + 2]});
    }
    std::sort(triples.begin(), triples.end(),
              [](const Triple& a, const Triple& b) { return a.c < b.c; });
    for (int k = 0; k < np; ++k) {
        const auto base = static_cast<std::size_t>(1 + 3 * k);
        result.parameters[base] = triples[static_cast<std::size_t>(k)].c;
        result.parameters[base + 1] = triples[static_cast<std::size_t>(k)].w;
        result.parameters[base + 2] = triples[static_cast<std::size_t>(k)].a;
        result.confidence[base] = triples[static_cast<std::size_t>(k)].cc;
        result.confidence[base + 1] = triples[static_cast<std::size_t>(k)].cw;
        result.confidence[base + 2] = triples[static_cast<std::size_t>(k)].ca;
    }
    return result;
}

FitResult fit_damped_sinusoid(const sequence::ExperimentTrace& trace) {
    const auto& t = trace.time_us;
    const auto& y = trace.signal;
    if (t.size() != y.size() || t.size() < 8)
        throw std::invalid_argument("fit_damped_sinusoid: need >= 8 points");

    const auto n = t.size();
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    const double span = t.back() - t.front();
    if (span <= 0.0) throw std::invalid_argument("fit_damped_sinusoid: degenerate time axis");
    const double dt = span / static_cast<double>(n - 1);

    // Dominant discrete-spectrum bin of the detrended trace.
    double best_mag = 0.0, f0 = 0.0, amp0 = 0.0, phase0 = 0.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = -2.0 * kPi * static_cast<double>(k * i) / static_cast<double>(n);
            acc += (y[i] - mean) * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        if (std::abs(acc) > best_mag) {
            best_mag = std::abs(acc);
            f0 = static_cast<double>(k) / (static_cast<double>(n) * dt);
            amp0 = 2.0 * std::abs(acc) / static_cast<double>(n);
            phase0 = std::arg(acc);
        }
    }

    double scale = 0.0;
    for (const double v : y) scale = std::max(scale, std::abs(v - mean));
    const std::vector<std::string> names{"frequency_mhz", "amplitude", "phase_rad", "decay_us",
                                         "offset"};
    if (scale <= 1e-12 * std::max(1.0, std::abs(mean)) || amp0 <= 0.0) {
        // Constant trace: exact zero-amplitude fit, frequency meaningless.
        FitResult result;
        result.names = names;
        result.parameters = {0.0, 0.0, 0.0, span, mean};
        result.confidence = {std::numeric_limits<double>::infinity(), 0.0,
                             std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity(), 0.0};
        result.residuals.resize(n);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            result.residuals[i] = y[i] - mean;
            norm += result.residuals[i] * result.residuals[i];
        }
        result.residual_norm = std::sqrt(norm);
        result.converged = false;
        return result;
    }

    ModelFn model = [](const std::vector<double>& p, double tt) {
        return p[4] + p[1] * std::exp(-tt / std::abs(p[3])) * std::cos(2.0 * kPi * p[0] * tt + p[2]);
    };
    FitResult result =
        fit_least_squares(model, t, y, {f0, amp0, phase0, 4.0 * span, mean}, names);

    // Canonical form: positive amplitude and frequency, phase in (-pi, pi].
    auto& p = result.parameters;
    p[3] = std::abs(p[3]);
    if (p[1] < 0.0) {
        p[1] = -p[1];
        p[2] += kPi;
    }
    if (p[0] < 0.0) {
        p[0] = -p[0];
        p[2] = -p[2];
    }
    p[2] = std::remainder(p[2], 2.0 * kPi);

    if (span * p[0] < 1.0) {
        // Less than one observed period: keep the numbers, flag them.
        result.converged = false;
        result.confidence[0] = std::numeric_limits<double>::infinity();
    }
    return result;
}

double gradient_from_splitting(double delta_f_mhz, double delta_x_nm,
                               const spin::NVParams& params) {
    if (delta_x_nm <= 0.0)
        throw std::invalid_argument("gradient_from_splitting: delta_x must be > 0");
    return delta_f_mhz / (params.gamma_e_mhz_per_g * delta_x_nm);
}

SlopeFit calibrate_gradient_per_current(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("calibrate_gradient_per_current: need >= 2 points");
    bool distinct = false;
    for (const auto& pt : points)
        if (pt.first != points.front().first) distinct = true;
    if (!distinct) throw NumericError("calibrate_gradient_per_current: all currents identical");

    double sxx = 0.0, sxy = 0.0;
    for (const auto& [current_ma, gradient] : points) {
        const double amps = current_ma * 1e-3;
        sxx += amps * amps;
        sxy += amps * gradient;
    }
    const double slope = sxy / sxx;
    double ss = 0.0;
    for (const auto& [current_ma, gradient] : points) {
        const double r = gradient - slope * current_ma * 1e-3;
        ss += r * r;
    }
    const double dof = static_cast<double>(points.size()) - 1.0;
    const double var = dof > 0.0 ? ss / dof / sxx : 0.0;
    return {slope, kZ67 * std::sqrt(var)};
}

SlopeFit fit_gyromagnetic_ratio(const std::vector<std::pair<double, double>>& points,
                                double enhancement) {
    if (points.size() < 2)
        throw std::invalid_argument("fit_gyromagnetic_ratio: need >= 2 points");
    if (enhancement <= 0.0)
        throw std::invalid_argument("fit_gyromagnetic_ratio: enhancement must be > 0");
    double sx = 0.0, sy = 0.0;
    for (const auto& [b, fn] : points) {
        sx += b;
        sy += fn;
    }
    const double nn = static_cast<double>(points.size());
    const double xbar = sx / nn, ybar = sy / nn;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [b, fn] : points) {
        sxx += (b - xbar) * (b - xbar);
        sxy += (b - xbar) * (fn - ybar);
    }
    if (sxx <= 0.0) throw NumericError("fit_gyromagnetic_ratio: fields are rank deficient");
    const double slope_mhz_per_g = sxy / sxx;
    double ss = 0.0;
    for (const auto& [b, fn] : points) {
        const double r = fn - ybar - slope_mhz_per_g * (b - xbar);
        ss += r * r;
    }
    const double dof = nn - 2.0;
    const double var = dof > 0.0 ? ss / dof / sxx : 0.0;
    const double to_bare_khz = 1e3 / enhancement;
    return {slope_mhz_per_g * to_bare_khz, kZ67 * std::sqrt(var) * to_bare_khz};
}

PlannerReport plan_feasibility(double length_nm, double separation_nm, double omega_mhz,
                               coil::CoolingMode cooling, const coil::CoilLimits& limits,
                               const PlannerSettings& settings, const spin::NVParams& params) {
    if (separation_nm <= 0.0 || length_nm < separation_nm)
        throw std::invalid_argument("plan_feasibility: require L >= D > 0");
    if (omega_mhz <= 0.0) throw std::invalid_argument("plan_feasibility: omega must be > 0");
    const double floor = settings.fidelity_floor;
    if (floor <= 0.0 || floor >= 1.0)
        throw std::invalid_argument("plan_feasibility: fidelity floor must be in (0, 1)");

    PlannerReport report;
    report.dynamic_range = length_nm / separation_nm;
    // Invert F = delta^2 / (delta^2 + omega^2) for the detuning that meets
    // the floor, then the gradient that provides it over one separation.
    report.required_detuning_mhz = omega_mhz * std::sqrt(floor / (1.0 - floor));
    report.required_gradient_g_per_nm =
        report.required_detuning_mhz / (params.gamma_e_mhz_per_g * separation_nm);
    // A coil scaled up to span L keeps its field at fixed current but its
    // gradient-per-current falls as (L_ref/L)^2.
    const double scale = settings.reference_length_nm / length_nm;
    const double slope = settings.reference_slope_g_per_nm_per_a * scale * scale;
    report.required_current_ma = report.required_gradient_g_per_nm / slope * 1e3;
    report.bandwidth_mhz = settings.reference_bandwidth_mhz * settings.reference_current_ma /
                           report.required_current_ma;
    const coil::CoilLimits lim = limits.heat_coefficient > 0.0 ? limits
                                                               : coil::default_limits(cooling);
    report.thermal_rise_k = coil::thermal_rise(lim, report.required_current_ma);
    report.fidelity = spin::addressing_fidelity(omega_mhz, report.required_gradient_g_per_nm,
                                                separation_nm, params);
    report.feasible = report.thermal_rise_k <= settings.max_thermal_rise_k &&
                      report.fidelity + 1e-12 >= floor &&
                      report.required_current_ma <= lim.max_current_ma;
    return report;
}

}  // namespace nvgrad::analysis
