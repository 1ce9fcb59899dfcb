#pragma once

#include <utility>
#include <vector>

#include "nvgrad/vec3.hpp"

// Microcoil magnetic fields from finite straight wire segments, plus the
// thermal and switching limits of the current drive.
//
// Units everywhere: Gauss, nm, mA, us, MHz (cyclic).

namespace nvgrad::coil {

struct Segment {
    Vec3 start;   // nm
    Vec3 end;     // nm
    double share = 1.0;  // signed fraction of the drive current
};

struct CoilGeometry {
    std::vector<Segment> segments;
    double nominal_wire_spacing_nm = 2500.0;
    double wire_width_nm = 2000.0;
    double wire_thickness_nm = 1000.0;
};

struct FieldSample {
    Vec3 position;   // nm
    Vec3 b_vec;      // Gauss
    double b_axial = 0.0;  // projection on the NV axis, Gauss
    double b_perp = 0.0;   // transverse magnitude, Gauss
};

enum class WaveformKind { dc, sinusoidal };

struct GradientWaveform {
    WaveformKind kind = WaveformKind::dc;
    double amplitude = 0.0;  // Gauss/nm
    double period_us = 0.0;  // sinusoidal only
    double current_ma = 0.0;
};

enum class CoolingMode { air, water };

struct CoilLimits {
    CoolingMode cooling_mode = CoolingMode::air;
    double max_current_ma = 700.0;
    double heat_coefficient = 40.0 / (0.7 * 0.7);  // K/A^2
    double rise_time_ns = 400.0;
    double slew_rate = 0.0;     // V/s, optional amplifier spec
    double peak_voltage = 0.0;  // V
};

CoilLimits default_limits(CoolingMode mode);

// Exact Biot-Savart field of a finite straight filament. Throws
// GeometryError for a zero-length segment and SingularityError when the
// evaluation point lies on the wire axis (within 1 nm).
Vec3 segment_field(const Segment& seg, double current_ma, const Vec3& point);

// Superposition over all segments; axial/perp decomposition against nv_axis.
FieldSample coil_field_at(const CoilGeometry& geom, double current_ma, const Vec3& point,
                          const Vec3& nv_axis);

// Central-difference d(b_axial)/dx sampled along a line. `direction` must be
// unit length; `step_nm` is the sample spacing, differences use 1 nm.
std::vector<std::pair<double, double>> gradient_profile(const CoilGeometry& geom,
                                                        double current_ma, const Vec3& origin,
                                                        const Vec3& direction, double extent_nm,
                                                        const Vec3& nv_axis,
                                                        double step_nm = 10.0);

// Echo-sign-weighted time average |(1/tau) \int sigma(t) g(t) dt| with the
// sign flipping at tau/2. DC averages to zero; a sinusoid of period tau
// gives (2/pi) * amplitude.
double effective_gradient(const GradientWaveform& waveform, double tau_us);

// Steady-state temperature rise, dT = heat_coefficient * I^2.
double thermal_rise(const CoilLimits& limits, double current_ma);

// 3 dB switching bandwidth ln(9)/(2 pi Tr), in MHz for Tr in ns.
double switching_bandwidth(double rise_time_ns);

// Calibrated default geometry: an anti-Helmholtz wire pair at the nominal
// 2.5 um spacing plus an outer counter-wound shim pair that flattens the
// gradient over the working area. The companion functions below give the
// matching NV array placement.
CoilGeometry paper_coil();

// Lab-frame NV symmetry axis the preset is calibrated against.
Vec3 paper_nv_axis();

// Centre of the four-site array in the coil frame, nm.
Vec3 paper_array_center();

// Direction along which the site positions (and the gradient) run.
Vec3 paper_gradient_axis();

}  // namespace nvgrad::coil
