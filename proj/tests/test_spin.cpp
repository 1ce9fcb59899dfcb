#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "nvgrad/rng.hpp"
#include "nvgrad/spin.hpp"

using namespace nvgrad;
using namespace nvgrad::spin;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent eigenvalue route: characteristic polynomial of the Hermitian
// 3x3 solved with the trigonometric cubic formula.
std::array<double, 3> charpoly_eigenvalues(const Eigen::Matrix3cd& h) {
    const double a = -h.trace().real();
    // sum of principal 2x2 minors
    double b = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            b += (h(i, i) * h(j, j) - h(i, j) * h(j, i)).real();
    const double c = -h.determinant().real();

    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    std::array<double, 3> roots{};
    if (p >= 0.0) {
        // degenerate (p ~ 0): triple root
        roots.fill(-a / 3.0);
    } else {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double theta = std::acos(arg);
        for (int k = 0; k < 3; ++k)
            roots[static_cast<std::size_t>(k)] =
                m * std::cos((theta - 2.0 * kPi * k) / 3.0) - a / 3.0;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

Vec3 rodrigues(const Vec3& v, const Vec3& unit_axis, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return v * c + cross(unit_axis, v) * s + unit_axis * (dot(unit_axis, v) * (1.0 - c));
}

}  // namespace

TEST_CASE("spin-1 operators satisfy the su(2) algebra") {
    const auto ops = spin1_operators();
    const Eigen::Matrix3cd comm = ops.sx * ops.sy - ops.sy * ops.sx;
    CHECK((comm - std::complex<double>(0.0, 1.0) * ops.sz).norm() < 1e-14);
    const Eigen::Matrix3cd casimir =
        ops.sx * ops.sx + ops.sy * ops.sy + ops.sz * ops.sz;
    CHECK((casimir - 2.0 * Eigen::Matrix3cd::Identity()).norm() < 1e-14);
}

TEST_CASE("eigensolver agrees with the characteristic-polynomial oracle") {
    const NVParams params;
    RngStream rng(31, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 b{rng.uniform(-200.0, 200.0), rng.uniform(-200.0, 200.0),
                     rng.uniform(-200.0, 200.0)};
        const Eigen::Matrix3cd h = nv_hamiltonian(b, params);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(h);
        const auto oracle = charpoly_eigenvalues(h);
        const double scale = std::abs(oracle[2] - oracle[0]) + 1.0;
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(solver.eigenvalues()[i] - oracle[static_cast<std::size_t>(i)]) <
                  1e-9 * scale);
    }
}

TEST_CASE("axial field gives the closed-form ESR pair") {
    const NVParams params;
    for (const double bz : {0.0, 10.0, 128.0, 250.0}) {
        const auto pair = esr_frequencies_nv_frame(bz, 0.0, params);
        const double zeeman = params.gamma_e_mhz_per_g * bz;
        CHECK(pair.f_minus_mhz ==
              doctest::Approx(params.zero_field_splitting_mhz - zeeman).epsilon(1e-9));
        CHECK(pair.f_plus_mhz ==
              doctest::Approx(params.zero_field_splitting_mhz + zeeman).epsilon(1e-9));
    }
}

TEST_CASE("transverse field repels the levels upward in f_plus") {
    const NVParams params;
    const auto axial = esr_frequencies_nv_frame(100.0, 0.0, params);
    const auto tilted = esr_frequencies_nv_frame(100.0, 60.0, params);
    CHECK(tilted.f_plus_mhz > axial.f_plus_mhz);
    // second-order scale: (gamma B_perp)^2 / D within a factor ~2
    const double shift = tilted.f_plus_mhz - axial.f_plus_mhz;
    const double scale = std::pow(params.gamma_e_mhz_per_g * 60.0, 2) /
                         params.zero_field_splitting_mhz;
    CHECK(shift > 0.2 * scale);
    CHECK(shift < 2.0 * scale);
}

TEST_CASE("esr_frequencies reduces to the NV-frame decomposition for every class") {
    const NVParams params;
    const Vec3 axis0 = normalized({0.2, -0.3, 0.93});
    const Vec3 b{40.0, -25.0, 110.0};
    const auto axes = orientation_axes(axis0);
    for (int cls = 0; cls < 4; ++cls) {
        const Vec3 a = axes[static_cast<std::size_t>(cls)];
        const auto ref = esr_frequencies(b, cls, axis0, params);
        const auto dec = esr_frequencies_nv_frame(dot(b, a), norm(cross(b, a)), params);
        CHECK(ref.f_minus_mhz == doctest::Approx(dec.f_minus_mhz).epsilon(1e-9));
        CHECK(ref.f_plus_mhz == doctest::Approx(dec.f_plus_mhz).epsilon(1e-9));
    }
    // the anchored class is invariant under a rigid rotation of field + axis
    const Vec3 rot_axis = normalized({1.0, 2.0, -0.5});
    const auto ref = esr_frequencies(b, 0, axis0, params);
    const auto rot = esr_frequencies(rodrigues(b, rot_axis, 1.1), 0,
                                     rodrigues(axis0, rot_axis, 1.1), params);
    CHECK(rot.f_minus_mhz == doctest::Approx(ref.f_minus_mhz).epsilon(1e-9));
    CHECK(rot.f_plus_mhz == doctest::Approx(ref.f_plus_mhz).epsilon(1e-9));
}

TEST_CASE("orientation_axes forms a tetrahedron anchored at class 0") {
    const Vec3 axis0 = normalized({-0.21944, 0.0, -0.97563});
    const auto axes = orientation_axes(axis0);
    CHECK(norm(axes[0] - axis0) < 1e-12);
    for (int i = 0; i < 4; ++i) {
        CHECK(norm(axes[static_cast<std::size_t>(i)]) == doctest::Approx(1.0).epsilon(1e-12));
        for (int j = i + 1; j < 4; ++j)
            CHECK(dot(axes[static_cast<std::size_t>(i)], axes[static_cast<std::size_t>(j)]) ==
                  doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("rabi_population basics") {
    // pi pulse on resonance inverts fully
    CHECK(rabi_population(4.4, 0.0, 1.0 / (2.0 * 4.4)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rabi_population(4.4, 0.0, 1.0 / 4.4) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rabi_population(0.0, 5.0, 1.0) == 0.0);
    // detuned amplitude cap
    const double omega = 4.4, delta = 27.0;
    const double cap = omega * omega / (omega * omega + delta * delta);
    double max_seen = 0.0;
    for (int i = 0; i <= 2000; ++i)
        max_seen = std::max(max_seen, rabi_population(omega, delta, i * 5e-4));
    CHECK(max_seen <= cap + 1e-12);
    CHECK(max_seen == doctest::Approx(cap).epsilon(1e-3));
    CHECK_THROWS_AS(rabi_population(-1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("echo envelope and NMR modulation model") {
    CHECK(echo_envelope(0.0, 4.5, 1.0) == 1.0);
    CHECK(echo_envelope(4.5, 4.5, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(echo_envelope(9.0, 4.5, 2.0) == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
    CHECK_THROWS_AS(echo_envelope(1.0, 0.0, 1.0), std::invalid_argument);

    // modulation vanishes without a transverse field
    for (double tau = 0.1; tau < 5.0; tau += 0.37)
        CHECK(echo_signal_model(tau, 4.5, 1.0, 3.0, 0.0, 0.85) ==
              doctest::Approx(echo_envelope(tau, 4.5, 1.0)).epsilon(1e-12));
    // bounded by the envelope
    for (double tau = 0.1; tau < 5.0; tau += 0.37) {
        const double s = echo_signal_model(tau, 4.5, 1.0, 3.0, 0.36, 0.85);
        CHECK(s <= echo_envelope(tau, 4.5, 1.0) + 1e-12);
        CHECK(s >= (1.0 - 0.85) * echo_envelope(tau, 4.5, 1.0) - 1e-12);
    }
    CHECK_THROWS_AS(echo_signal_model(1.0, 4.5, 1.0, 3.0, 0.36, 1.5), std::invalid_argument);
}

TEST_CASE("nmr_larmor is the enhanced nuclear precession") {
    const NVParams params;
    CHECK(nmr_larmor(59.8, params) == doctest::Approx(14.0 * 0.43e-3 * 59.8).epsilon(1e-12));
    CHECK(nmr_larmor(59.8, params) == doctest::Approx(0.36).epsilon(1e-2));
    CHECK(nmr_larmor(0.0, params) == 0.0);
    // linear in field
    CHECK(nmr_larmor(100.0, params) == doctest::Approx(2.0 * nmr_larmor(50.0, params)));
    CHECK_THROWS_AS(nmr_larmor(-1.0, params), std::invalid_argument);
}

TEST_CASE("error_budget crosstalk matches the closed form") {
    const auto budget = error_budget(4.4, 27.0, 10.0, 1.0, 4.5);
    CHECK(budget.p_off == doctest::Approx(0.0259).epsilon(4e-3));
    CHECK(budget.p_off ==
          doctest::Approx(4.4 * 4.4 / (4.4 * 4.4 + 27.0 * 27.0)).epsilon(1e-12));
    CHECK(budget.p_err >= budget.p_off);
    CHECK(budget.p_err ==
          doctest::Approx(budget.p_dip + budget.p_t1 + budget.p_t2 + budget.p_off));

    // at a specific pulse duration the crosstalk is the driven population
    const auto at_tau = error_budget(4.4, 27.0, 10.0, 1.0, 4.5, 0.114);
    CHECK(at_tau.p_off == doctest::Approx(rabi_population(4.4, 27.0, 0.114)).epsilon(1e-12));
    CHECK(at_tau.p_off <= budget.p_off + 1e-12);

    // component scalings
    CHECK(budget.p_dip == doctest::Approx(std::pow(10.0 * 1e-3 / 4.4, 2)).epsilon(1e-12));
    CHECK(budget.p_t1 == doctest::Approx(1e-3 / (4.4 * 1.0)).epsilon(1e-12));
    CHECK(budget.p_t2 == doctest::Approx(std::pow(4.4 * 4.5, -3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(error_budget(0.0, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("addressing_fidelity at the demonstrated operating point") {
    const NVParams params;
    CHECK(addressing_fidelity(5.0, 0.1, 100.0, params) == doctest::Approx(0.969).epsilon(1e-3));
    // grows with separation, falls with drive strength
    CHECK(addressing_fidelity(5.0, 0.1, 200.0, params) >
          addressing_fidelity(5.0, 0.1, 100.0, params));
    CHECK(addressing_fidelity(10.0, 0.1, 100.0, params) <
          addressing_fidelity(5.0, 0.1, 100.0, params));
}

TEST_CASE("esr_fwhm adds natural and power broadening in quadrature") {
    CHECK(esr_fwhm(0.58, 0.0) == doctest::Approx(1.0 / (kPi * 0.58)).epsilon(1e-12));
    CHECK(esr_fwhm(0.58, 6.0) ==
          doctest::Approx(std::hypot(1.0 / (kPi * 0.58), 6.0)).epsilon(1e-12));
    CHECK_THROWS_AS(esr_fwhm(0.0, 6.0), std::invalid_argument);
}

TEST_CASE("lorentzian is peak-normalized with half maximum at half width") {
    CHECK(lorentzian(3500.0, 3500.0, 10.0) == doctest::Approx(1.0));
    CHECK(lorentzian(3505.0, 3500.0, 10.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lorentzian(3495.0, 3500.0, 10.0) == doctest::Approx(0.5).epsilon(1e-12));
}
