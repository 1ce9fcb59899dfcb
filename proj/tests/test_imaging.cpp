#include <cmath>
#include <complex>
#include <numbers>

#include <doctest.h>

#include "nvgrad/errors.hpp"
#include "nvgrad/imaging.hpp"
#include "nvgrad/rng.hpp"

using namespace nvgrad;
using namespace nvgrad::imaging;

namespace {

constexpr double kPi = std::numbers::pi;

sequence::KSpaceRecord cosine_record(const std::vector<double>& positions, int n_points,
                                     double k_max) {
    sequence::KSpaceRecord rec;
    rec.tau_us = 2.0;
    for (int j = 0; j < n_points; ++j) {
        const double k = k_max * static_cast<double>(j) / (n_points - 1);
        double s = 0.0;
        for (const double x : positions) s += std::cos(2.0 * kPi * k * x);
        rec.k_per_nm.push_back(k);
        rec.signal.push_back(s / static_cast<double>(positions.size()));
        rec.noise_sigma.push_back(0.0);
    }
    return rec;
}

// Direct-summation oracle for the reconstruction: evaluate the mirrored,
// padded discrete transform literally at each output bin.
std::complex<double> direct_dft_bin(const std::vector<double>& s, std::size_t padded,
                                    std::ptrdiff_t bin, double dk) {
    std::complex<double> acc(s[0], 0.0);
    for (std::size_t m = 1; m < s.size(); ++m) {
        const double ang = 2.0 * kPi * static_cast<double>(m) * static_cast<double>(bin) /
                           static_cast<double>(padded);
        acc += 2.0 * s[m] * std::cos(ang);  // +m and -m mirrored samples
    }
    return acc * dk;
}

}  // namespace

TEST_CASE("fft_inplace matches a direct DFT and inverts exactly") {
    RngStream rng(9, 0);
    std::vector<std::complex<double>> data(128);
    for (auto& c : data) c = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

    auto fft = data;
    fft_inplace(fft);
    for (std::size_t k = 0; k < data.size(); k += 7) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t n = 0; n < data.size(); ++n) {
            const double ang = -2.0 * kPi * static_cast<double>(k * n) / 128.0;
            acc += data[n] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        CHECK(std::abs(fft[k] - acc) < 1e-9);
    }

    auto round_trip = fft;
    fft_inplace(round_trip, true);
    for (std::size_t i = 0; i < data.size(); ++i)
        CHECK(std::abs(round_trip[i] - data[i]) < 1e-12);

    std::vector<std::complex<double>> bad(12);
    CHECK_THROWS_AS(fft_inplace(bad), std::invalid_argument);
}

TEST_CASE("reconstruct_real_space equals the direct-summation oracle") {
    const auto rec = cosine_record({0.0, 96.0, 192.0, 288.0}, 64, 0.021);
    const auto image = reconstruct_real_space(rec, 4);
    const double dk = rec.k_per_nm[1] - rec.k_per_nm[0];
    const std::size_t p = image.position_nm.size();

    for (std::size_t i = 0; i < p; i += 13) {
        const std::ptrdiff_t bin = static_cast<std::ptrdiff_t>(i) -
                                   static_cast<std::ptrdiff_t>(p / 2);
        const auto oracle = direct_dft_bin(rec.signal, p, bin, dk);
        CHECK(std::abs(image.spectrum[i] - oracle) < 1e-9);
        CHECK(image.magnitude[i] == doctest::Approx(std::abs(oracle)).epsilon(1e-9));
    }

    // axis spans +-1/(2 dk) and the advertised resolution is (2 k_max)^-1
    CHECK(image.position_nm.front() == doctest::Approx(-0.5 / dk).epsilon(1e-12));
    CHECK(image.resolution_nm == doctest::Approx(0.5 / rec.k_per_nm.back()).epsilon(1e-12));
}

TEST_CASE("reconstruct_real_space validates its input") {
    auto rec = cosine_record({0.0}, 6, 0.02);
    CHECK_THROWS_AS(reconstruct_real_space(rec), std::invalid_argument);  // too short
    rec = cosine_record({0.0}, 16, 0.02);
    rec.k_per_nm[7] += 1e-4;  // break uniformity
    CHECK_THROWS_AS(reconstruct_real_space(rec), std::invalid_argument);
    rec = cosine_record({0.0}, 16, 0.02);
    CHECK_THROWS_AS(reconstruct_real_space(rec, 0), std::invalid_argument);
}

TEST_CASE("resolution follows (2 k_max)^-1") {
    CHECK(resolution(0.021) == doctest::Approx(1.0 / 0.042).epsilon(1e-12));
    CHECK_THROWS_AS(resolution(0.0), std::invalid_argument);
}

TEST_CASE("locate_sites recovers a four-site array within half a resolution cell") {
    const std::vector<double> truth{0.0, 96.0, 192.0, 288.0};
    const auto rec = cosine_record(truth, 512, 0.021);
    const auto image = reconstruct_real_space(rec);
    const auto peaks = locate_sites(image, 4);
    REQUIRE(peaks.size() == 4);
    const double half_cell = image.resolution_nm / 2.0;
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::abs(peaks[i].center_nm - truth[i]) < half_cell);
        CHECK(peaks[i].fwhm_nm > 0.0);
        CHECK(peaks[i].amplitude > 0.0);
    }
    // centers come back sorted
    for (std::size_t i = 1; i < 4; ++i) CHECK(peaks[i].center_nm > peaks[i - 1].center_nm);
}

TEST_CASE("locate_sites raises DetectionError when the image is featureless") {
    sequence::KSpaceRecord rec;
    for (int j = 0; j < 32; ++j) {
        rec.k_per_nm.push_back(0.001 * j);
        rec.signal.push_back(0.0);  // no signal at all
        rec.noise_sigma.push_back(0.0);
    }
    const auto image = reconstruct_real_space(rec);
    CHECK_THROWS_AS(locate_sites(image, 2), DetectionError);
    const auto good = reconstruct_real_space(cosine_record({0.0, 96.0}, 64, 0.021));
    CHECK_THROWS_AS(locate_sites(good, 400), DetectionError);  // more peaks than bins carry
    CHECK_THROWS_AS(locate_sites(good, 0), std::invalid_argument);
}

TEST_CASE("reconstruction preserves the Parseval energy balance") {
    const auto rec = cosine_record({30.0, 150.0}, 64, 0.02);
    const auto image = reconstruct_real_space(rec, 2);
    const std::size_t p = image.position_nm.size();
    const double dk = rec.k_per_nm[1] - rec.k_per_nm[0];

    double energy_k = rec.signal[0] * rec.signal[0];
    for (std::size_t m = 1; m < rec.signal.size(); ++m)
        energy_k += 2.0 * rec.signal[m] * rec.signal[m];
    double energy_x = 0.0;
    for (const double v : image.magnitude) energy_x += v * v;
    // sum |S|^2 = P * dk^2 * sum |s|^2 for the dk-scaled transform
    CHECK(energy_x ==
          doctest::Approx(static_cast<double>(p) * dk * dk * energy_k).epsilon(1e-9));
}
