#include "nvgrad/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nvgrad/errors.hpp"

namespace nvgrad::imaging {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    return v[mid];
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_inplace: size must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = data[i + k];
                const auto v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& c : data) c /= static_cast<double>(n);
}

RealSpaceImage reconstruct_real_space(const sequence::KSpaceRecord& record,
                                      int zero_pad_factor) {
    const auto& k = record.k_per_nm;
    const auto& s = record.signal;
    if (k.size() < 8) throw std::invalid_argument("reconstruct_real_space: need >= 8 k points");
    if (zero_pad_factor < 1)
        throw std::invalid_argument("reconstruct_real_space: zero_pad_factor must be >= 1");
    const double dk = k[1] - k[0];
    if (dk <= 0.0) throw std::invalid_argument("reconstruct_real_space: k must be increasing");
    for (std::size_t i = 1; i < k.size(); ++i)
        if (std::abs((k[i] - k[i - 1]) - dk) > 1e-9 * dk)
            throw std::invalid_argument("reconstruct_real_space: non-uniform k axis");

    const std::size_t n = k.size();
    const std::size_t mirrored = 2 * n - 1;
    const std::size_t p = next_pow2(mirrored * static_cast<std::size_t>(zero_pad_factor));

    // Even mirror: sample m and -m carry the same value; index modulo p.
    std::vector<std::complex<double>> buf(p, 0.0);
    buf[0] = s[0];
    for (std::size_t m = 1; m < n; ++m) {
        buf[m] = s[m];
        buf[p - m] = s[m];
    }
    fft_inplace(buf);

    RealSpaceImage img;
    img.zero_pad_factor = zero_pad_factor;
    img.resolution_nm = resolution(k.back());
    img.position_nm.resize(p);
    img.magnitude.resize(p);
    img.spectrum.resize(p);
    // fftshift so the axis runs from -1/(2 dk) to +1/(2 dk)
    const auto half = static_cast<std::ptrdiff_t>(p / 2);
    for (std::size_t i = 0; i < p; ++i) {
        const std::ptrdiff_t shifted =
            static_cast<std::ptrdiff_t>(i) - half;  // -p/2 .. p/2-1
        const std::size_t src = static_cast<std::size_t>((shifted + static_cast<std::ptrdiff_t>(p)) %
                                                         static_cast<std::ptrdiff_t>(p));
        img.position_nm[i] = static_cast<double>(shifted) / (static_cast<double>(p) * dk);
        img.spectrum[i] = buf[src] * dk;
        img.magnitude[i] = std::abs(img.spectrum[i]);
    }
    return img;
}

double resolution(double k_max_per_nm) {
    if (k_max_per_nm <= 0.0) throw std::invalid_argument("resolution: k_max must be > 0");
    return 1.0 / (2.0 * k_max_per_nm);
}

std::vector<SitePeak> locate_sites(const RealSpaceImage& image, int expected_count,
                                   double noise_floor_mads) {
    if (expected_count < 1)
        throw std::invalid_argument("locate_sites: expected_count must be >= 1");

    // Search the x >= 0 half; the cosine-encoded image is even in x.
    std::vector<double> x, mag;
    for (std::size_t i = 0; i < image.position_nm.size(); ++i) {
        if (image.position_nm[i] >= 0.0) {
            x.push_back(image.position_nm[i]);
            mag.push_back(image.magnitude[i]);
        }
    }

    const double med = median(mag);
    std::vector<double> dev(mag.size());
    for (std::size_t i = 0; i < mag.size(); ++i) dev[i] = std::abs(mag[i] - med);
    const double floor = med + noise_floor_mads * median(dev);

    struct Candidate {
        std::size_t index;
        double value;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < mag.size(); ++i) {
        const double left = i == 0 ? mag[1] : mag[i - 1];  // even symmetry at x = 0
        const double right = i + 1 < mag.size() ? mag[i + 1] : mag[i] - 1.0;
        if (mag[i] > left && mag[i] >= right && mag[i] > floor)
            candidates.push_back({i, mag[i]});
    }
    if (candidates.size() < static_cast<std::size_t>(expected_count)) {
        std::string msg = "locate_sites: found " + std::to_string(candidates.size()) +
                          " peaks, expected " + std::to_string(expected_count) + ";";
        for (const auto& c : candidates) msg += " x=" + std::to_string(x[c.index]);
        throw DetectionError(msg);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    candidates.resize(static_cast<std::size_t>(expected_count));

    const double dx = x.size() > 1 ? x[1] - x[0] : 0.0;
    std::vector<SitePeak> peaks;
    for (const auto& cand : candidates) {
        SitePeak peak;
        peak.amplitude = cand.value;
        // parabolic sub-bin refinement
        double center = x[cand.index];
        if (cand.index > 0 && cand.index + 1 < mag.size()) {
            const double ym = mag[cand.index - 1], y0 = mag[cand.index], yp = mag[cand.index + 1];
            const double denom = ym - 2.0 * y0 + yp;
            if (denom != 0.0) center += 0.5 * (ym - yp) / denom * dx;
        }
        peak.center_nm = center;

        const double half_max = cand.value / 2.0;
        auto crossing = [&](int dir) {
            std::size_t i = cand.index;
            while (true) {
                const std::ptrdiff_t next = static_cast<std::ptrdiff_t>(i) + dir;
                if (next < 0 || next >= static_cast<std::ptrdiff_t>(mag.size()))
                    return x[i];  // ran off the image, clamp
                const auto ni = static_cast<std::size_t>(next);
                if (mag[ni] <= half_max) {
                    const double t = (mag[i] - half_max) / (mag[i] - mag[ni]);
                    return x[i] + t * (x[ni] - x[i]);
                }
                i = ni;
            }
        };
        peak.fwhm_nm = std::abs(crossing(+1) - crossing(-1));
        peaks.push_back(peak);
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const SitePeak& a, const SitePeak& b) { return a.center_nm < b.center_nm; });
    return peaks;
}

}  // namespace nvgrad::imaging
