#pragma once

#include <complex>
#include <vector>

#include "nvgrad/sequence.hpp"

// Real-space reconstruction of k-space records and peak extraction.

namespace nvgrad::imaging {

struct RealSpaceImage {
    std::vector<double> position_nm;
    std::vector<double> magnitude;
    std::vector<std::complex<double>> spectrum;  // pre-magnitude, same axis
    double resolution_nm = 0.0;                  // (2 k_max)^-1
    int zero_pad_factor = 1;
};

struct SitePeak {
    double center_nm = 0.0;
    double fwhm_nm = 0.0;
    double amplitude = 0.0;
};

// Mirrors s(k) to negative k by evenness, zero-pads, and Fourier transforms.
// Requires >= 8 uniformly spaced k points.
RealSpaceImage reconstruct_real_space(const sequence::KSpaceRecord& record,
                                      int zero_pad_factor = 8);

// 1D real-space resolution (2 k_max)^-1.
double resolution(double k_max_per_nm);

// The expected_count largest local maxima above a noise floor of
// 3x the median absolute deviation, searched over x >= 0 (cosine encoding
// makes the image even in x). FWHM by interpolated half-maximum crossings.
std::vector<SitePeak> locate_sites(const RealSpaceImage& image, int expected_count,
                                   double noise_floor_mads = 3.0);

// Radix-2 complex FFT, in place; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse = false);

}  // namespace nvgrad::imaging
