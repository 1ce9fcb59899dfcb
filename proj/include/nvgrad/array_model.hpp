#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nvgrad/vec3.hpp"

// Hierarchical NV array generation (regions -> sites -> NV centres) with
// seeded randomness, plus the array statistics formulas.

namespace nvgrad::array_model {

struct NVCenter {
    Vec3 position;               // nm, coil frame
    int orientation_class = 0;   // 0..3, class 0 is the selected axis
    double t2_star_us = 0.58;
    double t2_us = 4.5;
    double t1_ms = 1.0;
    double contrast = 0.004;     // per-NV fluorescence contrast
};

struct NVSite {
    Vec3 center;  // nm
    double aperture_diameter_nm = 60.0;
    std::vector<NVCenter> nvs;
    std::string label;  // "A", "B", ...
};

struct NVArray {
    std::vector<NVSite> sites;  // ordered along the gradient axis
    double region_pitch_nm = 1000.0;
    double site_pitch_nm = 100.0;
    Vec3 nv_axis;  // lab-frame selected orientation
};

enum class Placement { line, disc };

struct ArraySpec {
    int site_count = 4;
    double site_pitch_nm = 100.0;
    double aperture_diameter_nm = 60.0;
    double mean_nvs_per_site = 3.0;  // selected orientation, per site
    Placement placement = Placement::line;
    Vec3 origin;         // centre of site "A", coil frame
    Vec3 gradient_axis{1.0, 0.0, 0.0};
    Vec3 nv_axis{0.0, 0.0, 1.0};
    // Site-level coherence time means, cycled when there are more sites.
    std::vector<double> t2_us_per_site{3.8, 4.6, 1.8, 3.8};
    double t2_star_us = 0.58;
    double t1_ms = 1.0;
    double contrast = 0.004;
};

// Paper preset: four sites at 100 nm pitch placed at the calibrated
// coil-frame location, selected axis from the coil calibration.
ArraySpec paper_array_spec();

// Deterministic for a fixed seed. NV counts are Poisson with uniform
// orientation classes; offsets follow the placement convention.
NVArray generate_array(const ArraySpec& spec, std::uint64_t seed);

// n_NV = dosage * area * efficiency (dosage in cm^-2, area in nm^2).
double expected_nv_count(double aperture_area_nm2, double dosage_per_cm2,
                         double conversion_efficiency);

// Monte-Carlo mean/std of the separation between one random NV drawn from
// each of two disc sites of area A spaced by D.
std::pair<double, double> pair_separation_stats(double site_area_nm2, double site_spacing_nm,
                                                std::uint64_t seed = 1,
                                                std::size_t n_pairs = 1000000);

// Informational projections for dense arrays (minimum site spacing and area).
constexpr double kMinSiteSpacingNm = 10.0;
constexpr double kMinSiteAreaNm2 = 100.0;  // (10 nm)^2
constexpr double kMinNvSeparationNm = 4.0;

nlohmann::json to_json(const NVArray& array);
NVArray array_from_json(const nlohmann::json& j);

}  // namespace nvgrad::array_model
