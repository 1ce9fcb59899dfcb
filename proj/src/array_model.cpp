#include "nvgrad/array_model.hpp"

#include <cmath>
#include <numbers>

#include "nvgrad/coil.hpp"
#include "nvgrad/errors.hpp"
#include "nvgrad/rng.hpp"

namespace nvgrad::array_model {

ArraySpec paper_array_spec() {
    ArraySpec spec;
    spec.gradient_axis = coil::paper_gradient_axis();
    spec.nv_axis = coil::paper_nv_axis();
    // Sites A..D straddle the calibrated array centre.
    spec.origin = coil::paper_array_center() - spec.gradient_axis * 150.0;
    return spec;
}

namespace {

std::string site_label(int index) {
    std::string label;
    do {
        label.insert(label.begin(), static_cast<char>('A' + index % 26));
        index = index / 26 - 1;
    } while (index >= 0);
    return label;
}

}  // namespace

NVArray generate_array(const ArraySpec& spec, std::uint64_t seed) {
    if (spec.site_count < 1) throw std::invalid_argument("generate_array: site_count must be >= 1");
    if (spec.site_pitch_nm <= 0.0) throw std::invalid_argument("generate_array: pitch must be > 0");
    if (spec.aperture_diameter_nm <= 0.0)
        throw std::invalid_argument("generate_array: aperture diameter must be > 0");
    if (spec.mean_nvs_per_site < 0.0)
        throw std::invalid_argument("generate_array: mean NV count must be >= 0");

    const Vec3 axis = normalized(spec.gradient_axis);
    // An orthogonal in-plane direction for the disc convention.
    Vec3 ortho = cross(axis, {0.0, 0.0, 1.0});
    if (norm(ortho) < 1e-9) ortho = cross(axis, {0.0, 1.0, 0.0});
    ortho = normalized(ortho);

    NVArray array;
    array.site_pitch_nm = spec.site_pitch_nm;
    array.nv_axis = normalized(spec.nv_axis);
    const double radius = spec.aperture_diameter_nm / 2.0;

    for (int i = 0; i < spec.site_count; ++i) {
        NVSite site;
        site.center = spec.origin + axis * (spec.site_pitch_nm * i);
        site.aperture_diameter_nm = spec.aperture_diameter_nm;
        site.label = site_label(i);

        RngStream rng(seed, static_cast<std::uint64_t>(i));
        // mean_nvs_per_site counts the selected orientation; classes are
        // uniform over 4, so the total rate is 4x.
        const auto n_total = rng.poisson(4.0 * spec.mean_nvs_per_site);
        for (std::uint64_t k = 0; k < n_total; ++k) {
            NVCenter nv;
            nv.orientation_class = static_cast<int>(rng.engine()() % 4);
            if (spec.placement == Placement::line) {
                nv.position = site.center + axis * rng.uniform(-radius, radius);
            } else {
                // uniform in the aperture disc
                const double r = radius * std::sqrt(rng.uniform(0.0, 1.0));
                const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
                nv.position = site.center + axis * (r * std::cos(phi)) + ortho * (r * std::sin(phi));
            }
            nv.t2_star_us = spec.t2_star_us;
            nv.t2_us = spec.t2_us_per_site.empty()
                           ? 4.5
                           : spec.t2_us_per_site[i % spec.t2_us_per_site.size()];
            nv.t1_ms = spec.t1_ms;
            nv.contrast = spec.contrast;
            site.nvs.push_back(nv);
        }
        array.sites.push_back(std::move(site));
    }
    return array;
}

double expected_nv_count(double aperture_area_nm2, double dosage_per_cm2,
                         double conversion_efficiency) {
    if (aperture_area_nm2 < 0.0 || dosage_per_cm2 < 0.0 || conversion_efficiency < 0.0)
        throw std::invalid_argument("expected_nv_count: inputs must be >= 0");
    const double area_cm2 = aperture_area_nm2 * 1e-14;  // 1 nm^2 = 1e-14 cm^2
    return dosage_per_cm2 * area_cm2 * conversion_efficiency;
}

std::pair<double, double> pair_separation_stats(double site_area_nm2, double site_spacing_nm,
                                                std::uint64_t seed, std::size_t n_pairs) {
    if (site_area_nm2 < 0.0 || site_spacing_nm <= 0.0)
        throw std::invalid_argument("pair_separation_stats: A >= 0 and D > 0 required");
    const double radius = std::sqrt(site_area_nm2 / std::numbers::pi);
    RngStream rng(seed, 0x70617273ULL);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        double p[2][2];
        for (auto& point : p) {
            const double r = radius * std::sqrt(rng.uniform(0.0, 1.0));
            const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            point[0] = r * std::cos(phi);
            point[1] = r * std::sin(phi);
        }
        const double dx = site_spacing_nm + p[1][0] - p[0][0];
        const double dy = p[1][1] - p[0][1];
        const double sep = std::hypot(dx, dy);
        sum += sep;
        sum2 += sep * sep;
    }
    const double n = static_cast<double>(n_pairs);
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    return {mean, std::sqrt(var)};
}

nlohmann::json to_json(const NVArray& array) {
    nlohmann::json j;
    j["site_pitch_nm"] = array.site_pitch_nm;
    j["region_pitch_nm"] = array.region_pitch_nm;
    j["nv_axis"] = {array.nv_axis.x, array.nv_axis.y, array.nv_axis.z};
    j["sites"] = nlohmann::json::array();
    for (const auto& site : array.sites) {
        nlohmann::json js;
        js["label"] = site.label;
        js["center"] = {site.center.x, site.center.y, site.center.z};
        js["aperture_diameter_nm"] = site.aperture_diameter_nm;
        js["nvs"] = nlohmann::json::array();
        for (const auto& nv : site.nvs) {
            js["nvs"].push_back({{"position", {nv.position.x, nv.position.y, nv.position.z}},
                                 {"orientation_class", nv.orientation_class},
                                 {"t2_star_us", nv.t2_star_us},
                                 {"t2_us", nv.t2_us},
                                 {"t1_ms", nv.t1_ms},
                                 {"contrast", nv.contrast}});
        }
        j["sites"].push_back(std::move(js));
    }
    return j;
}

NVArray array_from_json(const nlohmann::json& j) {
    NVArray array;
    array.site_pitch_nm = j.at("site_pitch_nm").get<double>();
    array.region_pitch_nm = j.value("region_pitch_nm", 1000.0);
    const auto& ax = j.at("nv_axis");
    array.nv_axis = {ax.at(0).get<double>(), ax.at(1).get<double>(), ax.at(2).get<double>()};
    for (const auto& js : j.at("sites")) {
        NVSite site;
        site.label = js.at("label").get<std::string>();
        const auto& c = js.at("center");
        site.center = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
        site.aperture_diameter_nm = js.at("aperture_diameter_nm").get<double>();
        for (const auto& jn : js.at("nvs")) {
            NVCenter nv;
            const auto& p = jn.at("position");
            nv.position = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
            nv.orientation_class = jn.at("orientation_class").get<int>();
            nv.t2_star_us = jn.at("t2_star_us").get<double>();
            nv.t2_us = jn.at("t2_us").get<double>();
            nv.t1_ms = jn.at("t1_ms").get<double>();
            nv.contrast = jn.at("contrast").get<double>();
            site.nvs.push_back(nv);
        }
        array.sites.push_back(std::move(site));
    }
    return array;
}

}  // namespace nvgrad::array_model
