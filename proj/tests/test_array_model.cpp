#include <cmath>
#include <numbers>

#include <doctest.h>

#include "nvgrad/array_model.hpp"
#include "nvgrad/coil.hpp"

using namespace nvgrad;
using namespace nvgrad::array_model;

namespace {

ArraySpec simple_spec() {
    ArraySpec spec;
    spec.origin = {0.0, 0.0, 0.0};
    spec.gradient_axis = {1.0, 0.0, 0.0};
    spec.nv_axis = {0.0, 0.0, 1.0};
    return spec;
}

}  // namespace

TEST_CASE("generate_array is deterministic per seed") {
    const ArraySpec spec = simple_spec();
    const NVArray a = generate_array(spec, 42);
    const NVArray b = generate_array(spec, 42);
    REQUIRE(a.sites.size() == b.sites.size());
    for (std::size_t s = 0; s < a.sites.size(); ++s) {
        REQUIRE(a.sites[s].nvs.size() == b.sites[s].nvs.size());
        for (std::size_t i = 0; i < a.sites[s].nvs.size(); ++i) {
            CHECK(a.sites[s].nvs[i].position.x == b.sites[s].nvs[i].position.x);
            CHECK(a.sites[s].nvs[i].orientation_class == b.sites[s].nvs[i].orientation_class);
        }
    }
    const NVArray c = generate_array(spec, 43);
    bool identical = a.sites.size() == c.sites.size();
    if (identical)
        for (std::size_t s = 0; s < a.sites.size(); ++s)
            identical = identical && a.sites[s].nvs.size() == c.sites[s].nvs.size();
    CHECK_FALSE(identical);
}

TEST_CASE("sites are laid out on the pitch with alphabetic labels") {
    ArraySpec spec = simple_spec();
    spec.site_count = 5;
    const NVArray array = generate_array(spec, 7);
    REQUIRE(array.sites.size() == 5);
    CHECK(array.sites[0].label == "A");
    CHECK(array.sites[3].label == "D");
    CHECK(array.sites[4].label == "E");
    for (int s = 0; s < 5; ++s)
        CHECK(array.sites[static_cast<std::size_t>(s)].center.x ==
              doctest::Approx(100.0 * s).epsilon(1e-12));
}

TEST_CASE("NV statistics follow the spec distributions") {
    ArraySpec spec = simple_spec();
    spec.site_count = 1;

    double selected = 0.0, total = 0.0, sum = 0.0, sum2 = 0.0;
    double n_positions = 0.0;
    for (std::uint64_t seed = 0; seed < 3000; ++seed) {
        const NVArray array = generate_array(spec, seed);
        for (const auto& nv : array.sites[0].nvs) {
            total += 1.0;
            if (nv.orientation_class == 0) selected += 1.0;
            const double u = nv.position.x;  // line placement along the axis
            CHECK(std::abs(u) <= spec.aperture_diameter_nm / 2.0 + 1e-9);
            CHECK(nv.position.y == 0.0);
            sum += u;
            sum2 += u * u;
            n_positions += 1.0;
        }
    }
    // a quarter of the Poisson(4 * mean) total carries the selected class
    CHECK(total / 3000.0 == doctest::Approx(4.0 * spec.mean_nvs_per_site).epsilon(0.05));
    CHECK(selected / 3000.0 == doctest::Approx(spec.mean_nvs_per_site).epsilon(0.05));
    // uniform over the aperture: sigma = d / (2 sqrt(3))
    const double sigma = std::sqrt(sum2 / n_positions - std::pow(sum / n_positions, 2));
    CHECK(sigma == doctest::Approx(spec.aperture_diameter_nm / (2.0 * std::sqrt(3.0)))
                       .epsilon(0.05));
}

TEST_CASE("disc placement stays inside the aperture") {
    ArraySpec spec = simple_spec();
    spec.placement = Placement::disc;
    const NVArray array = generate_array(spec, 11);
    for (const auto& site : array.sites)
        for (const auto& nv : site.nvs)
            CHECK(norm(nv.position - site.center) <= spec.aperture_diameter_nm / 2.0 + 1e-9);
}

TEST_CASE("generate_array validates its spec") {
    ArraySpec spec = simple_spec();
    spec.site_count = 0;
    CHECK_THROWS_AS(generate_array(spec, 1), std::invalid_argument);
    spec = simple_spec();
    spec.site_pitch_nm = 0.0;
    CHECK_THROWS_AS(generate_array(spec, 1), std::invalid_argument);
    spec = simple_spec();
    spec.mean_nvs_per_site = -1.0;
    CHECK_THROWS_AS(generate_array(spec, 1), std::invalid_argument);
}

TEST_CASE("expected_nv_count converts dose and area") {
    // 1 cm^2 at unit efficiency returns the dose itself
    CHECK(expected_nv_count(1e14, 5e11, 1.0) == doctest::Approx(5e11).epsilon(1e-12));
    // 60 nm aperture, implantation-style numbers
    const double area = std::numbers::pi * 30.0 * 30.0;
    CHECK(expected_nv_count(area, 1e12, 0.05) ==
          doctest::Approx(area * 1e-14 * 1e12 * 0.05).epsilon(1e-12));
    CHECK(expected_nv_count(0.0, 1e12, 0.05) == 0.0);
    CHECK_THROWS_AS(expected_nv_count(-1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("pair_separation_stats approaches the pitch for point-like sites") {
    const auto [mean_tight, std_tight] = pair_separation_stats(1e-6, 100.0, 1, 20000);
    CHECK(mean_tight == doctest::Approx(100.0).epsilon(1e-3));
    CHECK(std_tight < 0.01);

    const auto [mean_wide, std_wide] = pair_separation_stats(std::numbers::pi * 900.0, 100.0,
                                                             1, 200000);
    CHECK(mean_wide > 100.0);  // transverse scatter only lengthens the mean
    CHECK(std_wide > 1.0);
    CHECK_THROWS_AS(pair_separation_stats(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("array JSON round trip preserves every field") {
    ArraySpec spec = simple_spec();
    spec.placement = Placement::disc;
    const NVArray array = generate_array(spec, 5);
    const NVArray copy = array_from_json(to_json(array));
    REQUIRE(copy.sites.size() == array.sites.size());
    CHECK(copy.site_pitch_nm == array.site_pitch_nm);
    CHECK(copy.nv_axis.z == array.nv_axis.z);
    for (std::size_t s = 0; s < array.sites.size(); ++s) {
        CHECK(copy.sites[s].label == array.sites[s].label);
        REQUIRE(copy.sites[s].nvs.size() == array.sites[s].nvs.size());
        for (std::size_t i = 0; i < array.sites[s].nvs.size(); ++i) {
            CHECK(copy.sites[s].nvs[i].position.x == array.sites[s].nvs[i].position.x);
            CHECK(copy.sites[s].nvs[i].t2_us == array.sites[s].nvs[i].t2_us);
            CHECK(copy.sites[s].nvs[i].orientation_class ==
                  array.sites[s].nvs[i].orientation_class);
        }
    }
}

TEST_CASE("paper_array_spec centres the sites on the calibrated working point") {
    const ArraySpec spec = paper_array_spec();
    CHECK(spec.site_count == 4);
    CHECK(spec.site_pitch_nm == 100.0);
    const NVArray array = generate_array(spec, 1);
    const Vec3 mid = (array.sites.front().center + array.sites.back().center) * 0.5;
    CHECK(norm(mid - coil::paper_array_center()) < 1e-9);
}
