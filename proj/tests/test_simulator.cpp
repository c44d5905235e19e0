#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include <doctest.h>

#include "stbiholo/simulate.hpp"

using namespace stbiholo;

namespace {

SmearScene one_cell_scene() {
    // center on an exact pixel (48, 128) of a 256x256 grid at 0.48 um pitch
    SmearScene scene;
    scene.phantoms.push_back({48 * 0.48, 128 * 0.48, 4.0, 2.0, 0.0});
    return scene;
}

double field_energy(const ComplexField& f) {
    double e = 0.0;
    for (const auto& v : f.values) e += std::norm(v);
    return e;
}

} // namespace

TEST_SUITE("simulator") {

TEST_CASE("shear plate walk-off for the reference bench") {
    const OpticalConfig cfg; // 10 mm, n = 1.5, 45 degrees
    const ShearDistance d = compute_shear_distance(cfg);
    CHECK(d.millimeters == doctest::Approx(10.0 / std::sqrt(1.75)).epsilon(1e-12));
    CHECK(d.millimeters == doctest::Approx(7.559).epsilon(1e-3));
    CHECK(d.sensor_pixels == 1575); // 7559.29 um / 4.8 um
}

TEST_CASE("shear vanishes at normal incidence and for a zero-thickness plate") {
    OpticalConfig cfg;
    cfg.incidence_angle_deg = 0.0;
    CHECK(compute_shear_distance(cfg).millimeters == 0.0);
    CHECK(compute_shear_distance(cfg).sensor_pixels == 0);

    cfg = OpticalConfig{};
    cfg.plate_thickness_mm = 0.0;
    CHECK(compute_shear_distance(cfg).millimeters == 0.0);
}

TEST_CASE("shear scales linearly with plate thickness") {
    OpticalConfig cfg;
    const double d1 = compute_shear_distance(cfg).millimeters;
    cfg.plate_thickness_mm *= 2.0;
    CHECK(compute_shear_distance(cfg).millimeters == doctest::Approx(2.0 * d1).epsilon(1e-12));
}

TEST_CASE("phantom thickness profile hand values") {
    RBCPhantom p{0.0, 0.0, 4.0, 2.0, 0.0};
    CHECK(p.thickness_at(0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15)); // center, no dimple
    CHECK(p.thickness_at(4.0, 0.0) == 0.0);                                 // rim
    CHECK(p.thickness_at(5.0, 0.0) == 0.0);                                 // outside support
    CHECK(p.thickness_at(0.0, -4.5) == 0.0);

    p.dimple_depth = 0.7;
    CHECK(p.thickness_at(0.0, 0.0) == doctest::Approx(2.0 * 0.3).epsilon(1e-12));
    // the dimple pushes the maximum off-center but never below zero
    double peak = 0.0;
    for (double r = 0.0; r <= 4.0; r += 0.01) {
        const double t = p.thickness_at(r, 0.0);
        CHECK(t >= 0.0);
        peak = std::max(peak, t);
    }
    CHECK(peak > p.thickness_at(0.0, 0.0));
}

TEST_CASE("analytic phantom volume matches numeric integration") {
    const RBCPhantom p{0.0, 0.0, 4.0, 2.0, 0.6};
    const double dx = 0.005;
    double numeric = 0.0;
    for (double y = -4.0; y <= 4.0; y += dx)
        for (double x = -4.0; x <= 4.0; x += dx) numeric += p.thickness_at(x, y) * dx * dx;
    CHECK(p.analytic_volume_um3() == doctest::Approx(numeric).epsilon(1e-3));
}

TEST_CASE("dimple-free phantom volume is the paraboloid half-cylinder") {
    const RBCPhantom p{0.0, 0.0, 4.0, 2.0, 0.0};
    CHECK(p.analytic_volume_um3() ==
          doctest::Approx(M_PI * 4.0 * 4.0 * 2.0 * 0.5).epsilon(1e-12));
}

TEST_CASE("rendered peak phase equals 2*pi*dn*T/lambda for a centered cell") {
    const OpticalConfig cfg;
    const ComplexField f = render_smear_phase(one_cell_scene(), cfg);
    double peak = 0.0;
    for (const auto& v : f.values) peak = std::max(peak, std::arg(v));
    const double expected = 2.0 * M_PI * 0.06 * 2.0 / 0.633;
    CHECK(peak == doctest::Approx(expected).epsilon(1e-12));
    CHECK(peak == doctest::Approx(1.1911).epsilon(2e-3));
    // unit amplitude everywhere (pure phase object)
    for (const auto& v : f.values) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empty scene renders a flat unit field") {
    const ComplexField f = render_smear_phase(SmearScene{}, OpticalConfig{});
    for (const auto& v : f.values) CHECK(v == cplx(1.0, 0.0));
}

TEST_CASE("phantom phases are additive, including under overlap") {
    const OpticalConfig cfg;
    SmearScene a, b, both;
    a.phantoms.push_back({20.0, 40.0, 4.0, 2.0, 0.3});
    b.phantoms.push_back({23.0, 42.0, 3.5, 1.8, 0.0}); // overlaps a
    both.phantoms = {a.phantoms[0], b.phantoms[0]};

    const auto pa = render_phase_values(a, cfg);
    const auto pb = render_phase_values(b, cfg);
    const auto pc = render_phase_values(both, cfg);
    double m = 0.0;
    for (size_t i = 0; i < pc.size(); ++i) m = std::max(m, std::abs(pc[i] - (pa[i] + pb[i])));
    CHECK(m < 1e-12);
}

TEST_CASE("phantoms straying past the FOV midline are rejected") {
    const OpticalConfig cfg;
    SmearScene scene;
    scene.phantoms.push_back({61.44, 61.44, 4.0, 2.0, 0.0}); // center on the midline
    CHECK_THROWS_AS(render_phase_values(scene, cfg), validation_error);

    scene.phantoms[0] = {100.0, 61.44, 4.0, 2.0, 0.0}; // entirely in the right half
    CHECK_THROWS_AS(render_phase_values(scene, cfg), validation_error);

    scene.phantoms[0] = {2.0, 61.44, 4.0, 2.0, 0.0}; // sticks out the left edge
    CHECK_THROWS_AS(render_phase_values(scene, cfg), validation_error);
}

TEST_CASE("scene files round-trip and tolerate comments") {
    std::istringstream in(
        "# smear demo\n"
        "\n"
        "fov 192 96\n"
        "rbc 20.0 30.0 4.0 2.0 0.5\n"
        "   rbc 40 10 3.5 1.9 0   # trailing comment\n");
    const SmearScene s = parse_scene(in);
    CHECK(s.fov_width == 192);
    CHECK(s.fov_height == 96);
    REQUIRE(s.phantoms.size() == 2);
    CHECK(s.phantoms[1].cx_um == 40.0);
    CHECK(s.phantoms[0].dimple_depth == 0.5);
}

TEST_CASE("malformed scene lines are rejected") {
    auto reject = [](const char* text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_scene(in), validation_error);
    };
    reject("rbc 1 2 3 4 5\n");                    // missing fov
    reject("fov 256\n");                          // wrong arity
    reject("fov 256 256\nrbc 1 2 3\n");           // wrong arity
    reject("fov 256 256\nrbc 1 2 three 4 5\n");   // malformed number
    reject("fov 256 256\nblob 1 2 3 4 5\n");      // unknown directive
    reject("fov 1 256\n");                        // degenerate grid
}

TEST_CASE("propagation by zero distance is the identity") {
    const ComplexField f = render_smear_phase(one_cell_scene(), OpticalConfig{});
    const ComplexField out = propagate_angular_spectrum(f, 0.0, OpticalConfig{});
    double m = 0.0;
    for (size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(out.values[i] - f.values[i]));
    CHECK(m < 1e-12);
}

TEST_CASE("a uniform field only picks up the plane-wave phase exp(i*2*pi*z/lambda)") {
    const OpticalConfig cfg;
    ComplexField f(64, 64, cfg.object_pitch_um(), cplx(0.8, 0.0));
    const double z = 13.7;
    const ComplexField out = propagate_angular_spectrum(f, z, cfg);
    const cplx expected = 0.8 * std::polar(1.0, 2.0 * M_PI * z / cfg.wavelength_um);
    double m = 0.0;
    for (const auto& v : out.values) m = std::max(m, std::abs(v - expected));
    CHECK(m < 1e-10);
}

TEST_CASE("propagation conserves energy and composes in z") {
    const OpticalConfig cfg;
    const ComplexField f = render_smear_phase(one_cell_scene(), cfg);

    const ComplexField fwd = propagate_angular_spectrum(f, 17.3, cfg);
    CHECK(field_energy(fwd) == doctest::Approx(field_energy(f)).epsilon(1e-10));

    const ComplexField two_step =
        propagate_angular_spectrum(propagate_angular_spectrum(f, 7.3, cfg), -2.9, cfg);
    const ComplexField one_step = propagate_angular_spectrum(f, 4.4, cfg);
    double m = 0.0, scale = 0.0;
    for (size_t i = 0; i < f.size(); ++i) {
        m = std::max(m, std::abs(two_step.values[i] - one_step.values[i]));
        scale = std::max(scale, std::abs(one_step.values[i]));
    }
    CHECK(m / scale < 1e-9);

    const ComplexField back = propagate_angular_spectrum(fwd, -17.3, cfg);
    double r = 0.0;
    for (size_t i = 0; i < f.size(); ++i) r = std::max(r, std::abs(back.values[i] - f.values[i]));
    CHECK(r < 1e-10);
}

TEST_CASE("propagation rejects a non-finite distance") {
    const ComplexField f(8, 8, 0.48, cplx(1.0, 0.0));
    CHECK_THROWS_AS(propagate_angular_spectrum(f, std::nan(""), OpticalConfig{}),
                    validation_error);
}

TEST_CASE("recorded hologram matches the two-beam expansion term by term") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    OpticalConfig cfg;
    cfg.carrier_fx = 0.31;
    cfg.carrier_fy = -0.12;
    cfg.shear_px = 20;
    cfg.reflectance_front = 0.05;
    cfg.reflectance_back = 0.03;

    const int w = 64, h = 48;
    ComplexField f(w, h, cfg.object_pitch_um(), cplx(1.0, 0.0));
    for (int y = 8; y < h - 8; ++y)
        for (int x = 4; x < 24; ++x) f.at(x, y) = cplx(uni(rng), uni(rng));

    const double extra = 0.83;
    const Hologram holo = record_stbi_hologram(f, cfg, extra);

    // background fill = medians of the real/imag parts (1 and 0 here)
    const double sf = std::sqrt(cfg.reflectance_front), sb = std::sqrt(cfg.reflectance_back);
    double m = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const cplx carrier =
                std::polar(1.0, 2.0 * M_PI * (cfg.carrier_fx * x + cfg.carrier_fy * y));
            const cplx o1 = sf * f.at(x, y) * carrier;
            const cplx shifted = x >= cfg.shear_px ? f.at(x - cfg.shear_px, y) : cplx(1.0, 0.0);
            const cplx o2 = sb * shifted * std::polar(1.0, extra);
            m = std::max(m, std::abs(holo.at(x, y) - std::norm(o1 + o2)));
        }
    CHECK(m < 1e-12);
}

TEST_CASE("empty-scene fringes reach the textbook two-beam visibility") {
    OpticalConfig cfg;
    cfg.carrier_fx = 0.125; // 8-pixel period samples the extrema exactly
    cfg.carrier_fy = 0.0;
    cfg.shear_px = 64;

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.01, 0.2);
    for (int trial = 0; trial < 6; ++trial) {
        cfg.reflectance_front = uni(rng);
        cfg.reflectance_back = uni(rng);
        const ComplexField flat(128, 32, cfg.object_pitch_um(), cplx(1.0, 0.0));
        const Hologram holo = record_stbi_hologram(flat, cfg);
        double lo = holo.values[0], hi = holo.values[0];
        for (double v : holo.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double vis = (hi - lo) / (hi + lo);
        const double expected = 2.0 * std::sqrt(cfg.reflectance_front * cfg.reflectance_back) /
                                (cfg.reflectance_front + cfg.reflectance_back);
        CHECK(vis == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("a dark back surface leaves the fringe-free front reflection") {
    OpticalConfig cfg;
    cfg.reflectance_back = 0.0;
    cfg.shear_px = 100;
    const ComplexField f = render_smear_phase(one_cell_scene(), cfg);
    const Hologram holo = record_stbi_hologram(f, cfg);
    double m = 0.0;
    for (size_t i = 0; i < holo.size(); ++i)
        m = std::max(m, std::abs(holo.values[i] - cfg.reflectance_front * std::norm(f.values[i])));
    CHECK(m < 1e-15);
}

TEST_CASE("recording rejects out-of-range and duplicate-image shears") {
    OpticalConfig cfg;
    const ComplexField f = render_smear_phase(one_cell_scene(), cfg);

    cfg.shear_px = 129; // > width/2 of the 256-wide field
    CHECK_THROWS_AS(record_stbi_hologram(f, cfg), validation_error);
    cfg.shear_px = -1;
    CHECK_THROWS_AS(record_stbi_hologram(f, cfg), validation_error);

    // cell spans ~17 px; a 10 px shear overlays the copies
    cfg.shear_px = 10;
    SmearScene wide = one_cell_scene();
    CHECK(scene_support_width_px(wide, cfg) > 10);
    CHECK_THROWS_AS(record_stbi_hologram(render_smear_phase(wide, cfg), cfg), validation_error);

    cfg.shear_px = 64; // comfortably past the support
    CHECK_NOTHROW(record_stbi_hologram(f, cfg));
}

TEST_CASE("focus stacks carry the defocus grid and ground-truth index") {
    OpticalConfig cfg;
    cfg.shear_px = 64;
    const StackResult sr = generate_focus_stack(one_cell_scene(), cfg, -10.0, 10.0, 3);
    CHECK(sr.stack.size() == 3);
    CHECK(sr.stack.z_start_um == doctest::Approx(-10.0));
    CHECK(sr.stack.z_step_um == doctest::Approx(10.0));
    CHECK(sr.stack.defocus_of(2) == doctest::Approx(10.0));
    CHECK(sr.ground_truth_index == 1);
    CHECK(sr.stack.frames[1].defocus_um == doctest::Approx(0.0));
    CHECK(sr.stack.frames[0].defocus_um == doctest::Approx(-10.0));
}

TEST_CASE("ground truth lands on the frame nearest zero defocus") {
    OpticalConfig cfg;
    cfg.shear_px = 64;
    // -8..+4 over 7 frames: defocus -8,-6,-4,-2,0,2,4 -> index 4
    const StackResult sr = generate_focus_stack(one_cell_scene(), cfg, -8.0, 4.0, 7);
    CHECK(sr.ground_truth_index == 4);
}

TEST_CASE("an empty scene defocuses into identical frames") {
    const StackResult sr = generate_focus_stack(SmearScene{}, OpticalConfig{}, -10.0, 10.0, 3);
    for (int i = 1; i < 3; ++i) {
        double m = 0.0;
        for (size_t k = 0; k < sr.stack.frames[0].size(); ++k)
            m = std::max(m, std::abs(sr.stack.frames[i].values[k] - sr.stack.frames[0].values[k]));
        CHECK(m < 1e-12);
    }
}

TEST_CASE("stack generation validates its sampling grid") {
    const SmearScene scene = one_cell_scene();
    OpticalConfig cfg;
    cfg.shear_px = 64;
    CHECK_THROWS_AS(generate_focus_stack(scene, cfg, -10.0, 10.0, 2), validation_error);
    CHECK_THROWS_AS(generate_focus_stack(scene, cfg, 5.0, 10.0, 5), validation_error);
    CHECK_THROWS_AS(generate_focus_stack(scene, cfg, -10.0, -5.0, 5), validation_error);
}

TEST_CASE("noise injection is seeded, clamped, and power-calibrated") {
    Hologram h(256, 256, 4.8);
    for (auto& v : h.values) v = 1.0;

    SUBCASE("infinite SNR returns the input unchanged") {
        const Hologram out = add_noise(h, std::numeric_limits<double>::infinity(), 9);
        CHECK(out.values == h.values);
    }
    SUBCASE("identical seeds give bitwise-identical noise, different seeds differ") {
        const Hologram a = add_noise(h, 20.0, 1234);
        const Hologram b = add_noise(h, 20.0, 1234);
        const Hologram c = add_noise(h, 20.0, 1235);
        CHECK(a.values == b.values);
        CHECK(a.values != c.values);
    }
    SUBCASE("empirical noise power tracks the requested SNR") {
        // mean(I^2) = 1, 20 dB -> variance 0.01; clamping never fires at 10 sigma
        const Hologram out = add_noise(h, 20.0, 77);
        double power = 0.0;
        for (size_t i = 0; i < out.size(); ++i) {
            const double d = out.values[i] - h.values[i];
            power += d * d;
        }
        power /= static_cast<double>(out.size());
        CHECK(power == doctest::Approx(0.01).epsilon(0.05));
    }
    SUBCASE("negative excursions clamp to zero") {
        Hologram dim(64, 64, 4.8);
        for (auto& v : dim.values) v = 0.01;
        const Hologram out = add_noise(dim, -20.0, 5);
        int zeros = 0;
        for (double v : out.values) {
            CHECK(v >= 0.0);
            if (v == 0.0) ++zeros;
        }
        CHECK(zeros > static_cast<int>(out.size()) / 10);
    }
    SUBCASE("NaN SNR is rejected") {
        CHECK_THROWS_AS(add_noise(h, std::nan(""), 1), validation_error);
    }
}

} // TEST_SUITE
