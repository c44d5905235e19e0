#include "stbiholo/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "stbiholo/fft.hpp"
#include "stbiholo/parallel.hpp"

namespace stbiholo {

// fftfreq in cycles/sample for index k of an n-point axis.
static double freq_of(int k, int n) {
    return (k <= (n - 1) / 2 ? k : k - n) / static_cast<double>(n);
}

ComplexField propagate_angular_spectrum(const ComplexField& field, double distance_um,
                                        const OpticalConfig& config) {
    field.check();
    config.check();
    if (!std::isfinite(distance_um))
        throw validation_error("propagate: distance must be finite");
    if (distance_um == 0.0) return field;

    const int w = field.width, h = field.height;
    const double lam = config.wavelength_um;
    const double pitch = field.pixel_pitch_um;

    ComplexField spec = dft2(field, FftDirection::forward);
    const double k0 = 2.0 * M_PI / lam;
    for (int y = 0; y < h; ++y) {
        const double fy = freq_of(y, h) / pitch; // cycles/µm
        const double sy = lam * fy;
        for (int x = 0; x < w; ++x) {
            const double fx = freq_of(x, w) / pitch;
            const double sx = lam * fx;
            const double band = 1.0 - sx * sx - sy * sy;
            if (band > 0.0)
                spec.at(x, y) *= std::polar(1.0, k0 * distance_um * std::sqrt(band));
            else
                spec.at(x, y) = 0.0; // evanescent
        }
    }
    return dft2(spec, FftDirection::inverse);
}

static cplx background_value(const ComplexField& f) {
    std::vector<double> re(f.size()), im(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        re[i] = f.values[i].real();
        im[i] = f.values[i].imag();
    }
    const size_t mid = f.size() / 2;
    std::nth_element(re.begin(), re.begin() + mid, re.end());
    std::nth_element(im.begin(), im.begin() + mid, im.end());
    return {re[mid], im[mid]};
}

// Bounding-box width of the pixels that deviate notably from the background.
// Propagation ringing is included on purpose: the check is a guard against
// the duplicate-image condition, so it uses a generous 25% threshold.
static int support_width(const ComplexField& f, cplx bg) {
    double max_dev = 0.0, max_amp = 0.0;
    std::vector<double> dev(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        dev[i] = std::abs(f.values[i] - bg);
        max_dev = std::max(max_dev, dev[i]);
        max_amp = std::max(max_amp, std::abs(f.values[i]));
    }
    if (max_dev <= 1e-9 * std::max(max_amp, 1e-300)) return 0; // featureless field
    const double thresh = 0.25 * max_dev;
    int cmin = f.width, cmax = -1;
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x)
            if (dev[static_cast<size_t>(y) * f.width + x] > thresh) {
                cmin = std::min(cmin, x);
                cmax = std::max(cmax, x);
            }
    return cmax < cmin ? 0 : cmax - cmin + 1;
}

Hologram record_stbi_hologram(const ComplexField& field, const OpticalConfig& config,
                              double extra_path_phase) {
    field.check();
    config.check();
    const int w = field.width, h = field.height;
    if (config.shear_px < 0)
        throw validation_error("record: shear must be nonnegative");
    if (config.shear_px > w / 2)
        throw validation_error("record: shear exceeds half the field of view");

    const cplx bg = background_value(field);
    const int obj_width = support_width(field, bg);
    if (obj_width > config.shear_px)
        throw validation_error(
            "record: object support wider than the shear distance; the object and its "
            "sheared copy would overlap (duplicate-image condition)");

    const double a1 = std::sqrt(config.reflectance_front);
    const double a2 = std::sqrt(config.reflectance_back);
    const cplx path = std::polar(1.0, extra_path_phase);
    const double tpi = 2.0 * M_PI;

    Hologram out(w, h, field.pixel_pitch_um);
    for (int y = 0; y < h; ++y) {
        const double phy = config.carrier_fy * y;
        for (int x = 0; x < w; ++x) {
            const cplx o1 = a1 * field.at(x, y) *
                            std::polar(1.0, tpi * (config.carrier_fx * x + phy));
            const cplx src = x >= config.shear_px ? field.at(x - config.shear_px, y) : bg;
            const cplx o2 = a2 * src * path;
            out.at(x, y) = std::norm(o1 + o2);
        }
    }
    return out;
}

StackResult generate_focus_stack(const SmearScene& scene, const OpticalConfig& config,
                                 double z_min_um, double z_max_um, int n_frames) {
    if (n_frames < 3)
        throw validation_error("stack: need at least 3 frames");
    if (!(z_min_um < 0.0) || !(z_max_um > 0.0))
        throw validation_error("stack: defocus range must straddle 0 (z_min < 0 < z_max)");
    if (scene_support_width_px(scene, config) > config.shear_px)
        throw validation_error(
            "stack: scene support wider than the shear distance; the object and its "
            "sheared copy would overlap (duplicate-image condition)");

    const ComplexField base = render_smear_phase(scene, config);
    const double step = (z_max_um - z_min_um) / (n_frames - 1);

    StackResult result;
    result.stack.z_start_um = z_min_um;
    result.stack.z_step_um = step;
    result.stack.frames.resize(n_frames);
    parallel_for(n_frames, [&](int k) {
        const double z = z_min_um + step * k;
        Hologram frame = record_stbi_hologram(propagate_angular_spectrum(base, z, config), config);
        frame.defocus_um = z;
        result.stack.frames[k] = std::move(frame);
    });

    int best = 0;
    for (int k = 1; k < n_frames; ++k)
        if (std::abs(result.stack.defocus_of(k)) < std::abs(result.stack.defocus_of(best)))
            best = k;
    result.ground_truth_index = best;
    return result;
}

Hologram add_noise(const Hologram& h, double snr_db, uint64_t seed) {
    h.check();
    if (std::isinf(snr_db)) return h;
    if (!std::isfinite(snr_db))
        throw validation_error("add_noise: snr must be finite or +inf");

    double power = 0.0;
    for (double v : h.values) power += v * v;
    power /= static_cast<double>(h.size());
    const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    Hologram out = h;
    for (auto& v : out.values) v = std::max(0.0, v + gauss(rng));
    return out;
}

} // namespace stbiholo
