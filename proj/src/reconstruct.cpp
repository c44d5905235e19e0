#include "stbiholo/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stbiholo/fft.hpp"

namespace stbiholo {

double CarrierEstimate::distance() const { return std::hypot(fx, fy); }

static double freq_of(int k, int n) {
    return (k <= (n - 1) / 2 ? k : k - n) / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// +1-order isolation on a mirror-extended grid.
//
// Demodulating first and mirror-extending makes the signal continuous across
// the frame edges, so the low-pass window does not ring against the frame
// boundary; the conjugate order (which demodulation parks at -2*carrier) is
// estimated from the current order and subtracted over a few rounds.
// ---------------------------------------------------------------------------

static std::vector<cplx> lowpass_mirrored(const std::vector<cplx>& s, int w, int h,
                                          double radius) {
    const int W2 = 2 * w, H2 = 2 * h;
    std::vector<cplx> ext(static_cast<size_t>(W2) * H2);
    for (int y = 0; y < H2; ++y) {
        const int sy = y < h ? y : 2 * h - 1 - y;
        for (int x = 0; x < W2; ++x) {
            const int sx = x < w ? x : 2 * w - 1 - x;
            ext[static_cast<size_t>(y) * W2 + x] = s[static_cast<size_t>(sy) * w + sx];
        }
    }
    dft2_raw(ext, W2, H2, FftDirection::forward);
    const double inner = 0.8 * radius;
    for (int y = 0; y < H2; ++y) {
        const double fy = freq_of(y, H2);
        for (int x = 0; x < W2; ++x) {
            const double rho = std::hypot(freq_of(x, W2), fy);
            double win = 0.0;
            if (rho <= inner) {
                win = 1.0;
            } else if (rho <= radius) {
                const double t = std::cos(0.5 * M_PI * (rho - inner) / (radius - inner));
                win = t * t;
            }
            ext[static_cast<size_t>(y) * W2 + x] *= win;
        }
    }
    dft2_raw(ext, W2, H2, FftDirection::inverse);
    std::vector<cplx> out(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out[static_cast<size_t>(y) * w + x] = ext[static_cast<size_t>(y) * W2 + x];
    return out;
}

static std::vector<cplx> extract_demodulated(const Hologram& h, double fx, double fy,
                                             double radius, int iterations) {
    const int w = h.width, ht = h.height;
    double mean = 0.0;
    for (double v : h.values) mean += v;
    mean /= static_cast<double>(h.size());

    std::vector<cplx> d0(h.size());
    for (int y = 0; y < ht; ++y)
        for (int x = 0; x < w; ++x)
            d0[static_cast<size_t>(y) * w + x] =
                (h.at(x, y) - mean) * std::polar(1.0, -2.0 * M_PI * (fx * x + fy * y));

    std::vector<cplx> s = lowpass_mirrored(d0, w, ht, radius);
    std::vector<cplx> work(d0.size());
    for (int it = 0; it < iterations; ++it) {
        // Conjugate order sits at -2*carrier after demodulation; remove its
        // estimated in-band leakage and re-filter.
        for (int y = 0; y < ht; ++y)
            for (int x = 0; x < w; ++x) {
                const size_t i = static_cast<size_t>(y) * w + x;
                work[i] = d0[i] - std::conj(s[i]) *
                                      std::polar(1.0, -4.0 * M_PI * (fx * x + fy * y));
            }
        s = lowpass_mirrored(work, w, ht, radius);
    }
    return s;
}

// Mean per-pixel phase step of the order estimate along each axis; this is
// the residual carrier error left by the spectral-peak fit.
static void residual_tilt(const std::vector<cplx>& s, int w, int h,
                          double* dfx, double* dfy) {
    cplx ax = 0.0, ay = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            if (x + 1 < w) ax += s[i + 1] * std::conj(s[i]);
            if (y + 1 < h) ay += s[i + w] * std::conj(s[i]);
        }
    *dfx = std::arg(ax) / (2.0 * M_PI);
    *dfy = std::arg(ay) / (2.0 * M_PI);
}

CarrierEstimate locate_carrier(const Hologram& h, double dc_exclusion) {
    h.check();
    if (dc_exclusion < 0.0 || dc_exclusion >= 0.5)
        throw validation_error("locate_carrier: dc exclusion must be in [0, 0.5)");
    const int w = h.width, ht = h.height;

    ComplexField cf(w, ht, h.pixel_pitch_um);
    for (size_t i = 0; i < h.size(); ++i) cf.values[i] = h.values[i];
    const ComplexField spec = dft2(cf, FftDirection::forward);

    std::vector<double> mag(spec.size());
    for (size_t i = 0; i < spec.size(); ++i) mag[i] = std::abs(spec.values[i]);

    // Strongest peak in the positive-fx half-plane, clear of DC.
    std::vector<double> zone;
    zone.reserve(mag.size() / 2);
    int px = -1, py = -1;
    double peak = -1.0;
    for (int y = 0; y < ht; ++y)
        for (int x = 0; x < w; ++x) {
            if (freq_of(x, w) <= dc_exclusion) continue;
            const double m = mag[static_cast<size_t>(y) * w + x];
            zone.push_back(m);
            if (m > peak) {
                peak = m;
                px = x;
                py = y;
            }
        }
    if (zone.empty())
        throw validation_error("locate_carrier: exclusion zone covers the whole half-plane");
    std::nth_element(zone.begin(), zone.begin() + zone.size() / 2, zone.end());
    const double med = zone[zone.size() / 2];
    if (peak <= 3.0 * med)
        throw validation_error("locate_carrier: no carrier peak found (fringe-free input)");

    // Quadratic least-squares on the 3x3 log-magnitude stencil. The basis
    // {1, x, y, x^2, xy, y^2} is orthogonal on the stencil except for the
    // (1, x^2, y^2) block, which solves in closed form.
    double L[3][3];
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            const int nx = (px + dx + w) % w;
            const int ny = (py + dy + ht) % ht;
            L[dy + 1][dx + 1] = std::log(mag[static_cast<size_t>(ny) * w + nx] + 1e-300);
        }
    double S0 = 0, Sx = 0, Sy = 0, Sxx = 0, Syy = 0, Sxy = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            const double v = L[dy + 1][dx + 1];
            S0 += v;
            Sx += v * dx;
            Sy += v * dy;
            Sxx += v * dx * dx;
            Syy += v * dy * dy;
            Sxy += v * dx * dy;
        }
    const double b = Sx / 6.0, c = Sy / 6.0, e = Sxy / 4.0;
    const double t = 0.5 * (Sxx + Syy) - (2.0 / 3.0) * S0;
    const double d = 0.5 * (t + 0.5 * (Sxx - Syy));
    const double f = 0.5 * (t - 0.5 * (Sxx - Syy));
    double sub_x = 0.0, sub_y = 0.0;
    const double det = 4.0 * d * f - e * e;
    if (det > 0.0 && d < 0.0) { // negative-definite Hessian: a genuine maximum
        sub_x = (-2.0 * f * b + e * c) / det;
        sub_y = (-2.0 * d * c + e * b) / det;
        if (std::abs(sub_x) > 1.0 || std::abs(sub_y) > 1.0) sub_x = sub_y = 0.0;
    }

    CarrierEstimate est;
    est.fx = freq_of(px, w) + sub_x / w;
    est.fy = freq_of(py, ht) + sub_y / ht;
    est.peak_magnitude = peak;

    // Polish: the quadratic fit leaves a fraction-of-a-bin error that shows
    // up as a residual tilt on the extracted order; measure and fold it in.
    for (int round = 0; round < 2; ++round) {
        const double dist = est.distance();
        if (dist <= dc_exclusion) break;
        const double radius = 0.5 * dist;
        const auto s = extract_demodulated(h, est.fx, est.fy, radius, 2);
        double dfx = 0.0, dfy = 0.0;
        residual_tilt(s, w, ht, &dfx, &dfy);
        if (!std::isfinite(dfx) || !std::isfinite(dfy)) break;
        est.fx += dfx;
        est.fy += dfy;
    }
    est.fx = std::clamp(est.fx, -0.5, 0.5);
    est.fy = std::clamp(est.fy, -0.5, 0.5);
    return est;
}

ComplexField extract_order(const Hologram& h, const CarrierEstimate& carrier,
                           double radius, int iterations) {
    h.check();
    if (radius < 0.0)
        throw validation_error("extract_order: radius must be nonnegative");
    if (radius >= carrier.distance())
        throw validation_error(
            "extract_order: window radius reaches DC (order and dc terms overlap)");
    if (iterations < 0)
        throw validation_error("extract_order: iterations must be >= 0");

    const auto s = extract_demodulated(h, carrier.fx, carrier.fy, radius, iterations);
    ComplexField out(h.width, h.height, h.pixel_pitch_um);
    for (int y = 0; y < h.height; ++y)
        for (int x = 0; x < h.width; ++x)
            out.at(x, y) = s[static_cast<size_t>(y) * h.width + x] *
                           std::polar(1.0, 2.0 * M_PI * (carrier.fx * x + carrier.fy * y));
    return out;
}

ComplexField remove_carrier(const ComplexField& f, const CarrierEstimate& carrier) {
    f.check();
    const int w = f.width, h = f.height;
    const int kx = static_cast<int>(std::trunc(carrier.fx * w));
    const int ky = static_cast<int>(std::trunc(carrier.fy * h));
    const double dfx = carrier.fx - static_cast<double>(kx) / w;
    const double dfy = carrier.fy - static_cast<double>(ky) / h;

    ComplexField spec = dft2(f, FftDirection::forward);
    ComplexField rolled(w, h, f.pixel_pitch_um);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            rolled.at(u, v) = spec.at((u + kx % w + w) % w, (v + ky % h + h) % h);
    ComplexField out = dft2(rolled, FftDirection::inverse);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) *= std::polar(1.0, -2.0 * M_PI * (dfx * x + dfy * y));
    return out;
}

PhaseMap wrapped_phase(const ComplexField& f, double amplitude_floor_rel) {
    f.check();
    PhaseMap p(f.width, f.height, f.pixel_pitch_um);
    p.wrapped = true;
    double amax = 0.0;
    for (const auto& v : f.values) amax = std::max(amax, std::abs(v));
    const double floor_abs = amplitude_floor_rel * amax;
    for (size_t i = 0; i < f.size(); ++i) {
        double phi = std::arg(f.values[i]); // [-pi, pi]
        if (phi <= -M_PI) phi = M_PI;       // wrap convention: (-pi, pi]
        p.values[i] = phi;
        p.mask[i] = (amax > 0.0 && std::abs(f.values[i]) >= floor_abs) ? 1 : 0;
    }
    return p;
}

static double wrap_to_pi(double t) {
    double r = std::remainder(t, 2.0 * M_PI); // [-pi, pi]
    if (r <= -M_PI) r = M_PI;
    return r;
}

PhaseMap unwrap_phase(const PhaseMap& p) {
    if (!p.wrapped)
        throw validation_error("unwrap_phase: input must be a wrapped map");
    const int w = p.width, h = p.height;
    if (w < 2 || h < 2)
        throw validation_error("unwrap_phase: both dimensions must be >= 2");
    bool any_valid = false;
    for (uint8_t m : p.mask)
        if (m) { any_valid = true; break; }
    if (!any_valid)
        throw validation_error("unwrap_phase: fully masked input");

    // Divergence of the wrapped forward-difference gradient field (masked
    // pixels participate with their stored in-fill values; the result is
    // only reported on the mask).
    std::vector<double> rho(p.size(), 0.0);
    auto val = [&](int x, int y) { return p.values[static_cast<size_t>(y) * w + x]; };
    auto dx = [&](int x, int y) {
        return x + 1 < w ? wrap_to_pi(val(x + 1, y) - val(x, y)) : 0.0;
    };
    auto dy = [&](int x, int y) {
        return y + 1 < h ? wrap_to_pi(val(x, y + 1) - val(x, y)) : 0.0;
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double div_x = dx(x, y) - (x > 0 ? dx(x - 1, y) : 0.0);
            const double div_y = dy(x, y) - (y > 0 ? dy(x, y - 1) : 0.0);
            rho[static_cast<size_t>(y) * w + x] = div_x + div_y;
        }

    // Poisson solve with reflective boundaries in the cosine basis.
    dct2_forward(rho, w, h);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u) {
            if (u == 0 && v == 0) {
                rho[0] = 0.0;
                continue;
            }
            const double eig = 2.0 * std::cos(M_PI * u / w) +
                               2.0 * std::cos(M_PI * v / h) - 4.0;
            rho[static_cast<size_t>(v) * w + u] /= eig;
        }
    dct2_inverse(rho, w, h);

    PhaseMap out(w, h, p.pixel_pitch_um);
    out.wrapped = false;
    out.mask = p.mask;
    out.values = std::move(rho);
    double lo = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < out.size(); ++i)
        if (out.mask[i]) lo = std::min(lo, out.values[i]);
    for (auto& v : out.values) v -= lo;
    return out;
}

PhaseMap subtract_background(const PhaseMap& obj, const PhaseMap& bg) {
    if (obj.width != bg.width || obj.height != bg.height)
        throw validation_error("subtract_background: phase map dimensions differ");
    if (obj.wrapped || bg.wrapped)
        throw validation_error("subtract_background: both maps must be unwrapped");

    PhaseMap out(obj.width, obj.height, obj.pixel_pitch_um);
    out.wrapped = false;
    std::vector<double> valid_diffs;
    valid_diffs.reserve(out.size());
    for (size_t i = 0; i < out.size(); ++i) {
        out.values[i] = obj.values[i] - bg.values[i];
        out.mask[i] = obj.mask[i] && bg.mask[i] ? 1 : 0;
        if (out.mask[i]) valid_diffs.push_back(out.values[i]);
    }
    if (valid_diffs.empty())
        throw validation_error("subtract_background: no valid pixels in common");
    const size_t mid = valid_diffs.size() / 2;
    std::nth_element(valid_diffs.begin(), valid_diffs.begin() + mid, valid_diffs.end());
    const double med = valid_diffs[mid];
    for (auto& v : out.values) v -= med;
    return out;
}

static PhaseMap unwrap_chain(const Hologram& holo, const CarrierEstimate& carrier,
                             const ReconstructParams& params) {
    const double radius = params.radius_frac * carrier.distance();
    const ComplexField order = extract_order(holo, carrier, radius, params.iterations);
    const ComplexField flat = remove_carrier(order, carrier);
    return unwrap_phase(wrapped_phase(flat));
}

PhaseMap reconstruct_phase_with_carrier(const Hologram& obj, const Hologram& bg,
                                        const CarrierEstimate& carrier,
                                        const ReconstructParams& params) {
    if (obj.width != bg.width || obj.height != bg.height)
        throw validation_error("reconstruct: object and background dimensions differ");
    return subtract_background(unwrap_chain(obj, carrier, params),
                               unwrap_chain(bg, carrier, params));
}

PhaseMap reconstruct_phase(const Hologram& obj, const Hologram& bg,
                           const ReconstructParams& params, CarrierEstimate* carrier_out) {
    const CarrierEstimate carrier = locate_carrier(obj, params.dc_exclusion);
    if (carrier_out) *carrier_out = carrier;
    return reconstruct_phase_with_carrier(obj, bg, carrier, params);
}

} // namespace stbiholo
