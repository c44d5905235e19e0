#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "stbiholo/error.hpp"

namespace stbiholo {

using cplx = std::complex<double>;

/// 2-D complex amplitude grid with a physical pixel pitch (µm/px at the
/// object plane). Row-major storage, index = y*width + x.
struct ComplexField {
    int width = 0;
    int height = 0;
    double pixel_pitch_um = 1.0;
    std::vector<cplx> values;

    ComplexField() = default;
    ComplexField(int w, int h, double pitch_um, cplx fill = {})
        : width(w), height(h), pixel_pitch_um(pitch_um),
          values(static_cast<size_t>(w) * h, fill) {
        check();
    }

    cplx& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    const cplx& at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return values.size(); }

    void check() const {
        if (width < 2 || height < 2)
            throw validation_error("ComplexField: width and height must be >= 2");
        if (pixel_pitch_um <= 0.0)
            throw validation_error("ComplexField: pixel pitch must be > 0");
        if (values.size() != static_cast<size_t>(width) * height)
            throw validation_error("ComplexField: value count does not match dimensions");
    }
};

/// Recorded fringe intensity. Values are nonnegative, arbitrary units.
/// `defocus_um` is the signed distance from best focus (0 if unknown).
struct Hologram {
    int width = 0;
    int height = 0;
    double pixel_pitch_um = 1.0;
    double defocus_um = 0.0;
    std::vector<double> values;

    Hologram() = default;
    Hologram(int w, int h, double pitch_um, double fill = 0.0)
        : width(w), height(h), pixel_pitch_um(pitch_um),
          values(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return values.size(); }

    void check() const {
        if (width < 2 || height < 2)
            throw validation_error("Hologram: width and height must be >= 2");
        if (values.size() != static_cast<size_t>(width) * height)
            throw validation_error("Hologram: value count does not match dimensions");
        for (double v : values)
            if (!(v >= 0.0))
                throw validation_error("Hologram: intensities must be nonnegative");
    }
};

/// Phase in radians plus a per-pixel validity mask (1 = valid).
/// When `wrapped` is true every valid value lies in (-pi, pi].
struct PhaseMap {
    int width = 0;
    int height = 0;
    double pixel_pitch_um = 1.0;
    bool wrapped = false;
    std::vector<double> values;
    std::vector<uint8_t> mask;

    PhaseMap() = default;
    PhaseMap(int w, int h, double pitch_um)
        : width(w), height(h), pixel_pitch_um(pitch_um),
          values(static_cast<size_t>(w) * h, 0.0),
          mask(static_cast<size_t>(w) * h, 1) {}

    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    bool valid(int x, int y) const { return mask[static_cast<size_t>(y) * width + x] != 0; }
    size_t size() const { return values.size(); }
};

} // namespace stbiholo
