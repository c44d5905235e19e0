#pragma once

#include "stbiholo/error.hpp"

namespace stbiholo {

/// Full description of the recording geometry. Defaults model the reference
/// bench: He-Ne laser, 10X objective, 4.8 µm sensor pitch, 10 mm shear plate
/// at 45° incidence with ~4% reflectance per surface.
struct OpticalConfig {
    double wavelength_um = 0.633;
    double magnification = 10.0;
    double camera_pixel_um = 4.8;
    double plate_thickness_mm = 10.0;
    double plate_index = 1.5;
    double incidence_angle_deg = 45.0;
    double reflectance_front = 0.04;
    double reflectance_back = 0.04;
    double carrier_fx = 0.40;  // cycles/pixel at the sensor
    double carrier_fy = 0.28;
    int shear_px = 128;        // lateral shear at the sensor, +x direction
    double medium_index_delta = 0.06; // cell-vs-surround refractive contrast

    /// Pixel pitch at the object plane (sensor pitch demagnified).
    double object_pitch_um() const { return camera_pixel_um / magnification; }

    void check() const {
        if (wavelength_um <= 0) throw validation_error("config: wavelength must be > 0");
        if (magnification < 1) throw validation_error("config: magnification must be >= 1");
        if (camera_pixel_um <= 0) throw validation_error("config: camera pixel must be > 0");
        if (plate_index <= 1) throw validation_error("config: plate index must be > 1");
        if (incidence_angle_deg < 0 || incidence_angle_deg >= 90)
            throw validation_error("config: incidence angle must be in [0, 90)");
        if (reflectance_front < 0 || reflectance_front >= 1 ||
            reflectance_back < 0 || reflectance_back >= 1)
            throw validation_error("config: reflectances must be in [0, 1)");
    }
};

struct ShearDistance {
    double millimeters = 0.0;   // lateral separation of the two reflections
    int sensor_pixels = 0;      // nearest-integer equivalent at the sensor
};

/// Lateral walk-off between front- and back-surface reflections of a
/// plane-parallel plate: d = t * sin(2*theta) / sqrt(n^2 - sin^2(theta)).
ShearDistance compute_shear_distance(const OpticalConfig& config);

} // namespace stbiholo
