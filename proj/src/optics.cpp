#include "stbiholo/optics.hpp"

#include <cmath>

namespace stbiholo {

ShearDistance compute_shear_distance(const OpticalConfig& config) {
    config.check();
    const double theta = config.incidence_angle_deg * M_PI / 180.0;
    const double s = std::sin(theta);
    const double d_mm = config.plate_thickness_mm * std::sin(2.0 * theta) /
                        std::sqrt(config.plate_index * config.plate_index - s * s);
    ShearDistance out;
    out.millimeters = d_mm;
    out.sensor_pixels = static_cast<int>(std::llround(d_mm * 1000.0 / config.camera_pixel_um));
    return out;
}

} // namespace stbiholo
