#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stbiholo/field.hpp"
#include "stbiholo/optics.hpp"

namespace stbiholo {

/// Biconcave disc phantom. Thickness profile (r = distance from center, µm):
///   h(r) = max_thickness * (1 - (r/radius)^2) * (1 - dimple * exp(-(r/(radius/2))^2))
/// clipped at 0 and cut off at r >= radius.
struct RBCPhantom {
    double cx_um = 0.0;
    double cy_um = 0.0;
    double radius_um = 4.0;
    double max_thickness_um = 2.0;
    double dimple_depth = 0.0; // fraction of max_thickness removed at center

    void check() const {
        if (radius_um <= 0) throw validation_error("phantom: radius must be > 0");
        if (max_thickness_um <= 0) throw validation_error("phantom: thickness must be > 0");
        if (dimple_depth < 0 || dimple_depth >= 1)
            throw validation_error("phantom: dimple depth must be in [0, 1)");
    }

    double thickness_at(double x_um, double y_um) const;

    /// Closed-form integral of the thickness profile over its disc (µm³).
    double analytic_volume_um3() const;
};

/// Cells scattered over the left half of the field of view; the right half
/// stays empty so the sheared copy lands on clean background.
struct SmearScene {
    std::vector<RBCPhantom> phantoms;
    int fov_width = 256;
    int fov_height = 256;
};

/// Parse the line-oriented scene format:
///   fov W H
///   rbc cx_um cy_um radius_um thickness_um dimple
/// with '#' comments and blank lines ignored. Whitespace is free-form but
/// the token count per line is strict.
SmearScene parse_scene(std::istream& in);
SmearScene load_scene(const std::string& path);
void save_scene(const SmearScene& scene, const std::string& path);

/// Unit-amplitude object wavefront exp(i*phi) with
/// phi = 2*pi * medium_index_delta * h(x,y) / wavelength and h the summed
/// phantom thickness. Throws if any phantom support crosses the FOV midline.
ComplexField render_smear_phase(const SmearScene& scene, const OpticalConfig& config);

/// Ground-truth phase map of the scene on the same grid (radians).
std::vector<double> render_phase_values(const SmearScene& scene, const OpticalConfig& config);

/// Width in pixels of the bounding box that covers every phantom's support
/// (outer bound; 0 for an empty scene). A shear of at least this many pixels
/// guarantees the object and its sheared copy cannot overlap.
int scene_support_width_px(const SmearScene& scene, const OpticalConfig& config);

} // namespace stbiholo
