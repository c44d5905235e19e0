#pragma once

#include <vector>

#include "stbiholo/field.hpp"
#include "stbiholo/optics.hpp"
#include "stbiholo/scene.hpp"

namespace stbiholo {

/// Through-focus sequence of holograms with affine index->defocus mapping.
struct FocusStack {
    std::vector<Hologram> frames;
    double z_start_um = 0.0;
    double z_step_um = 0.0;

    double defocus_of(int index) const { return z_start_um + z_step_um * index; }
    int size() const { return static_cast<int>(frames.size()); }
};

struct StackResult {
    FocusStack stack;
    int ground_truth_index = 0; // frame whose defocus is closest to 0
};

/// Exact free-space propagation by `distance_um` via the angular spectrum:
/// H(fx,fy) = exp(i * 2*pi/lambda * z * sqrt(1 - (lambda*fx)^2 - (lambda*fy)^2)),
/// evanescent components zeroed. Energy on the propagating band is conserved
/// and propagations compose additively in z.
ComplexField propagate_angular_spectrum(const ComplexField& field, double distance_um,
                                        const OpticalConfig& config);

/// Records the shearing interferogram I = |O1 + O2|^2 where
///   O1 = sqrt(reflectance_front) * field * exp(i*2*pi*(fx*x + fy*y))
///   O2 = sqrt(reflectance_back)  * shift(field by shear_px in +x)
///        * exp(i*extra_path_phase)
/// The shifted-in region is filled with the field's background value (median
/// real/imag parts), i.e. the unaltered beam continues beyond the FOV edge.
/// Throws if shear_px exceeds half the width or is smaller than the object
/// support (duplicate-image condition).
Hologram record_stbi_hologram(const ComplexField& field, const OpticalConfig& config,
                              double extra_path_phase = 0.0);

/// Renders the scene once and records n_frames holograms at defocus values
/// uniformly spaced over [z_min_um, z_max_um]. Frames are generated in
/// parallel; results are deterministic.
StackResult generate_focus_stack(const SmearScene& scene, const OpticalConfig& config,
                                 double z_min_um, double z_max_um, int n_frames);

/// Adds zero-mean Gaussian noise with variance mean(I^2) / 10^(snr_db/10),
/// clamped at 0. Deterministic for a fixed seed. An infinite snr_db returns
/// the input unchanged.
Hologram add_noise(const Hologram& h, double snr_db, uint64_t seed);

} // namespace stbiholo
