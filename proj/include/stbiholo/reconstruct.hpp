#pragma once

#include "stbiholo/field.hpp"

namespace stbiholo {

/// Sub-pixel estimate of the fringe carrier frequency (cycles/pixel).
struct CarrierEstimate {
    double fx = 0.0;
    double fy = 0.0;
    double peak_magnitude = 0.0;

    double distance() const; // radial distance to DC, cycles/pixel
};

/// Peak search in the fx > dc_exclusion half-plane of the spectrum, refined
/// to sub-pixel by a quadratic fit to the 3x3 log-magnitude neighborhood and
/// then polished against the mean residual tilt of the extracted order.
/// Throws when no peak rises above 3x the median magnitude of the half-plane
/// (fringe-free input).
CarrierEstimate locate_carrier(const Hologram& h, double dc_exclusion = 0.05);

/// Isolates the +1 interference order: a circular low-pass of the carrier-
/// demodulated hologram (raised-cosine edge over the outer 20% of `radius`),
/// computed on a mirror-extended grid to avoid wrap-around ringing, with
/// `iterations` rounds of conjugate-order suppression. The result is the
/// windowed cross-term, re-modulated so it still carries the carrier tilt.
/// `radius` is in cycles/pixel and must stay below the carrier distance.
ComplexField extract_order(const Hologram& h, const CarrierEstimate& carrier,
                           double radius, int iterations = 3);

/// Removes the carrier tilt: circular spectral shift by the integer bin part
/// of the carrier, then pointwise multiplication by the sub-bin residual
/// phase ramp.
ComplexField remove_carrier(const ComplexField& f, const CarrierEstimate& carrier);

/// Per-pixel argument in (-pi, pi]. Pixels whose amplitude falls below
/// amplitude_floor_rel times the maximum amplitude are masked invalid.
PhaseMap wrapped_phase(const ComplexField& f, double amplitude_floor_rel = 1e-6);

/// Least-squares (Poisson) unwrapping with reflective boundaries, solved in
/// a cosine basis. Exact (to solver precision) for residue-free inputs.
/// The result is shifted so the minimum over valid pixels is 0.
PhaseMap unwrap_phase(const PhaseMap& p);

/// Pointwise obj - bg, re-zeroed so the median over valid pixels (the
/// object-free majority) is 0. Masks intersect.
PhaseMap subtract_background(const PhaseMap& obj, const PhaseMap& bg);

struct ReconstructParams {
    double dc_exclusion = 0.05;  // cycles/pixel kept clear around DC
    double radius_frac = 0.5;    // order window radius as fraction of carrier distance
    int iterations = 3;          // conjugate-suppression rounds
};

/// Full single-frame pipeline: locate carrier on `obj`, extract/demodulate/
/// unwrap both holograms with that one estimate (so residual tilt cancels),
/// subtract. Optionally reports the carrier used.
PhaseMap reconstruct_phase(const Hologram& obj, const Hologram& bg,
                           const ReconstructParams& params = {},
                           CarrierEstimate* carrier_out = nullptr);

/// Same pipeline with a caller-provided carrier (e.g. shared across a stack).
PhaseMap reconstruct_phase_with_carrier(const Hologram& obj, const Hologram& bg,
                                        const CarrierEstimate& carrier,
                                        const ReconstructParams& params = {});

} // namespace stbiholo
