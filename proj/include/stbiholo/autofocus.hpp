#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stbiholo/field.hpp"
#include "stbiholo/simulate.hpp"

namespace stbiholo {

/// Isotropic total variation: sum over pixels of sqrt(gx^2 + gy^2) with
/// forward differences. Zero iff the image is constant.
double total_variation(const Hologram& h);

/// Anisotropic (L1) alternative, sum of |gx| + |gy|; offered for comparison.
double total_variation_aniso(const Hologram& h);

struct FocusSelection {
    int index = 0;
    // (frame index, TV) for every frame that was evaluated, sorted by index.
    std::vector<std::pair<int, double>> curve;
};

/// Evaluates TV at frame indices 0, stride, 2*stride, ... and returns the
/// argmax; when refine is set, every frame within +-stride of the coarse
/// winner is evaluated too and the argmax is taken over all evaluated frames.
/// Ties break toward the lowest index. Frames are evaluated in parallel;
/// the selection is deterministic regardless of evaluation order.
FocusSelection select_focus(const FocusStack& stack, int stride, bool refine);

/// Arithmetic mean of valid phase over the mask (whole valid area when the
/// mask is empty). `mask` must either be empty or match the map's size.
double mean_phase(const PhaseMap& p, const std::vector<uint8_t>& mask = {});

/// Writes `index,defocus_um,tv` rows for the evaluated frames.
void write_tv_csv(const FocusSelection& sel, const FocusStack& stack, const std::string& path);

} // namespace stbiholo
