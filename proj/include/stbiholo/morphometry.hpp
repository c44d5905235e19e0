#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stbiholo/field.hpp"
#include "stbiholo/optics.hpp"

namespace stbiholo {

struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<int32_t> labels; // 0 = background, cells numbered from 1
    int count = 0;               // number of labels in use
};

/// Per-cell statistics in physical units (object-plane pitch).
struct CellStats {
    int label = 0;
    double centroid_x_um = 0.0;
    double centroid_y_um = 0.0;
    int64_t pixel_count = 0;
    double projected_area_um2 = 0.0;
    double mean_phase_rad = 0.0;
    double max_phase_rad = 0.0;
    double optical_volume_um3 = 0.0; // integral of the phase-equivalent thickness
};

/// 4-connected components of {valid && phase > threshold}; components below
/// min_area pixels are dropped; surviving labels are renumbered from 1 in
/// raster order of their first pixel.
LabelMap segment_cells(const PhaseMap& p, double threshold_rad, int min_area_px);

/// Statistics per label, sorted by label. Thickness-equivalent per pixel is
/// phase * wavelength / (2*pi*medium_index_delta); volume integrates it over
/// the component at the object-plane pitch.
std::vector<CellStats> cell_statistics(const PhaseMap& p, const LabelMap& labels,
                                       const OpticalConfig& config);

/// `label,cx_um,cy_um,pixels,area_um2,mean_phase_rad,max_phase_rad,volume_um3`
void write_stats_csv(const std::vector<CellStats>& stats, const std::string& path);

} // namespace stbiholo
