#include "stbiholo/morphometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

namespace stbiholo {

LabelMap segment_cells(const PhaseMap& p, double threshold_rad, int min_area_px) {
    if (min_area_px < 1)
        throw validation_error("segment_cells: min_area must be >= 1");

    const int w = p.width, h = p.height;
    LabelMap out;
    out.width = w;
    out.height = h;
    out.labels.assign(p.size(), 0);

    auto fg = [&](size_t i) { return p.mask[i] != 0 && p.values[i] > threshold_rad; };

    // First pass: flood-fill provisional labels in raster order.
    std::vector<int32_t> provisional(p.size(), 0);
    std::vector<size_t> stack;
    std::vector<std::vector<size_t>> members;
    for (size_t start = 0; start < p.size(); ++start) {
        if (!fg(start) || provisional[start] != 0) continue;
        const int32_t id = static_cast<int32_t>(members.size()) + 1;
        members.emplace_back();
        stack.push_back(start);
        provisional[start] = id;
        while (!stack.empty()) {
            const size_t i = stack.back();
            stack.pop_back();
            members.back().push_back(i);
            const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
            const size_t nbr[4] = {i - 1, i + 1, i - w, i + w};
            const bool ok[4] = {x > 0, x + 1 < w, y > 0, y + 1 < h};
            for (int k = 0; k < 4; ++k)
                if (ok[k] && fg(nbr[k]) && provisional[nbr[k]] == 0) {
                    provisional[nbr[k]] = id;
                    stack.push_back(nbr[k]);
                }
        }
    }

    // Second pass: drop the small ones, renumber survivors consecutively.
    int32_t next = 0;
    for (const auto& comp : members) {
        if (static_cast<int>(comp.size()) < min_area_px) continue;
        ++next;
        for (size_t i : comp) out.labels[i] = next;
    }
    out.count = next;
    return out;
}

std::vector<CellStats> cell_statistics(const PhaseMap& p, const LabelMap& labels,
                                       const OpticalConfig& config) {
    if (labels.width != p.width || labels.height != p.height ||
        labels.labels.size() != p.size())
        throw validation_error("cell_statistics: label map does not match the phase map");
    config.check();

    const double pitch = config.object_pitch_um();
    const double thick_per_rad =
        config.wavelength_um / (2.0 * M_PI * config.medium_index_delta);

    std::vector<CellStats> stats(labels.count);
    for (int i = 0; i < labels.count; ++i) stats[i].label = i + 1;

    for (size_t i = 0; i < p.size(); ++i) {
        const int32_t id = labels.labels[i];
        if (id == 0) continue;
        CellStats& s = stats[id - 1];
        const double phi = p.values[i];
        s.pixel_count += 1;
        s.mean_phase_rad += phi; // sum for now
        s.max_phase_rad = s.pixel_count == 1 ? phi : std::max(s.max_phase_rad, phi);
        s.optical_volume_um3 += phi;
        s.centroid_x_um += static_cast<double>(i % p.width);
        s.centroid_y_um += static_cast<double>(i / p.width);
    }
    for (auto& s : stats) {
        const double n = static_cast<double>(s.pixel_count);
        s.mean_phase_rad /= n;
        s.projected_area_um2 = n * pitch * pitch;
        s.optical_volume_um3 *= pitch * pitch * thick_per_rad;
        s.centroid_x_um = s.centroid_x_um / n * pitch;
        s.centroid_y_um = s.centroid_y_um / n * pitch;
    }
    return stats;
}

void write_stats_csv(const std::vector<CellStats>& stats, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write stats CSV: " + path);
    out << "label,cx_um,cy_um,pixels,area_um2,mean_phase_rad,max_phase_rad,volume_um3\n";
    out.precision(10);
    for (const auto& s : stats)
        out << s.label << "," << s.centroid_x_um << "," << s.centroid_y_um << ","
            << s.pixel_count << "," << s.projected_area_um2 << "," << s.mean_phase_rad
            << "," << s.max_phase_rad << "," << s.optical_volume_um3 << "\n";
    if (!out) throw io_error("write failed: " + path);
}

} // namespace stbiholo
