#include "stbiholo/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stbiholo {

double RBCPhantom::thickness_at(double x_um, double y_um) const {
    const double dx = x_um - cx_um;
    const double dy = y_um - cy_um;
    const double r2 = dx * dx + dy * dy;
    const double R2 = radius_um * radius_um;
    if (r2 >= R2) return 0.0;
    const double u = r2 / R2;
    const double h = max_thickness_um * (1.0 - u) *
                     (1.0 - dimple_depth * std::exp(-4.0 * u));
    return h > 0.0 ? h : 0.0;
}

double RBCPhantom::analytic_volume_um3() const {
    // V = pi R^2 T * Int_0^1 (1-u)(1 - D e^{-4u}) du, u = (r/R)^2.
    // The dimple term integrates by parts to 1/4 - (1 - e^-4)/16; the
    // profile never goes negative for dimple < 1, so no clipping correction.
    const double I = 0.25 - (1.0 - std::exp(-4.0)) / 16.0;
    return M_PI * radius_um * radius_um * max_thickness_um *
           (0.5 - dimple_depth * I);
}

static std::string strip_comment(const std::string& line) {
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

SmearScene parse_scene(std::istream& in) {
    SmearScene scene;
    bool saw_fov = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(strip_comment(line));
        std::vector<std::string> tok;
        for (std::string t; ss >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        const std::string where = "scene line " + std::to_string(lineno);
        if (tok[0] == "fov") {
            if (tok.size() != 3)
                throw validation_error(where + ": fov expects exactly 2 values");
            scene.fov_width = std::stoi(tok[1]);
            scene.fov_height = std::stoi(tok[2]);
            if (scene.fov_width < 2 || scene.fov_height < 2)
                throw validation_error(where + ": fov must be at least 2x2");
            saw_fov = true;
        } else if (tok[0] == "rbc") {
            if (tok.size() != 6)
                throw validation_error(where + ": rbc expects exactly 5 values");
            RBCPhantom p;
            try {
                p.cx_um = std::stod(tok[1]);
                p.cy_um = std::stod(tok[2]);
                p.radius_um = std::stod(tok[3]);
                p.max_thickness_um = std::stod(tok[4]);
                p.dimple_depth = std::stod(tok[5]);
            } catch (const std::exception&) {
                throw validation_error(where + ": malformed number");
            }
            p.check();
            scene.phantoms.push_back(p);
        } else {
            throw validation_error(where + ": unknown directive '" + tok[0] + "'");
        }
    }
    if (!saw_fov)
        throw validation_error("scene: missing 'fov W H' line");
    return scene;
}

SmearScene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open scene file: " + path);
    return parse_scene(in);
}

void save_scene(const SmearScene& scene, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write scene file: " + path);
    out << "fov " << scene.fov_width << " " << scene.fov_height << "\n";
    out.precision(17);
    for (const auto& p : scene.phantoms)
        out << "rbc " << p.cx_um << " " << p.cy_um << " " << p.radius_um
            << " " << p.max_thickness_um << " " << p.dimple_depth << "\n";
    if (!out) throw io_error("write failed: " + path);
}

std::vector<double> render_phase_values(const SmearScene& scene, const OpticalConfig& config) {
    config.check();
    const double pitch = config.object_pitch_um();
    const int w = scene.fov_width;
    const int h = scene.fov_height;
    const double midline_um = (w / 2) * pitch;
    std::vector<double> phase(static_cast<size_t>(w) * h, 0.0);
    const double phase_per_um = 2.0 * M_PI * config.medium_index_delta / config.wavelength_um;
    for (const auto& p : scene.phantoms) {
        p.check();
        if (p.cx_um + p.radius_um >= midline_um || p.cx_um - p.radius_um < 0.0)
            throw validation_error(
                "scene violation: phantom support must stay within the left half of the FOV");
        const int x0 = std::max(0, static_cast<int>(std::floor((p.cx_um - p.radius_um) / pitch)));
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil((p.cx_um + p.radius_um) / pitch)));
        const int y0 = std::max(0, static_cast<int>(std::floor((p.cy_um - p.radius_um) / pitch)));
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil((p.cy_um + p.radius_um) / pitch)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                phase[static_cast<size_t>(y) * w + x] +=
                    phase_per_um * p.thickness_at(x * pitch, y * pitch);
    }
    return phase;
}

int scene_support_width_px(const SmearScene& scene, const OpticalConfig& config) {
    config.check();
    if (scene.phantoms.empty()) return 0;
    const double pitch = config.object_pitch_um();
    int cmin = scene.fov_width, cmax = -1;
    for (const auto& p : scene.phantoms) {
        cmin = std::min(cmin, static_cast<int>(std::ceil((p.cx_um - p.radius_um) / pitch)));
        cmax = std::max(cmax, static_cast<int>(std::floor((p.cx_um + p.radius_um) / pitch)));
    }
    cmin = std::max(cmin, 0);
    cmax = std::min(cmax, scene.fov_width - 1);
    return cmax < cmin ? 0 : cmax - cmin + 1;
}

ComplexField render_smear_phase(const SmearScene& scene, const OpticalConfig& config) {
    const auto phase = render_phase_values(scene, config);
    ComplexField field(scene.fov_width, scene.fov_height, config.object_pitch_um());
    for (size_t i = 0; i < phase.size(); ++i)
        field.values[i] = std::polar(1.0, phase[i]);
    return field;
}

} // namespace stbiholo
