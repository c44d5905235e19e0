#include "stbiholo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "stbiholo/autofocus.hpp"
#include "stbiholo/fieldfile.hpp"
#include "stbiholo/morphometry.hpp"
#include "stbiholo/optics.hpp"
#include "stbiholo/reconstruct.hpp"
#include "stbiholo/scene.hpp"
#include "stbiholo/simulate.hpp"

namespace fs = std::filesystem;

namespace stbiholo {
namespace {

void add_optics_flags(CLI::App* cmd, OpticalConfig& cfg) {
    cmd->add_option("--wavelength-um", cfg.wavelength_um, "Laser wavelength, µm")
        ->capture_default_str();
    cmd->add_option("--mag", cfg.magnification, "Objective magnification")
        ->capture_default_str();
    cmd->add_option("--pixel-um", cfg.camera_pixel_um, "Sensor pixel pitch, µm")
        ->capture_default_str();
    cmd->add_option("--plate-mm", cfg.plate_thickness_mm, "Shear plate thickness, mm")
        ->capture_default_str();
    cmd->add_option("--plate-index", cfg.plate_index, "Shear plate refractive index")
        ->capture_default_str();
    cmd->add_option("--angle-deg", cfg.incidence_angle_deg, "Plate incidence angle, degrees")
        ->capture_default_str();
    cmd->add_option("--refl-front", cfg.reflectance_front, "Front-surface reflectance")
        ->capture_default_str();
    cmd->add_option("--refl-back", cfg.reflectance_back, "Back-surface reflectance")
        ->capture_default_str();
    cmd->add_option("--carrier-fx", cfg.carrier_fx, "Carrier frequency x, cycles/px")
        ->capture_default_str();
    cmd->add_option("--carrier-fy", cfg.carrier_fy, "Carrier frequency y, cycles/px")
        ->capture_default_str();
    cmd->add_option("--shear-px", cfg.shear_px, "Lateral shear, sensor pixels")
        ->capture_default_str();
    cmd->add_option("--dn", cfg.medium_index_delta, "Cell-medium refractive index delta")
        ->capture_default_str();
}

std::string frame_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%04d.fld", index);
    return buf;
}

void write_manifest(const fs::path& dir, const FocusStack& stack, int gt_index) {
    const fs::path path = dir / "stack.txt";
    std::ofstream out(path);
    if (!out) throw io_error("cannot write manifest: " + path.string());
    out.precision(17);
    out << "groundtruth " << gt_index << "\n";
    for (int i = 0; i < stack.size(); ++i)
        out << i << " " << frame_name(i) << " " << stack.defocus_of(i) << "\n";
    if (!out) throw io_error("write failed: " + path.string());
}

struct Manifest {
    std::vector<std::string> files;
    std::vector<double> defocus;
    int groundtruth = -1;
};

Manifest read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open manifest: " + path.string());
    Manifest m;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;
        if (first == "groundtruth") {
            if (!(ss >> m.groundtruth))
                throw validation_error("manifest: malformed groundtruth line");
            continue;
        }
        int index = 0;
        std::string fname;
        double z = 0.0;
        try {
            index = std::stoi(first);
        } catch (const std::exception&) {
            throw validation_error("manifest: malformed frame index: " + first);
        }
        if (!(ss >> fname >> z))
            throw validation_error("manifest: malformed frame line");
        if (index != static_cast<int>(m.files.size()))
            throw validation_error("manifest: frame indices must be consecutive from 0");
        m.files.push_back(fname);
        m.defocus.push_back(z);
    }
    if (m.files.empty()) throw validation_error("manifest: no frames listed");
    return m;
}

FocusStack load_stack(const fs::path& manifest_path, const Manifest& m) {
    const fs::path dir = manifest_path.parent_path();
    FocusStack stack;
    stack.frames.resize(m.files.size());
    for (size_t i = 0; i < m.files.size(); ++i) {
        auto content = read_field_file((dir / m.files[i]).string());
        auto* holo = std::get_if<Hologram>(&content);
        if (!holo)
            throw validation_error("manifest frame is not a hologram file: " + m.files[i]);
        stack.frames[i] = std::move(*holo);
    }
    stack.z_start_um = m.defocus.front();
    stack.z_step_um = m.files.size() > 1
                          ? (m.defocus.back() - m.defocus.front()) /
                                static_cast<double>(m.files.size() - 1)
                          : 0.0;
    return stack;
}

Hologram load_hologram(const std::string& path) {
    auto content = read_field_file(path);
    auto* holo = std::get_if<Hologram>(&content);
    if (!holo) throw validation_error("not a hologram file: " + path);
    return std::move(*holo);
}

PhaseMap load_phase(const std::string& path) {
    auto content = read_field_file(path);
    auto* phase = std::get_if<PhaseMap>(&content);
    if (!phase) throw validation_error("not a phase map file: " + path);
    return std::move(*phase);
}

void export_phase_pgm(const PhaseMap& phase, const std::string& path, double lo, double hi) {
    if (std::isnan(lo) || std::isnan(hi)) { // auto range from valid pixels
        lo = std::numeric_limits<double>::infinity();
        hi = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < phase.size(); ++i)
            if (phase.mask[i]) {
                lo = std::min(lo, phase.values[i]);
                hi = std::max(hi, phase.values[i]);
            }
        if (!(lo < hi)) hi = lo + 1.0;
    }
    export_pgm16(phase.values, phase.width, phase.height, path, lo, hi);
}

// --- subcommand bodies ------------------------------------------------------

struct SimulateOpts {
    std::string scene_path;
    std::string out_dir = ".";
    int stack = 61;
    double zrange_um = 30.0;
    double snr_db = std::numeric_limits<double>::infinity();
    uint64_t seed = 1;
};

int do_simulate(const SimulateOpts& o, const OpticalConfig& cfg) {
    const SmearScene scene = load_scene(o.scene_path);
    fs::create_directories(o.out_dir);

    StackResult result;
    if (o.stack == 1) {
        Hologram holo = record_stbi_hologram(render_smear_phase(scene, cfg), cfg);
        holo.defocus_um = 0.0;
        result.stack.frames.push_back(std::move(holo));
        result.stack.z_start_um = 0.0;
        result.stack.z_step_um = 0.0;
        result.ground_truth_index = 0;
    } else {
        result = generate_focus_stack(scene, cfg, -o.zrange_um, o.zrange_um, o.stack);
    }
    if (std::isfinite(o.snr_db))
        for (int i = 0; i < result.stack.size(); ++i)
            result.stack.frames[i] = add_noise(result.stack.frames[i], o.snr_db, o.seed + i);

    for (int i = 0; i < result.stack.size(); ++i)
        write_field_file((fs::path(o.out_dir) / frame_name(i)).string(),
                         result.stack.frames[i]);
    write_manifest(o.out_dir, result.stack, result.ground_truth_index);
    std::cout << "frames " << result.stack.size() << "\n"
              << "groundtruth " << result.ground_truth_index << "\n";
    return 0;
}

struct FocusOpts {
    std::string stack_path;
    int stride = 30;
    bool refine = false;
    std::string csv_path;
};

int do_focus(const FocusOpts& o) {
    const Manifest m = read_manifest(o.stack_path);
    const FocusStack stack = load_stack(o.stack_path, m);
    const FocusSelection sel = select_focus(stack, o.stride, o.refine);
    if (!o.csv_path.empty()) write_tv_csv(sel, stack, o.csv_path);
    std::cout << "selected " << sel.index << " " << stack.defocus_of(sel.index) << "\n";
    return 0;
}

struct ReconstructOpts {
    std::string holo_path;
    std::string background_path;
    std::string out_path = "phase.fld";
    std::string pgm_path;
    double pgm_lo = std::numeric_limits<double>::quiet_NaN();
    double pgm_hi = std::numeric_limits<double>::quiet_NaN();
    ReconstructParams params;
};

int do_reconstruct(const ReconstructOpts& o) {
    const Hologram obj = load_hologram(o.holo_path);
    const Hologram bg = load_hologram(o.background_path);
    CarrierEstimate carrier;
    const PhaseMap phase = reconstruct_phase(obj, bg, o.params, &carrier);
    write_field_file(o.out_path, phase);
    if (!o.pgm_path.empty()) export_phase_pgm(phase, o.pgm_path, o.pgm_lo, o.pgm_hi);
    std::cout << "carrier " << carrier.fx << " " << carrier.fy << "\n";
    return 0;
}

struct AnalyzeOpts {
    std::string phase_path;
    double threshold_rad = 0.3;
    int min_area_px = 20;
    std::string csv_path = "stats.csv";
};

int do_analyze(const AnalyzeOpts& o, const OpticalConfig& cfg) {
    const PhaseMap phase = load_phase(o.phase_path);
    const LabelMap labels = segment_cells(phase, o.threshold_rad, o.min_area_px);
    const auto stats = cell_statistics(phase, labels, cfg);
    write_stats_csv(stats, o.csv_path);
    std::cout << "cells " << stats.size() << "\n";
    return 0;
}

struct PipelineOpts {
    SimulateOpts sim;
    int stride = 30;
    bool refine = true;
    ReconstructParams params;
    double threshold_rad = 0.3;
    int min_area_px = 20;
};

int do_pipeline(const PipelineOpts& o, const OpticalConfig& cfg) {
    const fs::path dir = o.sim.out_dir;
    int rc = do_simulate(o.sim, cfg);
    if (rc != 0) return rc;

    const fs::path manifest_path = dir / "stack.txt";
    const Manifest m = read_manifest(manifest_path);
    const FocusStack stack = load_stack(manifest_path, m);
    const FocusSelection sel = select_focus(stack, o.stride, o.refine);
    write_tv_csv(sel, stack, (dir / "tv.csv").string());
    std::cout << "selected " << sel.index << " " << stack.defocus_of(sel.index) << "\n";

    // Background hologram at the selected frame's defocus (matched defocus).
    SmearScene empty;
    empty.fov_width = stack.frames[sel.index].width;
    empty.fov_height = stack.frames[sel.index].height;
    const ComplexField flat = render_smear_phase(empty, cfg);
    Hologram bg = record_stbi_hologram(
        propagate_angular_spectrum(flat, stack.defocus_of(sel.index), cfg), cfg);
    bg.defocus_um = stack.defocus_of(sel.index);
    write_field_file((dir / "background.fld").string(), bg);

    CarrierEstimate carrier;
    const PhaseMap phase =
        reconstruct_phase(stack.frames[sel.index], bg, o.params, &carrier);
    write_field_file((dir / "phase.fld").string(), phase);
    export_phase_pgm(phase, (dir / "phase.pgm").string(),
                     std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN());
    std::cout << "carrier " << carrier.fx << " " << carrier.fy << "\n";

    const LabelMap labels = segment_cells(phase, o.threshold_rad, o.min_area_px);
    const auto stats = cell_statistics(phase, labels, cfg);
    write_stats_csv(stats, (dir / "stats.csv").string());
    std::cout << "cells " << stats.size() << "\n";
    return 0;
}

int do_dump(const std::string& path) {
    const FieldFileContent content = read_field_file(path);
    if (const auto* f = std::get_if<ComplexField>(&content)) {
        double amax = 0.0;
        for (const auto& v : f->values) amax = std::max(amax, std::abs(v));
        std::cout << "kind complex_field\nsize " << f->width << " x " << f->height
                  << "\npitch_um " << f->pixel_pitch_um << "\nmax_amplitude " << amax << "\n";
    } else if (const auto* hg = std::get_if<Hologram>(&content)) {
        double lo = hg->values[0], hi = hg->values[0], sum = 0.0;
        for (double v : hg->values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        std::cout << "kind hologram\nsize " << hg->width << " x " << hg->height
                  << "\npitch_um " << hg->pixel_pitch_um << "\ndefocus_um " << hg->defocus_um
                  << "\nrange " << lo << " .. " << hi << "\nmean "
                  << sum / static_cast<double>(hg->size()) << "\n";
    } else if (const auto* p = std::get_if<PhaseMap>(&content)) {
        size_t valid = 0;
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (size_t i = 0; i < p->size(); ++i) {
            if (!p->mask[i]) continue;
            ++valid;
            if (first) {
                lo = hi = p->values[i];
                first = false;
            } else {
                lo = std::min(lo, p->values[i]);
                hi = std::max(hi, p->values[i]);
            }
        }
        std::cout << "kind phase_map\nsize " << p->width << " x " << p->height
                  << "\npitch_um " << p->pixel_pitch_um << "\nvalid_pixels " << valid
                  << "\nrange " << lo << " .. " << hi << "\n";
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Lateral-shearing digital holographic microscopy toolkit"};
    app.require_subcommand(1);

    OpticalConfig cfg;

    auto* sim = app.add_subcommand("simulate", "Render a scene and record a hologram stack");
    SimulateOpts sim_opts;
    sim->add_option("--scene", sim_opts.scene_path, "Scene description file")->required();
    sim->add_option("--out", sim_opts.out_dir, "Output directory")->capture_default_str();
    sim->add_option("--stack", sim_opts.stack, "Number of frames")->capture_default_str();
    sim->add_option("--zrange", sim_opts.zrange_um, "Defocus half-range, µm")
        ->capture_default_str();
    sim->add_option("--snr-db", sim_opts.snr_db, "Additive Gaussian noise SNR (dB)");
    sim->add_option("--seed", sim_opts.seed, "Noise seed")->capture_default_str();
    add_optics_flags(sim, cfg);

    auto* foc = app.add_subcommand("focus", "Pick the best-focused frame by total variation");
    FocusOpts foc_opts;
    foc->add_option("--stack", foc_opts.stack_path, "Stack manifest file")->required();
    foc->add_option("--stride", foc_opts.stride, "Evaluate every stride-th frame")
        ->capture_default_str();
    foc->add_flag("--refine,!--no-refine", foc_opts.refine,
                  "Also evaluate every frame within ±stride of the coarse winner");
    foc->add_option("--csv", foc_opts.csv_path, "Write the TV curve CSV here");

    auto* rec = app.add_subcommand("reconstruct", "Recover quantitative phase from a hologram");
    ReconstructOpts rec_opts;
    rec->add_option("--holo", rec_opts.holo_path, "Object hologram file")->required();
    rec->add_option("--background", rec_opts.background_path,
                    "Background hologram at matched defocus")
        ->required();
    rec->add_option("--out", rec_opts.out_path, "Output phase map file")
        ->capture_default_str();
    rec->add_option("--pgm", rec_opts.pgm_path, "Also render the phase to a 16-bit PGM");
    rec->add_option("--pgm-lo", rec_opts.pgm_lo, "PGM black level (default: min)");
    rec->add_option("--pgm-hi", rec_opts.pgm_hi, "PGM white level (default: max)");
    rec->add_option("--dc-exclusion", rec_opts.params.dc_exclusion,
                    "Carrier search exclusion radius, cycles/px")
        ->capture_default_str();
    rec->add_option("--radius-frac", rec_opts.params.radius_frac,
                    "Order window radius as a fraction of the carrier distance")
        ->capture_default_str();
    rec->add_option("--iterations", rec_opts.params.iterations,
                    "Conjugate-order suppression rounds")
        ->capture_default_str();

    auto* ana = app.add_subcommand("analyze", "Segment cells and report statistics");
    AnalyzeOpts ana_opts;
    ana->add_option("--phase", ana_opts.phase_path, "Background-subtracted phase map file")
        ->required();
    ana->add_option("--threshold-rad", ana_opts.threshold_rad, "Segmentation threshold")
        ->capture_default_str();
    ana->add_option("--min-area", ana_opts.min_area_px, "Minimum component area, px")
        ->capture_default_str();
    ana->add_option("--csv", ana_opts.csv_path, "Statistics CSV path")->capture_default_str();
    add_optics_flags(ana, cfg);

    auto* pip = app.add_subcommand("pipeline", "simulate + focus + reconstruct + analyze");
    PipelineOpts pip_opts;
    pip->add_option("--scene", pip_opts.sim.scene_path, "Scene description file")->required();
    pip->add_option("--out", pip_opts.sim.out_dir, "Output directory")->capture_default_str();
    pip->add_option("--stack", pip_opts.sim.stack, "Number of frames")->capture_default_str();
    pip->add_option("--zrange", pip_opts.sim.zrange_um, "Defocus half-range, µm")
        ->capture_default_str();
    pip->add_option("--snr-db", pip_opts.sim.snr_db, "Additive Gaussian noise SNR (dB)");
    pip->add_option("--seed", pip_opts.sim.seed, "Noise seed")->capture_default_str();
    pip->add_option("--stride", pip_opts.stride, "Focus search stride")->capture_default_str();
    pip->add_flag("--refine,!--no-refine", pip_opts.refine, "Refine the focus search");
    pip->add_option("--dc-exclusion", pip_opts.params.dc_exclusion,
                    "Carrier search exclusion radius, cycles/px")
        ->capture_default_str();
    pip->add_option("--radius-frac", pip_opts.params.radius_frac,
                    "Order window radius fraction")
        ->capture_default_str();
    pip->add_option("--iterations", pip_opts.params.iterations,
                    "Conjugate-order suppression rounds")
        ->capture_default_str();
    pip->add_option("--threshold-rad", pip_opts.threshold_rad, "Segmentation threshold")
        ->capture_default_str();
    pip->add_option("--min-area", pip_opts.min_area_px, "Minimum component area, px")
        ->capture_default_str();
    add_optics_flags(pip, cfg);

    auto* dmp = app.add_subcommand("dump", "Print a summary of a field file");
    std::string dump_path;
    dmp->add_option("--file", dump_path, "File to inspect")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("stbiholo");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return do_simulate(sim_opts, cfg);
        if (foc->parsed()) return do_focus(foc_opts);
        if (rec->parsed()) return do_reconstruct(rec_opts);
        if (ana->parsed()) return do_analyze(ana_opts, cfg);
        if (pip->parsed()) return do_pipeline(pip_opts, cfg);
        if (dmp->parsed()) return do_dump(dump_path);
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace stbiholo
