#include "stbiholo/autofocus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "stbiholo/gradient.hpp"
#include "stbiholo/parallel.hpp"

namespace stbiholo {

double total_variation(const Hologram& h) {
    const Gradient g = gradient_forward(h.values, h.width, h.height);
    double tv = 0.0;
    for (size_t i = 0; i < g.gx.size(); ++i)
        tv += std::hypot(g.gx[i], g.gy[i]);
    return tv;
}

double total_variation_aniso(const Hologram& h) {
    const Gradient g = gradient_forward(h.values, h.width, h.height);
    double tv = 0.0;
    for (size_t i = 0; i < g.gx.size(); ++i)
        tv += std::abs(g.gx[i]) + std::abs(g.gy[i]);
    return tv;
}

FocusSelection select_focus(const FocusStack& stack, int stride, bool refine) {
    if (stack.frames.empty())
        throw validation_error("select_focus: empty stack");
    if (stride < 1)
        throw validation_error("select_focus: stride must be >= 1");

    const int n = stack.size();
    std::set<int> wanted;
    for (int i = 0; i < n; i += stride) wanted.insert(i);

    std::vector<double> tv(n, -1.0);
    auto evaluate = [&](const std::set<int>& idx) {
        std::vector<int> todo;
        for (int i : idx)
            if (tv[i] < 0.0) todo.push_back(i);
        parallel_for(static_cast<int>(todo.size()),
                     [&](int k) { tv[todo[k]] = total_variation(stack.frames[todo[k]]); });
    };
    // Argmax over evaluated frames; ties go to the lowest index.
    auto argmax = [&]() {
        int best = -1;
        for (int i = 0; i < n; ++i)
            if (tv[i] >= 0.0 && (best < 0 || tv[i] > tv[best])) best = i;
        return best;
    };

    evaluate(wanted);
    int best = argmax();
    if (refine) {
        std::set<int> window;
        for (int i = std::max(0, best - stride); i <= std::min(n - 1, best + stride); ++i)
            window.insert(i);
        evaluate(window);
        best = argmax();
    }

    FocusSelection sel;
    sel.index = best;
    for (int i = 0; i < n; ++i)
        if (tv[i] >= 0.0) sel.curve.emplace_back(i, tv[i]);
    return sel;
}

double mean_phase(const PhaseMap& p, const std::vector<uint8_t>& mask) {
    if (!mask.empty() && mask.size() != p.size())
        throw validation_error("mean_phase: mask size does not match the phase map");
    double sum = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p.mask[i] == 0) continue;
        if (!mask.empty() && mask[i] == 0) continue;
        sum += p.values[i];
        ++count;
    }
    if (count == 0)
        throw validation_error("mean_phase: empty mask");
    return sum / static_cast<double>(count);
}

void write_tv_csv(const FocusSelection& sel, const FocusStack& stack, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write TV curve: " + path);
    out << "index,defocus_um,tv\n";
    out.precision(17);
    for (const auto& [index, tv] : sel.curve)
        out << index << "," << stack.defocus_of(index) << "," << tv << "\n";
    if (!out) throw io_error("write failed: " + path);
}

} // namespace stbiholo
